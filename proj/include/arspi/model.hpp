#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arspi/ingest.hpp"
#include "arspi/rng.hpp"

namespace arspi {

// Parameters of the spike-and-slab log-normal AR(1) rainfall model plus the
// hierarchical prior's hyperparameters. The slab is
//   y_t | r_{t-1} ~ logNormal(m_t, sigma^2),  m_t = beta1 + beta2 ln r_{t-1},
// and the spike probability follows logit(pi_t) = alpha + phi logit(pi_{t-1}).
struct ArspiParams {
    double beta1 = 0.0;
    double beta2 = 0.0;       // |beta2| < 1
    double sigma = 1.0;       // > 0
    double alpha = 0.0;
    double phi = 0.0;         // |phi| < 1
    double nu = 10.0;         // > 0
    double sigma_beta = 1.0;  // > 0
    double nu1 = 10.0;        // > 0
    double nu2 = 10.0;        // > 0

    static constexpr std::size_t kCount = 9;
    // Field order; also the column order of the CSV row serialization.
    static constexpr std::array<std::string_view, kCount> kNames = {
        "beta1", "beta2", "sigma", "alpha", "phi", "nu", "sigma_beta", "nu1", "nu2"};

    [[nodiscard]] double get(std::size_t index) const;
    void set(std::size_t index, double value);

    [[nodiscard]] bool in_support() const;
    void validate() const;  // throws DomainError when out of support

    [[nodiscard]] std::string to_csv_row() const;
    static ArspiParams from_csv_row(std::string_view row);
    static constexpr std::string_view kCsvHeader =
        "beta1,beta2,sigma,alpha,phi,nu,sigma_beta,nu1,nu2";
};

// Dry-probability path. values[0] = pi0 and
// logit(values[t]) = alpha + phi * logit(values[t-1]) for t >= 1.
// logits carries the same path on the logit scale and is authoritative.
struct PiPath {
    std::vector<double> values;
    std::vector<double> logits;
};

PiPath pi_path(const ArspiParams& p, std::size_t length, double pi0);

// Initial logit of the dry probability. Resolution order: an explicit pi0,
// else the series' empirical dry fraction when it lies strictly in (0,1),
// else the stationary point alpha / (1 - phi) of the current parameters.
double resolve_initial_logit(const MtrSeries& mtr, std::optional<double> pi0, double alpha,
                             double phi);

// Log-likelihood of the model conditioned on the first window: the sum over
// t = 2..T of log pi_t for dry windows and
// log(1 - pi_t) + lognormal_logpdf(y_t; m_t, sigma) for wet ones, with the
// logit recursion anchored at pi_1 = pi0.
//
// Precomputes sufficient statistics of the wet regressions so that the wet
// block costs O(1) per evaluation and the Bernoulli block O(T); with T about
// 1200 and half a million posterior evaluations this is the difference
// between seconds and hours.
class LikelihoodEval {
  public:
    explicit LikelihoodEval(const MtrSeries& mtr, std::optional<double> pi0 = std::nullopt);

    // Slab terms; depends only on (beta1, beta2, sigma).
    [[nodiscard]] double wet_part(double beta1, double beta2, double sigma) const;
    // Spike terms; depends only on (alpha, phi).
    [[nodiscard]] double bernoulli_part(double alpha, double phi) const;

    [[nodiscard]] double operator()(const ArspiParams& p) const;

    [[nodiscard]] std::size_t length() const { return length_; }
    [[nodiscard]] std::size_t n_wet_terms() const { return n_wet_; }
    [[nodiscard]] double dry_fraction() const { return dry_fraction_; }
    [[nodiscard]] double initial_logit(double alpha, double phi) const;

  private:
    std::size_t length_ = 0;
    std::size_t n_wet_ = 0;  // wet terms among t = 2..T
    double dry_fraction_ = 0.0;
    std::optional<double> pi0_;
    // Centered sufficient statistics of (a_t = ln y_t, b_t = ln r_{t-1})
    // over wet terms; centering avoids the cancellation a naive sum-of-
    // squares formulation hits when sigma is small.
    double mean_a_ = 0.0, mean_b_ = 0.0;
    double saa_ = 0.0, sbb_ = 0.0, sab_ = 0.0;
    double sum_a_ = 0.0;
    std::vector<bool> dry_;  // dry_[t-1] for windows t = 1..T
};

double log_likelihood(const ArspiParams& p, const MtrSeries& mtr, double pi0);
double log_likelihood(const ArspiParams& p, const MtrSeries& mtr);

// Hierarchical prior:
//   beta1 ~ N(0, sigma_beta^2), beta2 ~ U(-1,1), alpha ~ N(0, 0.25),
//   phi ~ U(-1,1), sigma ~ Inv-Gamma(nu/2, nu/2), nu ~ Exp(0.1),
//   sigma_beta ~ Inv-Gamma(nu1, nu2), nu1 ~ Exp(0.1), nu2 ~ Exp(0.1).
// N(0, 0.25) is read as variance 0.25; inverse-gamma uses shape/rate;
// Exp(0.1) is rate 0.1. Returns -inf out of support, never throws.
double log_prior(const ArspiParams& p);

double log_posterior(const ArspiParams& p, const MtrSeries& mtr, double pi0);
double log_posterior(const ArspiParams& p, const MtrSeries& mtr);

// Forward simulation of the model. (pi0, r0) is the pre-sample state: every
// generated window first advances the logit recursion, then draws
// Z_t ~ Bernoulli(pi_t), then the slab value when wet.
MtrSeries simulate_series(const ArspiParams& p, std::size_t length, double pi0, double r0,
                          Rng& rng);

}  // namespace arspi
