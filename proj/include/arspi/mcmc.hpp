#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "arspi/model.hpp"
#include "arspi/rng.hpp"

namespace arspi {

struct McmcConfig {
    std::size_t n_chains = 3;
    std::size_t iterations = 150000;  // per chain
    std::size_t burn_in = 5000;
    std::size_t thin = 10;
    std::uint64_t base_seed = 1893;
    double target_acceptance = 0.44;  // scalar-update optimum
    std::size_t adaptation_window = 50;
    // Sample the prior instead of the posterior (likelihood disabled);
    // used to validate the kernel against known prior marginals.
    bool prior_only = false;
    // Initial dry probability; empty selects the default policy of
    // resolve_initial_logit.
    std::optional<double> pi0;

    void validate() const;  // throws ConfigError
    [[nodiscard]] std::size_t retained_per_chain() const {
        return (iterations - burn_in) / thin;
    }
};

struct ChainDraws {
    std::vector<ArspiParams> draws;
    std::vector<double> log_posterior;  // log prior + log likelihood, untransformed space
    std::array<double, ArspiParams::kCount> acceptance_rate{};  // post burn-in, per block
};

struct PosteriorDraws {
    std::vector<ChainDraws> chains;

    [[nodiscard]] std::size_t total_draws() const;
    // Global chain-major index: chain 0's draws first, then chain 1's, ...
    [[nodiscard]] const ArspiParams& draw_at(std::size_t global_index) const;
    [[nodiscard]] double log_posterior_at(std::size_t global_index) const;
    [[nodiscard]] std::vector<double> chain_column(std::size_t chain,
                                                   std::size_t param_index) const;
};

struct DicResult {
    double d_bar = 0.0;       // posterior mean deviance
    double d_at_mean = 0.0;   // deviance at the coordinatewise posterior mean
    double p_d = 0.0;         // d_bar - d_at_mean
    double dic = 0.0;         // d_bar + p_d
};

// Generic single-site adaptive random-walk Metropolis kernel. The ARSPI
// sampler and the Gaussian smoke tests share this exact code path.
namespace mh {

struct Options {
    std::size_t iterations = 10000;
    std::size_t burn_in = 1000;
    std::size_t thin = 1;
    double target_acceptance = 0.44;
    std::size_t adaptation_window = 50;
    double initial_scale = 0.5;
};

struct Result {
    std::vector<std::vector<double>> retained;  // coordinate vectors
    std::vector<double> log_target;             // target value at each retained point
    std::vector<double> acceptance_rate;        // per coordinate, post burn-in
    std::vector<double> final_scale;            // proposal SD per coordinate
};

// One sweep per iteration updates each coordinate in turn with a normal
// random-walk proposal. Proposal scales adapt by Robbins-Monro steps on the
// log scale at every adaptation_window-th iteration during burn-in and are
// frozen afterwards, which preserves ergodicity. Non-finite proposals are
// rejected; a non-finite initial target value throws NonFiniteLikelihood.
Result random_walk(const std::function<double(std::span<const double>)>& log_target,
                   std::vector<double> x0, const Options& options, Rng& rng);

}  // namespace mh

// Runs n_chains independent chains of single-site random-walk Metropolis on
// the 9-dimensional hierarchical posterior, each on its own RNG stream
// (stream = chain index). Proposals live in transformed coordinates:
// identity for beta1 and alpha, inverse-tanh for beta2 and phi, log for the
// positive parameters; the Jacobian is included in the target, so retained
// draws satisfy the support constraints structurally. Results are
// bit-identical for identical (cfg, data).
PosteriorDraws run_chains(const MtrSeries& mtr, const McmcConfig& cfg);

// Gelman-Rubin potential scale reduction factor for one parameter.
double psrf(const PosteriorDraws& draws, std::string_view param);

// Deviance information criterion: d_bar averages -2 log likelihood over all
// retained draws, d_at_mean evaluates it at the coordinatewise posterior
// mean taken in the untransformed parameter space.
DicResult dic(const PosteriorDraws& draws, const MtrSeries& mtr,
              std::optional<double> pi0 = std::nullopt);

// Assembles a DicResult from precomputed deviances; dic() and the analytic
// toy-model tests share this arithmetic.
DicResult dic_from_deviances(std::span<const double> deviances, double d_at_mean);

// Long-format trace CSV `chain,iteration,param,value`, ordered by
// (chain, iteration, param name); chain and iteration are 1-based.
void export_traces(std::ostream& out, const PosteriorDraws& draws);

// Wide-format posterior CSV
// `chain,iteration,beta1,beta2,sigma,alpha,phi,nu,sigma_beta,nu1,nu2,log_posterior`.
void write_posterior_csv(std::ostream& out, const PosteriorDraws& draws);
PosteriorDraws read_posterior_csv(std::istream& in);

}  // namespace arspi
