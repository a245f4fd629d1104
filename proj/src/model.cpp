#include "arspi/model.hpp"

#include <cmath>
#include <limits>

#include "arspi/csv.hpp"
#include "arspi/distributions.hpp"
#include "arspi/errors.hpp"

namespace arspi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454836;

}  // namespace

double ArspiParams::get(std::size_t index) const {
    switch (index) {
        case 0: return beta1;
        case 1: return beta2;
        case 2: return sigma;
        case 3: return alpha;
        case 4: return phi;
        case 5: return nu;
        case 6: return sigma_beta;
        case 7: return nu1;
        case 8: return nu2;
        default: throw IndexOutOfRange("ArspiParams::get: index must be < 9");
    }
}

void ArspiParams::set(std::size_t index, double value) {
    switch (index) {
        case 0: beta1 = value; return;
        case 1: beta2 = value; return;
        case 2: sigma = value; return;
        case 3: alpha = value; return;
        case 4: phi = value; return;
        case 5: nu = value; return;
        case 6: sigma_beta = value; return;
        case 7: nu1 = value; return;
        case 8: nu2 = value; return;
        default: throw IndexOutOfRange("ArspiParams::set: index must be < 9");
    }
}

bool ArspiParams::in_support() const {
    for (std::size_t i = 0; i < kCount; ++i)
        if (!std::isfinite(get(i))) return false;
    return std::abs(beta2) < 1.0 && std::abs(phi) < 1.0 && sigma > 0.0 && nu > 0.0 &&
           sigma_beta > 0.0 && nu1 > 0.0 && nu2 > 0.0;
}

void ArspiParams::validate() const {
    if (!in_support()) throw DomainError("ArspiParams: parameters violate support constraints");
}

std::string ArspiParams::to_csv_row() const {
    std::string row;
    for (std::size_t i = 0; i < kCount; ++i) {
        if (i != 0) row += ',';
        row += csv::format_double(get(i));
    }
    return row;
}

ArspiParams ArspiParams::from_csv_row(std::string_view row) {
    const auto fields = csv::split_line(row);
    if (fields.size() != kCount) throw DomainError("ArspiParams: expected 9 CSV fields");
    ArspiParams p;
    for (std::size_t i = 0; i < kCount; ++i) {
        double value = 0.0;
        try {
            value = csv::parse_double_field(fields[i], 0);
        } catch (const ParseError&) {
            throw DomainError("ArspiParams: bad numeric field `" + std::string(fields[i]) + "`");
        }
        p.set(i, value);
    }
    p.validate();
    return p;
}

PiPath pi_path(const ArspiParams& p, std::size_t length, double pi0) {
    p.validate();
    if (length < 1) throw DomainError("pi_path: length must be >= 1");
    if (!(pi0 > 0.0 && pi0 < 1.0)) throw DomainError("pi_path: pi0 must lie in (0, 1)");

    PiPath path;
    path.values.resize(length);
    path.logits.resize(length);
    path.logits[0] = logit(pi0);
    path.values[0] = pi0;
    constexpr double kLo = std::numeric_limits<double>::min();
    const double kHi = 1.0 - std::numeric_limits<double>::epsilon();
    for (std::size_t t = 1; t < length; ++t) {
        path.logits[t] = p.alpha + p.phi * path.logits[t - 1];
        // The logit is authoritative; the probability is clamped away from
        // the endpoints so the (0,1) invariant survives rounding.
        path.values[t] = std::min(std::max(inv_logit(path.logits[t]), kLo), kHi);
    }
    return path;
}

double resolve_initial_logit(const MtrSeries& mtr, std::optional<double> pi0, double alpha,
                             double phi) {
    if (pi0) {
        if (!(*pi0 > 0.0 && *pi0 < 1.0)) throw DomainError("pi0 must lie in (0, 1)");
        return logit(*pi0);
    }
    const double dry = mtr.dry_fraction();
    if (dry > 0.0 && dry < 1.0) return logit(dry);
    return alpha / (1.0 - phi);
}

LikelihoodEval::LikelihoodEval(const MtrSeries& mtr, std::optional<double> pi0)
    : length_(mtr.size()), pi0_(pi0), dry_(mtr.dry_mask) {
    if (length_ < 2) throw DomainError("LikelihoodEval: need at least 2 windows");
    if (pi0 && !(*pi0 > 0.0 && *pi0 < 1.0)) throw DomainError("pi0 must lie in (0, 1)");
    dry_fraction_ = mtr.dry_fraction();

    std::vector<double> a;  // ln y_t for wet t >= 2
    std::vector<double> b;  // ln r_{t-1}, encoded
    a.reserve(length_);
    b.reserve(length_);
    for (std::size_t i = 1; i < length_; ++i) {
        if (dry_[i]) continue;
        a.push_back(std::log(mtr.values[i]));
        b.push_back(std::log(mtr.encoded_values[i - 1]));
    }
    n_wet_ = a.size();
    if (n_wet_ == 0) return;

    for (std::size_t i = 0; i < n_wet_; ++i) {
        mean_a_ += a[i];
        mean_b_ += b[i];
        sum_a_ += a[i];
    }
    mean_a_ /= static_cast<double>(n_wet_);
    mean_b_ /= static_cast<double>(n_wet_);
    for (std::size_t i = 0; i < n_wet_; ++i) {
        const double da = a[i] - mean_a_;
        const double db = b[i] - mean_b_;
        saa_ += da * da;
        sbb_ += db * db;
        sab_ += da * db;
    }
}

double LikelihoodEval::wet_part(double beta1, double beta2, double sigma) const {
    if (n_wet_ == 0) return 0.0;
    const double n = static_cast<double>(n_wet_);
    const double offset = mean_a_ - beta1 - beta2 * mean_b_;
    const double rss = saa_ - 2.0 * beta2 * sab_ + beta2 * beta2 * sbb_ + n * offset * offset;
    return -sum_a_ - n * std::log(sigma) - 0.5 * n * kLogTwoPi - rss / (2.0 * sigma * sigma);
}

double LikelihoodEval::initial_logit(double alpha, double phi) const {
    if (pi0_) return logit(*pi0_);
    if (dry_fraction_ > 0.0 && dry_fraction_ < 1.0) return logit(dry_fraction_);
    return alpha / (1.0 - phi);
}

double LikelihoodEval::bernoulli_part(double alpha, double phi) const {
    double l = initial_logit(alpha, phi);
    double total = 0.0;
    for (std::size_t i = 1; i < length_; ++i) {
        l = alpha + phi * l;
        // log pi_t when dry, log(1 - pi_t) when wet; both via the stable
        // log-sigmoid so extreme logits stay finite.
        total += dry_[i] ? log_inv_logit(l) : log_inv_logit(-l);
    }
    return total;
}

double LikelihoodEval::operator()(const ArspiParams& p) const {
    p.validate();
    const double total = wet_part(p.beta1, p.beta2, p.sigma) + bernoulli_part(p.alpha, p.phi);
    if (!std::isfinite(total))
        throw NonFiniteLikelihood("log_likelihood: non-finite value at valid parameters");
    return total;
}

double log_likelihood(const ArspiParams& p, const MtrSeries& mtr, double pi0) {
    return LikelihoodEval(mtr, pi0)(p);
}

double log_likelihood(const ArspiParams& p, const MtrSeries& mtr) {
    return LikelihoodEval(mtr)(p);
}

double log_prior(const ArspiParams& p) {
    if (!p.in_support()) return kNegInf;
    double lp = 0.0;
    lp += normal_logpdf(p.beta1, 0.0, p.sigma_beta);
    lp += std::log(0.5);  // beta2 ~ U(-1, 1)
    lp += normal_logpdf(p.alpha, 0.0, 0.5);  // N(0, 0.25) with 0.25 the variance
    lp += std::log(0.5);  // phi ~ U(-1, 1)
    lp += inv_gamma_logpdf(p.sigma, 0.5 * p.nu, 0.5 * p.nu);
    lp += exponential_logpdf(p.nu, 0.1);
    lp += inv_gamma_logpdf(p.sigma_beta, p.nu1, p.nu2);
    lp += exponential_logpdf(p.nu1, 0.1);
    lp += exponential_logpdf(p.nu2, 0.1);
    return lp;
}

double log_posterior(const ArspiParams& p, const MtrSeries& mtr, double pi0) {
    const double prior = log_prior(p);
    if (prior == kNegInf) return kNegInf;
    return prior + log_likelihood(p, mtr, pi0);
}

double log_posterior(const ArspiParams& p, const MtrSeries& mtr) {
    const double prior = log_prior(p);
    if (prior == kNegInf) return kNegInf;
    return prior + log_likelihood(p, mtr);
}

MtrSeries simulate_series(const ArspiParams& p, std::size_t length, double pi0, double r0,
                          Rng& rng) {
    p.validate();
    if (length < 1) throw DomainError("simulate_series: length must be >= 1");
    if (!(pi0 > 0.0 && pi0 < 1.0)) throw DomainError("simulate_series: pi0 must lie in (0, 1)");
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("simulate_series: r0 must be > 0");

    std::vector<double> raw(length);
    double l = logit(pi0);
    double r_prev = r0;
    for (std::size_t t = 0; t < length; ++t) {
        l = p.alpha + p.phi * l;
        const bool dry = rng.draw_bernoulli(inv_logit(l));
        if (dry) {
            raw[t] = 0.0;
            r_prev = 1.0;
        } else {
            raw[t] = rng.draw_lognormal(p.beta1 + p.beta2 * std::log(r_prev), p.sigma);
            r_prev = raw[t];
        }
    }
    return MtrSeries::from_raw(1, 0, 1900, 1, std::move(raw));
}

}  // namespace arspi
