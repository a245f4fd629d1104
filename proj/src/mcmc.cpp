#include "arspi/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "arspi/csv.hpp"
#include "arspi/distributions.hpp"
#include "arspi/errors.hpp"

namespace arspi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Transform { Identity, Log, Atanh };

// Coordinate transforms in ArspiParams field order: positives move to the
// log scale, the (-1,1) parameters to the inverse-tanh scale.
constexpr std::array<Transform, ArspiParams::kCount> kTransforms = {
    Transform::Identity,  // beta1
    Transform::Atanh,     // beta2
    Transform::Log,       // sigma
    Transform::Identity,  // alpha
    Transform::Atanh,     // phi
    Transform::Log,       // nu
    Transform::Log,       // sigma_beta
    Transform::Log,       // nu1
    Transform::Log,       // nu2
};

double to_unconstrained(double theta, Transform tf) {
    switch (tf) {
        case Transform::Identity: return theta;
        case Transform::Log: return std::log(theta);
        case Transform::Atanh: return std::atanh(theta);
    }
    return theta;
}

double to_constrained(double z, Transform tf) {
    switch (tf) {
        case Transform::Identity: return z;
        case Transform::Log: return std::exp(z);
        case Transform::Atanh: return std::tanh(z);
    }
    return z;
}

// ln |d theta / d z|. The tanh form is evaluated as 2 ln(sech z) which stays
// finite and accurate for any representable z.
double log_jacobian(double z, Transform tf) {
    switch (tf) {
        case Transform::Identity: return 0.0;
        case Transform::Log: return z;
        case Transform::Atanh:
            return 2.0 * (std::numbers::ln2_v<double> - std::abs(z) -
                          std::log1p(std::exp(-2.0 * std::abs(z))));
    }
    return 0.0;
}

ArspiParams constrain(std::span<const double> z) {
    ArspiParams p;
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
        p.set(i, to_constrained(z[i], kTransforms[i]));
    return p;
}

std::vector<double> unconstrain(const ArspiParams& p) {
    std::vector<double> z(ArspiParams::kCount);
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
        z[i] = to_unconstrained(p.get(i), kTransforms[i]);
    return z;
}

double total_log_jacobian(std::span<const double> z) {
    double total = 0.0;
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
        total += log_jacobian(z[i], kTransforms[i]);
    return total;
}

// Posterior density in transformed coordinates with single-entry caches for
// the two likelihood blocks. Single-site proposals change one coordinate at
// a time, so per sweep only the alpha/phi moves pay the O(T) Bernoulli scan
// and the hyperparameter moves reduce to a prior-only ratio for free.
class CachedTarget {
  public:
    CachedTarget(const LikelihoodEval& lik, bool prior_only)
        : lik_(&lik), prior_only_(prior_only) {}

    double operator()(std::span<const double> z) const {
        const ArspiParams p = constrain(z);
        const double prior = log_prior(p);
        if (prior == kNegInf) return kNegInf;
        double value = prior + total_log_jacobian(z);
        if (!prior_only_) {
            if (!has_wet_ || p.beta1 != wet_key_[0] || p.beta2 != wet_key_[1] ||
                p.sigma != wet_key_[2]) {
                wet_key_ = {p.beta1, p.beta2, p.sigma};
                wet_value_ = lik_->wet_part(p.beta1, p.beta2, p.sigma);
                has_wet_ = true;
            }
            if (!has_bern_ || p.alpha != bern_key_[0] || p.phi != bern_key_[1]) {
                bern_key_ = {p.alpha, p.phi};
                bern_value_ = lik_->bernoulli_part(p.alpha, p.phi);
                has_bern_ = true;
            }
            value += wet_value_ + bern_value_;
        }
        return std::isnan(value) ? kNegInf : value;
    }

  private:
    const LikelihoodEval* lik_;
    bool prior_only_;
    mutable bool has_wet_ = false, has_bern_ = false;
    mutable std::array<double, 3> wet_key_{};
    mutable std::array<double, 2> bern_key_{};
    mutable double wet_value_ = 0.0, bern_value_ = 0.0;
};

// Data-informed in-support starting point (draw order: beta2, then phi).
ArspiParams initial_params(const MtrSeries& mtr, Rng& rng) {
    ArspiParams p;
    p.beta2 = rng.draw_uniform() - 0.5;
    p.phi = rng.draw_uniform() - 0.5;

    double mean_log = 0.0;
    double sd_log = 1.0;
    std::vector<double> logs;
    logs.reserve(mtr.size());
    for (std::size_t i = 0; i < mtr.size(); ++i)
        if (!mtr.dry_mask[i]) logs.push_back(std::log(mtr.values[i]));
    if (logs.size() >= 2) {
        mean_log = 0.0;
        for (const double v : logs) mean_log += v;
        mean_log /= static_cast<double>(logs.size());
        double ss = 0.0;
        for (const double v : logs) ss += (v - mean_log) * (v - mean_log);
        sd_log = std::sqrt(ss / static_cast<double>(logs.size() - 1));
    }
    p.beta1 = mean_log * (1.0 - p.beta2);
    p.sigma = std::max(sd_log, 1e-3);
    p.alpha = logit(std::clamp(mtr.dry_fraction(), 1e-4, 1.0 - 1e-4));
    p.nu = 10.0;
    p.nu1 = 10.0;
    p.nu2 = 10.0;
    p.sigma_beta = 10.0 / 9.0;  // Inv-Gamma(10, 10) prior mean
    return p;
}

std::size_t param_index(std::string_view name) {
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
        if (ArspiParams::kNames[i] == name) return i;
    throw DomainError("unknown parameter name `" + std::string(name) + "`");
}

}  // namespace

void McmcConfig::validate() const {
    if (n_chains < 1) throw ConfigError("McmcConfig: n_chains must be >= 1");
    if (thin < 1) throw ConfigError("McmcConfig: thin must be >= 1");
    if (burn_in >= iterations) throw ConfigError("McmcConfig: burn_in must be < iterations");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
        throw ConfigError("McmcConfig: target_acceptance must lie in (0, 1)");
    if (adaptation_window < 1) throw ConfigError("McmcConfig: adaptation_window must be >= 1");
    if (retained_per_chain() == 0)
        throw ConfigError("McmcConfig: no draws would be retained; increase iterations");
    if (pi0 && !(*pi0 > 0.0 && *pi0 < 1.0)) throw ConfigError("McmcConfig: pi0 must lie in (0, 1)");
}

std::size_t PosteriorDraws::total_draws() const {
    std::size_t total = 0;
    for (const ChainDraws& c : chains) total += c.draws.size();
    return total;
}

const ArspiParams& PosteriorDraws::draw_at(std::size_t global_index) const {
    for (const ChainDraws& c : chains) {
        if (global_index < c.draws.size()) return c.draws[global_index];
        global_index -= c.draws.size();
    }
    throw IndexOutOfRange("PosteriorDraws::draw_at: index exceeds total draws");
}

double PosteriorDraws::log_posterior_at(std::size_t global_index) const {
    for (const ChainDraws& c : chains) {
        if (global_index < c.log_posterior.size()) return c.log_posterior[global_index];
        global_index -= c.log_posterior.size();
    }
    throw IndexOutOfRange("PosteriorDraws::log_posterior_at: index exceeds total draws");
}

std::vector<double> PosteriorDraws::chain_column(std::size_t chain,
                                                 std::size_t param_index) const {
    if (chain >= chains.size()) throw IndexOutOfRange("PosteriorDraws::chain_column: bad chain");
    std::vector<double> column;
    column.reserve(chains[chain].draws.size());
    for (const ArspiParams& p : chains[chain].draws) column.push_back(p.get(param_index));
    return column;
}

namespace mh {

Result random_walk(const std::function<double(std::span<const double>)>& log_target,
                   std::vector<double> x0, const Options& options, Rng& rng) {
    const std::size_t dim = x0.size();
    if (dim == 0) throw DomainError("random_walk: empty initial point");
    if (options.burn_in >= options.iterations)
        throw ConfigError("random_walk: burn_in must be < iterations");
    if (options.thin < 1) throw ConfigError("random_walk: thin must be >= 1");

    std::vector<double> x = std::move(x0);
    double lp = log_target(x);
    if (!std::isfinite(lp))
        throw NonFiniteLikelihood("random_walk: non-finite log target at the initial point");

    Result result;
    const std::size_t n_retained = (options.iterations - options.burn_in) / options.thin;
    result.retained.reserve(n_retained);
    result.log_target.reserve(n_retained);
    result.acceptance_rate.assign(dim, 0.0);
    result.final_scale.assign(dim, 0.0);

    std::vector<double> log_scale(dim, std::log(options.initial_scale));
    std::vector<std::size_t> batch_accepts(dim, 0);
    std::vector<std::size_t> post_accepts(dim, 0);
    std::size_t batch_number = 0;

    for (std::size_t iter = 1; iter <= options.iterations; ++iter) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double old = x[j];
            x[j] = old + std::exp(log_scale[j]) * rng.draw_normal();
            const double lp_new = log_target(x);
            bool accept = false;
            if (std::isfinite(lp_new)) {
                const double log_ratio = lp_new - lp;
                accept = log_ratio >= 0.0 || std::log(rng.draw_open_uniform()) < log_ratio;
            }
            if (accept) {
                lp = lp_new;
                ++batch_accepts[j];
                if (iter > options.burn_in) ++post_accepts[j];
            } else {
                x[j] = old;
            }
        }

        if (iter <= options.burn_in && iter % options.adaptation_window == 0) {
            ++batch_number;
            const double delta =
                std::min(0.1, 1.0 / std::sqrt(static_cast<double>(batch_number)));
            for (std::size_t j = 0; j < dim; ++j) {
                const double rate = static_cast<double>(batch_accepts[j]) /
                                    static_cast<double>(options.adaptation_window);
                log_scale[j] += rate > options.target_acceptance ? delta : -delta;
                batch_accepts[j] = 0;
            }
        }

        if (iter > options.burn_in && (iter - options.burn_in) % options.thin == 0) {
            result.retained.push_back(x);
            result.log_target.push_back(lp);
        }
    }

    const double post_steps = static_cast<double>(options.iterations - options.burn_in);
    for (std::size_t j = 0; j < dim; ++j) {
        result.acceptance_rate[j] = static_cast<double>(post_accepts[j]) / post_steps;
        result.final_scale[j] = std::exp(log_scale[j]);
    }
    return result;
}

}  // namespace mh

PosteriorDraws run_chains(const MtrSeries& mtr, const McmcConfig& cfg) {
    cfg.validate();
    const LikelihoodEval lik(mtr, cfg.pi0);

    mh::Options options;
    options.iterations = cfg.iterations;
    options.burn_in = cfg.burn_in;
    options.thin = cfg.thin;
    options.target_acceptance = cfg.target_acceptance;
    options.adaptation_window = cfg.adaptation_window;

    PosteriorDraws draws;
    draws.chains.resize(cfg.n_chains);
    for (std::size_t chain = 0; chain < cfg.n_chains; ++chain) {
        Rng rng(cfg.base_seed, chain);
        const ArspiParams start = initial_params(mtr, rng);
        const CachedTarget target(lik, cfg.prior_only);
        const mh::Result result = mh::random_walk(
            [&target](std::span<const double> z) { return target(z); }, unconstrain(start),
            options, rng);

        ChainDraws& out = draws.chains[chain];
        out.draws.reserve(result.retained.size());
        out.log_posterior.reserve(result.retained.size());
        for (std::size_t k = 0; k < result.retained.size(); ++k) {
            const std::span<const double> z(result.retained[k]);
            out.draws.push_back(constrain(z));
            // Report the untransformed-space log posterior: target minus the
            // change-of-variables Jacobian.
            out.log_posterior.push_back(result.log_target[k] - total_log_jacobian(z));
        }
        for (std::size_t j = 0; j < ArspiParams::kCount; ++j)
            out.acceptance_rate[j] = result.acceptance_rate[j];
    }
    return draws;
}

double psrf(const PosteriorDraws& draws, std::string_view param) {
    const std::size_t index = param_index(param);
    const std::size_t m = draws.chains.size();
    if (m < 2) throw InsufficientChains("psrf: need at least 2 chains");
    const std::size_t n = draws.chains.front().draws.size();
    for (const ChainDraws& c : draws.chains)
        if (c.draws.size() != n)
            throw InsufficientChains("psrf: chains must have equal retained counts");
    if (n < 10) throw InsufficientChains("psrf: need at least 10 retained draws per chain");

    std::vector<double> chain_mean(m, 0.0);
    std::vector<double> chain_var(m, 0.0);
    double grand_mean = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        const std::vector<double> column = draws.chain_column(c, index);
        for (const double v : column) chain_mean[c] += v;
        chain_mean[c] /= static_cast<double>(n);
        for (const double v : column)
            chain_var[c] += (v - chain_mean[c]) * (v - chain_mean[c]);
        chain_var[c] /= static_cast<double>(n - 1);
        grand_mean += chain_mean[c];
    }
    grand_mean /= static_cast<double>(m);

    double b_over_n = 0.0;  // between-chain variance / n
    for (std::size_t c = 0; c < m; ++c)
        b_over_n += (chain_mean[c] - grand_mean) * (chain_mean[c] - grand_mean);
    b_over_n /= static_cast<double>(m - 1);

    double w = 0.0;
    for (std::size_t c = 0; c < m; ++c) w += chain_var[c];
    w /= static_cast<double>(m);
    if (w == 0.0) throw DegenerateSeries("psrf: zero within-chain variance");

    const double nd = static_cast<double>(n);
    const double v_hat = (nd - 1.0) / nd * w + b_over_n;
    return std::sqrt(v_hat / w);
}

DicResult dic_from_deviances(std::span<const double> deviances, double d_at_mean) {
    if (deviances.empty()) throw EmptyPosterior("dic: no retained draws");
    double d_bar = 0.0;
    for (const double d : deviances) d_bar += d;
    d_bar /= static_cast<double>(deviances.size());

    DicResult result;
    result.d_bar = d_bar;
    result.d_at_mean = d_at_mean;
    result.p_d = d_bar - d_at_mean;
    result.dic = d_bar + result.p_d;
    return result;
}

DicResult dic(const PosteriorDraws& draws, const MtrSeries& mtr, std::optional<double> pi0) {
    const std::size_t total = draws.total_draws();
    if (total == 0) throw EmptyPosterior("dic: no retained draws");
    const LikelihoodEval lik(mtr, pi0);

    std::vector<double> deviances;
    deviances.reserve(total);
    ArspiParams mean;
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i) mean.set(i, 0.0);
    for (const ChainDraws& c : draws.chains) {
        for (const ArspiParams& p : c.draws) {
            deviances.push_back(-2.0 * lik(p));
            for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
                mean.set(i, mean.get(i) + p.get(i));
        }
    }
    for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
        mean.set(i, mean.get(i) / static_cast<double>(total));
    return dic_from_deviances(deviances, -2.0 * lik(mean));
}

void export_traces(std::ostream& out, const PosteriorDraws& draws) {
    if (draws.total_draws() == 0) throw EmptyPosterior("export_traces: no retained draws");
    // ArspiParams field indices sorted by parameter name.
    std::array<std::size_t, ArspiParams::kCount> order{};
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [](std::size_t a, std::size_t b) { return ArspiParams::kNames[a] < ArspiParams::kNames[b]; });

    out << "chain,iteration,param,value\n";
    for (std::size_t c = 0; c < draws.chains.size(); ++c) {
        const ChainDraws& chain = draws.chains[c];
        for (std::size_t k = 0; k < chain.draws.size(); ++k) {
            for (const std::size_t j : order) {
                out << (c + 1) << ',' << (k + 1) << ',' << ArspiParams::kNames[j] << ','
                    << csv::format_double(chain.draws[k].get(j)) << '\n';
            }
        }
    }
}

void write_posterior_csv(std::ostream& out, const PosteriorDraws& draws) {
    out << "chain,iteration," << ArspiParams::kCsvHeader << ",log_posterior\n";
    for (std::size_t c = 0; c < draws.chains.size(); ++c) {
        const ChainDraws& chain = draws.chains[c];
        for (std::size_t k = 0; k < chain.draws.size(); ++k) {
            out << (c + 1) << ',' << (k + 1) << ',' << chain.draws[k].to_csv_row() << ','
                << csv::format_double(chain.log_posterior[k]) << '\n';
        }
    }
}

PosteriorDraws read_posterior_csv(std::istream& in) {
    const std::string expected_header =
        "chain,iteration," + std::string(ArspiParams::kCsvHeader) + ",log_posterior";
    PosteriorDraws draws;
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        if (row == 1) {
            if (csv::trim(line) != expected_header)
                throw ParseError(ParseError::Kind::MalformedRow, row, "bad posterior CSV header");
            continue;
        }
        const auto fields = csv::split_line(line);
        if (fields.size() != 2 + ArspiParams::kCount + 1)
            throw ParseError(ParseError::Kind::MalformedRow, row, "expected 12 fields");

        const auto chain_id = static_cast<std::size_t>(csv::parse_double_field(fields[0], row));
        if (chain_id < 1)
            throw ParseError(ParseError::Kind::MalformedRow, row, "chain ids are 1-based");
        if (chain_id > draws.chains.size()) {
            if (chain_id != draws.chains.size() + 1)
                throw ParseError(ParseError::Kind::MalformedRow, row,
                                 "chain ids must be contiguous and ascending");
            draws.chains.emplace_back();
        }

        ArspiParams p;
        for (std::size_t i = 0; i < ArspiParams::kCount; ++i)
            p.set(i, csv::parse_double_field(fields[2 + i], row));
        if (!p.in_support())
            throw ParseError(ParseError::Kind::MalformedRow, row,
                             "draw violates parameter support");
        ChainDraws& chain = draws.chains[chain_id - 1];
        chain.draws.push_back(p);
        chain.log_posterior.push_back(csv::parse_double_field(fields[11], row));
    }
    if (draws.total_draws() == 0) throw ParseError(ParseError::Kind::EmptyFile, 1, "no draws");
    return draws;
}

}  // namespace arspi
