#include "arspi/predictive.hpp"

#include <cmath>

#include "arspi/distributions.hpp"
#include "arspi/errors.hpp"

namespace arspi {

namespace {

// Draws one predictive MTR value given the dry-probability pi_t and the
// slab's log-location; consumption order (uniform, then the lognormal's
// normals when wet) is part of the reproducibility contract.
double simulate_one(const ArspiParams& p, double pi_t, double log_location, Rng& rng) {
    if (rng.draw_uniform() < pi_t) return 1.0;
    return rng.draw_lognormal(log_location, p.sigma);
}

void check_inputs(const PosteriorDraws& draws, const MtrSeries& mtr, std::size_t m) {
    if (draws.total_draws() == 0) throw EmptyPosterior("predictive: no posterior draws");
    if (m < 1) throw DomainError("predictive: M must be >= 1");
    if (mtr.size() < 2) throw DomainError("predictive: need at least 2 windows");
}

}  // namespace

std::size_t select_draw_index(std::size_t j, std::size_t m, std::size_t total) {
    if (m == total) return j;
    if (m < total) return (j * total) / m;
    return j % total;
}

PredictiveSample predictive_draws(const PosteriorDraws& draws, const MtrSeries& mtr,
                                  std::size_t t, std::size_t m, Rng& rng,
                                  std::optional<double> pi0) {
    check_inputs(draws, mtr, m);
    if (t < 2 || t > mtr.size())
        throw IndexOutOfRange("predictive_draws: t must lie in [2, series length]");

    const std::size_t total = draws.total_draws();
    const double ln_prev = std::log(mtr.encoded_values[t - 2]);

    PredictiveSample sample;
    sample.time_index = t;
    sample.draws.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const ArspiParams& p = draws.draw_at(select_draw_index(j, m, total));
        double l = resolve_initial_logit(mtr, pi0, p.alpha, p.phi);
        for (std::size_t step = 2; step <= t; ++step) l = p.alpha + p.phi * l;
        sample.draws[j] =
            simulate_one(p, inv_logit(l), p.beta1 + p.beta2 * ln_prev, rng);
    }
    return sample;
}

double empirical_cdf(const PredictiveSample& sample, double x) {
    if (sample.draws.empty()) throw DomainError("empirical_cdf: empty sample");
    std::size_t count = 0;
    for (const double d : sample.draws) count += d <= x ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(sample.draws.size());
}

IndexSeries arspi_series(const PosteriorDraws& draws, const MtrSeries& mtr, std::size_t m,
                         std::uint64_t seed, std::optional<double> pi0) {
    check_inputs(draws, mtr, m);
    const std::size_t total = draws.total_draws();
    const std::size_t n = mtr.size();

    std::vector<double> ln_prev(n);  // ln r_{t-1} for window index i = t-1
    for (std::size_t i = 1; i < n; ++i) ln_prev[i] = std::log(mtr.encoded_values[i - 1]);

    std::vector<Rng> streams;
    streams.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i)
        streams.emplace_back(seed, kPredictiveStreamBase + static_cast<std::uint64_t>(i) + 1);

    // theta-major iteration: each posterior draw advances its own logit
    // recursion across all windows while every window consumes only its own
    // stream, so per-window draws match a standalone predictive_draws call.
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t j = 0; j < m; ++j) {
        const ArspiParams& p = draws.draw_at(select_draw_index(j, m, total));
        double l = resolve_initial_logit(mtr, pi0, p.alpha, p.phi);
        for (std::size_t i = 1; i < n; ++i) {
            l = p.alpha + p.phi * l;
            const double value =
                simulate_one(p, inv_logit(l), p.beta1 + p.beta2 * ln_prev[i], streams[i - 1]);
            if (value <= mtr.encoded_values[i]) ++counts[i];
        }
    }

    const double md = static_cast<double>(m);
    const double eps = 1.0 / (2.0 * md);
    IndexSeries series;
    series.window = mtr.window;
    series.records.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        const double cdf = static_cast<double>(counts[i]) / md;
        const double value = std_normal_quantile(std::min(std::max(cdf, eps), 1.0 - eps));
        const auto [year, month] = mtr.calendar_at(i);
        series.records.push_back(
            IndexRecord{i + 1, year, month, mtr.values[i], value, classify(value)});
    }
    return series;
}

}  // namespace arspi
