#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "arspi/index_series.hpp"
#include "arspi/mcmc.hpp"

namespace arspi {

// Default posterior-predictive sample size M: one predictive draw per
// selected posterior draw.
inline constexpr std::size_t kDefaultPredictiveSampleSize = 45000;

// Predictive workers use RNG stream = kPredictiveStreamBase + t, disjoint
// from the MCMC chain streams (small integers).
inline constexpr std::uint64_t kPredictiveStreamBase = std::uint64_t{1} << 32;

struct PredictiveSample {
    std::size_t time_index = 0;   // 1-based window position, >= 2
    std::vector<double> draws;    // encoded convention: dry draw = 1
};

// Maps predictive draw j of M onto a retained posterior draw index:
// identity when M equals the total, an equally-spaced subsample when
// M is smaller, cyclic reuse when M is larger.
std::size_t select_draw_index(std::size_t j, std::size_t m, std::size_t total);

// One-step posterior-predictive sample of the MTR at window t, conditioning
// on the OBSERVED encoded r_{t-1}: for each selected posterior draw theta,
// Bernoulli(pi_t(theta)) chooses the dry spike at 1, otherwise
// lognormal(beta1 + beta2 ln r_{t-1}, sigma). pi_t comes from the logit
// recursion anchored by resolve_initial_logit (empty pi0 = default policy).
PredictiveSample predictive_draws(const PosteriorDraws& draws, const MtrSeries& mtr,
                                  std::size_t t, std::size_t m, Rng& rng,
                                  std::optional<double> pi0 = std::nullopt);

// Fraction of draws <= x (right-continuous empirical CDF).
double empirical_cdf(const PredictiveSample& sample, double x);

// ARSPI_t = Phi^{-1}(clamp(F_hat(r_t), 1/(2M), 1 - 1/(2M))) for t = 2..T;
// the first window has no lag and is omitted. Every window t consumes its
// own RNG stream keyed by (seed, t), so the result is independent of
// evaluation order and reproducible draw-for-draw by predictive_draws with
// Rng(seed, kPredictiveStreamBase + t).
IndexSeries arspi_series(const PosteriorDraws& draws, const MtrSeries& mtr, std::size_t m,
                         std::uint64_t seed, std::optional<double> pi0 = std::nullopt);

}  // namespace arspi
