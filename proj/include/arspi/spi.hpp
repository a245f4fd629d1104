#pragma once

#include <cstddef>
#include <span>

#include "arspi/distributions.hpp"
#include "arspi/index_series.hpp"
#include "arspi/ingest.hpp"

namespace arspi {

// Gamma fit for the wet part of an MTR sample plus the dry-month mass.
struct GammaFit {
    GammaParams params;
    double b_statistic = 0.0;  // ln(mean) - mean(ln), > 0 for non-degenerate data
    double zero_prob = 0.0;    // pi, fraction of dry windows
    std::size_t n_wet = 0;
    std::size_t n_total = 0;
};

// Thom's method-of-moments estimator on the wet values:
//   B = ln(mean) - mean(ln), shape = (1 + sqrt(1 + 4B/3)) / (4B),
//   scale = mean / shape.
// Throws AllDry when no wet values exist and DegenerateWet when the wet
// values are all equal (B = 0) or any is nonpositive.
GammaFit fit_gamma_mom(std::span<const double> wet_values, std::size_t n_total);
GammaFit fit_gamma_mom(const MtrSeries& mtr);

// Zero-adjusted CDF: G(y) = pi for dry (y <= 0), pi + (1 - pi) F(y) for wet.
double adjusted_cdf(double y, const GammaFit& fit);

// SPI for one total: Phi^{-1} of the adjusted CDF clamped to
// [eps, 1 - eps] with eps = 1 / (2 n_total), which keeps the index finite.
double spi_value(double y, const GammaFit& fit);

// Classic SPI with a single fit over all windows.
IndexSeries spi_series(const MtrSeries& mtr);

// Stratified variant: one fit per calendar month of the window-end month,
// each with its own clamp eps = 1 / (2 n_month).
IndexSeries spi_series_by_month(const MtrSeries& mtr);

}  // namespace arspi
