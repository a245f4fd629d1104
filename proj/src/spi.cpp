#include "arspi/spi.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "arspi/errors.hpp"

namespace arspi {

namespace {

double clamp_probability(double u, std::size_t n_total) {
    const double eps = 1.0 / (2.0 * static_cast<double>(n_total));
    return std::min(std::max(u, eps), 1.0 - eps);
}

IndexRecord make_record(const MtrSeries& mtr, std::size_t i, double value) {
    const auto [year, month] = mtr.calendar_at(i);
    return IndexRecord{i + 1, year, month, mtr.values[i], value, classify(value)};
}

}  // namespace

GammaFit fit_gamma_mom(std::span<const double> wet_values, std::size_t n_total) {
    if (wet_values.empty()) throw AllDry("fit_gamma_mom: no wet values");
    if (n_total < wet_values.size())
        throw DomainError("fit_gamma_mom: n_total smaller than wet sample");

    double sum = 0.0;
    double log_sum = 0.0;
    for (const double y : wet_values) {
        if (!(y > 0.0) || !std::isfinite(y))
            throw DegenerateWet("fit_gamma_mom: wet values must be finite and > 0");
        sum += y;
        log_sum += std::log(y);
    }
    const double n = static_cast<double>(wet_values.size());
    const double mean = sum / n;
    const double b = std::log(mean) - log_sum / n;
    if (!(b > 0.0)) throw DegenerateWet("fit_gamma_mom: constant wet sample (B = 0)");

    GammaFit fit;
    fit.b_statistic = b;
    fit.params.shape = (1.0 + std::sqrt(1.0 + 4.0 * b / 3.0)) / (4.0 * b);
    fit.params.scale = mean / fit.params.shape;
    fit.n_wet = wet_values.size();
    fit.n_total = n_total;
    fit.zero_prob =
        1.0 - static_cast<double>(fit.n_wet) / static_cast<double>(std::max<std::size_t>(n_total, 1));
    return fit;
}

GammaFit fit_gamma_mom(const MtrSeries& mtr) {
    std::vector<double> wet;
    wet.reserve(mtr.size());
    for (std::size_t i = 0; i < mtr.size(); ++i)
        if (!mtr.dry_mask[i]) wet.push_back(mtr.values[i]);
    return fit_gamma_mom(wet, mtr.size());
}

double adjusted_cdf(double y, const GammaFit& fit) {
    if (!(y > 0.0)) return fit.zero_prob;
    return fit.zero_prob + (1.0 - fit.zero_prob) * gamma_cdf(y, fit.params);
}

double spi_value(double y, const GammaFit& fit) {
    return std_normal_quantile(clamp_probability(adjusted_cdf(y, fit), fit.n_total));
}

IndexSeries spi_series(const MtrSeries& mtr) {
    const GammaFit fit = fit_gamma_mom(mtr);
    IndexSeries series;
    series.window = mtr.window;
    series.records.reserve(mtr.size());
    for (std::size_t i = 0; i < mtr.size(); ++i)
        series.records.push_back(make_record(mtr, i, spi_value(mtr.values[i], fit)));
    return series;
}

IndexSeries spi_series_by_month(const MtrSeries& mtr) {
    std::array<std::vector<double>, 12> wet_by_month;
    std::array<std::size_t, 12> total_by_month{};
    for (std::size_t i = 0; i < mtr.size(); ++i) {
        const auto month = static_cast<std::size_t>(mtr.calendar_at(i).second - 1);
        ++total_by_month[month];
        if (!mtr.dry_mask[i]) wet_by_month[month].push_back(mtr.values[i]);
    }

    std::array<GammaFit, 12> fits;
    std::array<bool, 12> has_fit{};
    for (std::size_t m = 0; m < 12; ++m) {
        if (total_by_month[m] == 0) continue;
        fits[m] = fit_gamma_mom(wet_by_month[m], total_by_month[m]);
        has_fit[m] = true;
    }

    IndexSeries series;
    series.window = mtr.window;
    series.records.reserve(mtr.size());
    for (std::size_t i = 0; i < mtr.size(); ++i) {
        const auto month = static_cast<std::size_t>(mtr.calendar_at(i).second - 1);
        if (!has_fit[month]) throw AllDry("spi_series_by_month: month stratum has no fit");
        series.records.push_back(make_record(mtr, i, spi_value(mtr.values[i], fits[month])));
    }
    return series;
}

}  // namespace arspi
