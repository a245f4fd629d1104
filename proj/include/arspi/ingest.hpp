#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace arspi {

// Monthly precipitation series on a gap-free calendar grid.
struct PrecipSeries {
    int start_year = 1900;
    int start_month = 1;                // 1..12
    std::vector<double> values;         // inches, all >= 0

    [[nodiscard]] std::size_t size() const { return values.size(); }

    // Calendar (year, month) of the 0-based month offset t.
    [[nodiscard]] std::pair<int, int> calendar_at(std::size_t t) const;
};

// Parses `year,month,precip` CSV. Rows must be consecutive calendar months
// and nonnegative finite precipitation. Errors cite 1-based row numbers with
// the header counted as row 1; calendar violations are reported at the row
// of the later record.
PrecipSeries parse_precip_csv(std::istream& in);
PrecipSeries parse_precip_csv(const std::string& text);

// Moving-total rainfall over a trailing window. Element i is the total of
// the `window` consecutive parent months ending at parent index
// origin_index + i, with origin_index = window - 1. Dry windows (total
// exactly zero) are additionally carried in encoded form as 1 so that their
// log contribution vanishes in the autoregressive model.
struct MtrSeries {
    int window = 1;
    std::size_t origin_index = 0;       // parent index of first window end
    int start_year = 1900;              // parent anchor, for calendar lookups
    int start_month = 1;
    std::vector<double> values;         // raw totals, >= 0
    std::vector<bool> dry_mask;         // dry_mask[i] <=> values[i] == 0
    std::vector<double> encoded_values; // dry -> 1, wet -> raw total

    [[nodiscard]] std::size_t size() const { return values.size(); }

    // Calendar (year, month) of the month that closes window i.
    [[nodiscard]] std::pair<int, int> calendar_at(std::size_t i) const;

    [[nodiscard]] double dry_fraction() const;

    // Builds the redundant representation from raw totals (dry = 0).
    static MtrSeries from_raw(int window, std::size_t origin_index, int start_year,
                              int start_month, std::vector<double> raw);

    // Builds from the encoded representation (dry = 1) plus its mask.
    static MtrSeries from_encoded(int window, std::size_t origin_index, int start_year,
                                  int start_month, std::vector<double> encoded,
                                  std::vector<bool> dry_mask);
};

MtrSeries moving_total(const PrecipSeries& series, int window);

// Sample autocorrelation (biased n-denominator estimator, so the implied
// autocovariance sequence stays positive semidefinite) or partial
// autocorrelation via Durbin-Levinson. coefficients[lag] for lag 0..max_lag
// with coefficients[0] = 1 by convention; confidence_band = 1.96 / sqrt(n).
struct AcfResult {
    std::vector<double> coefficients;
    double confidence_band = 0.0;

    [[nodiscard]] std::size_t max_lag() const { return coefficients.size() - 1; }
};

AcfResult acf(std::span<const double> values, std::size_t max_lag);
AcfResult pacf(std::span<const double> values, std::size_t max_lag);

void write_acf_csv(std::ostream& out, const AcfResult& result);

}  // namespace arspi
