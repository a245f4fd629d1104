#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "arspi/index_series.hpp"

namespace arspi {

// Maximal run of index values strictly below a threshold. start_index /
// end_index are positions into IndexSeries::records. For thresholds <= 0
// (the only ones used here) severity and peak are nonnegative and
// severity >= peak.
struct DroughtEvent {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    std::size_t duration = 0;   // end_index - start_index + 1
    double severity = 0.0;      // -(sum of index values over the event)
    double peak = 0.0;          // -(minimum index value over the event)
};

std::vector<DroughtEvent> extract_events(const IndexSeries& index, double threshold);

struct MismatchRecord {
    std::size_t t = 0;
    int year = 0;
    int month = 0;
    double spi = 0.0;
    double arspi = 0.0;
    int type = 0;  // 1 or 2
};

// Type 1: ARSPI > 0 while SPI < -1.5 (model says wet, SPI says severe or
// extreme drought). Type 2: ARSPI < -1.5 while SPI > 0. The two sets are
// disjoint by construction.
struct MismatchReport {
    std::size_t aligned_length = 0;
    std::vector<MismatchRecord> type1;
    std::vector<MismatchRecord> type2;

    [[nodiscard]] double type1_rate() const;
    [[nodiscard]] double type2_rate() const;
};

// Aligns the two series on common (year, month) and window, then applies
// the mismatch taxonomy above. Throws AlignmentError when the windows
// differ or the calendars share no month.
MismatchReport mismatch(const IndexSeries& spi, const IndexSeries& arspi);

enum class Characteristic { Duration, Severity, Peak };

std::string_view characteristic_name(Characteristic c);
double characteristic_value(const DroughtEvent& event, Characteristic c);

// Empirical return period T = (N / n) / (#{C_i > c} / n) in years; +infinity
// when no event exceeds the level. Throws DomainError on an empty event list
// or nonpositive series_years.
double return_period(std::span<const DroughtEvent> events, Characteristic characteristic,
                     double level, double series_years);

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

// Equal-width bins over [min, max]; the last bin closes on the right.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t n_bins);

// Events CSV `start_t,end_t,duration,severity,peak`; start_t / end_t are the
// t values of the corresponding records.
void write_events_csv(std::ostream& out, const IndexSeries& index,
                      std::span<const DroughtEvent> events);

// Mismatch CSV `t,year,month,spi,arspi,type`, chronological.
void write_mismatch_csv(std::ostream& out, const MismatchReport& report);

}  // namespace arspi
