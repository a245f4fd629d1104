#include "arspi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "arspi/csv.hpp"
#include "arspi/errors.hpp"

namespace arspi {

std::vector<DroughtEvent> extract_events(const IndexSeries& index, double threshold) {
    if (!std::isfinite(threshold)) throw DomainError("extract_events: threshold must be finite");
    std::vector<DroughtEvent> events;
    const auto& records = index.records;
    std::size_t i = 0;
    while (i < records.size()) {
        if (!(records[i].value < threshold)) {
            ++i;
            continue;
        }
        DroughtEvent event;
        event.start_index = i;
        double sum = 0.0;
        double minimum = std::numeric_limits<double>::infinity();
        while (i < records.size() && records[i].value < threshold) {
            sum += records[i].value;
            minimum = std::min(minimum, records[i].value);
            ++i;
        }
        event.end_index = i - 1;
        event.duration = event.end_index - event.start_index + 1;
        event.severity = -sum;
        event.peak = -minimum;
        events.push_back(event);
    }
    return events;
}

double MismatchReport::type1_rate() const {
    return aligned_length == 0
               ? 0.0
               : static_cast<double>(type1.size()) / static_cast<double>(aligned_length);
}

double MismatchReport::type2_rate() const {
    return aligned_length == 0
               ? 0.0
               : static_cast<double>(type2.size()) / static_cast<double>(aligned_length);
}

MismatchReport mismatch(const IndexSeries& spi, const IndexSeries& arspi) {
    if (spi.window != arspi.window)
        throw AlignmentError("mismatch: series use different accumulation windows");

    std::map<std::pair<int, int>, const IndexRecord*> arspi_by_month;
    for (const IndexRecord& r : arspi.records) arspi_by_month[{r.year, r.month}] = &r;

    MismatchReport report;
    for (const IndexRecord& s : spi.records) {
        const auto it = arspi_by_month.find({s.year, s.month});
        if (it == arspi_by_month.end()) continue;
        const IndexRecord& a = *it->second;
        ++report.aligned_length;
        MismatchRecord record{a.t, a.year, a.month, s.value, a.value, 0};
        if (a.value > 0.0 && s.value < -1.5) {
            record.type = 1;
            report.type1.push_back(record);
        } else if (a.value < -1.5 && s.value > 0.0) {
            record.type = 2;
            report.type2.push_back(record);
        }
    }
    if (report.aligned_length == 0)
        throw AlignmentError("mismatch: the series share no calendar month");
    return report;
}

std::string_view characteristic_name(Characteristic c) {
    switch (c) {
        case Characteristic::Duration: return "duration";
        case Characteristic::Severity: return "severity";
        case Characteristic::Peak: return "peak";
    }
    return "duration";
}

double characteristic_value(const DroughtEvent& event, Characteristic c) {
    switch (c) {
        case Characteristic::Duration: return static_cast<double>(event.duration);
        case Characteristic::Severity: return event.severity;
        case Characteristic::Peak: return event.peak;
    }
    return 0.0;
}

double return_period(std::span<const DroughtEvent> events, Characteristic characteristic,
                     double level, double series_years) {
    if (events.empty()) throw DomainError("return_period: no events");
    if (!(series_years > 0.0)) throw DomainError("return_period: series_years must be > 0");

    const double n = static_cast<double>(events.size());
    std::size_t exceed = 0;
    for (const DroughtEvent& e : events)
        exceed += characteristic_value(e, characteristic) > level ? 1 : 0;
    if (exceed == 0) return std::numeric_limits<double>::infinity();
    return (series_years / n) / (static_cast<double>(exceed) / n);
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t n_bins) {
    if (values.empty()) throw DomainError("histogram: no values");
    if (n_bins < 1) throw DomainError("histogram: need at least one bin");

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<HistogramBin> bins(n_bins);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        bins[b].lo = lo + width * static_cast<double>(b);
        bins[b].hi = b + 1 == n_bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (const double v : values) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
        if (b >= n_bins) b = n_bins - 1;  // the maximum lands in the last bin
        ++bins[b].count;
    }
    return bins;
}

void write_events_csv(std::ostream& out, const IndexSeries& index,
                      std::span<const DroughtEvent> events) {
    out << "start_t,end_t,duration,severity,peak\n";
    for (const DroughtEvent& e : events) {
        out << index.records[e.start_index].t << ',' << index.records[e.end_index].t << ','
            << e.duration << ',' << csv::format_double(e.severity) << ','
            << csv::format_double(e.peak) << '\n';
    }
}

void write_mismatch_csv(std::ostream& out, const MismatchReport& report) {
    std::vector<MismatchRecord> all;
    all.reserve(report.type1.size() + report.type2.size());
    all.insert(all.end(), report.type1.begin(), report.type1.end());
    all.insert(all.end(), report.type2.begin(), report.type2.end());
    std::sort(all.begin(), all.end(), [](const MismatchRecord& a, const MismatchRecord& b) {
        return std::pair{a.year, a.month} < std::pair{b.year, b.month};
    });

    out << "t,year,month,spi,arspi,type\n";
    for (const MismatchRecord& r : all) {
        out << r.t << ',' << r.year << ',' << r.month << ',' << csv::format_double(r.spi) << ','
            << csv::format_double(r.arspi) << ',' << r.type << '\n';
    }
}

}  // namespace arspi
