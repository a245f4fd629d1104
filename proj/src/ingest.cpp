#include "arspi/ingest.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "arspi/csv.hpp"
#include "arspi/errors.hpp"

namespace arspi {

namespace {

bool parse_int(std::string_view field, int& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool parse_double(std::string_view field, double& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::pair<int, int> next_month(int year, int month) {
    return month == 12 ? std::pair{year + 1, 1} : std::pair{year, month + 1};
}

}  // namespace

std::pair<int, int> PrecipSeries::calendar_at(std::size_t t) const {
    const long offset = (start_month - 1) + static_cast<long>(t);
    return {start_year + static_cast<int>(offset / 12), static_cast<int>(offset % 12) + 1};
}

PrecipSeries parse_precip_csv(std::istream& in) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    while (!lines.empty() && csv::trim(lines.back()).empty()) lines.pop_back();

    if (lines.empty()) throw ParseError(ParseError::Kind::EmptyFile, 1, "empty input");
    if (csv::trim(lines.front()) != "year,month,precip")
        throw ParseError(ParseError::Kind::MalformedRow, 1, "header must be `year,month,precip`");
    if (lines.size() == 1) throw ParseError(ParseError::Kind::EmptyFile, 1, "no data rows");

    PrecipSeries series;
    int prev_year = 0;
    int prev_month = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const long row = static_cast<long>(i) + 1;
        const auto fields = csv::split_line(lines[i]);
        if (fields.size() != 3)
            throw ParseError(ParseError::Kind::MalformedRow, row, "expected 3 fields");

        int year = 0;
        int month = 0;
        double precip = 0.0;
        if (!parse_int(fields[0], year))
            throw ParseError(ParseError::Kind::MalformedRow, row, "bad year field");
        if (!parse_int(fields[1], month) || month < 1 || month > 12)
            throw ParseError(ParseError::Kind::MalformedRow, row, "bad month field");
        if (!parse_double(fields[2], precip))
            throw ParseError(ParseError::Kind::MalformedRow, row, "bad precip field");
        if (precip < 0.0)
            throw ParseError(ParseError::Kind::NegativeValue, row, "negative precipitation");

        if (series.values.empty()) {
            series.start_year = year;
            series.start_month = month;
        } else if (std::pair{year, month} != next_month(prev_year, prev_month)) {
            throw ParseError(ParseError::Kind::CalendarGap, row,
                             "months must advance by exactly one");
        }
        prev_year = year;
        prev_month = month;
        series.values.push_back(precip);
    }
    return series;
}

PrecipSeries parse_precip_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_precip_csv(in);
}

std::pair<int, int> MtrSeries::calendar_at(std::size_t i) const {
    PrecipSeries anchor{start_year, start_month, {}};
    return anchor.calendar_at(origin_index + i);
}

double MtrSeries::dry_fraction() const {
    if (values.empty()) return 0.0;
    std::size_t dry = 0;
    for (const bool d : dry_mask) dry += d ? 1 : 0;
    return static_cast<double>(dry) / static_cast<double>(values.size());
}

MtrSeries MtrSeries::from_raw(int window, std::size_t origin_index, int start_year,
                              int start_month, std::vector<double> raw) {
    MtrSeries mtr;
    mtr.window = window;
    mtr.origin_index = origin_index;
    mtr.start_year = start_year;
    mtr.start_month = start_month;
    mtr.dry_mask.reserve(raw.size());
    mtr.encoded_values.reserve(raw.size());
    for (const double v : raw) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("MtrSeries: totals must be finite and >= 0");
        mtr.dry_mask.push_back(v == 0.0);
        mtr.encoded_values.push_back(v == 0.0 ? 1.0 : v);
    }
    mtr.values = std::move(raw);
    return mtr;
}

MtrSeries MtrSeries::from_encoded(int window, std::size_t origin_index, int start_year,
                                  int start_month, std::vector<double> encoded,
                                  std::vector<bool> dry_mask) {
    if (encoded.size() != dry_mask.size())
        throw DomainError("MtrSeries: encoded values and mask lengths differ");
    std::vector<double> raw(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        if (dry_mask[i]) {
            if (encoded[i] != 1.0) throw DomainError("MtrSeries: dry windows must encode as 1");
            raw[i] = 0.0;
        } else {
            if (!(encoded[i] > 0.0) || !std::isfinite(encoded[i]))
                throw DomainError("MtrSeries: wet totals must be finite and > 0");
            raw[i] = encoded[i];
        }
    }
    return from_raw(window, origin_index, start_year, start_month, std::move(raw));
}

MtrSeries moving_total(const PrecipSeries& series, int window) {
    if (window < 1) throw DomainError("moving_total: window must be >= 1");
    if (static_cast<std::size_t>(window) > series.size())
        throw WindowTooLong("moving_total: window exceeds series length");

    const std::size_t n = series.size() - static_cast<std::size_t>(window) + 1;
    std::vector<double> totals(n);
    // Each window is summed afresh; no rolling update, so element i is the
    // exact floating-point sum of its own terms.
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (int j = 0; j < window; ++j) total += series.values[i + static_cast<std::size_t>(j)];
        totals[i] = total;
    }
    return MtrSeries::from_raw(window, static_cast<std::size_t>(window) - 1, series.start_year,
                               series.start_month, std::move(totals));
}

AcfResult acf(std::span<const double> values, std::size_t max_lag) {
    const std::size_t n = values.size();
    if (n < 2) throw DegenerateSeries("acf: need at least 2 observations");
    if (max_lag >= n) throw DomainError("acf: max_lag must be < series length");

    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(n);

    double denom = 0.0;
    for (const double v : values) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw DegenerateSeries("acf: series has zero variance");

    AcfResult result;
    result.coefficients.resize(max_lag + 1);
    result.coefficients[0] = 1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double num = 0.0;
        for (std::size_t t = lag; t < n; ++t) num += (values[t] - mean) * (values[t - lag] - mean);
        result.coefficients[lag] = num / denom;
    }
    result.confidence_band = 1.96 / std::sqrt(static_cast<double>(n));
    return result;
}

AcfResult pacf(std::span<const double> values, std::size_t max_lag) {
    AcfResult rho = acf(values, max_lag);
    AcfResult result;
    result.confidence_band = rho.confidence_band;
    result.coefficients.resize(max_lag + 1);
    result.coefficients[0] = 1.0;
    if (max_lag == 0) return result;

    // Durbin-Levinson: phi[k] holds the order-k AR coefficients; the partial
    // autocorrelation at lag k is the last of them.
    std::vector<double> phi(max_lag + 1, 0.0);
    std::vector<double> prev(max_lag + 1, 0.0);
    phi[1] = rho.coefficients[1];
    result.coefficients[1] = phi[1];
    for (std::size_t k = 2; k <= max_lag; ++k) {
        prev = phi;
        double num = rho.coefficients[k];
        double den = 1.0;
        for (std::size_t j = 1; j < k; ++j) {
            num -= prev[j] * rho.coefficients[k - j];
            den -= prev[j] * rho.coefficients[j];
        }
        if (std::abs(den) < 1e-300)
            throw DegenerateSeries("pacf: Durbin-Levinson recursion is singular");
        phi[k] = num / den;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - phi[k] * prev[k - j];
        result.coefficients[k] = phi[k];
    }
    return result;
}

void write_acf_csv(std::ostream& out, const AcfResult& result) {
    out << "lag,coefficient,band\n";
    for (std::size_t lag = 0; lag < result.coefficients.size(); ++lag) {
        out << lag << ',' << csv::format_double(result.coefficients[lag]) << ','
            << csv::format_double(result.confidence_band) << '\n';
    }
}

}  // namespace arspi
