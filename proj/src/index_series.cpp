#include "arspi/index_series.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "arspi/csv.hpp"
#include "arspi/errors.hpp"

namespace arspi {

namespace {

constexpr std::array<std::string_view, 8> kCategoryNames = {
    "ExtremeDrought", "SevereDrought", "ModerateDrought", "MildDrought",
    "MildWet",        "ModerateWet",   "SevereWet",       "ExtremeWet",
};

}  // namespace

Category classify(double index_value) {
    if (!std::isfinite(index_value)) throw NonFinite("classify: index value must be finite");
    if (index_value >= 2.0) return Category::ExtremeWet;
    if (index_value >= 1.5) return Category::SevereWet;
    if (index_value >= 1.0) return Category::ModerateWet;
    if (index_value >= 0.0) return Category::MildWet;
    if (index_value > -1.0) return Category::MildDrought;
    if (index_value > -1.5) return Category::ModerateDrought;
    if (index_value > -2.0) return Category::SevereDrought;
    return Category::ExtremeDrought;
}

std::string_view category_name(Category category) {
    return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<Category> category_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
        if (kCategoryNames[i] == name) return static_cast<Category>(i);
    return std::nullopt;
}

void write_index_csv(std::ostream& out, const IndexSeries& series, std::string_view value_column) {
    out << "t,year,month,mtr," << value_column << ",category\n";
    for (const IndexRecord& r : series.records) {
        out << r.t << ',' << r.year << ',' << r.month << ',' << csv::format_double(r.mtr) << ','
            << csv::format_double(r.value) << ',' << category_name(r.category) << '\n';
    }
}

IndexSeries read_index_csv(std::istream& in, std::string_view value_column, int window) {
    IndexSeries series;
    series.window = window;

    std::string line;
    long row = 0;
    const std::string expected_header = "t,year,month,mtr," + std::string(value_column) + ",category";
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        if (row == 1) {
            if (csv::trim(line) != expected_header)
                throw ParseError(ParseError::Kind::MalformedRow, row,
                                 "header must be `" + expected_header + "`");
            continue;
        }
        const auto fields = csv::split_line(line);
        if (fields.size() != 6)
            throw ParseError(ParseError::Kind::MalformedRow, row, "expected 6 fields");
        IndexRecord record;
        record.t = static_cast<std::size_t>(csv::parse_double_field(fields[0], row));
        record.year = static_cast<int>(csv::parse_double_field(fields[1], row));
        record.month = static_cast<int>(csv::parse_double_field(fields[2], row));
        record.mtr = csv::parse_double_field(fields[3], row);
        record.value = csv::parse_double_field(fields[4], row);
        const auto category = category_from_name(fields[5]);
        if (!category)
            throw ParseError(ParseError::Kind::MalformedRow, row,
                             "unknown category `" + std::string(fields[5]) + "`");
        record.category = *category;
        series.records.push_back(record);
    }
    if (row == 0) throw ParseError(ParseError::Kind::EmptyFile, 1, "empty index CSV");
    return series;
}

}  // namespace arspi
