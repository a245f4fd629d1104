#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace arspi {

// Wetness categories ordered driest to wettest, so the enum order agrees
// with the index order and classify() is monotone.
enum class Category {
    ExtremeDrought,
    SevereDrought,
    ModerateDrought,
    MildDrought,
    MildWet,
    ModerateWet,
    SevereWet,
    ExtremeWet,
};

// Boundary convention: each nonnegative cutoff belongs to the wetter class
// (v >= 2 is ExtremeWet, v >= 0 is MildWet) and each negative cutoff to the
// milder class (v > -1 is MildDrought, v <= -2 is ExtremeDrought).
// Throws NonFinite on NaN or infinite input.
Category classify(double index_value);

std::string_view category_name(Category category);
std::optional<Category> category_from_name(std::string_view name);

struct IndexRecord {
    std::size_t t = 0;   // 1-based window position within the MTR series
    int year = 0;
    int month = 0;       // 1..12, calendar month closing the window
    double mtr = 0.0;    // raw moving total
    double value = 0.0;  // index value (SPI or ARSPI)
    Category category = Category::MildWet;
};

struct IndexSeries {
    int window = 1;
    std::vector<IndexRecord> records;

    [[nodiscard]] std::size_t size() const { return records.size(); }
};

// CSV layout: `t,year,month,mtr,<value_column>,category`. value_column is
// "index" for classic SPI files and "arspi" for model-based files.
void write_index_csv(std::ostream& out, const IndexSeries& series, std::string_view value_column);
IndexSeries read_index_csv(std::istream& in, std::string_view value_column, int window);

}  // namespace arspi
