#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace trendkit {

using Date = std::chrono::year_month_day;

/// Daily prices on a uniform sample grid. Sample i sits at time
/// epoch + i * spacing in grid units; calendar gaps between rows are not
/// interpolated, each input row is one grid step.
struct PriceSeries {
    std::string name;
    Date epoch{};
    std::vector<double> values;
    double spacing = 1.0;
    /// Calendar date of each row when the series came from a file; empty for
    /// synthetic series.
    std::vector<Date> dates;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return static_cast<double>(i) * spacing; }
    /// ISO date label for sample i, or an empty string when no dates are held.
    std::string date_label(std::size_t i) const;
};

/// Builds a series and enforces its invariants (length >= 2, all values
/// strictly positive and finite, spacing > 0).
PriceSeries make_price_series(std::string name, std::vector<double> values, double spacing = 1.0,
                              Date epoch = {}, std::vector<Date> dates = {});

enum class ReturnKind { simple, logarithmic };

struct ReturnSeries {
    ReturnKind kind = ReturnKind::simple;
    /// values[i] belongs to sample i + 1 of the source series.
    std::vector<double> values;
};

struct ColumnSpec {
    std::string date_column = "Date";
    std::string price_column = "Close";
    char delimiter = ',';
};

Date parse_iso_date(std::string_view text);
std::string format_date(const Date& date);

/// Reads a delimiter-separated file with a header row.
PriceSeries load_prices(const std::filesystem::path& path, const ColumnSpec& columns = {});
PriceSeries parse_prices(std::istream& in, const ColumnSpec& columns = {}, std::string name = {});

/// Renders the series in the same layout `load_prices` accepts, at full
/// round-trip precision.
std::string format_prices(const PriceSeries& series, const ColumnSpec& columns = {});

ReturnSeries returns(const PriceSeries& series, ReturnKind kind);

} // namespace trendkit
