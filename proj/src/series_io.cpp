#include "trendkit/series_io.hpp"

#include "trendkit/text_output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace trendkit {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

std::size_t column_index(const std::vector<std::string_view>& header, const std::string& name)
{
    auto it = std::find(header.begin(), header.end(), std::string_view(name));
    if (it == header.end()) {
        throw std::runtime_error("missing column \"" + name + "\" in header");
    }
    return static_cast<std::size_t>(it - header.begin());
}

int parse_int(std::string_view text)
{
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("bad date");
    }
    return value;
}

} // namespace

std::string PriceSeries::date_label(std::size_t i) const
{
    if (i < dates.size()) {
        return format_date(dates[i]);
    }
    return {};
}

PriceSeries make_price_series(std::string name, std::vector<double> values, double spacing,
                              Date epoch, std::vector<Date> dates)
{
    if (values.size() < 2) {
        throw std::invalid_argument("price series needs at least 2 samples");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw std::invalid_argument("sample spacing must be positive");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw std::invalid_argument("non-positive price at sample " + std::to_string(i));
        }
    }
    if (!dates.empty() && dates.size() != values.size()) {
        throw std::invalid_argument("date labels do not match the number of samples");
    }
    if (!dates.empty()) {
        epoch = dates.front();
    }
    PriceSeries s;
    s.name = std::move(name);
    s.epoch = epoch;
    s.values = std::move(values);
    s.spacing = spacing;
    s.dates = std::move(dates);
    return s;
}

Date parse_iso_date(std::string_view text)
{
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("expected YYYY-MM-DD date, got \"" + std::string(text) + "\"");
    }
    Date d{std::chrono::year{parse_int(text.substr(0, 4))},
           std::chrono::month{static_cast<unsigned>(parse_int(text.substr(5, 2)))},
           std::chrono::day{static_cast<unsigned>(parse_int(text.substr(8, 2)))}};
    if (!d.ok()) {
        throw std::invalid_argument("invalid calendar date \"" + std::string(text) + "\"");
    }
    return d;
}

std::string format_date(const Date& date)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

PriceSeries parse_prices(std::istream& in, const ColumnSpec& columns, std::string name)
{
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw std::runtime_error("empty price file");
    }
    auto header = split(header_line, columns.delimiter);
    if (!header.empty() && header.front().substr(0, 3) == "\xEF\xBB\xBF") {
        header.front().remove_prefix(3);
    }
    const auto date_col = column_index(header, columns.date_column);
    const auto price_col = column_index(header, columns.price_column);
    const auto needed = std::max(date_col, price_col) + 1;

    std::vector<double> values;
    std::vector<Date> dates;
    std::string line;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) {
            continue;
        }
        const auto where = "row " + std::to_string(row);
        auto fields = split(line, columns.delimiter);
        if (fields.size() < needed) {
            throw std::runtime_error("unparsable " + where + ": too few fields");
        }
        Date d;
        try {
            d = parse_iso_date(fields[date_col]);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("unparsable " + where + ": " + e.what());
        }
        const auto text = fields[price_col];
        double price = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), price);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() ||
            !std::isfinite(price)) {
            throw std::runtime_error("unparsable " + where + ": price \"" + std::string(text) +
                                     "\"");
        }
        if (!(price > 0.0)) {
            throw std::runtime_error("non-positive price at " + where);
        }
        if (!dates.empty() && !(dates.back() < d)) {
            throw std::runtime_error("non-monotone dates at " + where);
        }
        dates.push_back(d);
        values.push_back(price);
    }
    if (values.size() < 2) {
        throw std::runtime_error("price file needs at least 2 data rows");
    }
    const Date epoch = dates.front();
    return make_price_series(std::move(name), std::move(values), 1.0, epoch, std::move(dates));
}

PriceSeries load_prices(const std::filesystem::path& path, const ColumnSpec& columns)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open price file " + path.string());
    }
    return parse_prices(in, columns, path.stem().string());
}

std::string format_prices(const PriceSeries& series, const ColumnSpec& columns)
{
    std::ostringstream out;
    out << columns.date_column << columns.delimiter << columns.price_column << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.date_label(i) << columns.delimiter << format_double(series.values[i])
            << '\n';
    }
    return out.str();
}

ReturnSeries returns(const PriceSeries& series, ReturnKind kind)
{
    if (series.size() < 2) {
        throw std::invalid_argument("returns need at least 2 samples");
    }
    ReturnSeries r;
    r.kind = kind;
    r.values.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double prev = series.values[i - 1];
        const double cur = series.values[i];
        const double simple = (cur - prev) / prev;
        if (kind == ReturnKind::simple) {
            r.values.push_back(simple);
        } else {
            r.values.push_back(std::log1p(simple));
        }
    }
    return r;
}

} // namespace trendkit
