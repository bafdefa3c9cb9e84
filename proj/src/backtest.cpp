#include "trendkit/backtest.hpp"

#include "trendkit/text_output.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace trendkit {

void BacktestConfig::validate() const
{
    if (horizons.empty()) {
        throw std::invalid_argument("at least one forecast horizon is required");
    }
    for (int h : horizons) {
        if (h < 1) {
            throw std::invalid_argument("forecast horizons must be >= 1");
        }
    }
    slow.validate();
    fast.validate();
    if (moment_window < 1) {
        throw std::invalid_argument("moment window must be >= 1");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    if (!(deadband_mult >= 0.0)) {
        throw std::invalid_argument("deadband multiplier must be >= 0");
    }
}

std::size_t minimum_length(const BacktestConfig& config)
{
    const auto slow_w = static_cast<std::size_t>(config.slow.window);
    const auto fast_w = static_cast<std::size_t>(config.fast.window);
    const auto max_h = static_cast<std::size_t>(
        *std::max_element(config.horizons.begin(), config.horizons.end()));
    // Slow warm-up, moment warm-up, a full slow window of moments, then the
    // horizon to score the last origin.
    const auto first = std::max((slow_w - 1) + config.moment_window + (slow_w - 1), fast_w - 1);
    return first + max_h + 1;
}

PositionScore score_positions(std::span<const Position> predictions,
                              std::span<const Position> realized)
{
    if (predictions.size() != realized.size()) {
        throw std::invalid_argument("prediction and realization counts differ");
    }
    if (predictions.empty()) {
        throw std::invalid_argument("no positions to score");
    }
    std::size_t exact = 0;
    std::size_t undecided = 0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (realized[i] == Position::no_decision) {
            throw std::invalid_argument("realized positions must be above or under");
        }
        if (predictions[i] == Position::no_decision) {
            ++undecided;
        } else if (predictions[i] == realized[i]) {
            ++exact;
        } else {
            ++wrong;
        }
    }
    const double total = static_cast<double>(predictions.size());
    return {100.0 * static_cast<double>(exact) / total,
            100.0 * static_cast<double>(undecided) / total,
            100.0 * static_cast<double>(wrong) / total};
}

BacktestRun walk_forward_detailed(const PriceSeries& series, const BacktestConfig& config)
{
    config.validate();
    const auto needed = minimum_length(config);
    if (series.size() < needed) {
        throw std::invalid_argument("series of length " + std::to_string(series.size()) +
                                    " is too short for the backtest: need at least " +
                                    std::to_string(needed) + " samples");
    }
    EstimatorSpec slow = config.slow;
    EstimatorSpec fast = config.fast;
    slow.spacing = series.spacing;
    fast.spacing = series.spacing;
    const PositionForecaster forecaster(series, slow, fast, config.moment_window);
    const auto& moments = forecaster.moments();
    const auto n = series.size();

    BacktestRun run;
    run.report.series_name = series.name;
    run.report.series_length = n;
    run.report.level = config.level;

    for (int h : config.horizons) {
        const auto steps = static_cast<std::size_t>(h);
        std::vector<Position> predicted;
        std::vector<Position> realized;
        double sq_err = 0.0;
        std::size_t inside = 0;
        std::size_t skipped = 0;
        double std_min = std::numeric_limits<double>::infinity();
        double std_max = 0.0;
        HorizonResult result;
        result.horizon = h;
        result.first_origin = forecaster.first_origin();

        for (std::size_t t = forecaster.first_origin(); t + steps < n; ++t) {
            // Zero-variance origins carry no usable band or deadband.
            if (!moments.kurt[moments.slot(t)]) {
                ++skipped;
                continue;
            }
            const auto point = forecaster.at(t, static_cast<double>(h), config.level,
                                             config.deadband_mult);
            const double price = series.values[t + steps];
            const double trend = forecaster.slow().trend_at(t + steps);
            if (price == trend) {
                ++skipped;
                continue;
            }
            const auto actual = price > trend ? Position::above : Position::under;
            predicted.push_back(point.position);
            realized.push_back(actual);
            sq_err += (point.trend_hat - price) * (point.trend_hat - price);
            if (price >= point.band.lo && price <= point.band.hi) {
                ++inside;
            }
            const double sd = moments.std[moments.slot(t)];
            std_min = std::min(std_min, sd);
            std_max = std::max(std_max, sd);
            result.last_origin = t;
            run.detail.push_back({point, actual, price, trend});
        }

        result.skipped = skipped;
        result.origins = predicted.size();
        if (!predicted.empty()) {
            const auto score = score_positions(predicted, realized);
            result.exact_pct = score.exact_pct;
            result.nodecision_pct = score.nodecision_pct;
            result.wrong_pct = score.wrong_pct;
            const double count = static_cast<double>(predicted.size());
            result.rmse = std::sqrt(sq_err / count);
            result.band_coverage = static_cast<double>(inside) / count;
            result.heteroscedasticity =
                std_min > 0.0 ? std_max / std_min : std::numeric_limits<double>::infinity();
        }
        run.report.horizons.push_back(result);
    }
    return run;
}

BacktestReport walk_forward(const PriceSeries& series, const BacktestConfig& config)
{
    return walk_forward_detailed(series, config).report;
}

namespace {

std::string key(int h, const char* field)
{
    return "h" + std::to_string(h) + "." + field;
}

} // namespace

std::string emit_report(const BacktestReport& report, ReportFormat format)
{
    if (format == ReportFormat::structured) {
        nlohmann::ordered_json doc;
        doc["series"] = report.series_name;
        doc["series_length"] = report.series_length;
        doc["level"] = report.level;
        doc["band_model"] = "gaussian";
        std::string hs;
        for (const auto& r : report.horizons) {
            hs += (hs.empty() ? "" : ",") + std::to_string(r.horizon);
        }
        doc["horizons"] = hs;
        for (const auto& r : report.horizons) {
            const int h = r.horizon;
            doc[key(h, "exact_pct")] = r.exact_pct;
            doc[key(h, "nodecision_pct")] = r.nodecision_pct;
            doc[key(h, "wrong_pct")] = r.wrong_pct;
            doc[key(h, "rmse")] = r.rmse;
            doc[key(h, "band_coverage")] = r.band_coverage;
            // JSON has no infinity; an all-zero minimum std is written as null.
            if (std::isfinite(r.heteroscedasticity)) {
                doc[key(h, "heteroscedasticity")] = r.heteroscedasticity;
            } else {
                doc[key(h, "heteroscedasticity")] = nullptr;
            }
            doc[key(h, "origins")] = r.origins;
            doc[key(h, "skipped")] = r.skipped;
            doc[key(h, "first_origin")] = r.first_origin;
            doc[key(h, "last_origin")] = r.last_origin;
        }
        return doc.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "series: " << report.series_name << " (" << report.series_length << " samples)\n";
    out << "position forecast: exact / no decision / wrong (%)\n";
    for (const auto& r : report.horizons) {
        out << "h=" << r.horizon << ": " << format_fixed(r.exact_pct, 2) << " / "
            << format_fixed(r.nodecision_pct, 2) << " / " << format_fixed(r.wrong_pct, 2) << '\n';
    }
    out << "trend forecast and band (" << format_fixed(100.0 * report.level, 1)
        << "% gaussian):\n";
    for (const auto& r : report.horizons) {
        out << "h=" << r.horizon << ": rmse " << format_double(r.rmse) << ", coverage "
            << format_fixed(r.band_coverage, 4) << ", heteroscedasticity "
            << (std::isfinite(r.heteroscedasticity) ? format_fixed(r.heteroscedasticity, 3)
                                                     : std::string("inf"))
            << ", origins " << r.origins << " [" << r.first_origin << ".." << r.last_origin
            << "], skipped " << r.skipped << '\n';
    }
    return out.str();
}

BacktestReport parse_report(std::string_view structured)
{
    const auto doc = nlohmann::json::parse(structured);
    BacktestReport report;
    report.series_name = doc.at("series").get<std::string>();
    report.series_length = doc.at("series_length").get<std::size_t>();
    report.level = doc.at("level").get<double>();
    std::istringstream hs(doc.at("horizons").get<std::string>());
    std::string item;
    while (std::getline(hs, item, ',')) {
        HorizonResult r;
        r.horizon = std::stoi(item);
        const int h = r.horizon;
        r.exact_pct = doc.at(key(h, "exact_pct")).get<double>();
        r.nodecision_pct = doc.at(key(h, "nodecision_pct")).get<double>();
        r.wrong_pct = doc.at(key(h, "wrong_pct")).get<double>();
        r.rmse = doc.at(key(h, "rmse")).get<double>();
        r.band_coverage = doc.at(key(h, "band_coverage")).get<double>();
        const auto& het = doc.at(key(h, "heteroscedasticity"));
        r.heteroscedasticity =
            het.is_null() ? std::numeric_limits<double>::infinity() : het.get<double>();
        r.origins = doc.at(key(h, "origins")).get<std::size_t>();
        r.skipped = doc.at(key(h, "skipped")).get<std::size_t>();
        r.first_origin = doc.at(key(h, "first_origin")).get<std::size_t>();
        r.last_origin = doc.at(key(h, "last_origin")).get<std::size_t>();
        report.horizons.push_back(r);
    }
    return report;
}

std::string format_backtest_detail(const BacktestRun& run, const PriceSeries& series,
                                   char delimiter)
{
    std::ostringstream out;
    const char d = delimiter;
    out << "index" << d << "date" << d << "horizon" << d << "trend_hat" << d << "lo" << d << "hi"
        << d << "position" << d << "price_hat" << d << "realized_price" << d << "realized_trend"
        << d << "realized_position\n";
    for (const auto& rec : run.detail) {
        const auto& f = rec.forecast;
        out << f.origin << d << series.date_label(f.origin) << d << format_double(f.horizon) << d
            << format_double(f.trend_hat) << d << format_double(f.band.lo) << d
            << format_double(f.band.hi) << d << to_string(f.position) << d
            << format_double(f.price_hat) << d << format_double(rec.realized_price) << d
            << format_double(rec.realized_trend) << d << to_string(rec.realized) << '\n';
    }
    return out.str();
}

} // namespace trendkit
