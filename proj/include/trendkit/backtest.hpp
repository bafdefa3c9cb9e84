#pragma once

#include "trendkit/algebra_kernel.hpp"
#include "trendkit/forecast.hpp"
#include "trendkit/series_io.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trendkit {

struct BacktestConfig {
    std::vector<int> horizons{1, 5};
    EstimatorSpec slow{2, 21, 1.0, 1};
    EstimatorSpec fast{2, 7, 1.0, 1};
    std::size_t moment_window = 100;
    double level = 0.95;
    /// Deadband = deadband_mult * predicted fluctuation std.
    double deadband_mult = 0.1;

    void validate() const;
};

/// Shortest series walk_forward accepts for this configuration.
std::size_t minimum_length(const BacktestConfig& config);

struct HorizonResult {
    int horizon = 1;
    double exact_pct = 0.0;
    double nodecision_pct = 0.0;
    double wrong_pct = 0.0;
    /// Trend forecast vs realized price.
    double rmse = 0.0;
    /// Fraction of realized prices inside the confidence band.
    double band_coverage = 0.0;
    /// max / min of the fluctuation std over the evaluated origins.
    double heteroscedasticity = 0.0;
    std::size_t origins = 0;
    std::size_t skipped = 0;
    std::size_t first_origin = 0;
    std::size_t last_origin = 0;
};

struct BacktestReport {
    std::string series_name;
    std::size_t series_length = 0;
    double level = 0.95;
    std::vector<HorizonResult> horizons;
};

/// Per-origin record kept for plotting.
struct OriginRecord {
    ForecastPoint forecast;
    Position realized = Position::no_decision;
    double realized_price = 0.0;
    double realized_trend = 0.0;
};

struct BacktestRun {
    BacktestReport report;
    std::vector<OriginRecord> detail;
};

BacktestReport walk_forward(const PriceSeries& series, const BacktestConfig& config);
BacktestRun walk_forward_detailed(const PriceSeries& series, const BacktestConfig& config);

struct PositionScore {
    double exact_pct = 0.0;
    double nodecision_pct = 0.0;
    double wrong_pct = 0.0;
};

/// `realized` may only contain above / under.
PositionScore score_positions(std::span<const Position> predictions,
                              std::span<const Position> realized);

enum class ReportFormat { text, structured };

std::string emit_report(const BacktestReport& report, ReportFormat format);

/// Inverse of emit_report(..., ReportFormat::structured).
BacktestReport parse_report(std::string_view structured);

/// date, horizon, trend_hat, lo, hi, position plus the realized outcome.
std::string format_backtest_detail(const BacktestRun& run, const PriceSeries& series,
                                   char delimiter = ',');

} // namespace trendkit
