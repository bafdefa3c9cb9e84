#pragma once

#include "trendkit/algebra_kernel.hpp"
#include "trendkit/fluct_stats.hpp"
#include "trendkit/trend_filter.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace trendkit {

/// value + h d1 + h^2/2 d2
double taylor_extrapolate(double value, double d1, double d2, double h);

/// Second-order Taylor forecast of the trend from source index t, h samples
/// ahead (h * spacing time units).
double forecast_trend(const Decomposition& dec, std::size_t t, double h);

struct MomentForecast {
    double std_hat = 0.0;
    std::optional<double> skew_hat;
    std::optional<double> kurt_hat;
};

/// Filters the trailing window() values of each moment track ending at source
/// index t with `bank` and extrapolates them h samples ahead. std_hat is
/// floored at 0 and kurt_hat at 1. Skewness and kurtosis forecasts are unset
/// when any value in their window is undefined.
MomentForecast forecast_moments(const MomentTrack& track, const KernelBank& bank, std::size_t t,
                                double h);

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

/// Two-sided standard normal quantile z with P(|Z| <= z) = level.
double normal_two_sided_quantile(double level);

Band confidence_band(double trend_hat, double std_hat, double level);

enum class Position { above, under, no_decision };

Position classify_position(double price_hat, double trend_hat, double deadband);

std::string to_string(Position p);
Position position_from_string(std::string_view text);

struct ForecastPoint {
    std::size_t origin = 0;
    double horizon = 1.0;
    double trend_hat = 0.0;
    double price_hat = 0.0;
    double std_hat = 0.0;
    Band band;
    double level = 0.95;
    Position position = Position::no_decision;
    double deadband = 0.0;
};

/// Long/short filter pair plus the fluctuation moment track of the long
/// filter: everything needed to forecast from one origin.
class PositionForecaster {
public:
    PositionForecaster(const PriceSeries& series, const EstimatorSpec& slow,
                       const EstimatorSpec& fast, std::size_t moment_window);

    const Decomposition& slow() const { return slow_; }
    const Decomposition& fast() const { return fast_; }
    const MomentTrack& moments() const { return moments_; }
    const KernelBank& slow_bank() const { return slow_bank_; }

    /// First origin with a full window of moment estimates behind it.
    std::size_t first_origin() const;

    ForecastPoint at(std::size_t t, double h, double level, double deadband_mult) const;

private:
    KernelBank slow_bank_;
    KernelBank fast_bank_;
    Decomposition slow_;
    Decomposition fast_;
    MomentTrack moments_;
};

} // namespace trendkit
