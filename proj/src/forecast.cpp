#include "trendkit/forecast.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace trendkit {

double taylor_extrapolate(double value, double d1, double d2, double h)
{
    if (!(h >= 0.0)) {
        throw std::invalid_argument("forecast horizon must be >= 0");
    }
    return value + h * d1 + (h * h / 2.0) * d2;
}

double forecast_trend(const Decomposition& dec, std::size_t t, double h)
{
    if (!dec.covers(t)) {
        throw std::out_of_range("origin " + std::to_string(t) +
                                " lies in the filter warm-up or past the series");
    }
    const double step = h * dec.source.spacing;
    return taylor_extrapolate(dec.trend_at(t), dec.derivative_at(1, t), dec.derivative_at(2, t),
                              step);
}

namespace {

template <typename Get>
std::optional<double> extrapolate_track(const KernelBank& bank, std::size_t first, Get get,
                                        double step)
{
    const auto w = bank.window();
    std::vector<double> window(w);
    for (std::size_t j = 0; j < w; ++j) {
        const std::optional<double> v = get(first + j);
        if (!v) {
            return std::nullopt;
        }
        window[j] = *v;
    }
    const double value = bank.apply(0, window);
    const double d1 = bank.degree() >= 1 ? bank.apply(1, window) : 0.0;
    const double d2 = bank.degree() >= 2 ? bank.apply(2, window) : 0.0;
    return taylor_extrapolate(value, d1, d2, step);
}

} // namespace

MomentForecast forecast_moments(const MomentTrack& track, const KernelBank& bank, std::size_t t,
                                double h)
{
    const auto w = bank.window();
    if (!track.covers(t) || t + 1 < track.first_index() + w) {
        throw std::out_of_range("insufficient moment history at origin " + std::to_string(t) +
                                ": need " + std::to_string(w) + " defined values");
    }
    const auto first = track.slot(t) + 1 - w;
    const double step = h * bank.spec().spacing;

    MomentForecast out;
    out.std_hat = std::max(
        0.0, *extrapolate_track(
                 bank, first, [&](std::size_t j) { return std::optional<double>(track.std[j]); },
                 step));
    out.skew_hat = extrapolate_track(bank, first, [&](std::size_t j) { return track.skew[j]; },
                                     step);
    auto kurt = extrapolate_track(bank, first, [&](std::size_t j) { return track.kurt[j]; }, step);
    if (kurt) {
        out.kurt_hat = std::max(1.0, *kurt);
    }
    return out;
}

double normal_two_sided_quantile(double level)
{
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 0.5 + level / 2.0);
}

Band confidence_band(double trend_hat, double std_hat, double level)
{
    if (!(std_hat >= 0.0)) {
        throw std::invalid_argument("predicted standard deviation must be >= 0");
    }
    const double half = normal_two_sided_quantile(level) * std_hat;
    return {trend_hat - half, trend_hat + half};
}

Position classify_position(double price_hat, double trend_hat, double deadband)
{
    if (!(deadband >= 0.0)) {
        throw std::invalid_argument("deadband must be >= 0");
    }
    if (price_hat - trend_hat > deadband) {
        return Position::above;
    }
    if (trend_hat - price_hat > deadband) {
        return Position::under;
    }
    return Position::no_decision;
}

std::string to_string(Position p)
{
    switch (p) {
    case Position::above:
        return "above";
    case Position::under:
        return "under";
    case Position::no_decision:
        break;
    }
    return "no_decision";
}

Position position_from_string(std::string_view text)
{
    if (text == "above") {
        return Position::above;
    }
    if (text == "under") {
        return Position::under;
    }
    if (text == "no_decision") {
        return Position::no_decision;
    }
    throw std::invalid_argument("unknown position \"" + std::string(text) + "\"");
}

PositionForecaster::PositionForecaster(const PriceSeries& series, const EstimatorSpec& slow,
                                       const EstimatorSpec& fast, std::size_t moment_window)
    : slow_bank_(build_kernel_bank(slow)),
      fast_bank_(build_kernel_bank(fast)),
      slow_(sliding_trend(series, slow_bank_)),
      fast_(sliding_trend(series, fast_bank_)),
      moments_(moment_tracks(slow_, moment_window))
{
}

std::size_t PositionForecaster::first_origin() const
{
    return std::max(moments_.first_index() + slow_bank_.window() - 1, fast_.warmup);
}

ForecastPoint PositionForecaster::at(std::size_t t, double h, double level,
                                     double deadband_mult) const
{
    if (!(deadband_mult >= 0.0)) {
        throw std::invalid_argument("deadband multiplier must be >= 0");
    }
    ForecastPoint p;
    p.origin = t;
    p.horizon = h;
    p.level = level;
    p.trend_hat = forecast_trend(slow_, t, h);
    p.price_hat = forecast_trend(fast_, t, h);
    p.std_hat = forecast_moments(moments_, slow_bank_, t, h).std_hat;
    p.band = confidence_band(p.trend_hat, p.std_hat, level);
    p.deadband = deadband_mult * p.std_hat;
    p.position = classify_position(p.price_hat, p.trend_hat, p.deadband);
    return p;
}

} // namespace trendkit
