#pragma once

#include "trendkit/algebra_kernel.hpp"
#include "trendkit/series_io.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendkit {

/// Causal trend / fluctuation split of a price series. All tracks cover the
/// source indices warmup .. n-1; index i of the source maps to slot
/// i - warmup of every track.
struct Decomposition {
    PriceSeries source;
    std::size_t warmup = 0;
    std::vector<double> trend;
    /// derivatives[nu - 1] is the order-nu track, nu = 1 .. degree.
    std::vector<std::vector<double>> derivatives;
    std::vector<double> fluctuation;

    std::size_t size() const { return trend.size(); }
    bool covers(std::size_t index) const
    {
        return index >= warmup && index < source.size();
    }
    int degree() const { return static_cast<int>(derivatives.size()); }

    double trend_at(std::size_t index) const;
    double fluctuation_at(std::size_t index) const;
    /// Order-nu derivative at a source index; 0 for orders the estimator
    /// does not produce.
    double derivative_at(int order, std::size_t index) const;

    std::span<const double> d1() const;
    std::span<const double> d2() const;
};

Decomposition sliding_trend(const PriceSeries& series, const KernelBank& bank);

enum class Oscillation { quickly_fluctuating, not_quickly_fluctuating };

struct OscillationOptions {
    std::size_t min_window = 10;
    double threshold = 0.05;
    /// Normalization; when unset the score is not normalized (scale 1).
    std::optional<double> scale;
    /// Step between examined window start positions.
    std::size_t stride = 1;
};

struct OscillationReport {
    double score = 0.0;
    double scale = 1.0;
    std::size_t min_window = 0;
    Oscillation verdict = Oscillation::quickly_fluctuating;
    double threshold = 0.0;
};

/// Largest |mean| of the sequence over contiguous windows of length >=
/// min_window, divided by the scale.
OscillationReport oscillation_score(std::span<const double> fluctuation,
                                    const OscillationOptions& options = {});

/// Mean absolute value, the usual scale for oscillation_score.
double mean_abs(std::span<const double> values);

std::string to_string(Oscillation verdict);

/// index, date, price, trend, d1, d2, fluctuation
std::string format_decomposition(const Decomposition& dec, char delimiter = ',');

} // namespace trendkit
