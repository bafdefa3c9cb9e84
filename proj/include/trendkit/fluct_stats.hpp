#pragma once

#include "trendkit/trend_filter.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trendkit {

/// Rolling central moment over the trailing M + 1 samples:
///   out[t - M] = sum_{tau=0}^{M} (x[t - tau] - mean)^k / (M + 1)
/// for t = M .. n-1, mean taken over the same samples. No bias correction.
std::vector<double> rolling_central_moment(std::span<const double> fluctuation, int k,
                                           std::size_t M);

/// Rolling std / skewness / kurtosis of a fluctuation track. Slot j holds the
/// window ending at input index M + j, i.e. series index first_index() + j.
struct MomentTrack {
    std::size_t M = 100;
    /// Series index of the first input sample.
    std::size_t offset = 0;
    std::vector<double> mean;
    std::vector<double> ma2, ma3, ma4;
    std::vector<double> std;
    /// Undefined (nullopt) where the window has zero variance.
    std::vector<std::optional<double>> skew, kurt;

    std::size_t warmup() const { return M; }
    std::size_t first_index() const { return offset + M; }
    std::size_t size() const { return std.size(); }
    bool covers(std::size_t index) const
    {
        return index >= first_index() && index - first_index() < size();
    }
    std::size_t slot(std::size_t index) const;
};

MomentTrack moment_tracks(std::span<const double> fluctuation, std::size_t M,
                          std::size_t offset = 0);
MomentTrack moment_tracks(const Decomposition& dec, std::size_t M);

/// index, date, std, skew, kurt (undefined values left empty)
std::string format_moments(const MomentTrack& track, const PriceSeries& source,
                           char delimiter = ',');

} // namespace trendkit
