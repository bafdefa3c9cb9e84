#include "trendkit/fluct_stats.hpp"

#include "trendkit/text_output.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace trendkit {

namespace {

double ipow(double x, int k)
{
    double r = x;
    for (int i = 1; i < k; ++i) {
        r *= x;
    }
    return r;
}

void check_window(std::size_t n, std::size_t M)
{
    if (M < 1) {
        throw std::invalid_argument("moment window M must be >= 1");
    }
    if (n <= M) {
        throw std::invalid_argument("sequence of length " + std::to_string(n) +
                                    " is too short for moment window M = " + std::to_string(M));
    }
}

double window_mean(std::span<const double> w)
{
    double sum = 0.0;
    for (double x : w) {
        sum += x;
    }
    return sum / static_cast<double>(w.size());
}

double centered_moment(std::span<const double> w, double mean, int k)
{
    double sum = 0.0;
    for (double x : w) {
        sum += ipow(x - mean, k);
    }
    return sum / static_cast<double>(w.size());
}

} // namespace

std::vector<double> rolling_central_moment(std::span<const double> fluctuation, int k,
                                           std::size_t M)
{
    if (k < 2) {
        throw std::invalid_argument("moment order k must be >= 2");
    }
    check_window(fluctuation.size(), M);
    std::vector<double> out;
    out.reserve(fluctuation.size() - M);
    for (std::size_t t = M; t < fluctuation.size(); ++t) {
        const auto w = fluctuation.subspan(t - M, M + 1);
        out.push_back(centered_moment(w, window_mean(w), k));
    }
    return out;
}

std::size_t MomentTrack::slot(std::size_t index) const
{
    if (!covers(index)) {
        throw std::out_of_range("index " + std::to_string(index) +
                                " has no moment estimate (warm-up or past the end)");
    }
    return index - first_index();
}

MomentTrack moment_tracks(std::span<const double> fluctuation, std::size_t M, std::size_t offset)
{
    check_window(fluctuation.size(), M);
    MomentTrack track;
    track.M = M;
    track.offset = offset;
    const auto count = fluctuation.size() - M;
    track.mean.reserve(count);
    track.ma2.reserve(count);
    track.ma3.reserve(count);
    track.ma4.reserve(count);
    for (std::size_t t = M; t < fluctuation.size(); ++t) {
        const auto w = fluctuation.subspan(t - M, M + 1);
        const double mean = window_mean(w);
        const double m2 = centered_moment(w, mean, 2);
        const double m3 = centered_moment(w, mean, 3);
        const double m4 = centered_moment(w, mean, 4);
        track.mean.push_back(mean);
        track.ma2.push_back(m2);
        track.ma3.push_back(m3);
        track.ma4.push_back(m4);
        track.std.push_back(std::sqrt(m2));

        // A constant window leaves only rounding residue in m2; treat it as
        // zero variance rather than report ratios of noise.
        double peak = 0.0;
        for (double x : w) {
            peak = std::max(peak, std::abs(x));
        }
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * peak;
        if (m2 > floor * floor) {
            track.skew.emplace_back(m3 / std::pow(m2, 1.5));
            track.kurt.emplace_back(m4 / (m2 * m2));
        } else {
            track.skew.emplace_back(std::nullopt);
            track.kurt.emplace_back(std::nullopt);
        }
    }
    return track;
}

MomentTrack moment_tracks(const Decomposition& dec, std::size_t M)
{
    return moment_tracks(dec.fluctuation, M, dec.warmup);
}

std::string format_moments(const MomentTrack& track, const PriceSeries& source, char delimiter)
{
    std::ostringstream out;
    const char d = delimiter;
    out << "index" << d << "date" << d << "std" << d << "skew" << d << "kurt\n";
    for (std::size_t j = 0; j < track.size(); ++j) {
        const auto i = track.first_index() + j;
        out << i << d << source.date_label(i) << d << format_double(track.std[j]) << d
            << (track.skew[j] ? format_double(*track.skew[j]) : std::string()) << d
            << (track.kurt[j] ? format_double(*track.kurt[j]) : std::string()) << '\n';
    }
    return out.str();
}

} // namespace trendkit
