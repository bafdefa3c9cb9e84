#include "trendkit/trend_filter.hpp"

#include "trendkit/text_output.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trendkit {

namespace {

// Picks a trend value within a few ulps of `estimate` for which
// (trend + (price - trend)) == price holds in floating point, so the
// decomposition reproduces the source exactly.
double reconcile(double price, double estimate)
{
    const auto exact = [price](double t) { return t + (price - t) == price; };
    if (exact(estimate)) {
        return estimate;
    }
    const double alt = price - (price - estimate);
    if (exact(alt)) {
        return alt;
    }
    double up = estimate;
    double down = estimate;
    for (int i = 0; i < 8; ++i) {
        up = std::nextafter(up, INFINITY);
        if (exact(up)) {
            return up;
        }
        down = std::nextafter(down, -INFINITY);
        if (exact(down)) {
            return down;
        }
    }
    return estimate;
}

} // namespace

double Decomposition::trend_at(std::size_t index) const
{
    if (!covers(index)) {
        throw std::out_of_range("index " + std::to_string(index) + " is in the filter warm-up");
    }
    return trend[index - warmup];
}

double Decomposition::fluctuation_at(std::size_t index) const
{
    if (!covers(index)) {
        throw std::out_of_range("index " + std::to_string(index) + " is in the filter warm-up");
    }
    return fluctuation[index - warmup];
}

double Decomposition::derivative_at(int order, std::size_t index) const
{
    if (!covers(index)) {
        throw std::out_of_range("index " + std::to_string(index) + " is in the filter warm-up");
    }
    if (order == 0) {
        return trend[index - warmup];
    }
    if (order < 0) {
        throw std::out_of_range("negative derivative order");
    }
    if (order > degree()) {
        return 0.0;
    }
    return derivatives[static_cast<std::size_t>(order - 1)][index - warmup];
}

std::span<const double> Decomposition::d1() const
{
    if (degree() < 1) {
        throw std::out_of_range("estimator degree 0 has no first derivative");
    }
    return derivatives[0];
}

std::span<const double> Decomposition::d2() const
{
    if (degree() < 2) {
        throw std::out_of_range("estimator degree < 2 has no second derivative");
    }
    return derivatives[1];
}

Decomposition sliding_trend(const PriceSeries& series, const KernelBank& bank)
{
    const auto w = bank.window();
    if (series.size() < w) {
        throw std::invalid_argument("series of length " + std::to_string(series.size()) +
                                    " is shorter than the filter window " + std::to_string(w));
    }
    if (std::abs(series.spacing - bank.spec().spacing) > 1e-12 * series.spacing) {
        throw std::invalid_argument("kernel spacing does not match the series spacing");
    }
    Decomposition dec;
    dec.source = series;
    dec.warmup = w - 1;
    const auto aligned = series.size() - dec.warmup;
    dec.trend.resize(aligned);
    dec.fluctuation.resize(aligned);
    dec.derivatives.assign(static_cast<std::size_t>(bank.degree()), std::vector<double>(aligned));

    const std::span<const double> values(series.values);
    for (std::size_t k = 0; k < aligned; ++k) {
        const auto window = values.subspan(k, w);
        const double price = series.values[k + dec.warmup];
        const double t = reconcile(price, bank.apply(0, window));
        dec.trend[k] = t;
        dec.fluctuation[k] = price - t;
        for (int nu = 1; nu <= bank.degree(); ++nu) {
            dec.derivatives[static_cast<std::size_t>(nu - 1)][k] = bank.apply(nu, window);
        }
    }
    return dec;
}

double mean_abs(std::span<const double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("mean of an empty sequence");
    }
    double acc = 0.0;
    for (double v : values) {
        acc += std::abs(v);
    }
    return acc / static_cast<double>(values.size());
}

OscillationReport oscillation_score(std::span<const double> fluctuation,
                                    const OscillationOptions& options)
{
    const auto n = fluctuation.size();
    if (n == 0) {
        throw std::invalid_argument("oscillation score of an empty sequence");
    }
    if (options.min_window < 1 || options.min_window > n) {
        throw std::invalid_argument("minimum window must lie in [1, " + std::to_string(n) + "]");
    }
    if (options.stride < 1) {
        throw std::invalid_argument("stride must be >= 1");
    }
    const double scale = options.scale.value_or(1.0);
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("oscillation scale must be positive");
    }

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + fluctuation[i];
    }
    double best = 0.0;
    const auto len = options.min_window;
    for (std::size_t start = 0; start + len <= n; start += options.stride) {
        for (std::size_t end = start + len; end <= n; ++end) {
            const double mean = std::abs(prefix[end] - prefix[start]) /
                                static_cast<double>(end - start);
            if (mean > best) {
                best = mean;
            }
        }
    }

    OscillationReport report;
    report.score = best / scale;
    report.scale = scale;
    report.min_window = len;
    report.threshold = options.threshold;
    report.verdict = report.score <= options.threshold ? Oscillation::quickly_fluctuating
                                                       : Oscillation::not_quickly_fluctuating;
    return report;
}

std::string to_string(Oscillation verdict)
{
    return verdict == Oscillation::quickly_fluctuating ? "quickly_fluctuating"
                                                       : "not_quickly_fluctuating";
}

std::string format_decomposition(const Decomposition& dec, char delimiter)
{
    std::ostringstream out;
    const char d = delimiter;
    out << "index" << d << "date" << d << "price" << d << "trend" << d << "d1" << d << "d2" << d
        << "fluctuation\n";
    for (std::size_t i = dec.warmup; i < dec.source.size(); ++i) {
        out << i << d << dec.source.date_label(i) << d << format_double(dec.source.values[i]) << d
            << format_double(dec.trend_at(i)) << d;
        out << (dec.degree() >= 1 ? format_double(dec.derivative_at(1, i)) : std::string()) << d;
        out << (dec.degree() >= 2 ? format_double(dec.derivative_at(2, i)) : std::string()) << d;
        out << format_double(dec.fluctuation_at(i)) << '\n';
    }
    return out.str();
}

} // namespace trendkit
