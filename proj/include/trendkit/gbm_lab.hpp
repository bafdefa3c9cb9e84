#pragma once

#include "trendkit/trend_filter.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trendkit {

struct GbmParams {
    double mu = 0.05;     ///< drift per unit time
    double sigma = 0.2;   ///< volatility per sqrt(time)
    double s0 = 1.0;      ///< initial price
    double t_end = 1.0;   ///< horizon T
    std::size_t steps = 250;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;

    void validate() const;
    double dt() const { return t_end / static_cast<double>(steps); }
    double time(std::size_t k) const { return static_cast<double>(k) * dt(); }
    /// Deterministic mean path S0 exp(mu t_k).
    double mean_path(std::size_t k) const;
};

/// Recorded alongside every statistics output.
inline constexpr std::string_view kGeneratorName = "mt19937_64, per-path seeds via splitmix64";
inline constexpr std::string_view kNormalMethod = "marsaglia-polar";

struct PathEnsemble {
    GbmParams params;
    std::vector<double> times;
    /// paths[p][k] = S at time k * dt, k = 0 .. steps.
    std::vector<std::vector<double>> paths;
};

/// Path `index` of the ensemble. Each path draws from its own generator
/// seeded from (seed, index), so paths do not depend on generation order.
std::vector<double> simulate_path(const GbmParams& params, std::size_t index);

/// Exact log-space stepping:
///   S_k = S0 exp((mu - sigma^2/2) t_k + sigma W_k)
/// which equals the recursion S_{k+1} = S_k exp((mu - sigma^2/2) dt + sigma sqrt(dt) xi).
PathEnsemble simulate_paths(const GbmParams& params);

/// F_k = S_k - S0 exp(mu t_k) on the params grid.
std::vector<double> residual_path(std::span<const double> path, const GbmParams& params);

/// Trapezoidal integral of S_t - S0 exp(mu t) over [0, T].
double residual_integral(std::span<const double> path, const GbmParams& params);

struct ResidualStat {
    double epsilon = 0.0;
    double p_hat = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
};

/// Fraction of paths with |residual integral| > epsilon.
ResidualStat oscillation_probability(const GbmParams& params, double epsilon);

/// The "not small" test: p_hat against the quick-fluctuation threshold, and
/// the per-path oscillation verdicts of the GBM residual next to seeded white
/// noise whose std matches the one-step price move s0 * sigma * sqrt(dt).
struct OscillationVerdict {
    ResidualStat stat;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double threshold = 0.0;
    bool probability_not_small = false;
    std::size_t sampled_paths = 0;
    /// Share of sampled GBM residual paths judged not quickly fluctuating.
    double gbm_not_quick_share = 0.0;
    /// Share of matched white-noise sequences judged quickly fluctuating.
    double noise_quick_share = 0.0;
};

OscillationVerdict oscillation_verdict(const GbmParams& params, double epsilon,
                                       const OscillationOptions& options,
                                       std::size_t sampled_paths = 200);

std::string emit_gbm_stats(const GbmParams& params, const OscillationVerdict& verdict);

/// time, path_0, path_1, ... for the first `count` paths
std::string format_paths(const GbmParams& params, std::size_t count, char delimiter = ',');

} // namespace trendkit
