#include "trendkit/gbm_lab.hpp"

#include "trendkit/text_output.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace trendkit {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    double operator()()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t path_seed(std::uint64_t seed, std::size_t index)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(0x5A17ULL + index));
}

std::uint64_t noise_seed(std::uint64_t seed, std::size_t index)
{
    return splitmix64(splitmix64(~seed) ^ splitmix64(0xB0B5ULL + index));
}

} // namespace

void GbmParams::validate() const
{
    if (!(s0 > 0.0) || !std::isfinite(s0)) {
        throw std::invalid_argument("initial price s0 must be positive");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("volatility sigma must be >= 0");
    }
    if (!std::isfinite(mu)) {
        throw std::invalid_argument("drift mu must be finite");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("horizon t_end must be positive");
    }
    if (steps < 1) {
        throw std::invalid_argument("steps must be >= 1");
    }
    if (paths < 1) {
        throw std::invalid_argument("paths must be >= 1");
    }
}

double GbmParams::mean_path(std::size_t k) const
{
    return s0 * std::exp(mu * time(k));
}

std::vector<double> simulate_path(const GbmParams& params, std::size_t index)
{
    params.validate();
    NormalSource normal(path_seed(params.seed, index));
    const double drift = params.mu - params.sigma * params.sigma / 2.0;
    const double root_dt = std::sqrt(params.dt());
    std::vector<double> path(params.steps + 1);
    double w = 0.0;
    path[0] = params.s0;
    for (std::size_t k = 1; k <= params.steps; ++k) {
        w += root_dt * normal();
        path[k] = params.s0 * std::exp(drift * params.time(k) + params.sigma * w);
    }
    return path;
}

PathEnsemble simulate_paths(const GbmParams& params)
{
    params.validate();
    PathEnsemble ens;
    ens.params = params;
    ens.times.resize(params.steps + 1);
    for (std::size_t k = 0; k <= params.steps; ++k) {
        ens.times[k] = params.time(k);
    }
    ens.paths.reserve(params.paths);
    for (std::size_t p = 0; p < params.paths; ++p) {
        ens.paths.push_back(simulate_path(params, p));
    }
    return ens;
}

std::vector<double> residual_path(std::span<const double> path, const GbmParams& params)
{
    params.validate();
    if (path.size() != params.steps + 1) {
        throw std::invalid_argument("path has " + std::to_string(path.size()) +
                                    " samples, grid needs " + std::to_string(params.steps + 1));
    }
    std::vector<double> f(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        f[k] = path[k] - params.mean_path(k);
    }
    return f;
}

double residual_integral(std::span<const double> path, const GbmParams& params)
{
    const auto f = residual_path(path, params);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
        acc += f[k] + f[k + 1];
    }
    return acc * params.dt() / 2.0;
}

ResidualStat oscillation_probability(const GbmParams& params, double epsilon)
{
    params.validate();
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be > 0");
    }
    std::size_t hits = 0;
    for (std::size_t p = 0; p < params.paths; ++p) {
        const auto path = simulate_path(params, p);
        if (std::abs(residual_integral(path, params)) > epsilon) {
            ++hits;
        }
    }
    ResidualStat stat;
    stat.epsilon = epsilon;
    stat.paths = params.paths;
    stat.p_hat = static_cast<double>(hits) / static_cast<double>(params.paths);
    stat.std_error = std::sqrt(stat.p_hat * (1.0 - stat.p_hat) / static_cast<double>(params.paths));
    return stat;
}

OscillationVerdict oscillation_verdict(const GbmParams& params, double epsilon,
                                       const OscillationOptions& options,
                                       std::size_t sampled_paths)
{
    OscillationVerdict v;
    v.stat = oscillation_probability(params, epsilon);
    v.ci_lo = std::max(0.0, v.stat.p_hat - 1.96 * v.stat.std_error);
    v.ci_hi = std::min(1.0, v.stat.p_hat + 1.96 * v.stat.std_error);
    v.threshold = options.threshold;
    v.probability_not_small = v.stat.p_hat > options.threshold;

    const auto sampled = std::min(sampled_paths, params.paths);
    v.sampled_paths = sampled;
    if (sampled == 0) {
        return v;
    }
    std::vector<double> level(params.steps + 1);
    for (std::size_t k = 0; k <= params.steps; ++k) {
        level[k] = params.mean_path(k);
    }
    const double noise_std = params.s0 * params.sigma * std::sqrt(params.dt());
    const double noise_scale = mean_abs(level);
    std::size_t gbm_not_quick = 0;
    std::size_t noise_quick = 0;
    for (std::size_t p = 0; p < sampled; ++p) {
        const auto path = simulate_path(params, p);
        OscillationOptions opts = options;
        opts.scale = mean_abs(path);
        if (oscillation_score(residual_path(path, params), opts).verdict ==
            Oscillation::not_quickly_fluctuating) {
            ++gbm_not_quick;
        }

        NormalSource normal(noise_seed(params.seed, p));
        std::vector<double> noise(params.steps + 1);
        for (auto& x : noise) {
            x = noise_std * normal();
        }
        opts.scale = noise_scale;
        if (oscillation_score(noise, opts).verdict == Oscillation::quickly_fluctuating) {
            ++noise_quick;
        }
    }
    v.gbm_not_quick_share = static_cast<double>(gbm_not_quick) / static_cast<double>(sampled);
    v.noise_quick_share = static_cast<double>(noise_quick) / static_cast<double>(sampled);
    return v;
}

std::string emit_gbm_stats(const GbmParams& params, const OscillationVerdict& verdict)
{
    nlohmann::ordered_json doc;
    doc["mu"] = params.mu;
    doc["sigma"] = params.sigma;
    doc["s0"] = params.s0;
    doc["t_end"] = params.t_end;
    doc["steps"] = params.steps;
    doc["paths"] = params.paths;
    doc["seed"] = params.seed;
    doc["generator"] = kGeneratorName;
    doc["normal_method"] = kNormalMethod;
    doc["epsilon"] = verdict.stat.epsilon;
    doc["p_hat"] = verdict.stat.p_hat;
    doc["std_error"] = verdict.stat.std_error;
    doc["ci95_lo"] = verdict.ci_lo;
    doc["ci95_hi"] = verdict.ci_hi;
    doc["oscillation_threshold"] = verdict.threshold;
    doc["probability_not_small"] = verdict.probability_not_small;
    doc["sampled_paths"] = verdict.sampled_paths;
    doc["gbm_not_quick_share"] = verdict.gbm_not_quick_share;
    doc["white_noise_quick_share"] = verdict.noise_quick_share;
    doc["verdict"] = std::string("p_hat ") + format_double(verdict.stat.p_hat) +
                     (verdict.probability_not_small ? " > " : " <= ") + "threshold " +
                     format_double(verdict.threshold) +
                     (verdict.probability_not_small
                          ? ": residual about the mean trend is not quickly fluctuating"
                          : ": no evidence against quick fluctuation");
    return doc.dump(2) + "\n";
}

std::string format_paths(const GbmParams& params, std::size_t count, char delimiter)
{
    params.validate();
    count = std::min(count, params.paths);
    std::vector<std::vector<double>> paths;
    for (std::size_t p = 0; p < count; ++p) {
        paths.push_back(simulate_path(params, p));
    }
    std::ostringstream out;
    out << "time";
    for (std::size_t p = 0; p < count; ++p) {
        out << delimiter << "path_" << p;
    }
    out << '\n';
    for (std::size_t k = 0; k <= params.steps; ++k) {
        out << format_double(params.time(k));
        for (const auto& path : paths) {
            out << delimiter << format_double(path[k]);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace trendkit
