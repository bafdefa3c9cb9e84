#include "trendkit/algebra_kernel.hpp"

#include "trendkit/text_output.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace trendkit {

namespace {

constexpr double kMaxCondition = 1e12;

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

double binomial(int n, int k)
{
    return factorial(n) / (factorial(k) * factorial(n - k));
}

} // namespace

void EstimatorSpec::validate() const
{
    if (degree < 0) {
        throw std::invalid_argument("estimator degree must be >= 0");
    }
    if (window <= degree + 1) {
        throw std::invalid_argument("underdetermined estimator: window " + std::to_string(window) +
                                    " must exceed degree + 1 = " + std::to_string(degree + 1));
    }
    if (smoothing < 1) {
        throw std::invalid_argument("smoothing (integration count) must be >= 1");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw std::invalid_argument("sample spacing must be positive");
    }
}

KernelBank::KernelBank(EstimatorSpec spec, std::vector<std::vector<double>> weights)
    : spec_(spec), weights_(std::move(weights))
{
    spec_.validate();
    if (weights_.size() != static_cast<std::size_t>(spec_.degree) + 1) {
        throw std::invalid_argument("kernel bank needs one weight sequence per derivative order");
    }
    for (const auto& w : weights_) {
        if (w.size() != window()) {
            throw std::invalid_argument("weight sequence length differs from the window");
        }
        gains_.push_back(kernel_noise_gain(w));
    }
}

std::span<const double> KernelBank::weights(int order) const
{
    if (order < 0 || order > spec_.degree) {
        throw std::out_of_range("derivative order " + std::to_string(order) +
                                " exceeds estimator degree " + std::to_string(spec_.degree));
    }
    return weights_[static_cast<std::size_t>(order)];
}

double KernelBank::noise_gain(int order) const
{
    weights(order);
    return gains_[static_cast<std::size_t>(order)];
}

double KernelBank::apply(int order, std::span<const double> samples) const
{
    const auto w = weights(order);
    if (samples.size() != w.size()) {
        throw std::invalid_argument("sample window length differs from the kernel window");
    }
    // Summed about the newest sample: the weights sum to 1 (order 0) or 0
    // (higher orders) in exact arithmetic, so this form keeps constants exact.
    const double ref = samples.back();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < w.size(); ++j) {
        acc += w[j] * (samples[j] - ref);
    }
    return order == 0 ? ref + acc : acc;
}

std::vector<Polynomial> continuous_kernels(int degree, int smoothing)
{
    if (degree < 0 || smoothing < 1) {
        throw std::invalid_argument("continuous kernels need degree >= 0 and smoothing >= 1");
    }
    const int n = degree;
    const auto size = static_cast<Eigen::Index>(n + 1);

    // Row alpha: sum_nu A(alpha, nu) x_nu = integral_0^1 G_alpha(a) z(a) da.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
    std::vector<Polynomial> g(static_cast<std::size_t>(n + 1));
    for (int alpha = 0; alpha <= n; ++alpha) {
        Polynomial row;
        for (int i = 0; i <= alpha; ++i) {
            const double c = binomial(alpha, i) * factorial(n + 1) / factorial(n + 1 - alpha + i);
            const int m = smoothing + alpha - i;
            Polynomial term = Polynomial::binomial_power(1.0, -1.0, static_cast<std::size_t>(m - 1)) *
                              (1.0 / factorial(m - 1));
            std::vector<double> mono(static_cast<std::size_t>(i) + 1, 0.0);
            mono.back() = (i % 2 == 0) ? 1.0 : -1.0;
            row += c * (term * Polynomial(std::move(mono)));
        }
        g[static_cast<std::size_t>(alpha)] = std::move(row);
        for (int nu = 0; nu <= n - alpha; ++nu) {
            const int p = 1 + smoothing + nu + alpha;
            A(alpha, nu) = factorial(n - nu) / factorial(n - nu - alpha) / factorial(p - 1);
        }
    }

    const Eigen::MatrixXd inv = A.fullPivLu().inverse();
    std::vector<Polynomial> kernels(static_cast<std::size_t>(n + 1));
    for (int nu = 0; nu <= n; ++nu) {
        Polynomial k;
        for (int alpha = 0; alpha <= n; ++alpha) {
            k += inv(nu, alpha) * g[static_cast<std::size_t>(alpha)];
        }
        kernels[static_cast<std::size_t>(nu)] = std::move(k);
    }
    return kernels;
}

KernelBank build_kernel_bank(const EstimatorSpec& spec)
{
    spec.validate();
    const int n = spec.degree;
    const auto w = static_cast<Eigen::Index>(spec.window);
    const double last = static_cast<double>(spec.window - 1);
    const double span = last * spec.spacing;

    // Exactness system in normalized offsets v in [-1, 0].
    Eigen::MatrixXd V(w, n + 1);
    for (Eigen::Index k = 0; k < w; ++k) {
        const double v = (static_cast<double>(k) - last) / last;
        double p = 1.0;
        for (int d = 0; d <= n; ++d) {
            V(k, d) = p;
            p *= v;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxCondition)) {
        throw std::invalid_argument("ill-conditioned estimator (condition number " +
                                    format_double(cond) + ")");
    }
    const Eigen::MatrixXd Vt = V.transpose();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Vt);

    const auto kernels = continuous_kernels(n, spec.smoothing);
    std::vector<std::vector<double>> weights;
    weights.reserve(static_cast<std::size_t>(n) + 1);
    for (int nu = 0; nu <= n; ++nu) {
        const auto& kernel = kernels[static_cast<std::size_t>(nu)];
        const double sign = (nu % 2 == 0) ? 1.0 : -1.0;
        Eigen::VectorXd omega(w);
        for (Eigen::Index k = 0; k < w; ++k) {
            const double age = (last - static_cast<double>(k)) / last;
            omega(k) = sign * kernel(age) / last;
        }
        Eigen::VectorXd target = Eigen::VectorXd::Zero(n + 1);
        target(nu) = std::tgamma(nu + 1.0);
        // Minimum-norm projection onto the exact set, refined once.
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd residual = Vt * omega - target;
            omega -= cod.solve(residual);
        }
        const double scale = std::pow(span, -nu);
        std::vector<double> out(static_cast<std::size_t>(w));
        for (Eigen::Index k = 0; k < w; ++k) {
            out[static_cast<std::size_t>(k)] = omega(k) * scale;
        }
        weights.push_back(std::move(out));
    }
    return KernelBank(spec, std::move(weights));
}

double kernel_noise_gain(std::span<const double> weights)
{
    double ss = 0.0;
    for (double x : weights) {
        ss += x * x;
    }
    return std::sqrt(ss);
}

double kernel_noise_gain(const KernelBank& bank, int order)
{
    return bank.noise_gain(order);
}

std::string format_kernel_bank(const KernelBank& bank, char delimiter)
{
    std::ostringstream out;
    out << "offset";
    for (int nu = 0; nu <= bank.degree(); ++nu) {
        out << delimiter << "w" << nu;
    }
    out << '\n';
    const auto w = bank.window();
    for (std::size_t j = 0; j < w; ++j) {
        const double offset =
            (static_cast<double>(j) - static_cast<double>(w - 1)) * bank.spec().spacing;
        out << format_double(offset);
        for (int nu = 0; nu <= bank.degree(); ++nu) {
            out << delimiter << format_double(bank.weights(nu)[j]);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace trendkit
