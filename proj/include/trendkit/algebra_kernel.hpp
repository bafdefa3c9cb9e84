#pragma once

#include "trendkit/polynomial.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace trendkit {

/// Parameters of a finite-window derivative estimator.
struct EstimatorSpec {
    int degree = 2;      ///< truncation order N of the local Taylor model
    int window = 21;     ///< W samples; must exceed degree + 1
    double spacing = 1.0;///< sample interval in time units
    int smoothing = 1;   ///< extra integration count, >= 1

    void validate() const;
};

/// Per-order weight sequences estimating value and derivatives at the right
/// edge of a trailing window. weights(nu)[j] multiplies the sample at offset
/// (j - W + 1) * spacing, so the last weight belongs to the newest sample.
class KernelBank {
public:
    KernelBank(EstimatorSpec spec, std::vector<std::vector<double>> weights);

    const EstimatorSpec& spec() const { return spec_; }
    int degree() const { return spec_.degree; }
    std::size_t window() const { return static_cast<std::size_t>(spec_.window); }

    std::span<const double> weights(int order) const;
    double noise_gain(int order) const;

    /// Estimate of the order-th derivative at the newest sample of `samples`
    /// (which must hold exactly window() values, oldest first).
    double apply(int order, std::span<const double> samples) const;

private:
    EstimatorSpec spec_;
    std::vector<std::vector<double>> weights_;
    std::vector<double> gains_;
};

/// Continuous estimator kernels on the unit window. Entry nu is a polynomial
/// K_nu in the sample age a in [0, 1] (a = 0 is the estimation point) with
/// z^(nu)(0) = integral_0^1 K_nu(a) z(a) da exactly for every polynomial z of
/// degree <= degree. Obtained by eliminating the unknown initial derivatives
/// from the Laplace-domain identities d^alpha/ds^alpha (s^(N+1) X) after
/// dividing by s^(N+1+smoothing); each s^-m * d^i/ds^i term maps to the time
/// integral of (1-a)^(m-1)/(m-1)! * (-a)^i.
std::vector<Polynomial> continuous_kernels(int degree, int smoothing);

KernelBank build_kernel_bank(const EstimatorSpec& spec);

double kernel_noise_gain(const KernelBank& bank, int order);
double kernel_noise_gain(std::span<const double> weights);

/// Debug table: offset, w_0, ..., w_N per row.
std::string format_kernel_bank(const KernelBank& bank, char delimiter = ',');

} // namespace trendkit
