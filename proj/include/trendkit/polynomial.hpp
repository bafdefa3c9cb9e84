#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace trendkit {

/// Dense real polynomial, coefficients in increasing degree.
struct Polynomial {
    std::vector<double> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

    static Polynomial constant(double c) { return Polynomial({c}); }

    std::size_t degree() const
    {
        std::size_t d = coeffs.empty() ? 0 : coeffs.size() - 1;
        while (d > 0 && coeffs[d] == 0.0) {
            --d;
        }
        return d;
    }

    double operator()(double x) const
    {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }

    Polynomial& operator+=(const Polynomial& other)
    {
        if (coeffs.size() < other.coeffs.size()) {
            coeffs.resize(other.coeffs.size(), 0.0);
        }
        for (std::size_t i = 0; i < other.coeffs.size(); ++i) {
            coeffs[i] += other.coeffs[i];
        }
        return *this;
    }

    Polynomial& operator*=(double s)
    {
        for (auto& c : coeffs) {
            c *= s;
        }
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.coeffs.empty() || b.coeffs.empty()) {
            return {};
        }
        std::vector<double> out(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
            for (std::size_t j = 0; j < b.coeffs.size(); ++j) {
                out[i + j] += a.coeffs[i] * b.coeffs[j];
            }
        }
        return Polynomial(std::move(out));
    }

    /// (c0 + c1 x)^n
    static Polynomial binomial_power(double c0, double c1, std::size_t n)
    {
        Polynomial p = constant(1.0);
        const Polynomial base({c0, c1});
        for (std::size_t i = 0; i < n; ++i) {
            p = p * base;
        }
        return p;
    }
};

} // namespace trendkit
