#include "trendkit/trend_filter.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace trendkit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PriceSeries noisy_walk(std::uint64_t seed, std::size_t n)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    double x = 200.0;
    for (auto& y : v) {
        x += g(rng);
        y = x;
    }
    return make_price_series("walk", v);
}

double brute_oscillation(const std::vector<double>& x, std::size_t lmin)
{
    double best = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        for (std::size_t b = a + lmin; b <= x.size(); ++b) {
            double s = 0.0;
            for (std::size_t i = a; i < b; ++i) {
                s += x[i];
            }
            best = std::max(best, std::abs(s) / static_cast<double>(b - a));
        }
    }
    return best;
}

} // namespace

TEST_CASE("constant series has a flat trend and no fluctuation", "[trend_filter]")
{
    for (int N = 0; N <= 2; ++N) {
        const auto bank = build_kernel_bank({N, 9, 1.0, 1});
        const auto dec = sliding_trend(make_price_series("c", std::vector<double>(40, 3.0)), bank);
        REQUIRE(dec.warmup == 8);
        REQUIRE(dec.size() == 32);
        for (std::size_t i = dec.warmup; i < 40; ++i) {
            CHECK(dec.trend_at(i) == 3.0);
            CHECK(dec.fluctuation_at(i) == 0.0);
            if (N >= 1) {
                CHECK_THAT(dec.derivative_at(1, i), WithinAbs(0.0, 1e-12));
            }
        }
    }
}

TEST_CASE("quadratic source recovers value and derivatives", "[trend_filter]")
{
    const auto bank = build_kernel_bank({2, 5, 1.0, 1});
    const std::vector<double> window{0.0, 1.0, 4.0, 9.0, 16.0};
    CHECK_THAT(bank.apply(0, window), WithinAbs(16.0, 1e-12));
    CHECK_THAT(bank.apply(1, window), WithinAbs(8.0, 1e-12));
    CHECK_THAT(bank.apply(2, window), WithinAbs(2.0, 1e-12));

    std::vector<double> v(12);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(i * i) + 1.0;
    }
    const auto dec = sliding_trend(make_price_series("q", v), bank);
    CHECK_THAT(dec.trend_at(4), WithinAbs(17.0, 1e-12));
    CHECK_THAT(dec.derivative_at(1, 4), WithinAbs(8.0, 1e-12));
    CHECK_THAT(dec.derivative_at(2, 4), WithinAbs(2.0, 1e-12));
    CHECK(dec.derivative_at(3, 4) == 0.0);
    CHECK(dec.d1().size() == dec.size());
    CHECK(dec.d2().size() == dec.size());
}

TEST_CASE("polynomial sources leave no fluctuation", "[trend_filter][property]")
{
    for (int N = 0; N <= 2; ++N) {
        std::vector<double> v(80);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double t = static_cast<double>(i);
            v[i] = 10.0 + (N >= 1 ? 0.5 * t : 0.0) + (N >= 2 ? 0.01 * t * t : 0.0);
        }
        const auto dec = sliding_trend(make_price_series("p", v), build_kernel_bank({N, 21, 1.0, 2}));
        for (std::size_t i = dec.warmup; i < v.size(); ++i) {
            CHECK(std::abs(dec.fluctuation_at(i)) <= 1e-9 * v[i]);
        }
    }
}

TEST_CASE("trend plus fluctuation reconstructs the source exactly", "[trend_filter][property]")
{
    const auto bank = build_kernel_bank(EstimatorSpec{});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = noisy_walk(seed, 400);
        const auto dec = sliding_trend(s, bank);
        for (std::size_t i = dec.warmup; i < s.size(); ++i) {
            REQUIRE(dec.trend_at(i) + dec.fluctuation_at(i) == s.values[i]);
        }
    }
}

TEST_CASE("sliding_trend is linear and shift-covariant", "[trend_filter][property]")
{
    const auto bank = build_kernel_bank(EstimatorSpec{});
    const auto a = noisy_walk(1, 300);
    const auto b = noisy_walk(2, 300);
    const double alpha = 0.75, beta = 1.5, c = 12.5;
    std::vector<double> mix(300), shifted(300);
    for (std::size_t i = 0; i < 300; ++i) {
        mix[i] = alpha * a.values[i] + beta * b.values[i];
        shifted[i] = a.values[i] + c;
    }
    const auto da = sliding_trend(a, bank);
    const auto db = sliding_trend(b, bank);
    const auto dm = sliding_trend(make_price_series("m", mix), bank);
    const auto ds = sliding_trend(make_price_series("s", shifted), bank);
    for (std::size_t i = da.warmup; i < 300; ++i) {
        const double want = alpha * da.trend_at(i) + beta * db.trend_at(i);
        REQUIRE_THAT(dm.trend_at(i), WithinAbs(want, 1e-12 * std::abs(want)));
        REQUIRE_THAT(ds.trend_at(i), WithinAbs(da.trend_at(i) + c, 1e-12 * ds.trend_at(i)));
        REQUIRE_THAT(ds.fluctuation_at(i), WithinAbs(da.fluctuation_at(i), 1e-11));
        REQUIRE_THAT(ds.derivative_at(1, i), WithinAbs(da.derivative_at(1, i), 1e-11));
    }
}

TEST_CASE("trend error on noisy quadratics follows the noise gain", "[trend_filter][property]")
{
    const auto bank = build_kernel_bank(EstimatorSpec{});
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    constexpr int trials = 10000;
    double s = 0.0, s2 = 0.0;
    std::vector<double> v(21);
    for (int k = 0; k < trials; ++k) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double t = static_cast<double>(i);
            v[i] = 100.0 + 0.2 * t + 0.01 * t * t + g(rng);
        }
        const auto dec = sliding_trend(make_price_series("n", v), bank);
        const double err = dec.trend_at(20) - (100.0 + 4.0 + 4.0);
        s += err;
        s2 += err * err;
    }
    const double mean = s / trials;
    const double sd = std::sqrt((s2 - trials * mean * mean) / (trials - 1));
    CHECK_THAT(sd, WithinRel(bank.noise_gain(0), 0.10));
}

TEST_CASE("warm-up and mismatches are rejected", "[trend_filter]")
{
    const auto bank = build_kernel_bank(EstimatorSpec{});
    CHECK_THROWS_WITH(sliding_trend(noisy_walk(0, 20), bank), ContainsSubstring("shorter"));
    const auto dec = sliding_trend(noisy_walk(0, 21), bank);
    CHECK(dec.size() == 1);
    CHECK_THROWS_AS(dec.trend_at(19), std::out_of_range);
    CHECK_THROWS_AS(dec.fluctuation_at(21), std::out_of_range);
    CHECK_NOTHROW(dec.trend_at(20));

    const auto half = make_price_series("h", std::vector<double>(30, 1.0), 0.5);
    CHECK_THROWS_WITH(sliding_trend(half, bank), ContainsSubstring("spacing"));

    const auto flat = sliding_trend(make_price_series("c", std::vector<double>(5, 1.0)),
                                    build_kernel_bank({0, 2, 1.0, 1}));
    CHECK_THROWS_AS(flat.d1(), std::out_of_range);
}

TEST_CASE("oscillation score examples", "[trend_filter]")
{
    SECTION("zero")
    {
        const std::vector<double> z(50, 0.0);
        const auto r = oscillation_score(z);
        CHECK(r.score == 0.0);
        CHECK(r.verdict == Oscillation::quickly_fluctuating);
    }
    SECTION("constant bias")
    {
        const std::vector<double> c(50, 0.3);
        OscillationOptions opts;
        opts.scale = 2.0;
        const auto r = oscillation_score(c, opts);
        CHECK_THAT(r.score, WithinAbs(0.15, 1e-15));
        CHECK(r.scale == 2.0);
        CHECK(r.verdict == Oscillation::not_quickly_fluctuating);
    }
    SECTION("alternating sign against exhaustive enumeration")
    {
        std::vector<double> x(100);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = i % 2 == 0 ? 0.8 : -0.8;
        }
        OscillationOptions opts;
        opts.min_window = 10;
        opts.scale = 1.6;
        const auto r = oscillation_score(x, opts);
        CHECK(r.score <= 0.8 / (10 * 1.6) + 1e-15);
        CHECK_THAT(r.score, WithinAbs(brute_oscillation(x, 10) / 1.6, 1e-15));
        CHECK(r.verdict == Oscillation::quickly_fluctuating);
    }
}

TEST_CASE("oscillation score matches brute force on random data", "[trend_filter][property]")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g(0.1, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(60);
        for (auto& v : x) {
            v = g(rng);
        }
        for (std::size_t lmin : {1U, 5U, 30U}) {
            OscillationOptions opts;
            opts.min_window = lmin;
            REQUIRE_THAT(oscillation_score(x, opts).score,
                         WithinAbs(brute_oscillation(x, lmin), 1e-12));
        }
    }
}

TEST_CASE("oscillation score is sign-invariant and monotone in the minimum window",
          "[trend_filter][property]")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(300), neg(300);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = g(rng) + 0.3 * std::sin(0.05 * static_cast<double>(i));
        neg[i] = -x[i];
    }
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t lmin = 1; lmin <= 300; lmin += 13) {
        OscillationOptions opts;
        opts.min_window = lmin;
        opts.scale = mean_abs(x);
        const auto r = oscillation_score(x, opts);
        CHECK(r.score == oscillation_score(neg, opts).score);
        CHECK(r.score <= previous);
        previous = r.score;
    }
}

TEST_CASE("oscillation options are validated", "[trend_filter]")
{
    const std::vector<double> x(10, 1.0);
    CHECK_THROWS(oscillation_score(std::vector<double>{}));
    OscillationOptions opts;
    opts.min_window = 11;
    CHECK_THROWS(oscillation_score(x, opts));
    opts.min_window = 2;
    opts.stride = 0;
    CHECK_THROWS(oscillation_score(x, opts));
    opts.stride = 1;
    opts.scale = 0.0;
    CHECK_THROWS(oscillation_score(x, opts));
    CHECK_THROWS(mean_abs(std::vector<double>{}));
    CHECK(to_string(Oscillation::quickly_fluctuating) != to_string(Oscillation::not_quickly_fluctuating));
}

TEST_CASE("decomposition table has one row per aligned sample", "[trend_filter]")
{
    const auto dec = sliding_trend(noisy_walk(3, 30), build_kernel_bank(EstimatorSpec{}));
    const auto text = format_decomposition(dec);
    CHECK(text.rfind("index,date,price,trend,d1,d2,fluctuation\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 11);
}
