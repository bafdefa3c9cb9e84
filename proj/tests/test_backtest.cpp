#include "trendkit/backtest.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

using namespace trendkit;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

PriceSeries log_walk(std::uint64_t seed, std::size_t n)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.02);
    std::vector<double> v(n);
    double lx = std::log(40.0);
    for (auto& y : v) {
        lx += g(rng);
        y = std::exp(lx);
    }
    return make_price_series("walk", v);
}

} // namespace

TEST_CASE("position scoring counts", "[backtest]")
{
    using P = Position;
    const std::vector<P> realized{P::above, P::under, P::above, P::under, P::above};

    auto all_same = score_positions(realized, realized);
    CHECK(all_same.exact_pct == 100.0);
    CHECK(all_same.nodecision_pct == 0.0);
    CHECK(all_same.wrong_pct == 0.0);

    const std::vector<P> none(5, P::no_decision);
    auto undecided = score_positions(none, realized);
    CHECK(undecided.nodecision_pct == 100.0);
    CHECK(undecided.exact_pct == 0.0);

    const std::vector<P> mixed{P::above, P::under, P::above, P::no_decision, P::under};
    auto m = score_positions(mixed, realized);
    CHECK(m.exact_pct == 60.0);
    CHECK(m.nodecision_pct == 20.0);
    CHECK(m.wrong_pct == 20.0);

    CHECK_THROWS(score_positions(std::vector<P>{P::above}, realized));
    CHECK_THROWS(score_positions(std::vector<P>{}, std::vector<P>{}));
    CHECK_THROWS(score_positions(std::vector<P>{P::above}, std::vector<P>{P::no_decision}));
}

TEST_CASE("position scoring is permutation invariant and sums to 100", "[backtest][property]")
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<int> side(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<Position, Position>> pairs(37);
        for (auto& [p, r] : pairs) {
            p = static_cast<Position>(pick(rng));
            r = side(rng) == 0 ? Position::above : Position::under;
        }
        auto split = [&] {
            std::vector<Position> p, r;
            for (const auto& [a, b] : pairs) {
                p.push_back(a);
                r.push_back(b);
            }
            return score_positions(p, r);
        };
        const auto before = split();
        std::shuffle(pairs.begin(), pairs.end(), rng);
        const auto after = split();
        REQUIRE(before.exact_pct == after.exact_pct);
        REQUIRE(before.nodecision_pct == after.nodecision_pct);
        REQUIRE(before.wrong_pct == after.wrong_pct);
        REQUIRE_THAT(before.exact_pct + before.nodecision_pct + before.wrong_pct,
                     WithinAbs(100.0, 1e-9));
    }
}

TEST_CASE("smooth convex growth is called perfectly", "[backtest]")
{
    // Price runs above a quadratic trend fit of an exponential, and the short
    // filter tracks the curvature better than the long one.
    std::vector<double> v(400);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = 10.0 * std::exp(0.01 * static_cast<double>(i));
    }
    const auto report = walk_forward(make_price_series("exp", v), BacktestConfig{});
    REQUIRE(report.horizons.size() == 2);
    for (const auto& h : report.horizons) {
        CHECK(h.exact_pct == 100.0);
        CHECK(h.nodecision_pct == 0.0);
        CHECK(h.wrong_pct == 0.0);
        CHECK(h.origins > 0);
    }
    const auto text = emit_report(report, ReportFormat::text);
    CHECK_THAT(text, ContainsSubstring("h=1: 100.00 / 0.00 / 0.00"));
    CHECK_THAT(text, ContainsSubstring("h=5: 100.00 / 0.00 / 0.00"));
}

TEST_CASE("synthetic sinusoid agrees with the reference pipeline", "[backtest]")
{
    const auto series = load_prices(std::string(TRENDKIT_TEST_DATA) + "/synthetic_sine.csv");
    std::ifstream in(std::string(TRENDKIT_TEST_DATA) + "/synthetic_sine_oracle.json");
    const auto oracle = nlohmann::json::parse(in);
    const auto report = walk_forward(series, BacktestConfig{});
    for (const auto& h : report.horizons) {
        const auto& ref = oracle.at("h" + std::to_string(h.horizon));
        CHECK(h.origins == ref.at("origins").get<std::size_t>());
        CHECK_THAT(h.exact_pct, WithinAbs(ref.at("exact_pct").get<double>(), 1e-9));
        CHECK_THAT(h.nodecision_pct, WithinAbs(ref.at("nodecision_pct").get<double>(), 1e-9));
        CHECK_THAT(h.wrong_pct, WithinAbs(ref.at("wrong_pct").get<double>(), 1e-9));
        CHECK_THAT(h.exact_pct + h.nodecision_pct + h.wrong_pct, WithinAbs(100.0, 1e-9));
        CHECK(h.first_origin == 140);
        CHECK(h.last_origin + static_cast<std::size_t>(h.horizon) <= series.size() - 1);
    }
}

TEST_CASE("exact share degrades with the horizon on random walks", "[backtest][property]")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto report = walk_forward(log_walk(seed, 2000), BacktestConfig{});
        INFO("seed " << seed);
        CHECK(report.horizons.at(1).exact_pct <= report.horizons.at(0).exact_pct);
    }
}

TEST_CASE("structured report round-trips", "[backtest]")
{
    const auto series = log_walk(3, 600);
    BacktestConfig cfg;
    cfg.horizons = {1, 3, 10};
    const auto report = walk_forward(series, cfg);
    const auto doc = emit_report(report, ReportFormat::structured);
    const auto back = parse_report(doc);
    CHECK(back.series_name == report.series_name);
    CHECK(back.series_length == report.series_length);
    CHECK(back.level == report.level);
    REQUIRE(back.horizons.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& a = report.horizons[i];
        const auto& b = back.horizons[i];
        CHECK(a.horizon == b.horizon);
        CHECK(a.exact_pct == b.exact_pct);
        CHECK(a.nodecision_pct == b.nodecision_pct);
        CHECK(a.wrong_pct == b.wrong_pct);
        CHECK(a.rmse == b.rmse);
        CHECK(a.band_coverage == b.band_coverage);
        CHECK(a.heteroscedasticity == b.heteroscedasticity);
        CHECK(a.origins == b.origins);
        CHECK(a.skipped == b.skipped);
        CHECK(a.first_origin == b.first_origin);
        CHECK(a.last_origin == b.last_origin);
    }
    CHECK(emit_report(back, ReportFormat::structured) == doc);

    BacktestReport inf_report = report;
    inf_report.horizons[0].heteroscedasticity = std::numeric_limits<double>::infinity();
    const auto inf_back = parse_report(emit_report(inf_report, ReportFormat::structured));
    CHECK(std::isinf(inf_back.horizons[0].heteroscedasticity));
}

TEST_CASE("reports are deterministic", "[backtest]")
{
    const auto series = log_walk(4, 500);
    const auto a = walk_forward_detailed(series, BacktestConfig{});
    const auto b = walk_forward_detailed(series, BacktestConfig{});
    CHECK(emit_report(a.report, ReportFormat::structured) ==
          emit_report(b.report, ReportFormat::structured));
    CHECK(emit_report(a.report, ReportFormat::text) == emit_report(b.report, ReportFormat::text));
    CHECK(format_backtest_detail(a, series) == format_backtest_detail(b, series));
}

TEST_CASE("zero-variance origins are skipped and tallied", "[backtest]")
{
    // Flat price: the fluctuation is identically zero everywhere.
    const auto series = make_price_series("flat", std::vector<double>(300, 5.0));
    const auto report = walk_forward(series, BacktestConfig{});
    for (const auto& h : report.horizons) {
        CHECK(h.origins == 0);
        CHECK(h.skipped == 300 - 140 - static_cast<std::size_t>(h.horizon));
    }
}

TEST_CASE("backtest configuration and length are validated", "[backtest]")
{
    BacktestConfig cfg;
    CHECK(minimum_length(cfg) == 146);
    CHECK_THROWS_WITH(walk_forward(log_walk(1, 145), cfg), ContainsSubstring("146"));
    CHECK_NOTHROW(walk_forward(log_walk(1, 146), cfg));

    BacktestConfig bad = cfg;
    bad.horizons.clear();
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.horizons = {0};
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.level = 0.0;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.level = 1.0;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.deadband_mult = -0.1;
    CHECK_THROWS(bad.validate());
    bad = cfg;
    bad.moment_window = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("detail table carries one row per scored origin", "[backtest]")
{
    const auto series = log_walk(5, 300);
    const auto run = walk_forward_detailed(series, BacktestConfig{});
    std::size_t scored = 0;
    for (const auto& h : run.report.horizons) {
        scored += h.origins;
    }
    CHECK(run.detail.size() == scored);
    const auto text = format_backtest_detail(run, series);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == scored + 1);
    CHECK(text.rfind("index,date,horizon,trend_hat,lo,hi,position", 0) == 0);
}
