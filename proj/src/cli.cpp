#include "trendkit/cli.hpp"

#include "trendkit/fluct_stats.hpp"
#include "trendkit/forecast.hpp"
#include "trendkit/text_output.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace trendkit {

namespace {

const std::map<std::string, Subcommand> kSubcommands{
    {"decompose", Subcommand::decompose}, {"moments", Subcommand::moments},
    {"forecast", Subcommand::forecast},   {"backtest", Subcommand::backtest},
    {"gbm", Subcommand::gbm},
};

using Outputs = std::vector<std::pair<std::string, std::string>>;

EstimatorSpec with_spacing(EstimatorSpec spec, double spacing)
{
    spec.spacing = spacing;
    return spec;
}

Outputs run_decompose(const RunConfig& cfg, const PriceSeries& series)
{
    const auto bank = build_kernel_bank(with_spacing(cfg.backtest.slow, series.spacing));
    const auto dec = sliding_trend(series, bank);
    OscillationOptions opts = cfg.oscillation;
    const std::span<const double> aligned(series.values.data() + dec.warmup, dec.size());
    opts.scale = mean_abs(aligned);
    const auto report = oscillation_score(dec.fluctuation, opts);

    nlohmann::ordered_json doc;
    doc["series"] = series.name;
    doc["window"] = cfg.backtest.slow.window;
    doc["degree"] = cfg.backtest.slow.degree;
    doc["smoothing"] = cfg.backtest.slow.smoothing;
    doc["score"] = report.score;
    doc["scale"] = report.scale;
    doc["min_window"] = report.min_window;
    doc["threshold"] = report.threshold;
    doc["verdict"] = to_string(report.verdict);

    Outputs files{{"decomposition.csv", format_decomposition(dec)},
                  {"oscillation.json", doc.dump(2) + "\n"}};
    if (cfg.dump_kernels) {
        files.emplace_back("kernel_slow.csv", format_kernel_bank(bank));
        files.emplace_back(
            "kernel_fast.csv",
            format_kernel_bank(build_kernel_bank(with_spacing(cfg.backtest.fast, series.spacing))));
    }
    return files;
}

Outputs run_moments(const RunConfig& cfg, const PriceSeries& series)
{
    const auto bank = build_kernel_bank(with_spacing(cfg.backtest.slow, series.spacing));
    const auto dec = sliding_trend(series, bank);
    const auto track = moment_tracks(dec, cfg.backtest.moment_window);
    return {{"moments.csv", format_moments(track, series)}};
}

Outputs run_forecast(const RunConfig& cfg, const PriceSeries& series)
{
    const auto& bt = cfg.backtest;
    const PositionForecaster forecaster(series, with_spacing(bt.slow, series.spacing),
                                        with_spacing(bt.fast, series.spacing), bt.moment_window);
    if (forecaster.first_origin() >= series.size()) {
        throw std::invalid_argument("series of length " + std::to_string(series.size()) +
                                    " is too short to forecast: need at least " +
                                    std::to_string(forecaster.first_origin() + 1) + " samples");
    }
    std::ostringstream csv;
    csv << "index,date,horizon,trend_hat,lo,hi,position\n";
    for (std::size_t t = forecaster.first_origin(); t < series.size(); ++t) {
        for (int h : bt.horizons) {
            const auto p = forecaster.at(t, h, bt.level, bt.deadband_mult);
            csv << t << ',' << series.date_label(t) << ',' << h << ','
                << format_double(p.trend_hat) << ',' << format_double(p.band.lo) << ','
                << format_double(p.band.hi) << ',' << to_string(p.position) << '\n';
        }
    }
    nlohmann::ordered_json meta;
    meta["series"] = series.name;
    meta["band_model"] = "gaussian";
    meta["level"] = bt.level;
    meta["z"] = normal_two_sided_quantile(bt.level);
    meta["deadband_mult"] = bt.deadband_mult;
    meta["first_origin"] = forecaster.first_origin();
    return {{"forecast.csv", csv.str()}, {"forecast.json", meta.dump(2) + "\n"}};
}

Outputs run_backtest(const RunConfig& cfg, const PriceSeries& series, std::ostream& out)
{
    const auto result = walk_forward_detailed(series, cfg.backtest);
    const auto text = emit_report(result.report, ReportFormat::text);
    out << text;
    return {{"report.txt", text},
            {"report.json", emit_report(result.report, ReportFormat::structured)},
            {"backtest_detail.csv", format_backtest_detail(result, series)}};
}

Outputs run_gbm(const RunConfig& cfg, std::ostream& out)
{
    GbmParams params = cfg.gbm;
    params.seed = cfg.seed;
    const auto verdict = oscillation_verdict(params, cfg.epsilon, cfg.oscillation);
    Outputs files{{"gbm_stats.json", emit_gbm_stats(params, verdict)}};
    if (cfg.dump_paths > 0) {
        files.emplace_back("paths.csv", format_paths(params, cfg.dump_paths));
    }
    out << "p_hat " << format_double(verdict.stat.p_hat) << " +/- "
        << format_double(verdict.stat.std_error) << " (epsilon " << format_double(cfg.epsilon)
        << ", threshold " << format_double(verdict.threshold) << ")\n";
    return files;
}

} // namespace

void RunConfig::validate() const
{
    if (subcommand != Subcommand::gbm) {
        if (input.empty()) {
            throw std::invalid_argument("--input is required");
        }
        if (!std::filesystem::exists(input)) {
            throw std::invalid_argument("input file " + input.string() + " does not exist");
        }
    }
    backtest.validate();
    if (oscillation.min_window < 1) {
        throw std::invalid_argument("--oscillation-min-window must be >= 1");
    }
    if (!(oscillation.threshold >= 0.0)) {
        throw std::invalid_argument("--oscillation-threshold must be >= 0");
    }
    gbm.validate();
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("--epsilon must be > 0");
    }
}

ParseResult parse_command_line(int argc, const char* const* argv)
{
    ParseResult result;
    RunConfig& cfg = result.config;
    auto& bt = cfg.backtest;

    CLI::App app{"Model-free trend extraction, moment forecasting and position backtesting "
                 "for daily price series",
                 "trendkit"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();

    app.add_option("--input", cfg.input, "Delimited price file with a header row (path)");
    app.add_option("--out-dir", cfg.out_dir, "Directory for output files (path)");
    app.add_option("--date-col", cfg.columns.date_column, "Date column name (ISO-8601 dates)");
    app.add_option("--price-col", cfg.columns.price_column, "Price column name (currency units)");
    app.add_option("--window", bt.slow.window, "Slow (trend) filter window W (samples)");
    app.add_option("--fast-window", bt.fast.window,
                   "Fast filter window for the price forecast (samples)");
    app.add_option("--degree", bt.slow.degree, "Polynomial degree N of both filters (integer)");
    app.add_option("--smoothing", bt.slow.smoothing,
                   "Extra integration count kappa of both filters (integer >= 1)");
    app.add_option("--moment-window", bt.moment_window,
                   "Moment window M; moments use M + 1 samples (samples)");
    app.add_option("--horizons", bt.horizons, "Forecast horizons, comma separated (days)")
        ->delimiter(',');
    app.add_option("--level", bt.level, "Confidence band level (fraction in (0,1))");
    app.add_option("--deadband-mult", bt.deadband_mult,
                   "No-decision deadband as a multiple of the predicted std (dimensionless)");
    app.add_option("--oscillation-min-window", cfg.oscillation.min_window,
                   "Smallest subwindow in the oscillation score (samples)");
    app.add_option("--oscillation-threshold", cfg.oscillation.threshold,
                   "Oscillation score threshold (fraction of mean |price|)");
    app.add_option("--mu", cfg.gbm.mu, "GBM drift (per unit time)");
    app.add_option("--sigma", cfg.gbm.sigma, "GBM volatility (per sqrt time)");
    app.add_option("--s0", cfg.gbm.s0, "GBM initial price (currency units)");
    app.add_option("--t-end", cfg.gbm.t_end, "GBM horizon T (time units)");
    app.add_option("--steps", cfg.gbm.steps, "GBM grid steps over [0, T] (count)");
    app.add_option("--paths", cfg.gbm.paths, "GBM ensemble size (count)");
    app.add_option("--epsilon", cfg.epsilon, "Threshold on |integral of residual| (price x time)");
    app.add_option("--seed", cfg.seed, "Seed for all randomness (integer)");
    app.add_option("--dump-paths", cfg.dump_paths, "gbm: write the first K paths (count)");
    app.add_flag("--dump-kernels", cfg.dump_kernels, "decompose: also write filter weights");

    for (const auto& [name, sub] : kSubcommands) {
        (void)sub;
        static const std::map<std::string, std::string> help{
            {"decompose", "Trend, derivatives and fluctuation, plus the oscillation score"},
            {"moments", "Rolling std / skewness / kurtosis of the fluctuation"},
            {"forecast", "Trend forecasts, confidence bands and position calls per origin"},
            {"backtest", "Walk-forward scoring of position forecasts"},
            {"gbm", "Monte Carlo test of the GBM residual about its mean trend"},
        };
        app.add_subcommand(name, help.at(name));
    }

    std::ostringstream out;
    std::ostringstream err;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        result.exit_code = app.exit(e, out, err);
        result.message = out.str() + err.str();
        return result;
    }
    for (const auto& [name, sub] : kSubcommands) {
        if (app.got_subcommand(name)) {
            cfg.subcommand = sub;
        }
    }
    bt.fast.degree = bt.slow.degree;
    bt.fast.smoothing = bt.slow.smoothing;
    cfg.gbm.seed = cfg.seed;
    result.ok = true;
    return result;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        config.validate();
        Outputs files;
        if (config.subcommand == Subcommand::gbm) {
            files = run_gbm(config, out);
        } else {
            const auto series = load_prices(config.input, config.columns);
            switch (config.subcommand) {
            case Subcommand::decompose:
                files = run_decompose(config, series);
                break;
            case Subcommand::moments:
                files = run_moments(config, series);
                break;
            case Subcommand::forecast:
                files = run_forecast(config, series);
                break;
            case Subcommand::backtest:
                files = run_backtest(config, series, out);
                break;
            case Subcommand::gbm:
                break;
            }
        }
        std::filesystem::create_directories(config.out_dir);
        for (const auto& [name, content] : files) {
            write_file_atomic(config.out_dir / name, content);
            out << "wrote " << (config.out_dir / name).string() << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        err << "trendkit: " << e.what() << '\n';
        return 1;
    }
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    auto parsed = parse_command_line(argc, argv);
    if (!parsed.ok) {
        (parsed.exit_code == 0 ? out : err) << parsed.message;
        return parsed.exit_code;
    }
    return run(parsed.config, out, err);
}

} // namespace trendkit
