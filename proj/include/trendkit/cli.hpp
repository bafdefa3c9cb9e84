#pragma once

#include "trendkit/backtest.hpp"
#include "trendkit/gbm_lab.hpp"
#include "trendkit/series_io.hpp"
#include "trendkit/trend_filter.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace trendkit {

enum class Subcommand { decompose, moments, forecast, backtest, gbm };

struct RunConfig {
    Subcommand subcommand = Subcommand::decompose;
    std::filesystem::path input;
    std::filesystem::path out_dir = ".";
    ColumnSpec columns;
    BacktestConfig backtest;
    OscillationOptions oscillation;
    GbmParams gbm;
    double epsilon = 0.05;
    std::size_t dump_paths = 0;
    bool dump_kernels = false;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Outcome of command-line parsing: either a runnable config or an exit code
/// with the text that should be shown (help, or a diagnostic).
struct ParseResult {
    bool ok = false;
    int exit_code = 0;
    std::string message;
    RunConfig config;
};

ParseResult parse_command_line(int argc, const char* const* argv);

/// Runs one subcommand. Output files are written atomically into out_dir.
/// Returns 0 on success; on failure prints a one-line diagnostic to `err`
/// and returns nonzero without leaving partial files.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Convenience for tools and tests: parse then run.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace trendkit
