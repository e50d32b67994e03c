#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "mfg/cli/config.hpp"

namespace mfg::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 1,
    kNotConverged = 2,
    kConditionsFail = 3,
    kTrendFail = 4,
};

/// Settings given on the command line that override or extend the config.
struct GlobalOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool override_certification = false;
    std::size_t scan_cap = 1000000;
};

/// Applies --out and --seed to a parsed config.
void apply_globals(RunConfig& config, const GlobalOptions& globals);

int cmd_solve(const RunConfig& config, const GlobalOptions& globals, std::ostream& out, std::ostream& err);
int cmd_check(const RunConfig& config, const GlobalOptions& globals, std::ostream& out, std::ostream& err);
int cmd_study(const RunConfig& config, const GlobalOptions& globals, std::ostream& out, std::ostream& err);

enum class MetricKind { OneD, Discrete, TotalVariation };

int cmd_w1(const std::string& file_mu, const std::string& file_nu, MetricKind metric, std::ostream& out,
           std::ostream& err);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfg::cli
