#pragma once

#include "levysandwich/cli/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace levy::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kNumericError = 3 };

struct Invocation {
    std::string command;  ///< curve | classify | simulate | verify | exit-prob
    std::string config_path;
    std::string suite;    ///< verify only: sandwich | wienerhopf | thm11 | prop12 | identity25
    std::optional<std::string> out;  ///< file, or directory for simulate
    std::optional<std::uint64_t> seed;
};

/// Loads the config, applies overrides, dispatches, and maps exceptions to
/// exit codes. Diagnostics go to `err`; results to `out` unless --out is set.
int run(const Invocation& invocation, std::ostream& out, std::ostream& err);

int cmd_curve(const RunConfig& config, std::ostream& out);
int cmd_classify(const RunConfig& config, std::ostream& out);
int cmd_exit_prob(const RunConfig& config, std::ostream& out);
/// With an output directory, writes skeleton.csv, sandwich.csv, path.csv and
/// (with levels) envelopes.csv for replication 0, plus summary.json. The
/// summary always goes to `out`.
int cmd_simulate(const RunConfig& config, const std::optional<std::string>& directory, std::ostream& out);
int cmd_verify(const RunConfig& config, const std::string& suite, std::ostream& out, std::ostream& err);

}  // namespace levy::cli
