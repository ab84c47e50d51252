#pragma once

// certify | pipeline | report.

#include "bcmf_app/run_config.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace bcmf::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

inline const std::vector<std::string> kStages{"partition", "induce", "spectrum", "ldp"};

/// Writes condition_report.json; kOk iff the report passed.
int cmd_certify(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Stages must be listed in dependency order. A dependency left out of the
/// list must have artifacts in config.out written under the same config; it
/// is then recomputed in memory.
int cmd_pipeline(const RunConfig& config, const std::vector<std::string>& stages, std::ostream& out,
                 std::ostream& err);

/// Merges the artifacts in `dir` into report.json and prints a summary.
int cmd_report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

/// Full command line: `bcmf <command> [flags]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcmf::app
