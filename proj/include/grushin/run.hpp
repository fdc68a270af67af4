#pragma once

// Dispatch of a configured experiment: computes, writes outputs and the manifest, and maps
// failures to exit codes.

#include <filesystem>
#include <iosfwd>

#include "grushin/config.hpp"
#include "grushin/errors.hpp"

namespace grushin {

enum ExitCode : int { exit_ok = 0, exit_invariant = 1, exit_config = 2, exit_convergence = 3 };

/// Runs one experiment into out_dir (created if needed, locked while running). Messages and
/// diagnostics go to log. Returns an ExitCode.
int run_experiment(Experiment experiment, const RunConfig& config,
                   const std::filesystem::path& out_dir, std::ostream& log);

int exit_code_for(ErrorKind kind);

}  // namespace grushin
