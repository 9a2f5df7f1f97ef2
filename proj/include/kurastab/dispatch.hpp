#pragma once

// Subcommand execution and the exit-code contract:
// 0 success, 1 I/O failure, 2 validation failure, 3 numeric failure.

#include <filesystem>
#include <iosfwd>

#include "kurastab/config.hpp"

namespace kurastab {

enum ExitCode : int { ExitOk = 0, ExitIo = 1, ExitValidation = 2, ExitNumeric = 3 };

/// Runs cfg.command, writing CSVs and effective_config.json into cfg.output_dir.
/// Exceptions are mapped to exit codes and reported on err.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Maps the exception currently being handled to an exit code.
int exit_code_for_current_exception(std::ostream& err);

}  // namespace kurastab
