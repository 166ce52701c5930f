#pragma once

#include "sisfit/io.hpp"

#include <iosfwd>

namespace sisfit::cli {

enum ExitCode : int {
    kSuccess = 0,
    kNumericalFailure = 1,
    kParseFailure = 2,
    kConfigFailure = 3,
    kVerificationFailure = 4,
};

/// Fits a model to config.input, writes it to config.output (when set) and
/// prints the report to `out`.
int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Prints E(F, n) for n = 0..m and, with gamma, the selected order.
int cmd_error_curve(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Checks a saved model (config.model) against data (config.input) and prints a pass/fail table.
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Projects every signal in config.input onto the model space of config.model.
int cmd_project(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (subcommands fit, error-curve, verify, project) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sisfit::cli
