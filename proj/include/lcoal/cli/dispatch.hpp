#pragma once

#include <map>
#include <ostream>
#include <string>

#include <json.hpp>

#include "lcoal/cli/config.hpp"
#include "lcoal/error.hpp"

namespace lcoal::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitBudget = 3, kExitInternal = 4 };
int exit_code_for(ErrorCode code);
nlohmann::json error_json(ErrorCode code, const std::string& message);

// Raw side outputs keyed by file name.
using Artifacts = std::map<std::string, std::string>;

// Computes the report of a validated config. Deterministic given (config, seed).
nlohmann::json run_report(const RunConfig& config, Artifacts& raw);

// Runs the config and writes report.json, raw files and manifest.json under
// config.output_dir. Returns the exit code; errors are also written as error.json.
int dispatch(const RunConfig& config, std::ostream& err);

// Command-line entry point.
int run_cli(int argc, char** argv);

}  // namespace lcoal::cli
