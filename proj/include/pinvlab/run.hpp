#pragma once

#include "pinvlab/config.hpp"
#include "pinvlab/report.hpp"

namespace pinvlab {

/// Exit statuses shared by the library and the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFinding = 1,   // verification produced a contradiction or failed invariant
  kExitUsage = 2,
  kExitIo = 3,
  kExitNumeric = 4,
};

/// Validates the config (ConfigError on bad input), dispatches to the owning
/// module and builds the report. Numeric failures inside a run become an
/// "error" report with kExitNumeric rather than an exception.
RunReport run(const ExperimentConfig& config);

}  // namespace pinvlab
