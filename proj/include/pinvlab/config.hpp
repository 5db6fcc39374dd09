#pragma once

// Experiment configuration: a flat set of fields with a canonical
// "key = value" text form. Defaults that depend on the subcommand are filled
// in by resolve_defaults(), so the canonical text always names every value
// used by a run.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pinvlab/linalg.hpp"

namespace pinvlab {

enum class ReportFormat { json, csv };

std::string_view to_string(ReportFormat format);
ReportFormat parse_format(std::string_view text);

/// Usage/configuration error with an optional line number and field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string field = {}, int line = 0);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"counterexample", "scan-bound",
                                              "verify-divergence", "verify-bounds",
                                              "infinite-demo", "sandwich-scan"};
  return names;
}

struct ExperimentConfig {
  std::string subcommand = "counterexample";
  Index n = 0;                       // 0: subcommand default
  Index p = 0;
  std::string theta = "zeros";       // zeros | ones | comma-separated values
  std::string sigma = "identity";    // identity | diag:v1,...,vp | path to matrix file
  Index reps = 0;
  std::uint64_t master_seed = 0;
  std::optional<double> rank_tol;    // empty: auto
  std::string output = "-";
  ReportFormat format = ReportFormat::json;
  unsigned threads = 1;
  std::string shrinkage = "default"; // default | const
  double c1 = 1.0;
  bool contrast = false;             // infinite-demo: run the (3, 5) finite case
  bool inject_known = false;         // scan-bound: trial 0 is the known case
  bool include_timing = false;

  double rank_tolerance() const { return rank_tol.value_or(0.0); }
};

/// Fills n, p and reps with the subcommand's defaults where they are 0.
ExperimentConfig resolve_defaults(ExperimentConfig config);

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

/// One "key = value" pair per line, '#' starts a comment.
ExperimentConfig parse_config_text(std::string_view text);

/// Canonical form: every key, fixed order, shortest round-trip reals.
std::string serialize_config(const ExperimentConfig& config);

Vector resolve_theta(const ExperimentConfig& config);
DenseMatrix resolve_sigma(const ExperimentConfig& config);

/// Matrix file: first line p, then p rows of p whitespace-separated decimals.
DenseMatrix read_matrix_file(const std::string& path);

/// Shortest decimal that parses back to the same double.
std::string format_real(double value);

}  // namespace pinvlab
