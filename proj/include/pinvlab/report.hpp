#pragma once

// Machine-readable run reports.
//
// JSON: one object with keys, in order: artifact, version, subcommand,
// config, seed_provenance, status, findings, notes, payload and, with
// --include-timing, wall_clock_seconds. Rationals are "num/den" strings;
// reals use the shortest round-trip decimal; non-finite reals are the
// strings "inf", "-inf" and "nan".
//
// CSV: a fixed header per subcommand followed by one row per replication.

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pinvlab/config.hpp"
#include "pinvlab/counterexample.hpp"
#include "pinvlab/heavytail.hpp"
#include "pinvlab/theorem2.hpp"

namespace pinvlab {

using Json = nlohmann::ordered_json;

std::string_view version();

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  ExperimentConfig config;
  std::string status = "ok";            // ok | finding | error
  std::vector<std::string> findings;    // contradictions and failed invariants
  std::vector<std::string> notes;       // observations that do not fail a run
  Json payload = Json::object();
  CsvTable table;
  std::optional<double> wall_clock_seconds;
  int exit_code = 0;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header used by each subcommand's CSV output.
const std::vector<std::string>& csv_header(std::string_view subcommand);

Json real_json(double value);
Json to_json(const BoundCheck<Rational>& check);
Json to_json(const RationalMatrix& m);
Json to_json(const DivergenceReport& r, Index rep);
Json to_json(const MeanEstimate& m);
Json to_json(const TailReport& r);

std::string emit_report(const RunReport& report, ReportFormat format);

/// Writes to config.output ("-" is stdout); throws IoError.
void write_report(const RunReport& report);

}  // namespace pinvlab
