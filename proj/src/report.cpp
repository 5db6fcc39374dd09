#include "pinvlab/report.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#ifndef PINVLAB_VERSION
#define PINVLAB_VERSION "0.1.0"
#endif

namespace pinvlab {

std::string_view version() { return PINVLAB_VERSION; }

const std::vector<std::string>& csv_header(std::string_view subcommand) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> headers{
      {"counterexample", {"lhs", "rhs", "holds"}},
      {"scan-bound", {"trial", "rank_t", "lhs", "rhs", "violated"}},
      {"verify-divergence",
       {"rep", "f_value", "rank_s", "coeff", "closed_form", "finite_diff", "rel_err"}},
      {"verify-bounds", {"rep", "inv_f", "lambda_max_s", "coord_ok"}},
      {"infinite-demo", {"rep", "inv_f"}},
      {"sandwich-scan",
       {"rep", "rank_s", "f_value", "x1_norm2", "coord_lower_ok", "coord_upper_ok", "rayleigh_ok"}},
  };
  const auto it = headers.find(subcommand);
  if (it == headers.end()) throw ConfigError("unknown subcommand", "subcommand");
  return it->second;
}

Json real_json(double value) {
  if (std::isfinite(value)) return value;
  return format_real(value);
}

Json to_json(const BoundCheck<Rational>& check) {
  Json j;
  j["lhs"] = to_fraction_string(check.lhs);
  j["rhs"] = to_fraction_string(check.rhs);
  j["holds"] = check.holds;
  return j;
}

Json to_json(const RationalMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(to_fraction_string(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const DivergenceReport& r, Index rep) {
  Json j;
  j["rep"] = rep;
  j["f_value"] = real_json(r.f_value);
  j["rank_s"] = r.rank_s;
  j["coeff"] = real_json(r.coeff);
  j["closed_form"] = real_json(r.closed_form);
  j["finite_diff"] = real_json(r.finite_diff);
  j["rel_err"] = real_json(r.rel_err);
  j["seed_path"] = r.seed_path;
  return j;
}

Json to_json(const MeanEstimate& m) {
  Json j;
  j["mean"] = real_json(m.mean);
  j["std_error"] = real_json(m.std_error);
  j["count"] = m.count;
  return j;
}

Json to_json(const TailReport& r) {
  Json j;
  j["n"] = r.n;
  j["p"] = r.p;
  j["sample_size"] = r.sample_size;
  Json means = Json::array();
  for (const RunningMean& m : r.running_means) {
    Json e;
    e["n"] = m.n;
    e["mean"] = real_json(m.mean);
    e["std_error"] = real_json(m.std_error);
    means.push_back(std::move(e));
  }
  j["running_means"] = std::move(means);
  j["hill_alpha"] = real_json(r.hill_alpha);
  j["hill_std_error"] = real_json(r.hill_std_error);
  j["hill_k"] = r.hill_k;
  j["stabilized"] = r.stabilized;
  j["verdict"] = std::string(to_string(r.verdict));
  j["verdict_policy"] =
      "stabilized iff |mean(N_last) - mean(N_first)| < 5 SE(N_first); "
      "infinite-mean-consistent iff hill_alpha + 2 SE < 1 and not stabilized; "
      "hill_k = floor(sqrt(sample_size))";
  j["rank_mismatches"] = r.rank_mismatches;
  j["rejected_zero_f"] = r.rejected_zero_f;
  if (r.n == 1) {
    j["max_rank1_identity_error"] = real_json(r.max_rank1_identity_error);
    j["max_f_decomposition_error"] = real_json(r.max_f_decomposition_error);
  }
  return j;
}

namespace {

// Scheduling and destination fields are left out: results do not depend on them.
Json config_json(const ExperimentConfig& c) {
  Json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["theta"] = c.theta;
  j["sigma"] = c.sigma;
  j["reps"] = c.reps;
  j["master_seed"] = c.master_seed;
  j["rank_tol"] = c.rank_tol ? real_json(*c.rank_tol) : Json("auto");
  j["format"] = std::string(to_string(c.format));
  j["shrinkage"] = c.shrinkage;
  j["c1"] = real_json(c.c1);
  j["contrast"] = c.contrast;
  j["inject_known"] = c.inject_known;
  return j;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string emit_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::csv) {
    std::ostringstream out;
    auto write_row = [&out](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(row[i]);
      }
      out << '\n';
    };
    write_row(report.table.header);
    for (const auto& row : report.table.rows) write_row(row);
    return out.str();
  }

  Json j;
  j["artifact"] = "pinvlab";
  j["version"] = std::string(version());
  j["subcommand"] = report.config.subcommand;
  j["config"] = config_json(report.config);
  Json seeds;
  seeds["master_seed"] = report.config.master_seed;
  seeds["scheme"] =
      "replication r, attempt a draws from counter stream (master_seed, r, a); "
      "output i = mix64(key + i * 0x9e3779b97f4a7c15)";
  j["seed_provenance"] = std::move(seeds);
  j["status"] = report.status;
  j["findings"] = report.findings;
  j["notes"] = report.notes;
  j["payload"] = report.payload;
  if (report.wall_clock_seconds) j["wall_clock_seconds"] = *report.wall_clock_seconds;
  return j.dump(2) + "\n";
}

void write_report(const RunReport& report) {
  const std::string text = emit_report(report, report.config.format);
  if (report.config.output == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write report to stdout");
    return;
  }
  std::ofstream out(report.config.output, std::ios::binary);
  if (!out) throw IoError("cannot open '" + report.config.output + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + report.config.output + "'");
}

}  // namespace pinvlab
