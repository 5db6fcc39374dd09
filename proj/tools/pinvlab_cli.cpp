// pinvlab: reproducible experiments on pseudoinverse bounds and shrinkage
// divergence. Run `pinvlab --help` or `pinvlab <subcommand> --help`.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pinvlab/run.hpp"

namespace {

struct Flags {
  std::string config_path;
  pinvlab::Index n = 0, p = 0, reps = 0;
  std::string theta, sigma, rank_tol, output, format, shrinkage;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  double c1 = 1.0;
  bool contrast = false, inject_known = false, include_timing = false;
};

void add_options(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_path, "key = value config file; flags override it");
  sub.add_option("--n", f.n, "rows of Y");
  sub.add_option("--p", f.p, "dimension of X");
  sub.add_option("--theta", f.theta, "zeros | ones | comma-separated values");
  sub.add_option("--sigma", f.sigma, "identity | diag:v1,...,vp | matrix file");
  sub.add_option("--reps", f.reps, "replications (trials for scan-bound)");
  sub.add_option("--master-seed", f.master_seed, "64-bit master seed")
      ->envname("PINVLAB_MASTER_SEED");
  sub.add_option("--rank-tol", f.rank_tol, "absolute singular value cut-off or auto");
  sub.add_option("--output,-o", f.output, "report path, - for stdout");
  sub.add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--threads", f.threads, "worker threads, 0 for all cores");
  sub.add_option("--shrinkage", f.shrinkage, "default | const")
      ->check(CLI::IsMember({"default", "const"}));
  sub.add_option("--c1", f.c1, "bound C1 of the shrinkage function");
  sub.add_flag("--include-timing", f.include_timing, "embed wall-clock seconds in the report");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pinvlab::ConfigError("cannot open config file '" + path + "'", "config");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

pinvlab::ExperimentConfig build_config(const CLI::App& sub, const Flags& f) {
  pinvlab::ExperimentConfig c;
  if (!f.config_path.empty()) c = pinvlab::parse_config_text(read_file(f.config_path));
  c.subcommand = sub.get_name();
  auto given = [&sub](const char* name) {
    const CLI::Option* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--n")) c.n = f.n;
  if (given("--p")) c.p = f.p;
  if (given("--theta")) c.theta = f.theta;
  if (given("--sigma")) c.sigma = f.sigma;
  if (given("--reps")) c.reps = f.reps;
  if (given("--master-seed")) c.master_seed = f.master_seed;  // also set by the env var
  if (given("--rank-tol")) {
    std::string text = "rank_tol = " + f.rank_tol;
    c.rank_tol = pinvlab::parse_config_text(text).rank_tol;
  }
  if (given("--output")) c.output = f.output;
  if (given("--format")) c.format = pinvlab::parse_format(f.format);
  if (given("--threads")) c.threads = f.threads;
  if (given("--shrinkage")) c.shrinkage = f.shrinkage;
  if (given("--c1")) c.c1 = f.c1;
  if (given("--contrast")) c.contrast = f.contrast;
  if (given("--inject-known")) c.inject_known = f.inject_known;
  if (given("--include-timing")) c.include_timing = f.include_timing;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinvlab: Moore-Penrose counter-example, divergence and inverse-moment experiments"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> descriptions{
      {"counterexample", "exact rational check of the known 4x4 counter-example"},
      {"scan-bound", "random search for violations of the claimed pseudoinverse bound"},
      {"verify-divergence", "closed-form divergence against central finite differences"},
      {"verify-bounds", "Monte Carlo check of E[lambda_max(S)] and E[1/F] bounds"},
      {"infinite-demo", "running means and Hill tail index of 1/F when rank(S) = 1"},
      {"sandwich-scan", "per-draw eigenvalue sandwich inequalities"},
  };
  for (const auto& [name, text] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, text);
    add_options(*sub, flags);
    if (name == "infinite-demo") {
      sub->add_flag("--contrast", flags.contrast, "run the finite-mean case n = 3, p = 5");
    }
    if (name == "scan-bound") {
      sub->add_flag("--inject-known", flags.inject_known, "trial 0 is the known case");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pinvlab::kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  try {
    const auto start = std::chrono::steady_clock::now();
    const pinvlab::RunReport report = pinvlab::run(build_config(*sub, flags));
    pinvlab::write_report(report);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << sub->get_name() << ": status " << report.status << ", " << seconds << " s\n";
    for (const std::string& f : report.findings) std::cerr << "  finding: " << f << "\n";
    return report.exit_code;
  } catch (const pinvlab::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return pinvlab::kExitUsage;
  } catch (const pinvlab::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return pinvlab::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pinvlab::kExitNumeric;
  }
}
