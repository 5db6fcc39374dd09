#include "pinvlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace pinvlab {

ConfigError::ConfigError(const std::string& message, std::string field, int line)
    : std::runtime_error([&] {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!field.empty()) out += "field '" + field + "': ";
        return out + message;
      }()),
      field_(std::move(field)),
      line_(line) {}

std::string_view to_string(ReportFormat format) {
  return format == ReportFormat::json ? "json" : "csv";
}

ReportFormat parse_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw ConfigError("expected json or csv, got '" + std::string(text) + "'", "format");
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int parse_integer(const std::string& text, const std::string& field, int line) {
  Int value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("expected an integer, got '" + text + "'", field, line);
  }
  return value;
}

double parse_real(const std::string& text, const std::string& field, int line) {
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("expected a real number, got '" + text + "'", field, line);
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& field, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("expected true or false, got '" + text + "'", field, line);
}

std::vector<double> parse_list(std::string_view text, const std::string& field) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item =
        trim(text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                : comma - start));
    out.push_back(parse_real(item, field, 0));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void set_field(ExperimentConfig& c, const std::string& key, const std::string& value, int line) {
  if (key == "subcommand") {
    c.subcommand = value;
  } else if (key == "n") {
    c.n = parse_integer<Index>(value, key, line);
  } else if (key == "p") {
    c.p = parse_integer<Index>(value, key, line);
  } else if (key == "theta") {
    c.theta = value;
  } else if (key == "sigma") {
    c.sigma = value;
  } else if (key == "reps") {
    c.reps = parse_integer<Index>(value, key, line);
  } else if (key == "master_seed") {
    c.master_seed = parse_integer<std::uint64_t>(value, key, line);
  } else if (key == "rank_tol") {
    if (value == "auto") {
      c.rank_tol.reset();
    } else {
      c.rank_tol = parse_real(value, key, line);
    }
  } else if (key == "output") {
    c.output = value;
  } else if (key == "format") {
    try {
      c.format = parse_format(value);
    } catch (const ConfigError& e) {
      throw ConfigError("expected json or csv, got '" + value + "'", key, line);
    }
  } else if (key == "threads") {
    c.threads = parse_integer<unsigned>(value, key, line);
  } else if (key == "shrinkage") {
    c.shrinkage = value;
  } else if (key == "c1") {
    c.c1 = parse_real(value, key, line);
  } else if (key == "contrast") {
    c.contrast = parse_bool(value, key, line);
  } else if (key == "inject_known") {
    c.inject_known = parse_bool(value, key, line);
  } else if (key == "include_timing") {
    c.include_timing = parse_bool(value, key, line);
  } else {
    throw ConfigError("unknown key", key, line);
  }
}

}  // namespace

ExperimentConfig resolve_defaults(ExperimentConfig c) {
  struct Defaults {
    Index n, p, reps;
  };
  Defaults d{3, 5, 1000};
  if (c.subcommand == "counterexample") d = {1, 4, 1};
  if (c.subcommand == "scan-bound") d = {1, 4, 10000};
  if (c.subcommand == "verify-bounds") d = {3, 5, 100000};
  if (c.subcommand == "sandwich-scan") d = {3, 5, 10000};
  if (c.subcommand == "infinite-demo") d = c.contrast ? Defaults{3, 5, 1000000} : Defaults{1, 2, 1000000};
  if (c.n == 0) c.n = d.n;
  if (c.p == 0) c.p = d.p;
  if (c.reps == 0) c.reps = d.reps;
  return c;
}

void validate(const ExperimentConfig& c) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), c.subcommand) == names.end()) {
    throw ConfigError("unknown subcommand '" + c.subcommand + "'", "subcommand");
  }
  if (c.n < 1) throw ConfigError("must be a positive integer", "n");
  if (c.p < 1) throw ConfigError("must be a positive integer", "p");
  if (c.reps < 1) throw ConfigError("must be a positive integer", "reps");
  if (c.rank_tol && !(*c.rank_tol >= 0)) throw ConfigError("must be >= 0 or auto", "rank_tol");
  if (!(c.c1 > 0)) throw ConfigError("must be > 0", "c1");
  if (c.shrinkage != "default" && c.shrinkage != "const") {
    throw ConfigError("expected default or const", "shrinkage");
  }
  if (c.output.empty()) throw ConfigError("must not be empty", "output");
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig c;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(std::string_view(raw).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", {}, line);
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", {}, line);
    set_field(c, key, value, line);
  }
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "subcommand = " << c.subcommand << "\n"
      << "n = " << c.n << "\n"
      << "p = " << c.p << "\n"
      << "theta = " << c.theta << "\n"
      << "sigma = " << c.sigma << "\n"
      << "reps = " << c.reps << "\n"
      << "master_seed = " << c.master_seed << "\n"
      << "rank_tol = " << (c.rank_tol ? format_real(*c.rank_tol) : std::string("auto")) << "\n"
      << "output = " << c.output << "\n"
      << "format = " << to_string(c.format) << "\n"
      << "threads = " << c.threads << "\n"
      << "shrinkage = " << c.shrinkage << "\n"
      << "c1 = " << format_real(c.c1) << "\n"
      << "contrast = " << (c.contrast ? "true" : "false") << "\n"
      << "inject_known = " << (c.inject_known ? "true" : "false") << "\n"
      << "include_timing = " << (c.include_timing ? "true" : "false") << "\n";
  return out.str();
}

Vector resolve_theta(const ExperimentConfig& c) {
  if (c.theta == "zeros") return Vector::Zero(c.p);
  if (c.theta == "ones") return Vector::Ones(c.p);
  const std::vector<double> values = parse_list(c.theta, "theta");
  if (static_cast<Index>(values.size()) != c.p) {
    throw ConfigError("expected " + std::to_string(c.p) + " values", "theta");
  }
  return Eigen::Map<const Vector>(values.data(), c.p);
}

DenseMatrix resolve_sigma(const ExperimentConfig& c) {
  if (c.sigma == "identity") return DenseMatrix::Identity(c.p, c.p);
  if (c.sigma.rfind("diag:", 0) == 0) {
    const std::vector<double> values = parse_list(std::string_view(c.sigma).substr(5), "sigma");
    if (static_cast<Index>(values.size()) != c.p) {
      throw ConfigError("expected " + std::to_string(c.p) + " diagonal values", "sigma");
    }
    return Eigen::Map<const Vector>(values.data(), c.p).asDiagonal();
  }
  DenseMatrix m = read_matrix_file(c.sigma);
  if (m.rows() != c.p) {
    throw ConfigError("matrix file has dimension " + std::to_string(m.rows()) + ", expected " +
                          std::to_string(c.p),
                      "sigma");
  }
  return m;
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'", "sigma");
  std::string line;
  int line_no = 0;
  Index p = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  const std::string header = trim(line);
  p = parse_integer<Index>(header, "sigma", line_no);
  if (p < 1) throw ConfigError("matrix dimension must be positive", "sigma", line_no);

  DenseMatrix m(p, p);
  for (Index i = 0; i < p; ++i) {
    if (!std::getline(in, line)) {
      throw ConfigError("matrix file ends before row " + std::to_string(i + 1), "sigma",
                        line_no + 1);
    }
    ++line_no;
    std::istringstream row(line);
    std::string token;
    Index j = 0;
    while (row >> token) {
      if (j >= p) throw ConfigError("too many entries in row", "sigma", line_no);
      m(i, j++) = parse_real(token, "sigma", line_no);
    }
    if (j != p) throw ConfigError("too few entries in row", "sigma", line_no);
  }
  return m;
}

}  // namespace pinvlab
