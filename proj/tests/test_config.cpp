#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "pinvlab/config.hpp"
#include "pinvlab/random.hpp"

using namespace pinvlab;

TEST(Config, DefaultsPerSubcommand) {
  ExperimentConfig c;
  c.subcommand = "verify-bounds";
  auto r = resolve_defaults(c);
  EXPECT_EQ(r.n, 3);
  EXPECT_EQ(r.p, 5);
  EXPECT_EQ(r.reps, 100000);
  c.subcommand = "infinite-demo";
  r = resolve_defaults(c);
  EXPECT_EQ(r.n, 1);
  EXPECT_EQ(r.p, 2);
  EXPECT_EQ(r.reps, 1000000);
  c.contrast = true;
  r = resolve_defaults(c);
  EXPECT_EQ(r.n, 3);
  c.subcommand = "scan-bound";
  c.p = 6;
  r = resolve_defaults(c);
  EXPECT_EQ(r.p, 6);
  EXPECT_EQ(r.reps, 10000);
}

TEST(Config, ParseText) {
  const auto c = parse_config_text(
      "# experiment\n"
      "subcommand = verify-divergence\n"
      "n = 4   # rows\n"
      "p=7\n"
      "\n"
      "sigma = diag:1,2,3,4,5,6,7\n"
      "rank_tol = 1e-9\n"
      "format = csv\n"
      "master_seed = 18446744073709551615\n"
      "contrast = true\n");
  EXPECT_EQ(c.subcommand, "verify-divergence");
  EXPECT_EQ(c.n, 4);
  EXPECT_EQ(c.p, 7);
  EXPECT_EQ(c.sigma, "diag:1,2,3,4,5,6,7");
  ASSERT_TRUE(c.rank_tol.has_value());
  EXPECT_DOUBLE_EQ(*c.rank_tol, 1e-9);
  EXPECT_EQ(c.format, ReportFormat::csv);
  EXPECT_EQ(c.master_seed, std::numeric_limits<std::uint64_t>::max());
  EXPECT_TRUE(c.contrast);
  EXPECT_FALSE(parse_config_text("rank_tol = auto\n").rank_tol.has_value());
}

TEST(Config, ParseErrorsCarryLineAndField) {
  try {
    parse_config_text("n = 3\np = five\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.field(), "p");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  try {
    parse_config_text("\n\nbogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "bogus");
  }
  EXPECT_THROW(parse_config_text("just words\n"), ConfigError);
  EXPECT_THROW(parse_config_text("format = xml\n"), ConfigError);
  EXPECT_THROW(parse_config_text("contrast = maybe\n"), ConfigError);
}

TEST(Config, Validation) {
  ExperimentConfig c = resolve_defaults(ExperimentConfig{});
  EXPECT_NO_THROW(validate(c));
  c.reps = -1;
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_THROW(validate(resolve_defaults(parse_config_text("n = -3\n"))), ConfigError);
  c = resolve_defaults(ExperimentConfig{});
  c.subcommand = "nope";
  EXPECT_THROW(validate(c), ConfigError);
  c = resolve_defaults(ExperimentConfig{});
  c.c1 = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = resolve_defaults(ExperimentConfig{});
  c.rank_tol = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
}

// Property: serialize -> parse is the identity on randomly generated configs.
TEST(ConfigProperty, SerializeParseRoundTrip) {
  const std::vector<std::string> thetas{"zeros", "ones", "0.5,-1,2"};
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RandomStream rng(seed);
    ExperimentConfig c;
    c.subcommand = subcommands()[rng() % subcommands().size()];
    c.n = 1 + static_cast<Index>(rng() % 9);
    c.p = 1 + static_cast<Index>(rng() % 9);
    c.theta = thetas[rng() % thetas.size()];
    c.reps = 1 + static_cast<Index>(rng() % 100000);
    c.master_seed = rng();
    if (rng() % 2) c.rank_tol = rng.uniform() * 1e-6;
    c.format = rng() % 2 ? ReportFormat::json : ReportFormat::csv;
    c.threads = static_cast<unsigned>(rng() % 8);
    c.shrinkage = rng() % 2 ? "default" : "const";
    c.c1 = 0.1 + 10 * rng.uniform();
    c.contrast = rng() % 2;
    c.inject_known = rng() % 2;
    c.include_timing = rng() % 2;
    const std::string text = serialize_config(c);
    const ExperimentConfig back = parse_config_text(text);
    ASSERT_EQ(serialize_config(back), text) << text;
    ASSERT_EQ(back.c1, c.c1);
    ASSERT_EQ(back.rank_tol, c.rank_tol);
    ASSERT_EQ(back.master_seed, c.master_seed);
  }
}

TEST(FormatReal, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(180.0), "180");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_real(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_real(std::nan("")), "nan");
  for (double v : {1.0 / 3.0, 6.02214076e23, -2.5e-300}) EXPECT_EQ(std::stod(format_real(v)), v);
}

TEST(ResolveModel, ThetaAndSigma) {
  ExperimentConfig c;
  c.p = 3;
  EXPECT_EQ(resolve_theta(c), Vector::Zero(3));
  c.theta = "ones";
  EXPECT_EQ(resolve_theta(c), Vector::Ones(3));
  c.theta = "1,2,3";
  EXPECT_EQ(resolve_theta(c), (Vector(3) << 1, 2, 3).finished());
  c.theta = "1,2";
  EXPECT_THROW(resolve_theta(c), ConfigError);

  EXPECT_EQ(resolve_sigma(c), DenseMatrix::Identity(3, 3));
  c.sigma = "diag:1,2,3";
  EXPECT_EQ(resolve_sigma(c).diagonal(), (Vector(3) << 1, 2, 3).finished());
  c.sigma = "diag:1,2";
  EXPECT_THROW(resolve_sigma(c), ConfigError);
  c.sigma = "/nonexistent/sigma.txt";
  EXPECT_THROW(resolve_sigma(c), ConfigError);
}

TEST(ResolveModel, MatrixFile) {
  const auto path = std::filesystem::temp_directory_path() / "pinvlab_sigma_test.txt";
  {
    std::ofstream out(path);
    out << "2\n2 0.5\n0.5 1\n";
  }
  ExperimentConfig c;
  c.p = 2;
  c.sigma = path.string();
  const DenseMatrix m = resolve_sigma(c);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m(1, 1), 1.0);
  c.p = 3;
  EXPECT_THROW(resolve_sigma(c), ConfigError);
  {
    std::ofstream out(path);
    out << "2\n2 0.5\n";
  }
  c.p = 2;
  EXPECT_THROW(resolve_sigma(c), ConfigError);
  std::filesystem::remove(path);
}
