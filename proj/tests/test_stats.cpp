#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pinvlab/errors.hpp"
#include "pinvlab/random.hpp"
#include "pinvlab/stats.hpp"

using namespace pinvlab;

TEST(MeanEstimate, Examples) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto e = mean_estimate(v);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.count, 4);
  const std::vector<double> one{7};
  EXPECT_DOUBLE_EQ(mean_estimate(one).mean, 7.0);
  EXPECT_DOUBLE_EQ(mean_estimate(one).std_error, 0.0);
  EXPECT_EQ(mean_estimate(std::vector<double>{}).count, 0);
}

TEST(KsStatistic, Examples) {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
  EXPECT_NEAR(ks_statistic_uniform(grid), 0.005, 1e-12);
  EXPECT_NEAR(ks_statistic_uniform(std::vector<double>(10, 0.0)), 1.0, 1e-12);

  RandomStream rng(1);
  std::vector<double> u(100000);
  for (double& x : u) x = rng.uniform();
  EXPECT_LT(ks_statistic_uniform(u), 0.01);
  std::vector<double> skew(u);
  for (double& x : skew) x = x * x;
  EXPECT_GT(ks_statistic_uniform(skew), 0.2);
}

TEST(Hill, RecoversParetoIndex) {
  for (double alpha : {0.5, 1.5, 3.0}) {
    RandomStream rng(11);
    std::vector<double> x(100000);
    for (double& v : x) v = std::pow(1.0 - rng.uniform(), -1.0 / alpha);
    const auto h = hill_estimate(x);
    EXPECT_EQ(h.k, 316);
    EXPECT_NEAR(h.std_error, h.alpha / std::sqrt(316.0), 1e-12);
    EXPECT_NEAR(h.alpha, alpha, 4 * h.std_error) << alpha;
  }
}

TEST(Hill, Errors) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(hill_estimate(x, 3), InvalidInputError);
  const std::vector<double> bad{1, -2, 3, 4};
  EXPECT_THROW(hill_estimate(bad, 2), InvalidInputError);
}
