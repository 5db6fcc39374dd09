#include <gtest/gtest.h>

#include <cmath>

#include "pinvlab/linalg.hpp"
#include "pinvlab/sampling.hpp"

using namespace pinvlab;

namespace {

DenseMatrix sample_covariance(const std::vector<Vector>& rows) {
  const Index p = rows.front().size();
  Vector mean = Vector::Zero(p);
  for (const auto& r : rows) mean += r;
  mean /= static_cast<double>(rows.size());
  DenseMatrix cov = DenseMatrix::Zero(p, p);
  for (const auto& r : rows) cov += (r - mean) * (r - mean).transpose();
  return cov / static_cast<double>(rows.size() - 1);
}

DenseMatrix example_sigma() {
  DenseMatrix sigma(3, 3);
  sigma << 2.0, 0.5, 0.0, 0.5, 1.0, -0.3, 0.0, -0.3, 1.5;
  return sigma;
}

}  // namespace

TEST(Model, Validation) {
  EXPECT_NO_THROW(GaussianModel(ModelSpec::identity(3, 5)));
  EXPECT_THROW(GaussianModel(ModelSpec::identity(0, 5)), DomainError);
  ModelSpec bad_theta = ModelSpec::identity(3, 5);
  bad_theta.theta = Vector::Zero(4);
  EXPECT_THROW(GaussianModel{bad_theta}, DomainError);
  ModelSpec indefinite = ModelSpec::identity(2, 2);
  indefinite.sigma << 1, 2, 2, 1;
  EXPECT_THROW(GaussianModel{indefinite}, DomainError);
  ModelSpec asym = ModelSpec::identity(2, 2);
  asym.sigma << 1, 0.5, 0, 1;
  EXPECT_THROW(GaussianModel{asym}, DomainError);
}

TEST(Model, CachedRoots) {
  const GaussianModel model(ModelSpec{2, 3, Vector::Zero(3), example_sigma()});
  const DenseMatrix& a = model.sqrt_sigma();
  EXPECT_LT((a * a - example_sigma()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a * model.inv_sqrt_sigma() - DenseMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Sampling, DeterministicPerSeedPath) {
  const GaussianModel model(ModelSpec::identity(3, 5));
  const auto a = sample_draw(model, 10, 4, 0);
  const auto b = sample_draw(model, 10, 4, 0);
  const auto c = sample_draw(model, 10, 4, 1);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.x, c.x);
  EXPECT_EQ(a.seed_path, (SeedPath{10, 4, 0}));
}

TEST(Sampling, IdentityModelUsesRawNormals) {
  // n = 1, p = 2: X = theta + (z1, z2), then Y = (U, V) from the next normals.
  const GaussianModel model(ModelSpec::identity(1, 2, Vector::Ones(2)));
  RandomStream raw(3, 0, 0);
  const double z1 = raw.normal(), z2 = raw.normal(), u = raw.normal(), v = raw.normal();
  const auto d = sample_draw(model, 3, 0, 0);
  EXPECT_DOUBLE_EQ(d.x(0), 1 + z1);
  EXPECT_DOUBLE_EQ(d.x(1), 1 + z2);
  EXPECT_DOUBLE_EQ(d.y(0, 0), u);
  EXPECT_DOUBLE_EQ(d.y(0, 1), v);
  EXPECT_EQ(d.rank_s, 1);
}

TEST(Sampling, MvnMomentsMatchSigma) {
  const GaussianModel model(ModelSpec{1, 3, Vector::Constant(3, 2.0), example_sigma()});
  std::vector<Vector> xs;
  RandomStream rng(21);
  for (int i = 0; i < 100000; ++i) xs.push_back(sample_mvn(model, rng));
  Vector mean = Vector::Zero(3);
  for (const auto& x : xs) mean += x;
  mean /= 1e5;
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(mean(j), 2.0, 5 * std::sqrt(example_sigma()(j, j) / 1e5));
  const DenseMatrix cov = sample_covariance(xs);
  EXPECT_LT((cov - example_sigma()).cwiseAbs().maxCoeff(), 0.05 * 2.0);
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(cov(j, j) / example_sigma()(j, j), 1.0, 0.05);
}

TEST(Sampling, MatrixNormalRowsHaveCovarianceSigma) {
  const GaussianModel model(ModelSpec{3, 3, Vector::Zero(3), example_sigma()});
  std::vector<Vector> rows, whitened;
  RandomStream rng(22);
  for (int i = 0; i < 100000; ++i) {
    const DenseMatrix y = sample_matrix_normal(model, rng);
    const DenseMatrix yt = y * model.inv_sqrt_sigma();
    for (Index r = 0; r < 3; ++r) {
      rows.emplace_back(y.row(r).transpose());
      whitened.emplace_back(yt.row(r).transpose());
    }
  }
  const DenseMatrix cov = sample_covariance(rows);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      const double target = example_sigma()(i, j);
      if (target != 0.0) {
        EXPECT_NEAR(cov(i, j) / target, 1.0, 0.05) << i << "," << j;
      } else {
        EXPECT_NEAR(cov(i, j), 0.0, 0.02);
      }
    }
  }
  const DenseMatrix white = sample_covariance(whitened);
  EXPECT_LT((white - DenseMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(ComputeF, Examples) {
  EXPECT_DOUBLE_EQ(compute_F(Vector::Unit(3, 0), DenseMatrix::Identity(3, 3)), 1.0);
  EXPECT_DOUBLE_EQ(compute_F(Vector::Zero(3), DenseMatrix::Identity(3, 3)), 0.0);
  DenseMatrix t(4, 4);
  t << 7, 7, 1, 1, 7, 7, 1, 1, 1, 1, 7, 7, 1, 1, 7, 7;
  t /= 48.0;
  // e1^T T+ e1 = 7/4.
  EXPECT_NEAR(compute_F(Vector::Unit(4, 0), t), 1.75, 1e-12);
  EXPECT_THROW(compute_F(Vector::Zero(2), DenseMatrix::Identity(3, 3)), InvalidInputError);
}

TEST(SamplingProperty, RankAndProjectionTrace) {
  for (auto [n, p] : {std::pair<Index, Index>{1, 2}, {3, 5}, {5, 3}, {4, 4}}) {
    const GaussianModel model(ModelSpec::identity(n, p));
    for (std::uint64_t rep = 0; rep < 3000; ++rep) {
      const auto d = sample_draw(model, 5, rep);
      ASSERT_EQ(d.rank_s, std::min(n, p));
      const double tr = (d.s * pinv_numeric(d.s)).trace();
      ASSERT_NEAR(tr, static_cast<double>(std::min(n, p)), 1e-8);
      ASSERT_GE(compute_F(d.x, d.s), 0.0);
    }
  }
}
