#pragma once

// Seeded draws from X ~ N_p(theta, Sigma) and Y ~ N_{n x p}(0, I_n (x) Sigma),
// and the statistic F = X^T S+ X with S = Y^T Y.

#include <cstdint>

#include "pinvlab/linalg.hpp"
#include "pinvlab/random.hpp"

namespace pinvlab {

struct ModelSpec {
  Index n = 1;
  Index p = 1;
  Vector theta;
  DenseMatrix sigma;

  static ModelSpec identity(Index n, Index p);
  static ModelSpec identity(Index n, Index p, Vector theta);
};

/// A validated ModelSpec with the square root of Sigma and its inverse cached.
class GaussianModel {
 public:
  explicit GaussianModel(ModelSpec spec);

  const ModelSpec& spec() const { return spec_; }
  Index n() const { return spec_.n; }
  Index p() const { return spec_.p; }
  const DenseMatrix& sqrt_sigma() const { return root_; }
  const DenseMatrix& inv_sqrt_sigma() const { return inv_root_; }

 private:
  ModelSpec spec_;
  DenseMatrix root_;
  DenseMatrix inv_root_;
};

struct SampleDraw {
  Vector x;
  DenseMatrix y;
  DenseMatrix s;
  Index rank_s = 0;
  SeedPath seed_path{};
};

/// theta + A z, A = Sigma^(1/2).
Vector sample_mvn(const GaussianModel& model, RandomStream& stream);

/// Z A with Z an n x p standard normal matrix; rows are i.i.d. N_p(0, Sigma).
DenseMatrix sample_matrix_normal(const GaussianModel& model, RandomStream& stream);

/// X first, then Y, from the same stream.
SampleDraw sample_draw(const GaussianModel& model, RandomStream& stream, double rank_tol = 0);
SampleDraw sample_draw(const GaussianModel& model, std::uint64_t master_seed,
                       std::uint64_t replication, std::uint64_t attempt = 0,
                       double rank_tol = 0);

/// x^T s+ x.
double compute_F(const Vector& x, const DenseMatrix& s, double rank_tol = 0);

}  // namespace pinvlab
