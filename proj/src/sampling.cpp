#include "pinvlab/sampling.hpp"

#include <utility>

namespace pinvlab {

ModelSpec ModelSpec::identity(Index n, Index p) { return identity(n, p, Vector::Zero(p)); }

ModelSpec ModelSpec::identity(Index n, Index p, Vector theta) {
  return ModelSpec{n, p, std::move(theta), DenseMatrix::Identity(p, p)};
}

GaussianModel::GaussianModel(ModelSpec spec) : spec_(std::move(spec)) {
  if (spec_.n < 1 || spec_.p < 1) throw DomainError("model: n and p must be positive");
  if (spec_.theta.size() != spec_.p) throw DomainError("model: theta must have length p");
  if (!spec_.theta.allFinite()) throw DomainError("model: theta must be finite");
  if (spec_.sigma.rows() != spec_.p || spec_.sigma.cols() != spec_.p) {
    throw DomainError("model: sigma must be p x p");
  }
  try {
    root_ = sym_sqrt_pd(spec_.sigma);
  } catch (const InvalidInputError& e) {
    throw DomainError(std::string("model: ") + e.what());
  }
  spec_.sigma = (spec_.sigma + spec_.sigma.transpose()) / 2.0;
  inv_root_ = root_.inverse();
  inv_root_ = (inv_root_ + inv_root_.transpose()) / 2.0;
}

Vector sample_mvn(const GaussianModel& model, RandomStream& stream) {
  return model.spec().theta + model.sqrt_sigma() * stream.normal_vector(model.p());
}

DenseMatrix sample_matrix_normal(const GaussianModel& model, RandomStream& stream) {
  return stream.normal_matrix(model.n(), model.p()) * model.sqrt_sigma();
}

SampleDraw sample_draw(const GaussianModel& model, RandomStream& stream, double rank_tol) {
  SampleDraw d;
  d.seed_path = stream.seed_path();
  d.x = sample_mvn(model, stream);
  d.y = sample_matrix_normal(model, stream);
  d.s = d.y.transpose() * d.y;
  d.rank_s = numeric_rank(d.s, rank_tol);
  return d;
}

SampleDraw sample_draw(const GaussianModel& model, std::uint64_t master_seed,
                       std::uint64_t replication, std::uint64_t attempt, double rank_tol) {
  RandomStream stream(master_seed, replication, attempt);
  return sample_draw(model, stream, rank_tol);
}

double compute_F(const Vector& x, const DenseMatrix& s, double rank_tol) {
  if (s.rows() != s.cols() || x.size() != s.rows()) {
    throw InvalidInputError("compute_F: dimension mismatch");
  }
  const DenseMatrix sp = pinv_numeric(s, rank_tol);
  return x.dot(sp * x);
}

}  // namespace pinvlab
