#include "pinvlab/counterexample.hpp"

#include <algorithm>
#include <cmath>

#include "pinvlab/parallel.hpp"
#include "pinvlab/random.hpp"

namespace pinvlab {

namespace {

constexpr double kViolationSlack = 1e-9;

template <typename Matrix, typename Column>
void check_shapes(const Matrix& t, const Matrix& a, const Column& x) {
  if (t.rows() != t.cols() || a.rows() != a.cols() || a.rows() != t.rows() ||
      x.rows() != t.rows() || x.cols() != 1) {
    throw InvalidInputError("evaluate_cw_bound: need square T, A of equal size and a matching column X");
  }
}

}  // namespace

BoundCheck<Rational> evaluate_cw_bound(const RationalMatrix& t, const RationalMatrix& a,
                                       const RationalMatrix& x) {
  check_shapes(t, a, x);
  if (!exactly_equal(t, RationalMatrix(t.transpose())))
    throw DomainError("evaluate_cw_bound: T is not symmetric");
  if (!exactly_equal(a, RationalMatrix(a.transpose())))
    throw DomainError("evaluate_cw_bound: A is not symmetric");
  const RationalMatrix proj = pinv_exact(t) * t;
  const RationalMatrix left = proj * a;
  const RationalMatrix right = a * proj;
  const RationalMatrix left_pinv = pinv_exact(left);
  const RationalMatrix right_pinv = pinv_exact(right);
  const Rational lhs = (x.transpose() * left_pinv * left * x)(0, 0);
  const Rational rhs = (x.transpose() * left_pinv * right_pinv * x)(0, 0) *
                       (x.transpose() * right * left * x)(0, 0);
  return {lhs, rhs, lhs <= rhs};
}

BoundCheck<double> evaluate_cw_bound(const DenseMatrix& t, const DenseMatrix& a,
                                     const Vector& x, double rank_tol) {
  check_shapes(t, a, x);
  require_finite(x, "X");
  symmetrized(t, "T");
  symmetrized(a, "A");
  const DenseMatrix proj = pinv_numeric(t, rank_tol) * t;
  const DenseMatrix left = proj * a;
  const DenseMatrix right = a * proj;
  const DenseMatrix left_pinv = pinv_numeric(left, rank_tol);
  const DenseMatrix right_pinv = pinv_numeric(right, rank_tol);
  const double lhs = x.dot(left_pinv * left * x);
  const double rhs = x.dot(left_pinv * right_pinv * x) * x.dot(right * left * x);
  const bool holds = !(lhs > rhs + kViolationSlack * std::max(1.0, std::abs(rhs)));
  return {lhs, rhs, holds};
}

namespace known_case {

RationalMatrix t() {
  return rational_matrix(4, 4, {7, 7, 1, 1, 7, 7, 1, 1, 1, 1, 7, 7, 1, 1, 7, 7}, 48);
}

RationalMatrix t_pinv_expected() {
  return rational_matrix(4, 4, {7, 7, -1, -1, 7, 7, -1, -1, -1, -1, 7, 7, -1, -1, 7, 7}, 4);
}

RationalMatrix half_blocks() {
  return rational_matrix(4, 4, {1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1}, 2);
}

RationalMatrix a() { return rational_identity(4); }

RationalMatrix x() { return rational_matrix(4, 1, {1, 0, 0, 0}); }

}  // namespace known_case

CounterexampleResult verify_known_counterexample() {
  const RationalMatrix t = known_case::t();
  const RationalMatrix a = known_case::a();
  const RationalMatrix x = known_case::x();
  const RationalMatrix blocks = known_case::half_blocks();

  CounterexampleResult out;
  out.t_pinv = pinv_exact(t);
  out.t_pinv_t = out.t_pinv * t;
  out.t_pinv_t_a = out.t_pinv_t * a;
  out.a_t_pinv_t = a * out.t_pinv_t;
  out.pinv_t_pinv_t_a = pinv_exact(out.t_pinv_t_a);
  out.pinv_a_t_pinv_t = pinv_exact(out.a_t_pinv_t);
  out.check = evaluate_cw_bound(t, a, x);

  out.t_pinv_matches = exactly_equal(out.t_pinv, known_case::t_pinv_expected());
  const RationalMatrix left_proj = out.pinv_t_pinv_t_a * out.t_pinv_t_a;
  out.intermediates_match =
      exactly_equal(out.t_pinv_t, blocks) && exactly_equal(out.t_pinv_t_a, blocks) &&
      exactly_equal(out.a_t_pinv_t, blocks) && exactly_equal(out.pinv_t_pinv_t_a, blocks) &&
      exactly_equal(out.pinv_a_t_pinv_t, blocks) &&
      exactly_equal(RationalMatrix(out.pinv_t_pinv_t_a * out.pinv_a_t_pinv_t), blocks) &&
      exactly_equal(left_proj, blocks) &&
      exactly_equal(RationalMatrix(out.a_t_pinv_t * out.t_pinv_t_a), blocks);
  out.projector_exact = exactly_equal(left_proj, RationalMatrix(left_proj.transpose())) &&
                        exactly_equal(RationalMatrix(left_proj * left_proj), left_proj) &&
                        left_proj.trace() == Rational(2);
  return out;
}

namespace {

DenseMatrix random_orthogonal(RandomStream& rng, Index p) {
  const DenseMatrix g = rng.normal_matrix(p, p);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ();
  // Sign fix makes Q Haar distributed.
  const DenseMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

ScanTrial run_trial(const ScanOptions& opt, Index index) {
  ScanTrial trial;
  trial.index = index;
  if (opt.inject_known_case && index == 0 && opt.p == 4) {
    const BoundCheck<double> c =
        evaluate_cw_bound(to_dense(known_case::t()), DenseMatrix::Identity(4, 4),
                          Vector::Unit(4, 0), opt.rank_tol);
    trial.rank_t = 2;
    trial.lhs = c.lhs;
    trial.rhs = c.rhs;
    trial.violated = !c.holds;
    return trial;
  }

  RandomStream rng(opt.seed, static_cast<std::uint64_t>(index));
  const Index p = opt.p;
  const DenseMatrix q = random_orthogonal(rng, p);
  Vector lambda(p);
  for (Index i = 0; i < p; ++i) lambda(i) = 0.5 + 1.5 * rng.uniform();
  Index zeros = 0;
  if (!opt.full_rank_t) {
    zeros = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(p - 1));
    lambda.tail(zeros).setZero();
  }
  DenseMatrix t = q * lambda.asDiagonal() * q.transpose();
  t = (t + t.transpose()) / 2.0;

  DenseMatrix a = DenseMatrix::Identity(p, p);
  if (!opt.identity_a) {
    const DenseMatrix m = rng.normal_matrix(p, p);
    a = m.transpose() * m + DenseMatrix::Identity(p, p);
  }
  const Vector x = rng.normal_vector(p);

  const BoundCheck<double> c = evaluate_cw_bound(t, a, x, opt.rank_tol);
  trial.rank_t = p - zeros;
  trial.lhs = c.lhs;
  trial.rhs = c.rhs;
  trial.violated = !c.holds;
  return trial;
}

}  // namespace

ScanResult scan_cw_bound(const ScanOptions& opt) {
  if (opt.p < 2) throw InvalidInputError("scan_cw_bound: p must be >= 2");
  if (opt.trials < 1) throw InvalidInputError("scan_cw_bound: trials must be >= 1");

  ScanResult out;
  out.trials = opt.trials;
  out.per_trial.resize(static_cast<std::size_t>(opt.trials));
  parallel_for(out.per_trial.size(), opt.threads, [&](std::size_t i) {
    out.per_trial[i] = run_trial(opt, static_cast<Index>(i));
  });

  for (const ScanTrial& t : out.per_trial) {
    if (t.violated) ++out.violations;
    if (out.worst.index < 0 || t.lhs - t.rhs > out.worst.lhs - out.worst.rhs) out.worst = t;
  }
  out.violation_fraction =
      static_cast<double>(out.violations) / static_cast<double>(out.trials);
  return out;
}

}  // namespace pinvlab
