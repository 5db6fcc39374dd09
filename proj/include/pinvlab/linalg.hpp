#pragma once

// Floating-point pseudoinverse, rank, spectral and square-root primitives.
// Everything here is a template on the Eigen expression type, so the same
// code serves double, long double and fixed-size matrices.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "pinvlab/errors.hpp"

namespace pinvlab {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative tolerance used to accept a matrix as symmetric.
inline constexpr double kSymmetryTolerance = 1e-12;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, std::string_view what) {
  if (m.size() == 0) {
    throw InvalidInputError(std::string(what) + ": empty matrix");
  }
  if (!m.allFinite()) {
    throw InvalidInputError(std::string(what) + ": non-finite entry");
  }
}

/// max(rows, cols) * machine epsilon * largest singular value.
template <typename RealScalar>
RealScalar default_rank_tolerance(Index rows, Index cols, RealScalar sigma_max) {
  return static_cast<RealScalar>(std::max(rows, cols)) *
         std::numeric_limits<RealScalar>::epsilon() * sigma_max;
}

/// rank_tol > 0 is an absolute cut-off on singular values; 0 selects the default.
template <typename RealScalar>
RealScalar effective_rank_tolerance(RealScalar rank_tol, Index rows, Index cols,
                                    RealScalar sigma_max) {
  if (!(rank_tol >= 0) || !std::isfinite(static_cast<double>(rank_tol))) {
    throw InvalidInputError("rank tolerance must be finite and >= 0");
  }
  return rank_tol > 0 ? rank_tol : default_rank_tolerance(rows, cols, sigma_max);
}

template <typename Derived>
using TransposedPlain =
    Eigen::Matrix<typename Derived::Scalar, Derived::ColsAtCompileTime,
                  Derived::RowsAtCompileTime>;

template <typename Derived>
struct PseudoInverse {
  TransposedPlain<Derived> pinv;
  Index rank = 0;
};

/// Moore-Penrose pseudoinverse by SVD, together with the numeric rank used
/// to form it. Singular values at or below the effective tolerance are
/// treated as zero.
template <typename Derived>
PseudoInverse<Derived> pinv_with_rank(const Eigen::MatrixBase<Derived>& m,
                                      typename Derived::RealScalar rank_tol = 0) {
  using Plain = typename Derived::PlainObject;
  using Real = typename Derived::RealScalar;
  require_finite(m, "pinv_numeric");

  Eigen::JacobiSVD<Plain> svd(m.eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Index k = sv.size();
  const Real tol = effective_rank_tolerance<Real>(rank_tol, m.rows(), m.cols(),
                                                  k > 0 ? sv(0) : Real(0));

  PseudoInverse<Derived> out;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> inv_sv(k);
  for (Index i = 0; i < k; ++i) {
    const bool kept = sv(i) > tol;
    inv_sv(i) = kept ? Real(1) / sv(i) : Real(0);
    out.rank += kept ? 1 : 0;
  }
  out.pinv =
      svd.matrixV().leftCols(k) * inv_sv.asDiagonal() * svd.matrixU().leftCols(k).adjoint();
  return out;
}

template <typename Derived>
TransposedPlain<Derived> pinv_numeric(const Eigen::MatrixBase<Derived>& m,
                                      typename Derived::RealScalar rank_tol = 0) {
  return pinv_with_rank(m, rank_tol).pinv;
}

template <typename Derived>
Index numeric_rank(const Eigen::MatrixBase<Derived>& m,
                   typename Derived::RealScalar rank_tol = 0) {
  using Plain = typename Derived::PlainObject;
  using Real = typename Derived::RealScalar;
  require_finite(m, "numeric_rank");

  Eigen::JacobiSVD<Plain> svd(m.eval());
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const Real tol = effective_rank_tolerance<Real>(rank_tol, m.rows(), m.cols(), sv(0));
  return static_cast<Index>((sv.array() > tol).count());
}

/// Checks ||M - M^T||_max <= 1e-12 ||M||_max and returns (M + M^T) / 2.
template <typename Derived>
typename Derived::PlainObject symmetrized(const Eigen::MatrixBase<Derived>& m,
                                          std::string_view what) {
  using Real = typename Derived::RealScalar;
  require_finite(m, what);
  if (m.rows() != m.cols()) {
    throw InvalidInputError(std::string(what) + ": matrix is not square");
  }
  const Real scale = m.cwiseAbs().maxCoeff();
  const Real asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > Real(kSymmetryTolerance) * scale) {
    std::ostringstream msg;
    msg << what << ": matrix is not symmetric (max asymmetry " << asym << ")";
    throw DomainError(msg.str());
  }
  return (m + m.transpose()) / Real(2);
}

/// Symmetric positive definite square root A with A * A = sigma.
template <typename Derived>
typename Derived::PlainObject sym_sqrt_pd(const Eigen::MatrixBase<Derived>& sigma) {
  using Plain = typename Derived::PlainObject;
  const Plain sym = symmetrized(sigma, "sym_sqrt_pd");
  Eigen::SelfAdjointEigenSolver<Plain> eig(sym);
  const auto& values = eig.eigenvalues();
  if (!(values.minCoeff() > 0)) {
    std::ostringstream msg;
    msg << "sym_sqrt_pd: matrix is not positive definite (smallest eigenvalue "
        << values.minCoeff() << ")";
    throw DomainError(msg.str());
  }
  const Plain root = eig.eigenvectors() * values.cwiseSqrt().asDiagonal() *
                     eig.eigenvectors().transpose();
  return (root + root.transpose()) / typename Derived::RealScalar(2);
}

template <typename Real>
struct SpectralSummary {
  Real lambda_min_nonzero = 0;  // 0 when rank == 0
  Real lambda_max_nonzero = 0;
  Index rank = 0;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> eigenvalues;  // descending
};

/// Spectrum of a symmetric PSD matrix. Eigenvalues whose magnitude does not
/// exceed the rank tolerance count as zero; a clearly negative eigenvalue is a
/// domain error.
template <typename Derived>
SpectralSummary<typename Derived::RealScalar> spectral_summary(
    const Eigen::MatrixBase<Derived>& m, typename Derived::RealScalar rank_tol = 0) {
  using Plain = typename Derived::PlainObject;
  using Real = typename Derived::RealScalar;
  const Plain sym = symmetrized(m, "spectral_summary");
  Eigen::SelfAdjointEigenSolver<Plain> eig(sym, Eigen::EigenvaluesOnly);

  SpectralSummary<Real> out;
  out.eigenvalues = eig.eigenvalues().reverse();
  const Real top = out.eigenvalues.cwiseAbs().maxCoeff();
  const Real tol = effective_rank_tolerance<Real>(rank_tol, m.rows(), m.cols(), top);
  if (out.eigenvalues.minCoeff() < -tol) {
    std::ostringstream msg;
    msg << "spectral_summary: matrix is not positive semidefinite (eigenvalue "
        << out.eigenvalues.minCoeff() << ")";
    throw DomainError(msg.str());
  }
  for (Index i = 0; i < out.eigenvalues.size(); ++i) {
    const Real v = out.eigenvalues(i);
    if (v > tol) {
      if (out.rank == 0) out.lambda_max_nonzero = v;
      out.lambda_min_nonzero = v;
      ++out.rank;
    }
  }
  return out;
}

template <typename Scalar>
struct PenroseResiduals {
  Scalar mpm_minus_m;      // ||MPM - M||_max
  Scalar pmp_minus_p;      // ||PMP - P||_max
  Scalar mp_asymmetry;     // ||(MP)^T - MP||_max
  Scalar pm_asymmetry;     // ||(PM)^T - PM||_max

  Scalar max() const {
    using std::max;
    return max(max(mpm_minus_m, pmp_minus_p), max(mp_asymmetry, pm_asymmetry));
  }
};

/// Max-norm residuals of the four Penrose conditions. Works for any Eigen
/// scalar with abs(), including exact rationals.
template <typename DerivedM, typename DerivedP>
PenroseResiduals<typename DerivedM::Scalar> penrose_residuals(
    const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedP>& p) {
  using Scalar = typename DerivedM::Scalar;
  using Plain = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (p.rows() != m.cols() || p.cols() != m.rows()) {
    throw InvalidInputError("penrose_residuals: P must be cols(M) x rows(M)");
  }
  const Plain mp = m * p;
  const Plain pm = p * m;
  const Plain mpm = mp * m;
  const Plain pmp = pm * p;
  auto max_abs = [](const Plain& d) { return d.cwiseAbs().maxCoeff(); };
  return {max_abs(mpm - m), max_abs(pmp - p), max_abs(Plain(mp.transpose()) - mp),
          max_abs(Plain(pm.transpose()) - pm)};
}

/// Spectral norm (largest singular value).
template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(m.eval());
  return svd.singularValues().size() ? svd.singularValues()(0)
                                     : typename Derived::RealScalar(0);
}

}  // namespace pinvlab
