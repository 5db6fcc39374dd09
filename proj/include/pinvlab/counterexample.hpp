#pragma once

// The claimed bound
//   X^T (T+ T A)+ (T+ T A) X  <=  X^T (T+ T A)+ (A T+ T)+ X * X^T (A T+ T)(T+ T A) X
// for symmetric T and positive definite A, evaluated exactly on the
// known 4x4 counter-example and numerically on random instances.

#include <cstdint>

#include "pinvlab/linalg.hpp"
#include "pinvlab/rational.hpp"

namespace pinvlab {

template <typename Scalar>
struct BoundCheck {
  Scalar lhs;
  Scalar rhs;
  bool holds;
};

BoundCheck<Rational> evaluate_cw_bound(const RationalMatrix& t, const RationalMatrix& a,
                                       const RationalMatrix& x);

/// Numeric version; `holds` uses the scan threshold lhs <= rhs + 1e-9 max(1, |rhs|).
BoundCheck<double> evaluate_cw_bound(const DenseMatrix& t, const DenseMatrix& a,
                                     const Vector& x, double rank_tol = 0);

namespace known_case {
RationalMatrix t();              // (1/48) [[7,7,1,1],[7,7,1,1],[1,1,7,7],[1,1,7,7]]
RationalMatrix t_pinv_expected(); // (1/4) [[7,7,-1,-1],...]
RationalMatrix half_blocks();    // 2x2 blocks of 1/2 on the diagonal
RationalMatrix a();              // I_4
RationalMatrix x();              // e_1 as a 4x1 column
}  // namespace known_case

struct CounterexampleResult {
  BoundCheck<Rational> check;
  RationalMatrix t_pinv;
  RationalMatrix t_pinv_t;
  RationalMatrix t_pinv_t_a;
  RationalMatrix a_t_pinv_t;
  RationalMatrix pinv_t_pinv_t_a;   // (T+ T A)+
  RationalMatrix pinv_a_t_pinv_t;   // (A T+ T)+
  bool t_pinv_matches = false;
  bool intermediates_match = false;
  bool projector_exact = false;     // (T+TA)+(T+TA) symmetric, idempotent, trace 2

  bool reproduced() const {
    return t_pinv_matches && intermediates_match && projector_exact &&
           check.lhs == Rational(1, 2) && check.rhs == Rational(1, 4) && !check.holds;
  }
};

CounterexampleResult verify_known_counterexample();

struct ScanOptions {
  Index trials = 1000;
  Index p = 4;
  std::uint64_t seed = 0;
  bool inject_known_case = false;  // trial 0 uses the known T, A = I, X = e1
  bool full_rank_t = false;
  bool identity_a = false;
  double rank_tol = 0;
  unsigned threads = 1;
};

struct ScanTrial {
  Index index = -1;
  Index rank_t = 0;
  double lhs = 0;
  double rhs = 0;
  bool violated = false;
};

struct ScanResult {
  Index trials = 0;
  Index violations = 0;
  double violation_fraction = 0;
  ScanTrial worst;                 // largest lhs - rhs
  std::vector<ScanTrial> per_trial;
};

ScanResult scan_cw_bound(const ScanOptions& options);

}  // namespace pinvlab
