#pragma once

// Exact rational matrices and the exact Moore-Penrose pseudoinverse.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "pinvlab/linalg.hpp"

namespace pinvlab {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using IntegerMatrix = Eigen::Matrix<Integer, Eigen::Dynamic, Eigen::Dynamic>;

/// Row-major integer entries, all divided by `denominator`.
RationalMatrix rational_matrix(Index rows, Index cols, std::initializer_list<long> entries,
                               long denominator = 1);

RationalMatrix rational_identity(Index n);

/// "num/den" with den > 0, always including the denominator ("3/1", "0/1").
std::string to_fraction_string(const Rational& q);
Rational parse_fraction(std::string_view text);

DenseMatrix to_dense(const RationalMatrix& m);

struct EchelonForm {
  IntegerMatrix rows;          // rank x cols, integer row echelon form
  std::vector<Index> pivots;   // pivot column of each row
};

/// Fraction-free (Bareiss) row echelon form. Each row is first scaled to
/// integers, which leaves the row space unchanged.
EchelonForm fraction_free_echelon(const RationalMatrix& m);

Index rank_exact(const RationalMatrix& m);

/// Gauss-Jordan inverse; throws DomainError when singular.
RationalMatrix inverse_exact(const RationalMatrix& m);

struct FullRankFactorization {
  RationalMatrix left;   // rows x rank, full column rank
  RationalMatrix right;  // rank x cols, full row rank
};

FullRankFactorization full_rank_factorization(const RationalMatrix& m);

/// M+ = C^T (C C^T)^-1 (B^T B)^-1 B^T for M = B C.
RationalMatrix pinv_exact(const RationalMatrix& m);

bool exactly_equal(const RationalMatrix& a, const RationalMatrix& b);

}  // namespace pinvlab
