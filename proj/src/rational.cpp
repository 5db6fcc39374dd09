#include "pinvlab/rational.hpp"

#include <charconv>
#include <utility>

namespace pinvlab {

RationalMatrix rational_matrix(Index rows, Index cols, std::initializer_list<long> entries,
                               long denominator) {
  if (static_cast<Index>(entries.size()) != rows * cols) {
    throw InvalidInputError("rational_matrix: entry count does not match dimensions");
  }
  if (denominator == 0) throw InvalidInputError("rational_matrix: zero denominator");
  RationalMatrix out(rows, cols);
  auto it = entries.begin();
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j, ++it) {
      out(i, j) = Rational(*it, denominator);
    }
  }
  return out;
}

RationalMatrix rational_identity(Index n) {
  RationalMatrix out = RationalMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

std::string to_fraction_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

Rational parse_fraction(std::string_view text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rational(Integer(std::string(text)));
    }
    Integer num(std::string(text.substr(0, slash)));
    Integer den(std::string(text.substr(slash + 1)));
    if (den == 0) throw InvalidInputError("parse_fraction: zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw InvalidInputError("parse_fraction: cannot parse '" + std::string(text) + "'");
  }
}

DenseMatrix to_dense(const RationalMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).convert_to<double>();
  }
  return out;
}

EchelonForm fraction_free_echelon(const RationalMatrix& m) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  IntegerMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    Integer scale = 1;
    for (Index j = 0; j < cols; ++j) scale = lcm(scale, denominator(m(i, j)));
    for (Index j = 0; j < cols; ++j) {
      a(i, j) = numerator(m(i, j)) * (scale / denominator(m(i, j)));
    }
  }

  EchelonForm out;
  Integer previous = 1;
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index pivot = -1;
    for (Index i = r; i < rows; ++i) {
      if (a(i, c) != 0 && (pivot < 0 || abs(a(i, c)) > abs(a(pivot, c)))) pivot = i;
    }
    if (pivot < 0) continue;
    if (pivot != r) a.row(pivot).swap(a.row(r));

    for (Index i = r + 1; i < rows; ++i) {
      for (Index j = c + 1; j < cols; ++j) {
        Integer t = a(r, c) * a(i, j) - a(i, c) * a(r, j);
        // Bareiss division is exact; a remainder means a bug, not bad input.
        if (t % previous != 0) throw std::logic_error("fraction_free_echelon: inexact division");
        a(i, j) = t / previous;
      }
      a(i, c) = 0;
    }
    previous = a(r, c);
    out.pivots.push_back(c);
    ++r;
  }
  out.rows = a.topRows(r);
  return out;
}

Index rank_exact(const RationalMatrix& m) {
  return static_cast<Index>(fraction_free_echelon(m).pivots.size());
}

RationalMatrix inverse_exact(const RationalMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInputError("inverse_exact: matrix is not square");
  const Index n = m.rows();
  RationalMatrix a = m;
  RationalMatrix inv = rational_identity(n);
  for (Index c = 0; c < n; ++c) {
    Index pivot = c;
    while (pivot < n && a(pivot, c) == 0) ++pivot;
    if (pivot == n) throw DomainError("inverse_exact: matrix is singular");
    if (pivot != c) {
      a.row(pivot).swap(a.row(c));
      inv.row(pivot).swap(inv.row(c));
    }
    const Rational scale = a(c, c);
    a.row(c) /= scale;
    inv.row(c) /= scale;
    for (Index i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      a.row(i) -= f * a.row(c);
      inv.row(i) -= f * inv.row(c);
    }
  }
  return inv;
}

FullRankFactorization full_rank_factorization(const RationalMatrix& m) {
  const EchelonForm ech = fraction_free_echelon(m);
  const Index rank = static_cast<Index>(ech.pivots.size());
  FullRankFactorization out;
  out.right = RationalMatrix(rank, m.cols());
  for (Index i = 0; i < rank; ++i) {
    for (Index j = 0; j < m.cols(); ++j) out.right(i, j) = Rational(ech.rows(i, j));
  }
  if (rank == 0) {
    out.left = RationalMatrix(m.rows(), 0);
    return out;
  }
  // Rows of M live in the row space of C, so M = K C; restricting to the
  // pivot columns gives K = M[:, piv] * C[:, piv]^-1.
  RationalMatrix m_piv(m.rows(), rank);
  RationalMatrix c_piv(rank, rank);
  for (Index k = 0; k < rank; ++k) {
    m_piv.col(k) = m.col(ech.pivots[k]);
    c_piv.col(k) = out.right.col(ech.pivots[k]);
  }
  out.left = m_piv * inverse_exact(c_piv);
  return out;
}

RationalMatrix pinv_exact(const RationalMatrix& m) {
  const FullRankFactorization f = full_rank_factorization(m);
  if (f.right.rows() == 0) return RationalMatrix::Zero(m.cols(), m.rows());
  const RationalMatrix& b = f.left;
  const RationalMatrix& c = f.right;
  const RationalMatrix cct = c * c.transpose();
  const RationalMatrix btb = b.transpose() * b;
  return c.transpose() * inverse_exact(cct) * inverse_exact(btb) * b.transpose();
}

bool exactly_equal(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != b(i, j)) return false;
    }
  }
  return true;
}

}  // namespace pinvlab
