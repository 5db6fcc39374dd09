#include <gtest/gtest.h>

#include "pinvlab/counterexample.hpp"
#include "pinvlab/linalg.hpp"
#include "pinvlab/rational.hpp"
#include "test_support.hpp"

using namespace pinvlab;
using pinvlab::testing::random_rational_matrix;
using pinvlab::testing::uniform_index;

namespace {

bool penrose_exact(const RationalMatrix& m, const RationalMatrix& p) {
  return exactly_equal(m * p * m, m) && exactly_equal(p * m * p, p) &&
         exactly_equal(RationalMatrix((m * p).transpose()), RationalMatrix(m * p)) &&
         exactly_equal(RationalMatrix((p * m).transpose()), RationalMatrix(p * m));
}

}  // namespace

TEST(Fractions, FormatAndParse) {
  EXPECT_EQ(to_fraction_string(Rational(1, 2)), "1/2");
  EXPECT_EQ(to_fraction_string(Rational(-6, 4)), "-3/2");
  EXPECT_EQ(to_fraction_string(Rational(3)), "3/1");
  EXPECT_EQ(to_fraction_string(Rational(0)), "0/1");
  EXPECT_EQ(parse_fraction("7/48"), Rational(7, 48));
  EXPECT_EQ(parse_fraction("-2"), Rational(-2));
  EXPECT_EQ(parse_fraction(to_fraction_string(Rational(-17, 91))), Rational(-17, 91));
  EXPECT_THROW(parse_fraction("1/0"), InvalidInputError);
  EXPECT_THROW(parse_fraction("abc"), InvalidInputError);
}

TEST(RationalMatrix, Construction) {
  const RationalMatrix m = rational_matrix(2, 2, {1, 2, 3, 4}, 6);
  EXPECT_EQ(m(0, 0), Rational(1, 6));
  EXPECT_EQ(m(1, 1), Rational(2, 3));
  EXPECT_THROW(rational_matrix(2, 2, {1, 2, 3}), InvalidInputError);
  EXPECT_DOUBLE_EQ(to_dense(m)(1, 0), 0.5);
}

TEST(RankExact, Examples) {
  EXPECT_EQ(rank_exact(rational_identity(5)), 5);
  EXPECT_EQ(rank_exact(RationalMatrix::Zero(3, 4)), 0);
  EXPECT_EQ(rank_exact(known_case::t()), 2);
  EXPECT_EQ(rank_exact(rational_matrix(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9})), 2);
}

TEST(InverseExact, Examples) {
  const RationalMatrix m = rational_matrix(2, 2, {2, 1, 1, 1});
  EXPECT_TRUE(exactly_equal(inverse_exact(m), rational_matrix(2, 2, {1, -1, -1, 2})));
  EXPECT_THROW(inverse_exact(rational_matrix(2, 2, {1, 2, 2, 4})), DomainError);
  EXPECT_THROW(inverse_exact(RationalMatrix::Zero(2, 3)), InvalidInputError);
}

TEST(PinvExact, Examples) {
  EXPECT_TRUE(exactly_equal(pinv_exact(rational_identity(3)), rational_identity(3)));
  EXPECT_TRUE(exactly_equal(pinv_exact(RationalMatrix::Zero(2, 3)), RationalMatrix::Zero(3, 2)));

  RationalMatrix d = RationalMatrix::Zero(2, 2);
  d(0, 0) = 2;
  RationalMatrix expected = RationalMatrix::Zero(2, 2);
  expected(0, 0) = Rational(1, 2);
  EXPECT_TRUE(exactly_equal(pinv_exact(d), expected));

  // Row vector: v+ = v^T / |v|^2.
  const RationalMatrix v = rational_matrix(1, 3, {1, 2, 2});
  EXPECT_TRUE(exactly_equal(pinv_exact(v), rational_matrix(3, 1, {1, 2, 2}, 9)));
}

TEST(PinvExact, KnownMatrixMatchesExpected) {
  const RationalMatrix t = known_case::t();
  const RationalMatrix tp = pinv_exact(t);
  EXPECT_TRUE(exactly_equal(tp, known_case::t_pinv_expected()));
  EXPECT_TRUE(penrose_exact(t, tp));
  EXPECT_TRUE(exactly_equal(RationalMatrix(tp * t), known_case::half_blocks()));
}

TEST(PinvExact, KnownMatrixEigenpairs) {
  // T (1,1,1,1)^T = 1/3 (1,1,1,1)^T and T (1,1,-1,-1)^T = 1/4 (1,1,-1,-1)^T.
  const RationalMatrix t = known_case::t();
  const RationalMatrix u = rational_matrix(4, 1, {1, 1, 1, 1});
  const RationalMatrix w = rational_matrix(4, 1, {1, 1, -1, -1});
  EXPECT_TRUE(exactly_equal(RationalMatrix(t * u), RationalMatrix(u * Rational(1, 3))));
  EXPECT_TRUE(exactly_equal(RationalMatrix(t * w), RationalMatrix(w * Rational(1, 4))));
  // The pseudoinverse inverts those modes.
  const RationalMatrix tp = pinv_exact(t);
  EXPECT_TRUE(exactly_equal(RationalMatrix(tp * u), RationalMatrix(u * Rational(3))));
  EXPECT_TRUE(exactly_equal(RationalMatrix(tp * w), RationalMatrix(w * Rational(4))));
}

TEST(FullRankFactorization, ReproducesMatrix) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng(seed, 3);
    const Index rows = uniform_index(rng, 1, 7), cols = uniform_index(rng, 1, 7);
    const Index rank = uniform_index(rng, 1, std::min(rows, cols));
    const RationalMatrix m = random_rational_matrix(rng, rows, cols, rank, 4, 3);
    const auto f = full_rank_factorization(m);
    EXPECT_EQ(f.left.cols(), rank_exact(m));
    EXPECT_TRUE(exactly_equal(RationalMatrix(f.left * f.right), m));
  }
}

// Property: exact Penrose identities, involution, and agreement with the
// SVD route, over small-integer matrices of every rank.
TEST(PinvExactProperty, PenroseIdentitiesExact) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    RandomStream rng(seed, 4);
    const Index rows = uniform_index(rng, 1, 8), cols = uniform_index(rng, 1, 8);
    const Index rank = uniform_index(rng, 0, std::min(rows, cols));
    const RationalMatrix m = rank == 0 ? RationalMatrix(RationalMatrix::Zero(rows, cols))
                                       : random_rational_matrix(rng, rows, cols, rank, 3, 2);
    const RationalMatrix p = pinv_exact(m);
    ASSERT_TRUE(penrose_exact(m, p)) << "seed " << seed;
    ASSERT_TRUE(exactly_equal(pinv_exact(p), m)) << "seed " << seed;
    ASSERT_EQ(rank_exact(m), numeric_rank(to_dense(m))) << "seed " << seed;
    const DenseMatrix numeric = pinv_numeric(to_dense(m));
    ASSERT_LT((numeric - to_dense(p)).cwiseAbs().maxCoeff(),
              1e-10 * std::max(1.0, to_dense(p).cwiseAbs().maxCoeff()))
        << "seed " << seed;
  }
}

TEST(PinvExactProperty, TransposeCommutes) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream rng(seed, 5);
    const RationalMatrix m = random_rational_matrix(rng, 5, 4, 2, 5);
    EXPECT_TRUE(exactly_equal(pinv_exact(RationalMatrix(m.transpose())),
                              RationalMatrix(pinv_exact(m).transpose())));
  }
}
