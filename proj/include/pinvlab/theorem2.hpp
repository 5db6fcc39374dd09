#pragma once

// Shrinkage objects G and H, the divergence of vec(Y~) -> vec(Y~ H), and the
// Monte Carlo ledger for the bound E[1/F] <= n p lambda_max(Sigma)
// sum_{j=3..p} tr(A^-2(j)).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pinvlab/linalg.hpp"
#include "pinvlab/sampling.hpp"
#include "pinvlab/stats.hpp"

namespace pinvlab {

struct ShrinkageFn {
  std::string name;
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  double c1 = 0;  // sup r
  double c2 = 0;  // sup |r'|
};

/// r(t) = c1 t / (1 + t), r'(t) = c1 / (1 + t)^2.
ShrinkageFn make_shrinkage_default(double c1);
/// r(t) = c1, r' = 0.
ShrinkageFn make_shrinkage_const(double c1);
/// "default" or "const".
ShrinkageFn make_shrinkage(const std::string& name, double c1);

struct GridCertificate {
  bool bounds_ok = true;       // 0 <= r <= c1 and |r'| <= c2 on the grid
  bool derivative_ok = true;   // r' matches centred differences within 1e-6
  double max_derivative_error = 0;
};

/// Spot-checks the certified bounds on `points` log-spaced values in [0, t_max].
GridCertificate certify_on_grid(const ShrinkageFn& r, double t_max = 1e6, int points = 2001);

/// Leading j x j blocks A^2(j) = C(j) Sigma C(j)^T with their square roots.
class LeadingBlocks {
 public:
  explicit LeadingBlocks(const DenseMatrix& sigma);

  Index size() const { return static_cast<Index>(blocks_.size()); }
  const DenseMatrix& block(Index j) const { return at(j).block; }
  const DenseMatrix& root(Index j) const { return at(j).root; }
  const DenseMatrix& inv_root(Index j) const { return at(j).inv_root; }
  double lambda_min(Index j) const { return at(j).lambda_min; }
  double lambda_max(Index j) const { return at(j).lambda_max; }
  double inverse_trace(Index j) const { return at(j).inverse_trace; }

 private:
  struct Entry {
    DenseMatrix block, root, inv_root;
    double lambda_min = 0, lambda_max = 0, inverse_trace = 0;
  };
  const Entry& at(Index j) const;
  std::vector<Entry> blocks_;
};

struct GHPair {
  DenseMatrix g;
  DenseMatrix h;
  double f = 0;
};

/// G = r^2(F) / F^2 S+ x x^T S+ S and H = A G A^-1 with A = Sigma^(1/2).
GHPair build_G_H(const Vector& x, const DenseMatrix& s, const DenseMatrix& sqrt_sigma,
                 const DenseMatrix& inv_sqrt_sigma, const ShrinkageFn& r, double rank_tol = 0);
GHPair build_G_H(const Vector& x, const DenseMatrix& s, const DenseMatrix& sigma,
                 const ShrinkageFn& r, double rank_tol = 0);

/// tr(S S+).
double projection_trace(const DenseMatrix& s, double rank_tol = 0);

/// n + p - 2 tr(S S+) + 3.
double divergence_coefficient(Index n, Index p, double trace_ssp);

/// r^2(F)/F (n + p - 2 tr(SS+) + 3) - 4 r(F) r'(F).
double divergence_closed_form(const Vector& x, const DenseMatrix& s, const ShrinkageFn& r,
                              Index n, double rank_tol = 0);

/// Default relative step: cube root of machine epsilon.
inline double default_fd_step() { return std::cbrt(std::numeric_limits<double>::epsilon()); }

/// sum_ij d field(P)_ij / d P_ij by central differences with per-entry step
/// step * max(1, |P_ij|). `guard(P')` is called on every perturbed point and
/// may throw to reject it.
template <typename Field, typename Guard>
double finite_difference_divergence(Field&& field, const DenseMatrix& point, double step,
                                    Guard&& guard) {
  if (!(step > 0)) throw InvalidInputError("finite difference step must be > 0");
  double total = 0.0;
  DenseMatrix probe = point;
  for (Index i = 0; i < point.rows(); ++i) {
    for (Index j = 0; j < point.cols(); ++j) {
      const double h = step * std::max(1.0, std::abs(point(i, j)));
      probe(i, j) = point(i, j) + h;
      guard(probe);
      const double up = field(probe)(i, j);
      probe(i, j) = point(i, j) - h;
      guard(probe);
      const double down = field(probe)(i, j);
      probe(i, j) = point(i, j);
      total += (up - down) / (2.0 * h);
    }
  }
  return total;
}

template <typename Field>
double finite_difference_divergence(Field&& field, const DenseMatrix& point, double step) {
  return finite_difference_divergence(std::forward<Field>(field), point, step,
                                      [](const DenseMatrix&) {});
}

/// Divergence of Y~ -> Y~ H(Y~) at y_tilde, rebuilding Y = Y~ A, S = Y^T Y and
/// H at each perturbed point. Throws UnstablePointError when rank(S) changes
/// inside the stencil and DegenerateInputError when F = 0 at the base point.
double divergence_finite_difference(const Vector& x, const DenseMatrix& y_tilde,
                                    const DenseMatrix& sqrt_sigma,
                                    const DenseMatrix& inv_sqrt_sigma, const ShrinkageFn& r,
                                    double step = default_fd_step(), double rank_tol = 0);

struct DivergenceReport {
  double closed_form = 0;
  double finite_diff = 0;
  double rel_err = 0;  // |closed - fd| / max(1, |closed|)
  double f_value = 0;
  Index rank_s = 0;
  double coeff = 0;
  SeedPath seed_path{};
};

DivergenceReport evaluate_divergence(const GaussianModel& model, const SampleDraw& draw,
                                     const ShrinkageFn& r, double step = default_fd_step(),
                                     double rank_tol = 0);

struct DivergenceOptions {
  Index reps = 1000;
  std::uint64_t seed = 0;
  double step = default_fd_step();
  double rank_tol = 0;
  double rel_tol = 1e-5;
  double required_fraction = 0.95;
  unsigned threads = 1;
  Index max_attempts = 64;
};

struct DivergenceRun {
  std::vector<DivergenceReport> reports;
  Index within_tolerance = 0;
  Index rejected_unstable = 0;
  Index rejected_small_f = 0;
  double pass_fraction = 0;
  bool passed = false;
  // Least-squares fit finite_diff ~ a r^2/F + b r r'; the closed form has
  // a = n + p - 2 tr(SS+) + 3 and b = -4.
  double fitted_r2_over_f = 0;
  double fitted_r_rprime = 0;
};

DivergenceRun verify_divergence(const GaussianModel& model, const ShrinkageFn& r,
                                const DivergenceOptions& options);

struct SandwichCheck {
  Index rank = 0;
  double f = 0;
  double x1_norm2 = 0;           // X_(1)^T X_(1), X_(1) = first R coordinates
  double lambda_min_splus = 0;   // nonzero extremes of S+
  double lambda_max_splus = 0;
  double u_norm2 = 0;            // U^T U, U = A^-1(R) X_(1)
  double u_a2_u = 0;             // U^T A^2(R) U
  double lambda_min_a2 = 0;
  double lambda_max_a2 = 0;
  bool coord_lower = false;      // lambda_min(S+) X1^T X1 <= F
  bool coord_upper = false;      // F <= lambda_max(S+) X1^T X1
  bool rayleigh = false;         // Rayleigh sandwich for A^2(R)

  bool coord() const { return coord_lower && coord_upper; }
};

SandwichCheck check_sandwich_ineq(const Vector& x, const DenseMatrix& s,
                                  const LeadingBlocks& blocks, double rank_tol = 0);
SandwichCheck check_sandwich_ineq(const Vector& x, const DenseMatrix& s,
                                  const DenseMatrix& sigma, double rank_tol = 0);

struct SandwichScan {
  Index draws = 0;
  Index coord_lower_failures = 0;
  Index coord_upper_failures = 0;
  Index coord_failures = 0;
  Index rayleigh_failures = 0;
  std::vector<SandwichCheck> per_draw;
};

SandwichScan sandwich_scan(const GaussianModel& model, Index reps, std::uint64_t seed,
                           unsigned threads = 1, double rank_tol = 0);

/// lambda_max(Sigma) n p.
double lambda_bound(const GaussianModel& model);
/// n p lambda_max(Sigma) sum_{j=3..p} tr(A^-2(j)).
double final_bound(const GaussianModel& model);

struct BoundLedger {
  MeanEstimate e_inv_f;
  MeanEstimate e_lambda_max;
  double bound_final = 0;
  double bound_lambda = 0;
  bool per_draw_sandwich_ok = true;   // both sandwich chains on every draw
  Index coord_failures = 0;
  Index rayleigh_failures = 0;
  Index rejected_small_f = 0;
  MeanEstimate e_inv_f_checkpoint;    // first `checkpoint` replications
  bool inv_f_stabilized = false;      // |mean - checkpoint mean| < 5 SE(checkpoint)
  bool lambda_within_bound = false;   // mean + 4 SE < bound_lambda
  bool inv_f_within_bound = false;    // mean + 4 SE < bound_final
  std::vector<double> inv_f;
  std::vector<double> lambda_max;
  std::vector<char> coord_ok;
};

struct BoundChainOptions {
  Index reps = 100000;
  std::uint64_t seed = 0;
  Index checkpoint = 10000;  // clipped to reps / 10 when reps is small
  double rank_tol = 0;
  unsigned threads = 1;
  Index max_attempts = 64;
};

BoundLedger verify_bound_chain(const GaussianModel& model, const BoundChainOptions& options);

struct UDistributionCheck {
  Index draws = 0;
  Index rank_min = 0;
  Index rank_max = 0;
  double delta_r = 0;            // for the modal rank
  double ks_statistic = 0;       // U^T U | R against chi^2_R(delta_R)
  MeanEstimate inv_u_norm2;      // 1 / U^T U
  double analytic_inv_moment = 0;
};

UDistributionCheck check_u_distribution(const GaussianModel& model, Index reps,
                                        std::uint64_t seed, unsigned threads = 1,
                                        double rank_tol = 0);

}  // namespace pinvlab
