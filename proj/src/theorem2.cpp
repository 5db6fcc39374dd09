#include "pinvlab/theorem2.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "pinvlab/chisq.hpp"
#include "pinvlab/parallel.hpp"

namespace pinvlab {

namespace {

constexpr double kSmallF = 1e-12;
constexpr double kSandwichTolerance = 1e-9;

// a <= b up to a relative slack.
bool leq(double a, double b, double rel = kSandwichTolerance) {
  return a <= b + rel * std::max({1e-300, std::abs(a), std::abs(b)});
}

[[noreturn]] void attempts_exhausted(const char* what, Index rep) {
  std::ostringstream msg;
  msg << what << ": replication " << rep << " exhausted its resampling attempts";
  throw std::runtime_error(msg.str());
}

}  // namespace

ShrinkageFn make_shrinkage_default(double c1) {
  if (!(c1 > 0) || !std::isfinite(c1)) throw DomainError("shrinkage: c1 must be > 0");
  return ShrinkageFn{"default", [c1](double t) { return c1 * t / (1.0 + t); },
                     [c1](double t) { return c1 / ((1.0 + t) * (1.0 + t)); }, c1, c1};
}

ShrinkageFn make_shrinkage_const(double c1) {
  if (!(c1 > 0) || !std::isfinite(c1)) throw DomainError("shrinkage: c1 must be > 0");
  // c2 is any positive bound on |r'| = 0.
  return ShrinkageFn{"const", [c1](double) { return c1; }, [](double) { return 0.0; }, c1,
                     c1};
}

ShrinkageFn make_shrinkage(const std::string& name, double c1) {
  if (name == "default") return make_shrinkage_default(c1);
  if (name == "const") return make_shrinkage_const(c1);
  throw InvalidInputError("unknown shrinkage function '" + name + "'");
}

GridCertificate certify_on_grid(const ShrinkageFn& r, double t_max, int points) {
  GridCertificate out;
  const double lo = std::log(1e-6);
  const double hi = std::log(t_max);
  for (int i = 0; i < points; ++i) {
    const double t =
        i == 0 ? 0.0 : std::exp(lo + (hi - lo) * (i - 1) / std::max(1, points - 2));
    const double v = r.eval(t);
    const double d = r.deriv(t);
    if (!(v >= 0 && v <= r.c1 && std::abs(d) <= r.c2)) out.bounds_ok = false;
    const double h = 1e-5 * std::max(1.0, t);
    const double fd = (r.eval(t + h) - r.eval(t - h)) / (2.0 * h);
    const double err = std::abs(fd - d) / std::max(1.0, std::abs(d));
    out.max_derivative_error = std::max(out.max_derivative_error, err);
  }
  out.derivative_ok = out.max_derivative_error <= 1e-6;
  return out;
}

LeadingBlocks::LeadingBlocks(const DenseMatrix& sigma) {
  const DenseMatrix sym = symmetrized(sigma, "LeadingBlocks");
  for (Index j = 1; j <= sym.rows(); ++j) {
    Entry e;
    e.block = sym.topLeftCorner(j, j);
    e.root = sym_sqrt_pd(e.block);
    e.inv_root = e.root.inverse();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(e.block, Eigen::EigenvaluesOnly);
    e.lambda_min = eig.eigenvalues().minCoeff();
    e.lambda_max = eig.eigenvalues().maxCoeff();
    e.inverse_trace = eig.eigenvalues().cwiseInverse().sum();
    blocks_.push_back(std::move(e));
  }
}

const LeadingBlocks::Entry& LeadingBlocks::at(Index j) const {
  if (j < 1 || j > size()) throw InvalidInputError("LeadingBlocks: block size out of range");
  return blocks_[static_cast<std::size_t>(j - 1)];
}

namespace {

GHPair build_from_pinv(const Vector& x, const DenseMatrix& s, const DenseMatrix& sp,
                       const DenseMatrix& a, const DenseMatrix& a_inv, const ShrinkageFn& r) {
  GHPair out;
  const Vector spx = sp * x;
  out.f = x.dot(spx);
  if (!(out.f > 0)) throw DegenerateInputError("build_G_H: F = x^T S+ x is zero");
  const double rf = r.eval(out.f);
  out.g = (rf * rf / (out.f * out.f)) * (spx * spx.transpose()) * s;
  out.h = a * out.g * a_inv;
  return out;
}

}  // namespace

GHPair build_G_H(const Vector& x, const DenseMatrix& s, const DenseMatrix& sqrt_sigma,
                 const DenseMatrix& inv_sqrt_sigma, const ShrinkageFn& r, double rank_tol) {
  if (x.size() != s.rows() || s.rows() != s.cols() || sqrt_sigma.rows() != s.rows()) {
    throw InvalidInputError("build_G_H: dimension mismatch");
  }
  return build_from_pinv(x, s, pinv_numeric(s, rank_tol), sqrt_sigma, inv_sqrt_sigma, r);
}

GHPair build_G_H(const Vector& x, const DenseMatrix& s, const DenseMatrix& sigma,
                 const ShrinkageFn& r, double rank_tol) {
  const DenseMatrix a = sym_sqrt_pd(sigma);
  return build_G_H(x, s, a, a.inverse(), r, rank_tol);
}

double projection_trace(const DenseMatrix& s, double rank_tol) {
  return (s * pinv_numeric(s, rank_tol)).trace();
}

double divergence_coefficient(Index n, Index p, double trace_ssp) {
  return static_cast<double>(n + p) - 2.0 * trace_ssp + 3.0;
}

double divergence_closed_form(const Vector& x, const DenseMatrix& s, const ShrinkageFn& r,
                              Index n, double rank_tol) {
  if (x.size() != s.rows() || s.rows() != s.cols()) {
    throw InvalidInputError("divergence_closed_form: dimension mismatch");
  }
  const DenseMatrix sp = pinv_numeric(s, rank_tol);
  const double f = x.dot(sp * x);
  if (!(f > 0)) throw DegenerateInputError("divergence_closed_form: F is zero");
  const double coeff = divergence_coefficient(n, s.rows(), (s * sp).trace());
  const double rf = r.eval(f);
  return rf * rf / f * coeff - 4.0 * rf * r.deriv(f);
}

double divergence_finite_difference(const Vector& x, const DenseMatrix& y_tilde,
                                    const DenseMatrix& sqrt_sigma,
                                    const DenseMatrix& inv_sqrt_sigma, const ShrinkageFn& r,
                                    double step, double rank_tol) {
  if (!(step > 0)) throw InvalidInputError("divergence_finite_difference: h must be > 0");
  if (y_tilde.cols() != x.size() || sqrt_sigma.rows() != x.size()) {
    throw InvalidInputError("divergence_finite_difference: dimension mismatch");
  }
  const DenseMatrix y0 = y_tilde * sqrt_sigma;
  const DenseMatrix s0 = y0.transpose() * y0;
  const auto base = pinv_with_rank(s0, rank_tol);
  if (!(x.dot(base.pinv * x) > 0)) {
    throw DegenerateInputError("divergence_finite_difference: F is zero");
  }

  auto field = [&](const DenseMatrix& yt) -> DenseMatrix {
    const DenseMatrix y = yt * sqrt_sigma;
    const DenseMatrix s = y.transpose() * y;
    const auto pr = pinv_with_rank(s, rank_tol);
    if (pr.rank != base.rank) {
      throw UnstablePointError("divergence_finite_difference: rank of S changed under perturbation");
    }
    return yt * build_from_pinv(x, s, pr.pinv, sqrt_sigma, inv_sqrt_sigma, r).h;
  };
  return finite_difference_divergence(field, y_tilde, step);
}

DivergenceReport evaluate_divergence(const GaussianModel& model, const SampleDraw& draw,
                                     const ShrinkageFn& r, double step, double rank_tol) {
  DivergenceReport out;
  out.seed_path = draw.seed_path;
  const DenseMatrix sp = pinv_numeric(draw.s, rank_tol);
  out.f_value = draw.x.dot(sp * draw.x);
  out.rank_s = draw.rank_s;
  out.coeff = divergence_coefficient(model.n(), model.p(), (draw.s * sp).trace());
  out.closed_form = divergence_closed_form(draw.x, draw.s, r, model.n(), rank_tol);
  const DenseMatrix y_tilde = draw.y * model.inv_sqrt_sigma();
  out.finite_diff = divergence_finite_difference(draw.x, y_tilde, model.sqrt_sigma(),
                                                 model.inv_sqrt_sigma(), r, step, rank_tol);
  out.rel_err = std::abs(out.closed_form - out.finite_diff) / std::max(1.0, std::abs(out.closed_form));
  return out;
}

DivergenceRun verify_divergence(const GaussianModel& model, const ShrinkageFn& r,
                                const DivergenceOptions& opt) {
  if (opt.reps < 0) throw InvalidInputError("verify_divergence: reps must be >= 0");
  const auto reps = static_cast<std::size_t>(opt.reps);
  DivergenceRun out;
  out.reports.resize(reps);
  std::vector<Index> unstable(reps, 0), small_f(reps, 0);

  parallel_for(reps, opt.threads, [&](std::size_t i) {
    for (Index attempt = 0; attempt < opt.max_attempts; ++attempt) {
      const SampleDraw draw = sample_draw(model, opt.seed, i, static_cast<std::uint64_t>(attempt),
                                          opt.rank_tol);
      if (compute_F(draw.x, draw.s, opt.rank_tol) < kSmallF) {
        ++small_f[i];
        continue;
      }
      try {
        out.reports[i] = evaluate_divergence(model, draw, r, opt.step, opt.rank_tol);
        return;
      } catch (const UnstablePointError&) {
        ++unstable[i];
      }
    }
    attempts_exhausted("verify_divergence", static_cast<Index>(i));
  });

  for (std::size_t i = 0; i < reps; ++i) {
    out.rejected_unstable += unstable[i];
    out.rejected_small_f += small_f[i];
    if (out.reports[i].rel_err < opt.rel_tol) ++out.within_tolerance;
  }
  out.pass_fraction =
      reps ? static_cast<double>(out.within_tolerance) / static_cast<double>(reps) : 1.0;
  out.passed = out.pass_fraction >= opt.required_fraction;

  if (reps >= 2) {
    DenseMatrix design(static_cast<Index>(reps), 2);
    Vector target(static_cast<Index>(reps));
    for (std::size_t i = 0; i < reps; ++i) {
      const double f = out.reports[i].f_value;
      const double rf = r.eval(f);
      design(static_cast<Index>(i), 0) = rf * rf / f;
      design(static_cast<Index>(i), 1) = rf * r.deriv(f);
      target(static_cast<Index>(i)) = out.reports[i].finite_diff;
    }
    const Vector fit = design.colPivHouseholderQr().solve(target);
    out.fitted_r2_over_f = fit(0);
    out.fitted_r_rprime = fit(1);
  }
  return out;
}

SandwichCheck check_sandwich_ineq(const Vector& x, const DenseMatrix& s,
                                  const LeadingBlocks& blocks, double rank_tol) {
  if (x.size() != s.rows() || s.rows() != s.cols() || blocks.size() != s.rows()) {
    throw InvalidInputError("check_sandwich_ineq: dimension mismatch");
  }
  SandwichCheck out;
  const auto pr = pinv_with_rank(s, rank_tol);
  out.rank = pr.rank;
  if (out.rank == 0) throw DegenerateInputError("check_sandwich_ineq: rank(S) = 0");

  const auto spec = spectral_summary(pr.pinv, rank_tol);
  out.f = x.dot(pr.pinv * x);
  out.lambda_min_splus = spec.lambda_min_nonzero;
  out.lambda_max_splus = spec.lambda_max_nonzero;

  const Vector x1 = x.head(out.rank);
  out.x1_norm2 = x1.squaredNorm();
  out.coord_lower = leq(out.lambda_min_splus * out.x1_norm2, out.f);
  out.coord_upper = leq(out.f, out.lambda_max_splus * out.x1_norm2);

  const Vector u = blocks.inv_root(out.rank) * x1;
  out.u_norm2 = u.squaredNorm();
  out.u_a2_u = u.dot(blocks.block(out.rank) * u);
  out.lambda_min_a2 = blocks.lambda_min(out.rank);
  out.lambda_max_a2 = blocks.lambda_max(out.rank);
  out.rayleigh = leq(out.lambda_min_a2 * out.u_norm2, out.u_a2_u, 1e-10) &&
            leq(out.u_a2_u, out.lambda_max_a2 * out.u_norm2, 1e-10);
  return out;
}

SandwichCheck check_sandwich_ineq(const Vector& x, const DenseMatrix& s,
                                  const DenseMatrix& sigma, double rank_tol) {
  return check_sandwich_ineq(x, s, LeadingBlocks(sigma), rank_tol);
}

SandwichScan sandwich_scan(const GaussianModel& model, Index reps, std::uint64_t seed,
                           unsigned threads, double rank_tol) {
  if (reps < 1) throw InvalidInputError("sandwich_scan: reps must be >= 1");
  const LeadingBlocks blocks(model.spec().sigma);
  SandwichScan out;
  out.draws = reps;
  out.per_draw.resize(static_cast<std::size_t>(reps));
  parallel_for(out.per_draw.size(), threads, [&](std::size_t i) {
    const SampleDraw d = sample_draw(model, seed, i, 0, rank_tol);
    out.per_draw[i] = check_sandwich_ineq(d.x, d.s, blocks, rank_tol);
  });
  for (const SandwichCheck& c : out.per_draw) {
    out.coord_lower_failures += c.coord_lower ? 0 : 1;
    out.coord_upper_failures += c.coord_upper ? 0 : 1;
    out.coord_failures += c.coord() ? 0 : 1;
    out.rayleigh_failures += c.rayleigh ? 0 : 1;
  }
  return out;
}

double lambda_bound(const GaussianModel& model) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(model.spec().sigma, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff() * static_cast<double>(model.n() * model.p());
}

double final_bound(const GaussianModel& model) {
  if (model.p() < 3) throw DomainError("final_bound: requires p >= 3");
  const LeadingBlocks blocks(model.spec().sigma);
  double trace_sum = 0.0;
  for (Index j = 3; j <= model.p(); ++j) trace_sum += blocks.inverse_trace(j);
  return lambda_bound(model) * trace_sum;
}

BoundLedger verify_bound_chain(const GaussianModel& model, const BoundChainOptions& opt) {
  if (std::min(model.n(), model.p()) < 3) {
    throw DomainError("verify_bound_chain: requires min(n, p) >= 3");
  }
  if (opt.reps < 100) throw DomainError("verify_bound_chain: requires reps >= 100");

  const auto reps = static_cast<std::size_t>(opt.reps);
  const LeadingBlocks blocks(model.spec().sigma);
  BoundLedger out;
  out.inv_f.resize(reps);
  out.lambda_max.resize(reps);
  out.coord_ok.resize(reps);
  std::vector<char> rayleigh_ok(reps);
  std::vector<Index> small_f(reps, 0);

  parallel_for(reps, opt.threads, [&](std::size_t i) {
    for (Index attempt = 0; attempt < opt.max_attempts; ++attempt) {
      const SampleDraw d =
          sample_draw(model, opt.seed, i, static_cast<std::uint64_t>(attempt), opt.rank_tol);
      const SandwichCheck c = check_sandwich_ineq(d.x, d.s, blocks, opt.rank_tol);
      if (c.f < kSmallF) {
        ++small_f[i];
        continue;
      }
      out.inv_f[i] = 1.0 / c.f;
      out.lambda_max[i] = spectral_summary(d.s, opt.rank_tol).lambda_max_nonzero;
      out.coord_ok[i] = c.coord() ? 1 : 0;
      rayleigh_ok[i] = c.rayleigh ? 1 : 0;
      return;
    }
    attempts_exhausted("verify_bound_chain", static_cast<Index>(i));
  });

  for (std::size_t i = 0; i < reps; ++i) {
    out.rejected_small_f += small_f[i];
    out.coord_failures += out.coord_ok[i] ? 0 : 1;
    out.rayleigh_failures += rayleigh_ok[i] ? 0 : 1;
  }
  out.per_draw_sandwich_ok = out.coord_failures == 0 && out.rayleigh_failures == 0;
  out.e_inv_f = mean_estimate(out.inv_f);
  out.e_lambda_max = mean_estimate(out.lambda_max);
  out.bound_lambda = lambda_bound(model);
  out.bound_final = final_bound(model);

  const Index checkpoint = std::max<Index>(2, std::min(opt.checkpoint, opt.reps / 10));
  out.e_inv_f_checkpoint = mean_estimate(
      std::span<const double>(out.inv_f.data(), static_cast<std::size_t>(checkpoint)));
  out.inv_f_stabilized = std::abs(out.e_inv_f.mean - out.e_inv_f_checkpoint.mean) <
                         5.0 * out.e_inv_f_checkpoint.std_error;
  out.lambda_within_bound =
      out.e_lambda_max.mean + 4.0 * out.e_lambda_max.std_error < out.bound_lambda;
  out.inv_f_within_bound = out.e_inv_f.mean + 4.0 * out.e_inv_f.std_error < out.bound_final;
  return out;
}

UDistributionCheck check_u_distribution(const GaussianModel& model, Index reps,
                                        std::uint64_t seed, unsigned threads,
                                        double rank_tol) {
  if (reps < 1) throw InvalidInputError("check_u_distribution: reps must be >= 1");
  const auto count = static_cast<std::size_t>(reps);
  const LeadingBlocks blocks(model.spec().sigma);
  std::vector<double> delta(static_cast<std::size_t>(model.p()) + 1, 0.0);
  for (Index j = 1; j <= model.p(); ++j) {
    delta[static_cast<std::size_t>(j)] =
        (blocks.inv_root(j) * model.spec().theta.head(j)).squaredNorm();
  }

  std::vector<double> pit(count), inv(count);
  std::vector<Index> ranks(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const SampleDraw d = sample_draw(model, seed, i, 0, rank_tol);
    const Index r = d.rank_s;
    if (r == 0) throw DegenerateInputError("check_u_distribution: rank(S) = 0");
    const Vector u = blocks.inv_root(r) * d.x.head(r);
    const double utu = u.squaredNorm();
    ranks[i] = r;
    pit[i] = noncentral_chisq_cdf(utu, static_cast<int>(r), delta[static_cast<std::size_t>(r)]);
    inv[i] = 1.0 / utu;
  });

  UDistributionCheck out;
  out.draws = reps;
  out.rank_min = *std::min_element(ranks.begin(), ranks.end());
  out.rank_max = *std::max_element(ranks.begin(), ranks.end());
  std::map<Index, Index> freq;
  for (Index r : ranks) ++freq[r];
  const Index mode =
      std::max_element(freq.begin(), freq.end(),
                       [](const auto& a, const auto& b) { return a.second < b.second; })
          ->first;
  out.delta_r = delta[static_cast<std::size_t>(mode)];
  out.ks_statistic = ks_statistic_uniform(std::move(pit));
  out.inv_u_norm2 = mean_estimate(inv);
  out.analytic_inv_moment = inv_moment_chisq(static_cast<int>(mode), out.delta_r);
  return out;
}

}  // namespace pinvlab
