#include "pinvlab/heavytail.hpp"

#include <algorithm>
#include <cmath>

#include "pinvlab/chisq.hpp"
#include "pinvlab/parallel.hpp"

namespace pinvlab {

std::string_view to_string(TailVerdict verdict) {
  switch (verdict) {
    case TailVerdict::finite_mean_consistent:
      return "finite-mean-consistent";
    case TailVerdict::infinite_mean_consistent:
      return "infinite-mean-consistent";
  }
  return "unknown";
}

bool TailReport::running_mean_max_at_end() const {
  if (running_means.empty()) return false;
  const auto top = std::max_element(running_means.begin(), running_means.end(),
                                    [](const auto& a, const auto& b) { return a.mean < b.mean; });
  return top == running_means.end() - 1;
}

std::vector<Index> running_mean_grid(Index reps) {
  std::vector<Index> grid;
  for (Index n = 10000; n <= reps; n *= 10) grid.push_back(n);
  if (grid.empty() || grid.back() != reps) grid.push_back(reps);
  return grid;
}

void analyse_tail(TailReport& report) {
  const std::span<const double> all(report.inv_f);
  report.sample_size = static_cast<Index>(all.size());
  report.running_means.clear();
  for (Index n : running_mean_grid(report.sample_size)) {
    const MeanEstimate m = mean_estimate(all.first(static_cast<std::size_t>(n)));
    report.running_means.push_back({n, m.mean, m.std_error});
  }
  const HillEstimate hill = hill_estimate(all);
  report.hill_alpha = hill.alpha;
  report.hill_std_error = hill.std_error;
  report.hill_k = hill.k;

  const RunningMean& first = report.running_means.front();
  const RunningMean& last = report.running_means.back();
  report.stabilized = std::abs(last.mean - first.mean) < kStabilizationSe * first.std_error ||
                      report.running_means.size() == 1;
  const bool heavy = hill.alpha + kHillMarginSe * hill.std_error < 1.0;
  report.verdict = heavy && !report.stabilized ? TailVerdict::infinite_mean_consistent
                                               : TailVerdict::finite_mean_consistent;
}

GaussianModel rank_one_model() { return GaussianModel(ModelSpec::identity(1, 2, Vector::Ones(2))); }

GaussianModel contrast_model() { return GaussianModel(ModelSpec::identity(3, 5)); }

TailReport run_tail_experiment(const GaussianModel& model, Index reps, std::uint64_t seed,
                               unsigned threads, double rank_tol) {
  if (reps < 10000) throw InvalidInputError("heavy-tail experiments require reps >= 10^4");
  const auto count = static_cast<std::size_t>(reps);
  const Index expected_rank = std::min(model.n(), model.p());
  const bool rank_one = model.n() == 1;

  TailReport report;
  report.n = model.n();
  report.p = model.p();
  report.inv_f.resize(count);
  std::vector<char> rank_bad(count, 0);
  std::vector<Index> zero_f(count, 0);
  std::vector<double> identity_err(count, 0.0), decomposition_err(count, 0.0);

  parallel_for(count, threads, [&](std::size_t i) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      const SampleDraw d = sample_draw(model, seed, i, attempt, rank_tol);
      const auto pr = pinv_with_rank(d.s, rank_tol);
      const double f = d.x.dot(pr.pinv * d.x);
      if (!(f > 0)) {
        ++zero_f[i];
        continue;
      }
      rank_bad[i] = pr.rank != expected_rank;
      if (rank_one) {
        const double u = d.y(0, 0), v = d.y(0, 1);
        const double norm2 = u * u + v * v;
        const DenseMatrix closed = d.s / (norm2 * norm2);
        identity_err[i] =
            (pr.pinv - closed).cwiseAbs().maxCoeff() / pr.pinv.cwiseAbs().maxCoeff();
        const double proj = u * d.x(0) + v * d.x(1);
        const double f_closed = proj * proj / (norm2 * norm2);
        decomposition_err[i] = std::abs(f - f_closed) / (d.x.squaredNorm() / norm2);
      }
      report.inv_f[i] = 1.0 / f;
      return;
    }
  });

  for (std::size_t i = 0; i < count; ++i) {
    report.rank_mismatches += rank_bad[i];
    report.rejected_zero_f += zero_f[i];
    report.max_rank1_identity_error = std::max(report.max_rank1_identity_error, identity_err[i]);
    report.max_f_decomposition_error =
        std::max(report.max_f_decomposition_error, decomposition_err[i]);
  }
  analyse_tail(report);
  return report;
}

TailReport run_infinite_demo(Index reps, std::uint64_t seed, unsigned threads) {
  return run_tail_experiment(rank_one_model(), reps, seed, threads);
}

TailReport run_finite_contrast(Index reps, std::uint64_t seed, unsigned threads) {
  return run_tail_experiment(contrast_model(), reps, seed, threads);
}

ConditionalLawCheck check_conditional_law(Index bins, Index draws_per_bin, std::uint64_t seed) {
  if (bins < 1 || draws_per_bin < 1) {
    throw InvalidInputError("check_conditional_law: bins and draws must be positive");
  }
  const GaussianModel model = rank_one_model();
  const Vector ones = Vector::Ones(2);
  std::vector<double> pit;
  pit.reserve(static_cast<std::size_t>(bins * draws_per_bin));

  for (Index b = 0; b < bins; ++b) {
    RandomStream uv_stream(seed, static_cast<std::uint64_t>(b), 0);
    const DenseMatrix y = sample_matrix_normal(model, uv_stream);
    const DenseMatrix s = y.transpose() * y;
    const DenseMatrix sp = pinv_numeric(s);

    // S+ = P diag(d1, 0) P^T with d1 the nonzero eigenvalue.
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sp);
    const double d1 = eig.eigenvalues()(1);
    const Vector lead = eig.eigenvectors().col(1);
    const double delta0 = std::pow(ones.dot(lead), 2);

    RandomStream x_stream(seed, static_cast<std::uint64_t>(b), 1);
    for (Index j = 0; j < draws_per_bin; ++j) {
      const Vector x = sample_mvn(model, x_stream);
      pit.push_back(noncentral_chisq_cdf(x.dot(sp * x) / d1, 1, delta0));
    }
  }

  ConditionalLawCheck out;
  out.bins = bins;
  out.draws_per_bin = draws_per_bin;
  out.ks_statistic = ks_statistic_uniform(std::move(pit));
  return out;
}

}  // namespace pinvlab
