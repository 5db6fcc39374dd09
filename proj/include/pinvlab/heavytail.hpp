#pragma once

// Rank(S) <= 2 makes E[1/F] infinite. The demo samples 1/F in the rank-one
// model (n = 1, p = 2, theta = (1, 1), Sigma = I) and contrasts it with the
// finite case n = 3, p = 5.

#include <cstdint>
#include <string_view>
#include <vector>

#include "pinvlab/sampling.hpp"
#include "pinvlab/stats.hpp"

namespace pinvlab {

enum class TailVerdict { finite_mean_consistent, infinite_mean_consistent };

std::string_view to_string(TailVerdict verdict);

struct RunningMean {
  Index n = 0;
  double mean = 0;
  double std_error = 0;
};

// Verdict policy: the running mean is "stabilized" when the last grid mean is
// within 5 standard errors (taken at the first grid point) of the first one.
// infinite-mean-consistent iff hill_alpha + 2 SE < 1 and not stabilized.
inline constexpr double kStabilizationSe = 5.0;
inline constexpr double kHillMarginSe = 2.0;

struct TailReport {
  Index n = 0;
  Index p = 0;
  Index sample_size = 0;
  std::vector<RunningMean> running_means;
  double hill_alpha = 0;
  double hill_std_error = 0;
  Index hill_k = 0;
  bool stabilized = false;
  TailVerdict verdict = TailVerdict::finite_mean_consistent;
  Index rank_mismatches = 0;            // draws whose numeric rank != min(n, p)
  Index rejected_zero_f = 0;
  double max_rank1_identity_error = 0;  // ||S+ - S / tr(S)^2||_max / ||S+||_max, n = 1 only
  double max_f_decomposition_error = 0; // |F - (UX1+VX2)^2/(U^2+V^2)^2| / (d1 |X|^2), n = 1 only
  std::vector<double> inv_f;            // per replication, in replication order

  bool running_mean_increased() const {
    return running_means.size() >= 2 && running_means.back().mean > running_means.front().mean;
  }
  bool running_mean_max_at_end() const;
};

/// 10^4, 10^5, ... up to reps, with reps appended when it is not a power of ten.
std::vector<Index> running_mean_grid(Index reps);

/// Running means, Hill estimate and verdict for a sample of 1/F values.
void analyse_tail(TailReport& report);

TailReport run_tail_experiment(const GaussianModel& model, Index reps, std::uint64_t seed,
                               unsigned threads = 1, double rank_tol = 0);

TailReport run_infinite_demo(Index reps, std::uint64_t seed, unsigned threads = 1);
TailReport run_finite_contrast(Index reps, std::uint64_t seed, unsigned threads = 1);

GaussianModel rank_one_model();
GaussianModel contrast_model();

struct ConditionalLawCheck {
  Index bins = 0;
  Index draws_per_bin = 0;
  double ks_statistic = 0;  // pooled PIT of F/d1 under chi^2_1(delta_0)
};

/// For each bin fixes (U, V), draws X repeatedly and maps F/d1 through the
/// chi^2_1(delta_0) CDF, with d1 and delta_0 from the spectral decomposition
/// of S+.
ConditionalLawCheck check_conditional_law(Index bins, Index draws_per_bin, std::uint64_t seed);

}  // namespace pinvlab
