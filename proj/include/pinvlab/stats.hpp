#pragma once

#include <span>
#include <vector>

#include "pinvlab/linalg.hpp"

namespace pinvlab {

struct MeanEstimate {
  double mean = 0;
  double std_error = 0;
  Index count = 0;
};

/// Sample mean and standard error of the mean, accumulated in index order.
MeanEstimate mean_estimate(std::span<const double> values);

/// sup |F_n(u) - u| for values already mapped through a hypothesised CDF.
double ks_statistic_uniform(std::vector<double> pit_values);

struct HillEstimate {
  double alpha = 0;      // tail index of P(X > t) ~ t^-alpha
  double std_error = 0;  // alpha / sqrt(k)
  Index k = 0;
};

/// Hill estimator on the k largest order statistics; k = 0 picks floor(sqrt(N)).
/// Requires strictly positive samples and 1 <= k < N.
HillEstimate hill_estimate(std::span<const double> values, Index k = 0);

}  // namespace pinvlab
