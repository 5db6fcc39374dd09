#include "pinvlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pinvlab {

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate out;
  out.count = static_cast<Index>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    out.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

double ks_statistic_uniform(std::vector<double> pit) {
  if (pit.empty()) throw InvalidInputError("ks_statistic_uniform: no samples");
  std::sort(pit.begin(), pit.end());
  const double n = static_cast<double>(pit.size());
  double d = 0.0;
  for (std::size_t i = 0; i < pit.size(); ++i) {
    const double u = pit[i];
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

HillEstimate hill_estimate(std::span<const double> values, Index k) {
  const Index n = static_cast<Index>(values.size());
  if (k == 0) k = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(n))));
  if (k < 1 || k >= n) throw InvalidInputError("hill_estimate: need 1 <= k < sample size");
  for (double v : values) {
    if (!(v > 0) || !std::isfinite(v))
      throw InvalidInputError("hill_estimate: samples must be positive and finite");
  }

  std::vector<double> top(values.begin(), values.end());
  std::nth_element(top.begin(), top.begin() + k, top.end(), std::greater<>());
  std::sort(top.begin(), top.begin() + k, std::greater<>());
  const double threshold = top[static_cast<std::size_t>(k)];

  double sum = 0.0;
  for (Index i = 0; i < k; ++i) sum += std::log(top[static_cast<std::size_t>(i)] / threshold);
  const double gamma = sum / static_cast<double>(k);
  HillEstimate out;
  out.k = k;
  out.alpha = 1.0 / gamma;
  out.std_error = out.alpha / std::sqrt(static_cast<double>(k));
  return out;
}

}  // namespace pinvlab
