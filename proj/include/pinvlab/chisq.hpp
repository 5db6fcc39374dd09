#pragma once

// E[1 / chi^2_k(delta)] by two independent routes.

#include <limits>

namespace pinvlab {

enum class InverseMomentMethod { mixture, quadrature };

inline constexpr double kInfiniteMoment = std::numeric_limits<double>::infinity();

/// Mixture: sum_z Poisson(delta/2; z) / (k + 2z - 2), truncated once the
/// accumulated Poisson mass reaches 1 - 1e-12. Quadrature: integral of
/// x^-1 times the noncentral density (Bessel form) after x = t^2.
/// Returns +infinity for k <= 2, where the expectation diverges.
double inv_moment_chisq(int k, double delta,
                        InverseMomentMethod method = InverseMomentMethod::mixture);

/// Noncentral chi-square density in its Bessel-function form.
double noncentral_chisq_density(double x, int k, double delta);

/// CDF of chi^2_k(delta); delta == 0 gives the central law.
double noncentral_chisq_cdf(double x, int k, double delta);

}  // namespace pinvlab
