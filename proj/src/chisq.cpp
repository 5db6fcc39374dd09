#include "pinvlab/chisq.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>

#include "pinvlab/errors.hpp"

namespace pinvlab {

namespace {

constexpr double kPoissonTailMass = 1e-12;

void check_args(int k, double delta) {
  if (k < 1) throw InvalidInputError("inv_moment_chisq: k must be >= 1");
  if (!std::isfinite(delta) || delta < 0) {
    throw InvalidInputError("inv_moment_chisq: delta must be finite and >= 0");
  }
}

double mixture_moment(int k, double delta) {
  const double lambda = delta / 2.0;
  if (lambda == 0.0) return 1.0 / (k - 2);

  const double log_lambda = std::log(lambda);
  double mass = 0.0;
  double sum = 0.0;
  for (long z = 0;; ++z) {
    const double w =
        std::exp(-lambda + static_cast<double>(z) * log_lambda - std::lgamma(z + 1.0));
    mass += w;
    sum += w / static_cast<double>(k + 2 * z - 2);
    // Past the mode the remaining mass is below the threshold and every
    // remaining summand is at most 1.
    if (mass >= 1.0 - kPoissonTailMass && static_cast<double>(z) >= lambda) break;
  }
  return sum;
}

double quadrature_moment(int k, double delta) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto integrand = [k, delta](double t) {
    if (t <= 0) return 0.0;
    const double value = 2.0 * noncentral_chisq_density(t * t, k, delta) / t;
    return std::isfinite(value) ? value : 0.0;
  };
  return integrator.integrate(integrand, 1e-14);
}

// log(I_nu(z)), switching to the large-argument expansion
// I_nu(z) ~ e^z / sqrt(2 pi z) sum_j (-1)^j a_j(nu) / z^j before Boost overflows.
double log_bessel_i(double nu, double z) {
  if (z < 500.0) return std::log(boost::math::cyl_bessel_i(nu, z));
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < 30; ++j) {
    term *= -(mu - (2.0 * j - 1) * (2.0 * j - 1)) / (8.0 * j * z);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(sum);
}

}  // namespace

double noncentral_chisq_density(double x, int k, double delta) {
  if (x <= 0 || std::isinf(x)) return 0.0;
  const double half_k = 0.5 * k;
  if (delta == 0.0) {
    return std::exp((half_k - 1.0) * std::log(x) - 0.5 * x - half_k * std::log(2.0) -
                    std::lgamma(half_k));
  }
  const double nu = half_k - 1.0;
  const double z = std::sqrt(delta * x);
  return 0.5 * std::exp(-0.5 * (x + delta) + 0.5 * nu * std::log(x / delta) + log_bessel_i(nu, z));
}

double noncentral_chisq_cdf(double x, int k, double delta) {
  if (x <= 0) return 0.0;
  if (delta == 0.0) return boost::math::cdf(boost::math::chi_squared_distribution<double>(k), x);
  return boost::math::cdf(boost::math::non_central_chi_squared_distribution<double>(k, delta), x);
}

double inv_moment_chisq(int k, double delta, InverseMomentMethod method) {
  check_args(k, delta);
  if (k <= 2) return kInfiniteMoment;
  switch (method) {
    case InverseMomentMethod::mixture:
      return mixture_moment(k, delta);
    case InverseMomentMethod::quadrature:
      return quadrature_moment(k, delta);
  }
  return kInfiniteMoment;
}

}  // namespace pinvlab
