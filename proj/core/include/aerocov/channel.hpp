#pragma once

#include <cmath>
#include <random>

#include "aerocov/link_class.hpp"
#include "aerocov/scenario.hpp"

namespace aerocov {

using Rng = std::mt19937_64;

/// Probability that a UAV-BS at altitude h and horizontal distance z is in
/// LoS with the ground user. The elevation angle enters in degrees; z = 0 is
/// the 90 degree limit.
double los_probability(const Environment& env, double h, double z);

double link_probability(const Environment& env, double h, LinkClass link, double z);

/// zeta_link * d^-alpha_link. Throws std::domain_error when d < altitude.
double mean_path_gain(const Environment& env, const Deployment& dep, LinkClass link, double d);

/// Unit-mean small-scale power gain: Exp(1) for NLoS, Gamma(m, 1/m) for LoS.
double sample_fading(LinkClass link, int m, Rng& rng);

/// Regularized lower incomplete gamma P(m, m g), integer m.
double gamma_cdf_exact(int m, double g);

/// (m!)^(-1/m); exactly 1 for m = 1.
double alzer_alpha(int m);

/// (1 - exp(-alzer_alpha(m) m g))^m. Exact for m = 1, an approximation otherwise.
double gamma_cdf_approx(int m, double g);

/// d2^(-half_alpha), i.e. d^(-alpha) from a squared distance. Exponents
/// that are multiples of 1/4 avoid pow().
inline double inverse_power(double d2, double half_alpha) {
  if (half_alpha == 1.0) return 1.0 / d2;
  if (half_alpha == 2.0) return 1.0 / (d2 * d2);
  if (half_alpha == 1.75) {
    const double root = std::sqrt(d2);
    return 1.0 / (d2 * root * std::sqrt(root));
  }
  if (half_alpha == 1.5) return 1.0 / (d2 * std::sqrt(d2));
  return std::pow(d2, -half_alpha);
}

/// C(m, k) (-1)^(k+1), the coefficients of the expansion
/// 1 - (1 - x)^m = sum_k C(m,k) (-1)^(k+1) x^k.
double binomial_term(int m, int k);

}  // namespace aerocov
