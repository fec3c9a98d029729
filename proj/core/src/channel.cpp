#include "aerocov/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aerocov {

double los_probability(const Environment& env, double h, double z) {
  const double theta_deg =
      z > 0.0 ? (180.0 / std::numbers::pi) * std::atan(h / z) : 90.0;
  return 1.0 / (1.0 + env.a * std::exp(-env.b * (theta_deg - env.a)));
}

double link_probability(const Environment& env, double h, LinkClass link, double z) {
  const double p = los_probability(env, h, z);
  return link == LinkClass::los ? p : 1.0 - p;
}

double mean_path_gain(const Environment& env, const Deployment& dep, LinkClass link, double d) {
  if (!(d >= dep.altitude)) {
    throw std::domain_error("mean_path_gain: distance below the UAV altitude");
  }
  return derived_zeta(env, dep, link) * std::pow(d, -env.alpha(link));
}

double sample_fading(LinkClass link, int m, Rng& rng) {
  // Gamma(m, 1/m) for integer m is the mean of m unit exponentials.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int shape = link == LinkClass::los ? m : 1;
  double product = 1.0;
  for (int i = 0; i < shape; ++i) product *= 1.0 - unit(rng);
  return -std::log(product) / shape;
}

double gamma_cdf_exact(int m, double g) {
  if (g <= 0.0) return 0.0;
  const double x = m * g;
  if (m == 1) return -std::expm1(-x);
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < m; ++j) {
    term *= x / j;
    sum += term;
  }
  // For small x the subtraction cancels; the series tail is more accurate.
  if (x < 0.5) {
    double t = std::exp(-x);
    for (int j = 1; j <= m; ++j) t *= x / j;
    double tail = 0.0;
    for (int j = m; j < m + 200; ++j) {
      tail += t;
      t *= x / (j + 1);
      if (t < 1e-18 * tail) break;
    }
    return tail;
  }
  return 1.0 - std::exp(-x) * sum;
}

double alzer_alpha(int m) {
  if (m == 1) return 1.0;
  return std::exp(-std::lgamma(m + 1.0) / m);
}

double gamma_cdf_approx(int m, double g) {
  if (g <= 0.0) return 0.0;
  return std::pow(-std::expm1(-alzer_alpha(m) * m * g), m);
}

double binomial_term(int m, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (m - k + i) / i;
  return k % 2 == 1 ? c : -c;
}

}  // namespace aerocov
