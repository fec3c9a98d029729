#include "aerocov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aerocov/channel.hpp"

namespace aerocov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kMaxNodes = 200000;

std::size_t index_of(LinkClass link) { return link == LinkClass::los ? 0 : 1; }

void check_distance(double h, double r, const char* who) {
  if (!(r >= h)) throw std::domain_error(std::string(who) + ": distance below the UAV altitude");
}

double direct_mass(const Environment& env, double h, LinkClass link, double z,
                   const quad::Tolerance& tol) {
  auto f = [&](double t) { return t * link_probability(env, h, link, t); };
  return quad::integrate(f, 0.0, z, tol).value;
}

}  // namespace

double horizontal_from_3d(double h, double d) { return std::sqrt(std::max(d * d - h * h, 0.0)); }

double exclusion_distance_los(const Environment& env, double r) {
  return std::pow(env.eta_los / env.eta_nlos, 1.0 / env.alpha_los) *
         std::pow(r, env.alpha_nlos / env.alpha_los);
}

double nlos_exclusion_threshold(const Environment& env, double h) {
  return std::pow(env.eta_los / env.eta_nlos, 1.0 / env.alpha_los) *
         std::pow(h, env.alpha_nlos / env.alpha_los);
}

double exclusion_distance_nlos(const Environment& env, double h, double r) {
  if (r <= nlos_exclusion_threshold(env, h)) return h;
  return std::pow(env.eta_nlos / env.eta_los, 1.0 / env.alpha_nlos) *
         std::pow(r, env.alpha_los / env.alpha_nlos);
}

double nearest_distance_cdf(const Environment& env, const Deployment& dep, LinkClass link,
                            double r, const quad::Tolerance& tol) {
  const double h = dep.altitude;
  check_distance(h, r, "nearest_distance_cdf");
  const double mass = direct_mass(env, h, link, horizontal_from_3d(h, r), tol);
  return -std::expm1(-kTwoPi * dep.lambda_density * mass);
}

double nearest_distance_pdf(const Environment& env, const Deployment& dep, LinkClass link,
                            double r, const quad::Tolerance& tol) {
  const double h = dep.altitude;
  check_distance(h, r, "nearest_distance_pdf");
  const double z = horizontal_from_3d(h, r);
  const double mass = direct_mass(env, h, link, z, tol);
  return kTwoPi * dep.lambda_density * r * link_probability(env, h, link, z) *
         std::exp(-kTwoPi * dep.lambda_density * mass);
}

double horizontal_distance_pdf(const Environment& env, const Deployment& dep, LinkClass link,
                               double z, const quad::Tolerance& tol) {
  if (z <= 0.0) return 0.0;
  const double h = dep.altitude;
  const double mass = direct_mass(env, h, link, z, tol);
  return kTwoPi * dep.lambda_density * z * link_probability(env, h, link, z) *
         std::exp(-kTwoPi * dep.lambda_density * mass);
}

DistanceLaw::DistanceLaw(const Environment& env, const Deployment& dep, const NumericsConfig& num)
    : env_(env), dep_(dep), r_max_(num.r_max), window_(horizontal_from_3d(dep.altitude, num.r_max)) {
  step_ = std::max(dep_.altitude / 4.0, window_ / static_cast<double>(kMaxNodes));
  const auto nodes = static_cast<std::size_t>(std::ceil(window_ / step_)) + 1;
  for (LinkClass link : kLinkClasses) {
    auto& cum = cumulative_[index_of(link)];
    cum.resize(nodes);
    cum[0] = 0.0;
    auto f = [&](double t) { return mass_integrand(link, t); };
    for (std::size_t i = 1; i < nodes; ++i) {
      cum[i] = cum[i - 1] + quad::fixed_kronrod15(f, (i - 1) * step_, i * step_);
    }
  }
}

double DistanceLaw::mass_integrand(LinkClass link, double t) const {
  return t * link_probability(env_, dep_.altitude, link, t);
}

double DistanceLaw::cumulative_mass(LinkClass link, double z) const {
  z = std::clamp(z, 0.0, window_);
  const auto& cum = cumulative_[index_of(link)];
  const auto i = std::min(static_cast<std::size_t>(z / step_), cum.size() - 1);
  const double node = i * step_;
  auto f = [&](double t) { return mass_integrand(link, t); };
  return cum[i] + quad::fixed_kronrod15(f, node, z);
}

double DistanceLaw::void_probability(LinkClass link, double z) const {
  return std::exp(-kTwoPi * dep_.lambda_density * cumulative_mass(link, z));
}

double DistanceLaw::horizontal_distance_cdf(LinkClass link, double z) const {
  if (z <= 0.0) return 0.0;
  return -std::expm1(-kTwoPi * dep_.lambda_density * cumulative_mass(link, z));
}

double DistanceLaw::horizontal_distance_pdf(LinkClass link, double z) const {
  if (z <= 0.0 || z > window_) return 0.0;
  return kTwoPi * dep_.lambda_density * mass_integrand(link, z) * void_probability(link, z);
}

double DistanceLaw::nearest_distance_cdf(LinkClass link, double r) const {
  check_distance(dep_.altitude, r, "nearest_distance_cdf");
  return horizontal_distance_cdf(link, horizontal_from_3d(dep_.altitude, std::min(r, r_max_)));
}

double DistanceLaw::nearest_distance_pdf(LinkClass link, double r) const {
  check_distance(dep_.altitude, r, "nearest_distance_pdf");
  if (r > r_max_) return 0.0;
  const double z = horizontal_from_3d(dep_.altitude, r);
  return kTwoPi * dep_.lambda_density * r * link_probability(env_, dep_.altitude, link, z) *
         void_probability(link, z);
}

double DistanceLaw::support_limit(LinkClass link, double tail) const {
  const double target = 1.0 - tail;
  if (nearest_distance_cdf(link, r_max_) < target) return r_max_;
  double lo = dep_.altitude;
  double hi = r_max_;
  for (int i = 0; i < 200 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (nearest_distance_cdf(link, mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

quad::Result DistanceLaw::association_probability_los(const quad::Tolerance& tol) const {
  const double h = dep_.altitude;
  const double gain = std::pow(env_.eta_los / env_.eta_nlos, 2.0 / env_.alpha_los);
  const double power = env_.alpha_nlos / env_.alpha_los;

  // P(NLoS serves) = int f_ZN(z) P(no LoS point within sqrt(U(z))) dz
  auto integrand = [&](double z) {
    const double u = gain * std::pow(z * z + h * h, power) - h * h;
    const double los_radius = std::min(std::sqrt(std::max(u, 0.0)), window_);
    return horizontal_distance_pdf(LinkClass::nlos, z) * void_probability(LinkClass::los, los_radius);
  };

  // Kinks where sqrt(max(U, 0)) leaves 0 and where it reaches the window edge.
  std::vector<double> cuts{0.0};
  auto root_of = [&](double target) {
    return std::pow(target / gain, 1.0 / power) - h * h;
  };
  for (double target : {h * h, window_ * window_ + h * h}) {
    const double z2 = root_of(target);
    if (z2 > 0.0 && std::sqrt(z2) < window_) cuts.push_back(std::sqrt(z2));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(window_);

  quad::Result total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    const quad::Result piece = quad::integrate(integrand, cuts[i], cuts[i + 1], tol);
    total.value += piece.value;
    total.error += piece.error;
    total.evaluations += piece.evaluations;
    total.subdivisions += piece.subdivisions;
    total.converged = total.converged && piece.converged;
  }
  total.value = 1.0 - total.value;
  return total;
}

double association_probability_los(const Environment& env, const Deployment& dep,
                                   const NumericsConfig& num) {
  const DistanceLaw law(env, dep, num);
  return law.association_probability_los({num.quad_rel_tol, num.quad_abs_tol}).value;
}

}  // namespace aerocov
