#pragma once

#include <array>
#include <vector>

#include "aerocov/link_class.hpp"
#include "aerocov/quadrature.hpp"
#include "aerocov/scenario.hpp"

namespace aerocov {

/// Serving UAV-BS as seen by the typical user.
struct ServingContext {
  LinkClass link = LinkClass::los;
  double r = 0.0;  ///< 3D distance, >= altitude
};

/// Horizontal offset sqrt(d^2 - h^2), clamped at 0.
double horizontal_from_3d(double h, double d);

/// Minimum distance of an interfering LoS UAV-BS when the serving NLoS
/// UAV-BS sits at 3D distance r (1 m reference distance).
double exclusion_distance_los(const Environment& env, double r);

/// Minimum distance of an interfering NLoS UAV-BS when the serving LoS
/// UAV-BS sits at 3D distance r. Never below the altitude h.
double exclusion_distance_nlos(const Environment& env, double h, double r);

/// 3D radius at which exclusion_distance_nlos leaves its constant branch.
double nlos_exclusion_threshold(const Environment& env, double h);

// Direct-quadrature forms on the untruncated plane. Each call integrates
// the inner mass t * P_link(t) from scratch.
double nearest_distance_cdf(const Environment& env, const Deployment& dep, LinkClass link,
                            double r, const quad::Tolerance& tol = {});
double nearest_distance_pdf(const Environment& env, const Deployment& dep, LinkClass link,
                            double r, const quad::Tolerance& tol = {});
double horizontal_distance_pdf(const Environment& env, const Deployment& dep, LinkClass link,
                               double z, const quad::Tolerance& tol = {});

/// Nearest-distance laws of the LoS and NLoS point processes inside the
/// truncation window (3D radius r_max). The inner integrals
/// M(z) = int_0^z t P_link(t) dt are tabulated once at construction; a
/// lookup adds a single Kronrod panel from the nearest node.
///
/// Beyond r_max there are no points, so the CDFs saturate at
/// 1 - exp(-2 pi lambda M(l(r_max))) and the pdfs vanish.
class DistanceLaw {
 public:
  DistanceLaw(const Environment& env, const Deployment& dep, const NumericsConfig& num);

  const Environment& environment() const { return env_; }
  const Deployment& deployment() const { return dep_; }
  double altitude() const { return dep_.altitude; }
  double r_max() const { return r_max_; }
  /// Horizontal radius of the window, l(r_max).
  double window() const { return window_; }

  double cumulative_mass(LinkClass link, double z) const;
  /// P(no point of this class within horizontal distance z).
  double void_probability(LinkClass link, double z) const;

  double nearest_distance_cdf(LinkClass link, double r) const;
  double nearest_distance_pdf(LinkClass link, double r) const;
  double horizontal_distance_cdf(LinkClass link, double z) const;
  double horizontal_distance_pdf(LinkClass link, double z) const;

  /// Smallest 3D radius where the nearest-distance CDF reaches 1 - tail,
  /// or r_max if it never does.
  double support_limit(LinkClass link, double tail = 1e-9) const;

  /// Probability that the typical user is served over LoS.
  quad::Result association_probability_los(const quad::Tolerance& tol) const;

 private:
  double mass_integrand(LinkClass link, double t) const;

  Environment env_;
  Deployment dep_;
  double r_max_;
  double window_;
  double step_;
  std::array<std::vector<double>, 2> cumulative_;
};

/// A_L for the truncated window; A_N = 1 - A_L.
double association_probability_los(const Environment& env, const Deployment& dep,
                                   const NumericsConfig& num);

}  // namespace aerocov
