#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "aerocov/geometry.hpp"
#include "aerocov/link_class.hpp"
#include "aerocov/quadrature.hpp"
#include "aerocov/scenario.hpp"

namespace aerocov {

/// Argument of the conditional interference Laplace transform.
struct LaplaceQuery {
  double s = 0.0;  ///< per watt
  ServingContext ctx;
};

/// Accumulates quadrature health across a nested computation.
struct Diagnostics {
  /// Largest error estimate seen, relative for integrals above 1 in magnitude.
  double max_error = 0.0;
  bool converged = true;
  bool under_truncated = false;  ///< rate tail beyond y_max not negligible

  void absorb(const quad::Result& r) {
    const double rel = r.error / std::max(std::abs(r.value), 1.0);
    if (rel > max_error) max_error = rel;
    converged = converged && r.converged;
  }
  void merge(const Diagnostics& o) {
    if (o.max_error > max_error) max_error = o.max_error;
    converged = converged && o.converged;
    under_truncated = under_truncated || o.under_truncated;
  }
};

/// Coverage probability or rate, with the per-class decomposition.
/// value == conditional_los * weight_los + conditional_nlos * weight_nlos.
struct MetricResult {
  double value = 0.0;
  double conditional_los = 0.0;
  double conditional_nlos = 0.0;
  double weight_los = 0.0;
  double weight_nlos = 0.0;
  Diagnostics numerics;

  double conditional(LinkClass link) const {
    return link == LinkClass::los ? conditional_los : conditional_nlos;
  }
};

/// nats/Hz -> bit/s over the given bandwidth.
double nats_to_bits_per_second(double nats_per_hz, double bandwidth_hz);

/// Analytical coverage and rate for one scenario. Construction tabulates
/// the distance laws and evaluates the association probabilities; all
/// queries afterwards are const and may run concurrently.
class NetworkAnalysis {
 public:
  explicit NetworkAnalysis(const Scenario& scenario);

  const Scenario& scenario() const { return sc_; }
  const DistanceLaw& distances() const { return law_; }
  double zeta(LinkClass link) const { return zeta_[index(link)]; }

  double association_los() const { return a_los_; }
  double association_nlos() const { return 1.0 - a_los_; }
  double association(LinkClass link) const {
    return link == LinkClass::los ? association_los() : association_nlos();
  }

  /// E[exp(-s I)] given the serving class and distance; interferers of the
  /// serving class lie beyond r, the other class beyond its exclusion distance.
  double laplace_interference(const LaplaceQuery& q, Diagnostics* diag = nullptr) const;

  /// Coverage given association with `link`; threshold is linear SINR.
  double conditional_coverage(LinkClass link, double threshold, Diagnostics* diag = nullptr) const;
  MetricResult coverage(double threshold) const;

  /// Mean ln(1 + SINR) given association with `link`, in nats/Hz.
  double conditional_rate(LinkClass link, Diagnostics* diag = nullptr) const;
  MetricResult rate() const;

  /// Same rate reached by integrating conditional coverage at T = e^y - 1
  /// over y, i.e. with the r and y integrations swapped.
  MetricResult rate_via_coverage() const;

  /// Approximate P(SINR > T) given serving class and distance r.
  double conditional_success(LinkClass link, double threshold, double r,
                             const quad::Tolerance& tol, Diagnostics& diag) const;

 private:
  static std::size_t index(LinkClass link) { return link == LinkClass::los ? 0 : 1; }

  /// Transforms at s = k * base for k = 1..count, one shared integration.
  void laplace_batch(LinkClass serving, double r, double base, int count,
                     const quad::Tolerance& tol, Diagnostics& diag, quad::Batch& out) const;
  double coverage_at(LinkClass link, double threshold, const quad::Tolerance& tol,
                     Diagnostics& diag) const;
  double rate_via_coverage_at(LinkClass link, Diagnostics& diag) const;

  /// Outer r-integration over [h, support] split at the exclusion kinks.
  template <class F>
  double integrate_serving_distance(LinkClass link, F&& f, const quad::Tolerance& tol,
                                    Diagnostics& diag) const;

  template <class F>
  double integrate_log_threshold(F&& f, const quad::Tolerance& tol, Diagnostics& diag) const;

  Scenario sc_;
  DistanceLaw law_;
  quad::Tolerance tol_;
  std::array<double, 2> zeta_{};
  std::array<double, 2> support_{};
  double a_los_ = 1.0;
  Diagnostics association_numerics_;
};

// One-shot conveniences; each builds a NetworkAnalysis.
double laplace_interference(const Environment& env, const Deployment& dep,
                            const NumericsConfig& num, const LaplaceQuery& q);
double conditional_coverage(const Environment& env, const Deployment& dep,
                            const NumericsConfig& num, LinkClass link, double threshold);
MetricResult coverage(const Environment& env, const Deployment& dep, const NumericsConfig& num,
                      double threshold);
double conditional_rate(const Environment& env, const Deployment& dep, const NumericsConfig& num,
                        LinkClass link);
MetricResult rate(const Environment& env, const Deployment& dep, const NumericsConfig& num);

}  // namespace aerocov
