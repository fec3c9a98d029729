#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aerocov/channel.hpp"
#include "aerocov/link_class.hpp"
#include "aerocov/scenario.hpp"

namespace aerocov {

/// One UAV-BS of a realization. Only the horizontal distance to the typical
/// user's projection matters (the model is isotropic), so no azimuth is kept.
struct NetworkPoint {
  double z = 0.0;
  LinkClass link = LinkClass::nlos;
};

/// One Monte Carlo realization as seen by the typical user.
struct TrialRecord {
  std::optional<LinkClass> serving_link;  ///< empty network -> none
  double serving_distance = 0.0;          ///< m (3D)
  double sinr = 0.0;                      ///< linear; NaN for geometry-only trials
  std::optional<double> nearest_los;      ///< m (3D)
  std::optional<double> nearest_nlos;     ///< m (3D)
};

/// Independent stream for trial `trial` under `seed`.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Homogeneous PPP of intensity lambda on the window of 3D radius r_max
/// around the typical user, thinned independently into LoS/NLoS.
std::vector<NetworkPoint> sample_network(const Environment& env, const Deployment& dep,
                                         const NumericsConfig& num, Rng& rng);

struct EvaluateOptions {
  bool unit_fading = false;  ///< pin every fading gain to 1
};

/// Association by strongest mean received power, then SINR with fresh
/// block-fading draws for every link.
TrialRecord evaluate_network(const Environment& env, const Deployment& dep,
                             std::span<const NetworkPoint> points, Rng& rng,
                             EvaluateOptions options = {});

TrialRecord run_trial(const Environment& env, const Deployment& dep, const NumericsConfig& num,
                      Rng& rng);

/// Nearest LoS/NLoS points and the association outcome only. Points are
/// generated outward in order of distance and generation stops once both
/// nearest points are known, so no interference is computed (sinr is NaN).
TrialRecord run_geometry_trial(const Environment& env, const Deployment& dep,
                               const NumericsConfig& num, Rng& rng);

enum class TrialKind { full, geometry };

/// num.trials records, trial i driven by trial_rng(num.seed, i).
std::vector<TrialRecord> simulate(const Scenario& sc, TrialKind kind = TrialKind::full,
                                  unsigned workers = 0);

/// Point estimate with a normal-approximation 95% half-width.
struct Estimate95 {
  double value = 0.0;
  double half_width = 0.0;
};

struct SimulationEstimate {
  std::size_t trials = 0;
  std::size_t empty_trials = 0;
  std::vector<double> thresholds;     ///< linear
  std::vector<Estimate95> coverage;   ///< P(SINR > T), one per threshold
  Estimate95 rate;                    ///< mean ln(1 + SINR), nats/Hz
  Estimate95 association_los;         ///< fraction of trials served over LoS
  std::vector<double> nearest_los;    ///< sorted 3D distances, present only
  std::vector<double> nearest_nlos;
};

/// Geometry-only records contribute to association and distances only.
SimulationEstimate summarize(std::span<const TrialRecord> records,
                             std::span<const double> thresholds);

SimulationEstimate estimate(const Scenario& sc, std::span<const double> thresholds);

/// sup_x |F_n(x) - F(x)| where F_n counts `sorted` over `total` draws (the
/// remaining draws sit beyond the window) and `cdf_at_end` is F at the
/// window edge.
double ks_statistic(std::span<const double> sorted, std::size_t total,
                    const std::function<double(double)>& cdf, double cdf_at_end);

/// True when the nearest point of the non-serving class is closer than the
/// exclusion distance implied by the serving point (relative slack 1e-12 for
/// rounding at exact ties).
bool exclusion_violated(const Environment& env, double altitude, const TrialRecord& rec);

/// "trial,serving,distance_m,sinr_db" lines, one per record.
std::string format_trial_dump(std::span<const TrialRecord> records);

}  // namespace aerocov
