#include "aerocov/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "aerocov/geometry.hpp"
#include "aerocov/parallel.hpp"

namespace aerocov {

namespace {

constexpr double kZ95 = 1.959963984540054;

double window_radius(const Deployment& dep, const NumericsConfig& num) {
  return std::sqrt(std::max(num.r_max * num.r_max - dep.altitude * dep.altitude, 0.0));
}

struct LinkConstants {
  double zeta[2];
  double half_alpha[2];

  LinkConstants(const Environment& env, const Deployment& dep) {
    for (LinkClass link : kLinkClasses) {
      const int i = link == LinkClass::los ? 0 : 1;
      zeta[i] = derived_zeta(env, dep, link);
      half_alpha[i] = 0.5 * env.alpha(link);
    }
  }

  // zeta * d^-alpha with d^2 given
  double mean_power(LinkClass link, double d2) const {
    const int i = link == LinkClass::los ? 0 : 1;
    return zeta[i] * inverse_power(d2, half_alpha[i]);
  }
};

Estimate95 proportion(std::size_t hits, std::size_t n) {
  if (n == 0) return {};
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

std::vector<NetworkPoint> sample_network(const Environment& env, const Deployment& dep,
                                         const NumericsConfig& num, Rng& rng) {
  const double radius = window_radius(dep, num);
  const double mean = dep.lambda_density * std::numbers::pi * radius * radius;
  std::vector<NetworkPoint> points;
  if (!(mean > 0.0)) return points;

  std::poisson_distribution<std::uint64_t> count(mean);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = count(rng);
  points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double z = radius * std::sqrt(unit(rng));
    const bool los = unit(rng) < los_probability(env, dep.altitude, z);
    points.push_back({z, los ? LinkClass::los : LinkClass::nlos});
  }
  return points;
}

TrialRecord evaluate_network(const Environment& env, const Deployment& dep,
                             std::span<const NetworkPoint> points, Rng& rng,
                             EvaluateOptions options) {
  TrialRecord rec;
  if (points.empty()) return rec;

  const LinkConstants k(env, dep);
  const double h2 = dep.altitude * dep.altitude;

  thread_local std::vector<double> power;
  power.resize(points.size());
  std::size_t best = 0;
  double best_d2[2] = {std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d2 = points[i].z * points[i].z + h2;
    power[i] = k.mean_power(points[i].link, d2);
    if (power[i] > power[best]) best = i;
    double& nearest = best_d2[points[i].link == LinkClass::los ? 0 : 1];
    nearest = std::min(nearest, d2);
  }
  if (std::isfinite(best_d2[0])) rec.nearest_los = std::sqrt(best_d2[0]);
  if (std::isfinite(best_d2[1])) rec.nearest_nlos = std::sqrt(best_d2[1]);

  double signal = 0.0;
  double interference = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double g = options.unit_fading ? 1.0 : sample_fading(points[i].link, env.m, rng);
    if (i == best) {
      signal = power[i] * g;
    } else {
      interference += power[i] * g;
    }
  }
  const auto& serving = points[best];
  rec.serving_link = serving.link;
  rec.serving_distance = std::sqrt(serving.z * serving.z + h2);
  rec.sinr = signal / (dep.noise_power + interference);
  return rec;
}

TrialRecord run_trial(const Environment& env, const Deployment& dep, const NumericsConfig& num,
                      Rng& rng) {
  const auto points = sample_network(env, dep, num, rng);
  return evaluate_network(env, dep, points, rng);
}

TrialRecord run_geometry_trial(const Environment& env, const Deployment& dep,
                               const NumericsConfig& num, Rng& rng) {
  TrialRecord rec;
  rec.sinr = std::numeric_limits<double>::quiet_NaN();
  const double radius = window_radius(dep, num);
  const double h2 = dep.altitude * dep.altitude;
  const double area_rate = dep.lambda_density * std::numbers::pi;
  if (!(area_rate > 0.0)) return rec;

  // Ordered radii of a planar PPP: pi lambda z_k^2 are the arrival times of
  // a unit-rate Poisson process.
  std::exponential_distribution<double> gap(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double arrival = 0.0;
  while (!(rec.nearest_los && rec.nearest_nlos)) {
    arrival += gap(rng);
    const double z = std::sqrt(arrival / area_rate);
    if (z > radius) break;
    const bool los = unit(rng) < los_probability(env, dep.altitude, z);
    auto& slot = los ? rec.nearest_los : rec.nearest_nlos;
    if (!slot) slot = std::sqrt(z * z + h2);
  }

  const LinkConstants k(env, dep);
  if (rec.nearest_los && rec.nearest_nlos) {
    const double p_los = k.mean_power(LinkClass::los, *rec.nearest_los * *rec.nearest_los);
    const double p_nlos = k.mean_power(LinkClass::nlos, *rec.nearest_nlos * *rec.nearest_nlos);
    rec.serving_link = p_los >= p_nlos ? LinkClass::los : LinkClass::nlos;
  } else if (rec.nearest_los) {
    rec.serving_link = LinkClass::los;
  } else if (rec.nearest_nlos) {
    rec.serving_link = LinkClass::nlos;
  }
  if (rec.serving_link) {
    rec.serving_distance =
        *rec.serving_link == LinkClass::los ? *rec.nearest_los : *rec.nearest_nlos;
  }
  return rec;
}

std::vector<TrialRecord> simulate(const Scenario& sc, TrialKind kind, unsigned workers) {
  sc.validate();
  std::vector<TrialRecord> records(sc.num.trials);
  parallel_for(
      records.size(),
      [&](std::size_t i) {
        Rng rng = trial_rng(sc.num.seed, i);
        records[i] = kind == TrialKind::full ? run_trial(sc.env, sc.dep, sc.num, rng)
                                             : run_geometry_trial(sc.env, sc.dep, sc.num, rng);
      },
      workers);
  return records;
}

SimulationEstimate summarize(std::span<const TrialRecord> records,
                             std::span<const double> thresholds) {
  SimulationEstimate out;
  out.trials = records.size();
  out.thresholds.assign(thresholds.begin(), thresholds.end());

  std::size_t los_serving = 0;
  std::size_t with_sinr = 0;
  std::vector<double> sinrs;
  sinrs.reserve(records.size());
  for (const auto& r : records) {
    if (!r.serving_link) ++out.empty_trials;
    if (r.serving_link == LinkClass::los) ++los_serving;
    if (r.nearest_los) out.nearest_los.push_back(*r.nearest_los);
    if (r.nearest_nlos) out.nearest_nlos.push_back(*r.nearest_nlos);
    if (!std::isnan(r.sinr)) {
      ++with_sinr;
      sinrs.push_back(r.sinr);
    }
  }
  std::sort(out.nearest_los.begin(), out.nearest_los.end());
  std::sort(out.nearest_nlos.begin(), out.nearest_nlos.end());
  out.association_los = proportion(los_serving, out.trials);

  if (with_sinr > 0) {
    std::sort(sinrs.begin(), sinrs.end());
    for (double t : thresholds) {
      const auto above = static_cast<std::size_t>(
          sinrs.end() - std::upper_bound(sinrs.begin(), sinrs.end(), t));
      out.coverage.push_back(proportion(above, with_sinr));
    }
    // Welford
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double s : sinrs) {
      const double x = std::log1p(s);
      ++n;
      const double delta = x - mean;
      mean += delta / static_cast<double>(n);
      m2 += delta * (x - mean);
    }
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    out.rate = {mean, kZ95 * std::sqrt(var / static_cast<double>(n))};
  }
  return out;
}

SimulationEstimate estimate(const Scenario& sc, std::span<const double> thresholds) {
  const auto records = simulate(sc);
  return summarize(records, thresholds);
}

double ks_statistic(std::span<const double> sorted, std::size_t total,
                    const std::function<double(double)>& cdf, double cdf_at_end) {
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n),
                  std::abs(static_cast<double>(i + 1) / n - f)});
  }
  d = std::max(d, std::abs(cdf_at_end - static_cast<double>(sorted.size()) / n));
  return d;
}

bool exclusion_violated(const Environment& env, double altitude, const TrialRecord& rec) {
  if (!rec.serving_link) return false;
  const double r = rec.serving_distance;
  if (*rec.serving_link == LinkClass::nlos) {
    return rec.nearest_los && *rec.nearest_los < exclusion_distance_los(env, r) * (1.0 - 1e-12);
  }
  return rec.nearest_nlos &&
         *rec.nearest_nlos < exclusion_distance_nlos(env, altitude, r) * (1.0 - 1e-12);
}

std::string format_trial_dump(std::span<const TrialRecord> records) {
  std::string out = "trial,serving,distance_m,sinr_db\n";
  char line[160];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const char* serving = r.serving_link ? (*r.serving_link == LinkClass::los ? "LoS" : "NLoS")
                                         : "none";
    std::snprintf(line, sizeof line, "%zu,%s,%.17g,%.17g\n", i, serving, r.serving_distance,
                  10.0 * std::log10(r.sinr));
    out += line;
  }
  return out;
}

}  // namespace aerocov
