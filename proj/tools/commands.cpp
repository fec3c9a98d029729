#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <stdexcept>

#include "aerocov/analysis.hpp"
#include "aerocov/parallel.hpp"
#include "aerocov/simulator.hpp"

namespace aerocov::cli {

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Point {
  double threshold_db = 0.0;
  double altitude = 0.0;
  double density_km2 = 0.0;
};

std::vector<Point> expand(const Scenario& base, const RunOptions& opts) {
  std::vector<Point> points{{opts.threshold_db, base.dep.altitude,
                             base.dep.lambda_density * 1e6}};
  bool seen[3] = {false, false, false};
  for (const auto& sweep : opts.sweeps) {
    auto& flag = seen[static_cast<int>(sweep.param)];
    if (flag) throw std::invalid_argument("parameter swept twice: " + std::string(to_string(sweep.param)));
    flag = true;
    std::vector<Point> next;
    next.reserve(points.size() * sweep.grid.size());
    for (const auto& p : points) {
      for (double v : sweep.grid) {
        Point q = p;
        switch (sweep.param) {
          case SweepParam::threshold_db: q.threshold_db = v; break;
          case SweepParam::altitude: q.altitude = v; break;
          case SweepParam::density: q.density_km2 = v; break;
        }
        next.push_back(q);
      }
    }
    points = std::move(next);
  }
  return points;
}

Scenario at(const Scenario& base, const RunOptions& opts, const Point& p) {
  Scenario sc = base;
  sc.dep.altitude = p.altitude;
  sc.dep.lambda_density = p.density_km2 * 1e-6;
  if (opts.trials) sc.num.trials = *opts.trials;
  if (opts.seed) sc.num.seed = *opts.seed;
  sc.validate();
  return sc;
}

/// Distinct scenarios of a sweep, keyed on their full serialized parameter
/// set, with the analysis and simulation results built once per key.
class Evaluator {
 public:
  Evaluator(const Scenario& base, const RunOptions& opts) : opts_(opts) {
    for (const auto& p : expand(base, opts)) {
      Scenario sc = at(base, opts, p);
      const std::string key = format_config(sc);
      auto [it, fresh] = index_.try_emplace(key, scenarios_.size());
      if (fresh) scenarios_.push_back(sc);
      rows_.push_back({p, it->second});
    }
  }

  struct Row {
    Point point;
    std::size_t scenario;
  };

  const std::vector<Row>& rows() const { return rows_; }
  const Scenario& scenario(std::size_t i) const { return scenarios_[i]; }
  bool wants_analysis() const { return opts_.mode != Mode::simulation; }
  bool wants_simulation() const { return opts_.mode != Mode::analysis; }

  const NetworkAnalysis& analysis(std::size_t i) {
    if (analyses_.empty()) {
      analyses_.resize(scenarios_.size());
      parallel_for(
          scenarios_.size(),
          [&](std::size_t k) { analyses_[k] = std::make_unique<NetworkAnalysis>(scenarios_[k]); },
          opts_.workers);
    }
    return *analyses_[i];
  }

  /// Simulations run one scenario at a time; trials inside each run in parallel.
  const SimulationEstimate& simulation(std::size_t i, TrialKind kind) {
    if (estimates_.empty()) {
      std::vector<std::vector<double>> thresholds(scenarios_.size());
      for (const auto& row : rows_) {
        thresholds[row.scenario].push_back(db_to_linear(row.point.threshold_db));
      }
      estimates_.resize(scenarios_.size());
      for (std::size_t k = 0; k < scenarios_.size(); ++k) {
        const auto records = simulate(scenarios_[k], kind, opts_.workers);
        estimates_[k] = summarize(records, thresholds[k]);
      }
      for (const auto& row : rows_) {
        offsets_.push_back(counter_[row.scenario]++);
      }
    }
    return estimates_[i];
  }

  std::size_t threshold_slot(std::size_t row) const { return offsets_[row]; }

 private:
  RunOptions opts_;
  std::map<std::string, std::size_t> index_;
  std::vector<Scenario> scenarios_;
  std::vector<Row> rows_;
  std::vector<std::unique_ptr<NetworkAnalysis>> analyses_;
  std::vector<SimulationEstimate> estimates_;
  std::map<std::size_t, std::size_t> counter_;
  std::vector<std::size_t> offsets_;
};

}  // namespace

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::threshold_db: return "threshold_db";
    case SweepParam::altitude: return "altitude";
    case SweepParam::density: return "density";
  }
  return "?";
}

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("sweep must look like param=start:stop:step");
  }
  const auto name = text.substr(0, eq);
  SweepSpec out;
  if (name == "threshold_db") {
    out.param = SweepParam::threshold_db;
  } else if (name == "altitude") {
    out.param = SweepParam::altitude;
  } else if (name == "density") {
    out.param = SweepParam::density;
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + std::string(name) + "'");
  }

  auto range = text.substr(eq + 1);
  double parts[3];
  for (int i = 0; i < 3; ++i) {
    const auto colon = range.find(':');
    if ((i < 2) != (colon != std::string_view::npos)) {
      throw std::invalid_argument("sweep range must be start:stop:step");
    }
    parts[i] = parse_number(range.substr(0, colon), "sweep bound");
    if (i < 2) range = range.substr(colon + 1);
  }
  const double start = parts[0];
  const double stop = parts[1];
  const double step = parts[2];
  if (!(step != 0.0) || !std::isfinite(step)) throw std::invalid_argument("sweep step must be nonzero");
  const double span = (stop - start) / step;
  if (span < -1e-9) throw std::invalid_argument("sweep step points away from stop");
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  if (n > 100000) throw std::invalid_argument("sweep grid too large");
  for (std::size_t i = 0; i < n; ++i) out.grid.push_back(start + static_cast<double>(i) * step);
  return out;
}

Mode parse_mode(std::string_view text) {
  if (text == "analysis") return Mode::analysis;
  if (text == "simulation") return Mode::simulation;
  if (text == "both") return Mode::both;
  throw std::invalid_argument("mode must be analysis, simulation or both");
}

CommandOutput cmd_coverage(const Scenario& base, const RunOptions& opts) {
  Evaluator ev(base, opts);
  const auto& rows = ev.rows();
  std::vector<MetricResult> analytic(rows.size());
  if (ev.wants_analysis()) {
    ev.analysis(0);
    parallel_for(
        rows.size(),
        [&](std::size_t i) {
          analytic[i] = ev.analysis(rows[i].scenario).coverage(db_to_linear(rows[i].point.threshold_db));
        },
        opts.workers);
  }

  CommandOutput out;
  out.text =
      "threshold_db,altitude_m,density_per_km2,coverage,coverage_los,coverage_nlos,"
      "association_los,sim_coverage,sim_coverage_ci95\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = rows[i].point;
    std::string line = num(p.threshold_db) + "," + num(p.altitude) + "," + num(p.density_km2);
    if (ev.wants_analysis()) {
      const auto& a = analytic[i];
      out.ok = out.ok && a.numerics.converged;
      line += "," + num(a.value) + "," + num(a.conditional_los) + "," + num(a.conditional_nlos) +
              "," + num(a.weight_los);
    } else {
      line += ",,,,";
    }
    if (ev.wants_simulation()) {
      const auto& s = ev.simulation(rows[i].scenario, TrialKind::full);
      const auto& c = s.coverage[ev.threshold_slot(i)];
      line += "," + num(c.value) + "," + num(c.half_width);
    } else {
      line += ",,";
    }
    out.text += line + "\n";
  }
  return out;
}

CommandOutput cmd_rate(const Scenario& base, const RunOptions& opts) {
  for (const auto& s : opts.sweeps) {
    if (s.param == SweepParam::threshold_db) {
      throw std::invalid_argument("rate does not take a threshold sweep");
    }
  }
  Evaluator ev(base, opts);
  const auto& rows = ev.rows();
  std::vector<MetricResult> analytic(rows.size());
  if (ev.wants_analysis()) {
    ev.analysis(0);
    parallel_for(
        rows.size(), [&](std::size_t i) { analytic[i] = ev.analysis(rows[i].scenario).rate(); },
        opts.workers);
  }

  CommandOutput out;
  out.text =
      "altitude_m,density_per_km2,rate_nats_per_hz,rate_mbps,sim_rate_nats_per_hz,"
      "sim_rate_ci95\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = rows[i].point;
    std::string line = num(p.altitude) + "," + num(p.density_km2);
    if (ev.wants_analysis()) {
      const auto& a = analytic[i];
      out.ok = out.ok && a.numerics.converged;
      const double bw = ev.scenario(rows[i].scenario).dep.bandwidth;
      line += "," + num(a.value) + "," + num(nats_to_bits_per_second(a.value, bw) * 1e-6);
    } else {
      line += ",,";
    }
    if (ev.wants_simulation()) {
      const auto& r = ev.simulation(rows[i].scenario, TrialKind::full).rate;
      line += "," + num(r.value) + "," + num(r.half_width);
    } else {
      line += ",,";
    }
    out.text += line + "\n";
  }
  return out;
}

CommandOutput cmd_association(const Scenario& base, const RunOptions& opts) {
  for (const auto& s : opts.sweeps) {
    if (s.param == SweepParam::threshold_db) {
      throw std::invalid_argument("association does not take a threshold sweep");
    }
  }
  Evaluator ev(base, opts);
  CommandOutput out;
  out.text =
      "altitude_m,density_per_km2,association_los,association_nlos,sim_association_los,"
      "sim_association_los_ci95\n";
  const auto& rows = ev.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = rows[i].point;
    std::string line = num(p.altitude) + "," + num(p.density_km2);
    if (ev.wants_analysis()) {
      const auto& a = ev.analysis(rows[i].scenario);
      line += "," + num(a.association_los()) + "," + num(a.association_nlos());
    } else {
      line += ",,";
    }
    if (ev.wants_simulation()) {
      const auto& e = ev.simulation(rows[i].scenario, TrialKind::geometry).association_los;
      line += "," + num(e.value) + "," + num(e.half_width);
    } else {
      line += ",,";
    }
    out.text += line + "\n";
  }
  return out;
}

CommandOutput cmd_validate(const Scenario& base, const ValidateOptions& opts) {
  Scenario sc = base;
  if (opts.trials) sc.num.trials = *opts.trials;
  if (opts.seed) sc.num.seed = *opts.seed;
  sc.validate();
  if (sc.num.trials < opts.limits.min_trials) {
    throw std::invalid_argument("validate needs at least " + std::to_string(opts.limits.min_trials) +
                                " trials");
  }
  Scenario sim = sc;
  if (opts.sim_r_max) {
    sim.num.r_max = *opts.sim_r_max;
    sim.validate();
  }

  const NetworkAnalysis an(sc);
  std::vector<double> thresholds;
  for (double t : opts.thresholds_db) thresholds.push_back(db_to_linear(t));
  std::vector<MetricResult> cov(thresholds.size());
  parallel_for(thresholds.size(), [&](std::size_t i) { cov[i] = an.coverage(thresholds[i]); },
               opts.workers);
  const MetricResult tau = an.rate();

  const auto records = simulate(sim, TrialKind::full, opts.workers);
  const auto est = summarize(records, thresholds);
  std::size_t violations = 0;
  for (const auto& r : records) violations += exclusion_violated(sim.env, sim.dep.altitude, r);

  CommandOutput out;
  std::vector<std::string> failed;
  char line[200];
  auto check = [&](const std::string& name, double stat, double limit, bool pass) {
    std::snprintf(line, sizeof line, "%-4s %-26s %-14.6g <= %g\n", pass ? "PASS" : "FAIL",
                  name.c_str(), stat, limit);
    out.text += line;
    if (!pass) failed.push_back(name);
  };

  std::snprintf(line, sizeof line,
                "scenario: density_per_km2=%.17g altitude_m=%.17g r_max_m=%.17g sim_r_max_m=%.17g\n"
                "trials: %llu seed: %llu\n",
                sc.dep.lambda_density * 1e6, sc.dep.altitude, sc.num.r_max, sim.num.r_max,
                static_cast<unsigned long long>(sc.num.trials),
                static_cast<unsigned long long>(sc.num.seed));
  out.text += line;

  const auto& law = an.distances();
  for (LinkClass link : kLinkClasses) {
    const auto& sample = link == LinkClass::los ? est.nearest_los : est.nearest_nlos;
    const double ks = ks_statistic(
        sample, est.trials, [&](double r) { return law.nearest_distance_cdf(link, r); },
        law.nearest_distance_cdf(link, law.r_max()));
    const std::string name = link == LinkClass::los ? "nearest_los_ks" : "nearest_nlos_ks";
    check(name, ks, opts.limits.ks, ks <= opts.limits.ks);
  }

  const double assoc = std::abs(an.association_los() - est.association_los.value);
  check("association_los_delta", assoc, opts.limits.association,
        assoc <= opts.limits.association);

  bool converged = tau.numerics.converged;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    converged = converged && cov[i].numerics.converged;
    const double d = std::abs(cov[i].value - est.coverage[i].value);
    char name[64];
    std::snprintf(name, sizeof name, "coverage_delta@%gdB", opts.thresholds_db[i]);
    check(name, d, opts.limits.coverage, d <= opts.limits.coverage);
  }

  const double rel = std::abs(tau.value - est.rate.value) / std::abs(est.rate.value);
  check("rate_relative", rel, opts.limits.rate_relative, rel <= opts.limits.rate_relative);
  check("exclusion_violations", static_cast<double>(violations), 0, violations == 0);
  check("analysis_unconverged", converged ? 0.0 : 1.0, 0, converged);

  if (failed.empty()) {
    out.text += "result: PASS\n";
  } else {
    out.ok = false;
    out.text += "result: FAIL (";
    for (std::size_t i = 0; i < failed.size(); ++i) out.text += (i ? ", " : "") + failed[i];
    out.text += ")\n";
  }
  return out;
}

CommandOutput cmd_simulate(const Scenario& base, std::optional<std::uint64_t> trials,
                           std::optional<std::uint64_t> seed, unsigned workers) {
  Scenario sc = base;
  if (trials) sc.num.trials = *trials;
  if (seed) sc.num.seed = *seed;
  const auto records = simulate(sc, TrialKind::full, workers);
  return {format_trial_dump(records), true};
}

}  // namespace aerocov::cli
