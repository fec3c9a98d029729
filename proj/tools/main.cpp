#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aerocov/scenario.hpp"
#include "commands.hpp"

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sweeps;
  std::string mode = "analysis";
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  double threshold_db = 0.0;
  unsigned workers = 0;
};

void add_common(CLI::App* cmd, Common& c, bool sweeps) {
  cmd->add_option("--config", c.config, "JSON scenario (default: dense urban, 5/km^2, 100 m)")
      ->check(CLI::ExistingFile);
  if (sweeps) {
    cmd->add_option("--sweep", c.sweeps, "param=start:stop:step; repeat for a product grid");
    cmd->add_option("--mode", c.mode, "analysis | simulation | both");
  }
  cmd->add_option("--trials", c.trials, "Monte Carlo trials");
  cmd->add_option("--seed", c.seed, "Monte Carlo seed");
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)");
}

aerocov::Scenario load(const Common& c) {
  if (c.config.empty()) return aerocov::dense_urban_scenario(5.0, 100.0);
  return aerocov::load_config(c.config);
}

aerocov::cli::RunOptions run_options(const Common& c) {
  aerocov::cli::RunOptions o;
  o.mode = aerocov::cli::parse_mode(c.mode);
  for (const auto& s : c.sweeps) o.sweeps.push_back(aerocov::cli::parse_sweep(s));
  o.threshold_db = c.threshold_db;
  o.trials = c.trials;
  o.seed = c.seed;
  o.workers = c.workers;
  return o;
}

int emit(const Common& c, const aerocov::cli::CommandOutput& result) {
  if (c.out.empty()) {
    std::cout << result.text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    f << result.text;
    if (!f) {
      std::cerr << "error: cannot write " << c.out << "\n";
      return 2;
    }
  }
  return result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coverage and rate of UAV base-station networks with LoS/NLoS links"};
  app.require_subcommand(1);

  Common coverage, rate, association, validate, simulate;
  auto* cov_cmd = app.add_subcommand("coverage", "coverage probability sweep (CSV)");
  add_common(cov_cmd, coverage, true);
  cov_cmd->add_option("--threshold-db", coverage.threshold_db,
                      "SINR threshold when threshold_db is not swept");
  auto* rate_cmd = app.add_subcommand("rate", "average rate sweep (CSV)");
  add_common(rate_cmd, rate, true);
  auto* assoc_cmd = app.add_subcommand("association", "LoS/NLoS association probabilities (CSV)");
  add_common(assoc_cmd, association, true);
  auto* val_cmd = app.add_subcommand("validate", "analysis vs simulation checks");
  add_common(val_cmd, validate, false);
  std::optional<double> sim_r_max;
  val_cmd->add_option("--sim-r-max", sim_r_max, "simulation window radius override (m)");
  auto* sim_cmd = app.add_subcommand("simulate", "per-trial dump (CSV)");
  add_common(sim_cmd, simulate, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cov_cmd) {
      return emit(coverage, aerocov::cli::cmd_coverage(load(coverage), run_options(coverage)));
    }
    if (*rate_cmd) return emit(rate, aerocov::cli::cmd_rate(load(rate), run_options(rate)));
    if (*assoc_cmd) {
      return emit(association,
                  aerocov::cli::cmd_association(load(association), run_options(association)));
    }
    if (*val_cmd) {
      aerocov::cli::ValidateOptions o;
      o.trials = validate.trials;
      o.seed = validate.seed;
      o.sim_r_max = sim_r_max;
      o.workers = validate.workers;
      return emit(validate, aerocov::cli::cmd_validate(load(validate), o));
    }
    return emit(simulate, aerocov::cli::cmd_simulate(load(simulate), simulate.trials,
                                                     simulate.seed, simulate.workers));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
