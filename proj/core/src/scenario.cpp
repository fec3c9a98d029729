#include "aerocov/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace aerocov {

using nlohmann::json;

namespace {

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) throw ConfigError(name_, "expected an object");
  }

  bool has(const std::string& key) const {
    if (node_ && node_->contains(key)) {
      seen_.insert(key);
      return true;
    }
    return false;
  }

  double number(const std::string& key) const {
    if (!has(key)) throw ConfigError(path(key), "missing required key");
    const auto& v = node_->at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "expected a finite number");
    return x;
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t count_or(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_->at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(path(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) const {
    const auto& v = node_->at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items()) {
      if (!seen_.contains(key)) throw ConfigError(path(key), "unknown key");
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  mutable std::set<std::string> seen_;
};

int integer_shape(const Section& s, const std::string& key) {
  const double m = s.number(key);
  if (m != std::floor(m) || m < 1.0 || m > 20.0) {
    throw ConfigError(s.path(key), "expected an integer in [1, 20]");
  }
  return static_cast<int>(m);
}

Environment read_environment(const Section& s) {
  Environment env;
  const bool preset = s.has("preset");
  if (preset) {
    const auto name = s.string("preset");
    if (name != "dense_urban") throw ConfigError(s.path("preset"), "unknown preset '" + name + "'");
    env = Environment::dense_urban();
  }
  auto field = [&](const char* key, double& out) {
    out = preset ? s.number_or(key, out) : s.number(key);
  };
  field("a", env.a);
  field("b", env.b);
  field("eta_los", env.eta_los);
  field("eta_nlos", env.eta_nlos);
  field("alpha_los", env.alpha_los);
  field("alpha_nlos", env.alpha_nlos);
  if (!preset || s.has("m")) env.m = integer_shape(s, "m");
  return env;
}

double one_of(const Section& s, const char* k1, const char* k2,
              double (*convert1)(double), double (*convert2)(double)) {
  const bool h1 = s.has(k1);
  const bool h2 = s.has(k2);
  if (h1 && h2) throw ConfigError(s.path(k1), std::string("conflicts with ") + s.path(k2));
  if (h1) return convert1(s.number(k1));
  if (h2) return convert2(s.number(k2));
  throw ConfigError(s.path(k1), std::string("missing required key (or ") + s.path(k2) + ")");
}

double identity(double x) { return x; }
double per_km2(double x) { return x * 1e-6; }

Deployment read_deployment(const Section& s) {
  Deployment dep;
  dep.lambda_density = one_of(s, "density_per_km2", "density_per_m2", per_km2, identity);
  dep.altitude = s.number("altitude");
  dep.tx_power = one_of(s, "tx_power_dbm", "tx_power_w", dbm_to_watts, identity);
  dep.bandwidth = s.number("bandwidth_hz");
  if (s.has("noise_dbm_per_hz") && s.has("noise_power_w")) {
    throw ConfigError(s.path("noise_dbm_per_hz"), "conflicts with deployment.noise_power_w");
  }
  if (s.has("noise_dbm_per_hz")) {
    // dBm/Hz + 10 log10(B) -> dBm over the band
    const double density_dbm = s.number("noise_dbm_per_hz");
    require(dep.bandwidth > 0.0, "deployment.bandwidth_hz", "must be > 0");
    dep.noise_power = dbm_to_watts(density_dbm + 10.0 * std::log10(dep.bandwidth));
  } else {
    dep.noise_power = s.number("noise_power_w");
  }
  if (s.has("ref_gain") && s.has("carrier_hz")) {
    throw ConfigError(s.path("ref_gain"), "conflicts with deployment.carrier_hz");
  }
  if (s.has("ref_gain")) {
    dep.ref_gain = s.number("ref_gain");
  } else {
    const double fc = s.number_or("carrier_hz", kDefaultCarrierHz);
    require(fc > 0.0, "deployment.carrier_hz", "must be > 0");
    dep.ref_gain = free_space_gain(fc);
  }
  return dep;
}

NumericsConfig read_numerics(const Section& s) {
  NumericsConfig num;
  num.r_max = s.number_or("r_max", num.r_max);
  num.quad_rel_tol = s.number_or("quad_rel_tol", num.quad_rel_tol);
  num.quad_abs_tol = s.number_or("quad_abs_tol", num.quad_abs_tol);
  num.y_max = s.number_or("y_max", num.y_max);
  num.trials = s.count_or("trials", num.trials);
  num.seed = s.count_or("seed", num.seed);
  return num;
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double free_space_gain(double carrier_hz) {
  const double g = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_hz);
  return g * g;
}

double derived_zeta(const Environment& env, const Deployment& dep, LinkClass link) {
  return dep.tx_power * env.eta(link) * dep.ref_gain;
}

Environment Environment::dense_urban() {
  return Environment{.a = 12.08,
                     .b = 0.11,
                     .eta_los = 0.69,
                     .eta_nlos = 0.005,
                     .alpha_los = 2.0,
                     .alpha_nlos = 3.5,
                     .m = 3};
}

void Environment::validate() const {
  require(a > 0.0, "environment.a", "must be > 0");
  require(b > 0.0, "environment.b", "must be > 0");
  require(eta_nlos > 0.0, "environment.eta_nlos", "must be > 0");
  require(eta_nlos <= eta_los, "environment.eta_nlos", "must not exceed environment.eta_los");
  require(eta_los <= 1.0, "environment.eta_los", "must be <= 1");
  require(alpha_los > 0.0, "environment.alpha_los", "must be > 0");
  require(alpha_los < alpha_nlos, "environment.alpha_los",
          "must be smaller than environment.alpha_nlos");
  require(m >= 1 && m <= 20, "environment.m", "must be an integer in [1, 20]");
}

void Deployment::validate() const {
  require(lambda_density > 0.0, "deployment.density", "must be > 0");
  require(altitude > 0.0, "deployment.altitude", "must be > 0");
  require(tx_power > 0.0, "deployment.tx_power", "must be > 0");
  require(noise_power >= 0.0, "deployment.noise_power", "must be >= 0");
  require(ref_gain > 0.0, "deployment.ref_gain", "must be > 0");
  require(bandwidth > 0.0, "deployment.bandwidth_hz", "must be > 0");
}

void NumericsConfig::validate(double altitude) const {
  require(r_max > 10.0 * altitude, "numerics.r_max", "must exceed 10x the altitude");
  require(quad_rel_tol > 0.0 && quad_rel_tol < 1.0, "numerics.quad_rel_tol", "must be in (0, 1)");
  require(quad_abs_tol > 0.0 && quad_abs_tol < 1.0, "numerics.quad_abs_tol", "must be in (0, 1)");
  require(y_max > 1.0, "numerics.y_max", "must be > 1");
  require(trials >= 1, "numerics.trials", "must be >= 1");
}

void Scenario::validate() const {
  env.validate();
  dep.validate();
  num.validate(dep.altitude);
}

Scenario parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "expected a JSON object");
  for (const auto& [key, value] : root.items()) {
    if (key != "environment" && key != "deployment" && key != "numerics") {
      throw ConfigError(key, "unknown section");
    }
  }

  const Section env_s(root, "environment");
  const Section dep_s(root, "deployment");
  const Section num_s(root, "numerics");

  Scenario sc{read_environment(env_s), read_deployment(dep_s), read_numerics(num_s)};
  env_s.reject_unknown();
  dep_s.reject_unknown();
  num_s.reject_unknown();
  sc.validate();
  return sc;
}

Scenario load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const Scenario& sc) {
  json root;
  root["environment"] = {{"a", sc.env.a},
                         {"b", sc.env.b},
                         {"eta_los", sc.env.eta_los},
                         {"eta_nlos", sc.env.eta_nlos},
                         {"alpha_los", sc.env.alpha_los},
                         {"alpha_nlos", sc.env.alpha_nlos},
                         {"m", sc.env.m}};
  root["deployment"] = {{"density_per_m2", sc.dep.lambda_density},
                        {"altitude", sc.dep.altitude},
                        {"tx_power_w", sc.dep.tx_power},
                        {"noise_power_w", sc.dep.noise_power},
                        {"ref_gain", sc.dep.ref_gain},
                        {"bandwidth_hz", sc.dep.bandwidth}};
  root["numerics"] = {{"r_max", sc.num.r_max},
                      {"quad_rel_tol", sc.num.quad_rel_tol},
                      {"quad_abs_tol", sc.num.quad_abs_tol},
                      {"y_max", sc.num.y_max},
                      {"trials", sc.num.trials},
                      {"seed", sc.num.seed}};
  return root.dump(2) + "\n";
}

Scenario dense_urban_scenario(double density_per_km2, double altitude_m) {
  Scenario sc;
  sc.env = Environment::dense_urban();
  sc.dep.lambda_density = density_per_km2 * 1e-6;
  sc.dep.altitude = altitude_m;
  sc.dep.tx_power = dbm_to_watts(30.0);
  sc.dep.bandwidth = 10e6;
  sc.dep.noise_power = dbm_to_watts(-174.0 + 10.0 * std::log10(sc.dep.bandwidth));
  sc.dep.ref_gain = free_space_gain(kDefaultCarrierHz);
  return sc;
}

}  // namespace aerocov
