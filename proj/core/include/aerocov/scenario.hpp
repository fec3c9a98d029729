#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "aerocov/link_class.hpp"

namespace aerocov {

/// Propagation environment. All quantities are linear and dimensionless.
struct Environment {
  double a = 0.0;           ///< LoS-curve constant
  double b = 0.0;           ///< LoS-curve constant, per degree of elevation
  double eta_los = 1.0;     ///< mean additional loss on LoS links (linear, <= 1)
  double eta_nlos = 1.0;    ///< mean additional loss on NLoS links (linear, <= eta_los)
  double alpha_los = 2.0;   ///< LoS path-loss exponent
  double alpha_nlos = 2.0;  ///< NLoS path-loss exponent
  int m = 1;                ///< Nakagami shape of LoS fading

  double eta(LinkClass link) const { return link == LinkClass::los ? eta_los : eta_nlos; }
  double alpha(LinkClass link) const { return link == LinkClass::los ? alpha_los : alpha_nlos; }
  /// Fading shape of a link class; NLoS links are Rayleigh (shape 1).
  int shape(LinkClass link) const { return link == LinkClass::los ? m : 1; }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  /// Dense-urban air-to-ground parameters (a=12.08, b=0.11, eta 0.69/0.005,
  /// exponents 2/3.5, m=3).
  static Environment dense_urban();
};

/// Network deployment, strictly SI: meters, watts, BS per square meter.
struct Deployment {
  double lambda_density = 0.0;  ///< UAV-BSs per m^2
  double altitude = 0.0;        ///< m
  double tx_power = 0.0;        ///< W
  double noise_power = 0.0;     ///< W, over the full bandwidth
  double ref_gain = 1.0;        ///< path gain at the 1 m reference distance
  double bandwidth = 0.0;       ///< Hz

  void validate() const;
};

struct NumericsConfig {
  double r_max = 2.0e4;          ///< m, truncation radius shared by analysis and simulation
  double quad_rel_tol = 1e-8;
  double quad_abs_tol = 1e-12;
  double y_max = 25.0;           ///< nats, outer truncation of the rate integral
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;

  void validate(double altitude) const;
};

struct Scenario {
  Environment env;
  Deployment dep;
  NumericsConfig num;

  void validate() const;
};

/// Raised for malformed or inconsistent configuration; `key()` names the
/// offending entry (e.g. "deployment.altitude").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kDefaultCarrierHz = 2.0e9;

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

/// Free-space gain (c / (4 pi f))^2 at 1 m.
double free_space_gain(double carrier_hz);

/// Received-power scale at the 1 m reference: P_t * eta_link * K.
double derived_zeta(const Environment& env, const Deployment& dep, LinkClass link);

/// Parses a JSON configuration document. See README for the key list.
Scenario parse_config(std::string_view text);
Scenario load_config(const std::filesystem::path& path);

/// Emits an SI-only document that parse_config reads back exactly.
std::string format_config(const Scenario& scenario);

/// Dense-urban preset at the given density (per km^2) and altitude (m),
/// 30 dBm transmit power, -174 dBm/Hz noise over 10 MHz, free-space K at 2 GHz.
Scenario dense_urban_scenario(double density_per_km2, double altitude_m);

}  // namespace aerocov
