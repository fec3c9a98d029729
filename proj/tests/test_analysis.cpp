#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "aerocov/analysis.hpp"
#include "aerocov/channel.hpp"
#include "aerocov/simulator.hpp"

using namespace aerocov;

namespace {

// E[exp(-s I)] from realizations of the window with the exclusion rules
// applied directly to the sampled points.
struct McLaplace {
  double mean;
  double se;
};

McLaplace sample_laplace(const Scenario& sc, const ServingContext& ctx, double s, int reps) {
  const double h = sc.dep.altitude;
  const double cut_los =
      ctx.link == LinkClass::nlos ? exclusion_distance_los(sc.env, ctx.r) : ctx.r;
  const double cut_nlos =
      ctx.link == LinkClass::los ? exclusion_distance_nlos(sc.env, h, ctx.r) : ctx.r;
  double sum = 0, sq = 0;
  for (int i = 0; i < reps; ++i) {
    Rng rng = trial_rng(99, static_cast<std::uint64_t>(i));
    const auto pts = sample_network(sc.env, sc.dep, sc.num, rng);
    double interference = 0;
    for (const auto& p : pts) {
      const double d = std::hypot(p.z, h);
      if (d < (p.link == LinkClass::los ? cut_los : cut_nlos)) continue;
      interference += mean_path_gain(sc.env, sc.dep, p.link, d) * sample_fading(p.link, sc.env.m, rng);
    }
    const double v = std::exp(-s * interference);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / reps;
  return {mean, std::sqrt((sq / reps - mean * mean) / reps)};
}

}  // namespace

TEST_CASE("Laplace transform: s = 0 and monotonicity") {
  const NetworkAnalysis an(dense_urban_scenario(5, 100));
  for (LinkClass link : kLinkClasses) {
    CHECK(an.laplace_interference({0.0, {link, 150.0}}) == 1.0);
    double prev = 1.0;
    for (double s : {1e6, 1e8, 1e10, 1e12}) {
      const double v = an.laplace_interference({s, {link, 150.0}});
      CHECK(v <= prev);
      CHECK(v >= 0);
      prev = v;
    }
  }
}

TEST_CASE("Laplace transform against sampled interference") {
  const Scenario sc = dense_urban_scenario(5, 100);
  const NetworkAnalysis an(sc);
  struct Case {
    LinkClass link;
    double r;
    double s;
  };
  for (const Case c : {Case{LinkClass::nlos, 150, 1e10}, Case{LinkClass::nlos, 150, 1e13},
                       Case{LinkClass::los, 150, 1e9}, Case{LinkClass::los, 400, 1e10}}) {
    const ServingContext ctx{c.link, c.r};
    const double analytic = an.laplace_interference({c.s, ctx});
    const auto mc = sample_laplace(sc, ctx, c.s, 3000);
    INFO("link=" << to_string(c.link) << " r=" << c.r << " s=" << c.s << " analytic=" << analytic
                 << " mc=" << mc.mean << " se=" << mc.se);
    CHECK(std::abs(analytic - mc.mean) <= 3 * mc.se + 1e-4);
  }
}

TEST_CASE("metric decomposition and determinism") {
  const Scenario sc = dense_urban_scenario(7, 150);
  const NetworkAnalysis a(sc), b(sc);
  for (double t : {0.1, 1.0, 10.0}) {
    const auto r = a.coverage(t);
    CHECK(r.value == doctest::Approx(r.conditional_los * r.weight_los +
                                     r.conditional_nlos * r.weight_nlos).epsilon(1e-15));
    CHECK(r.weight_los + r.weight_nlos == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.numerics.converged);
    CHECK(r.value == b.coverage(t).value);
  }
}

TEST_CASE("coverage decreases in the threshold and tends to 1 as T -> 0") {
  const NetworkAnalysis an(dense_urban_scenario(5, 200));
  double prev = 1.0;
  for (double db = -40; db <= 30; db += 5) {
    const double v = an.coverage(db_to_linear(db)).value;
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
  CHECK(an.coverage(1e-9).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sparse network approaches the noise-only limit") {
  // P_C / lambda -> 2 pi int z [P_L S_L + P_N S_N] dz with interference and
  // competition between candidates both vanishing.
  const double density = 1e-7;
  const Scenario sc = dense_urban_scenario(density, 100);
  const double t = db_to_linear(30);
  const NetworkAnalysis an(sc);
  const double pc = an.coverage(t).value;

  const double h = 100;
  const double zl = derived_zeta(sc.env, sc.dep, LinkClass::los);
  const double zn = derived_zeta(sc.env, sc.dep, LinkClass::nlos);
  const double w = std::sqrt(sc.num.r_max * sc.num.r_max - h * h);
  const int n = 400000;
  const double dz = w / n;
  double acc = 0;
  for (int i = 0; i <= n; ++i) {
    const double z = i * dz;
    const double d2 = z * z + h * h;
    const double pl = los_probability(sc.env, h, z);
    const double sl = 1 - gamma_cdf_approx(3, t * sc.dep.noise_power * d2 / zl);
    const double sn = std::exp(-t * sc.dep.noise_power * std::pow(d2, 1.75) / zn);
    acc += (i == 0 || i == n ? 0.5 : 1.0) * z * (pl * sl + (1 - pl) * sn) * dz;
  }
  const double limit = 2 * std::numbers::pi * sc.dep.lambda_density * acc;
  CHECK(pc == doctest::Approx(limit).epsilon(1e-3));
}

TEST_CASE("rate units") {
  CHECK(nats_to_bits_per_second(1.0, 1e7) == doctest::Approx(1e7 / std::numbers::ln2));
}
