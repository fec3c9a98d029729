#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "aerocov/analysis.hpp"
#include "aerocov/simulator.hpp"

using namespace aerocov;

namespace {

Scenario small_window(double density, double h, std::uint64_t trials) {
  Scenario sc = dense_urban_scenario(density, h);
  sc.num.r_max = 3000;
  sc.num.trials = trials;
  return sc;
}

}  // namespace

TEST_CASE("Poisson point count and thinning") {
  const Scenario sc = small_window(5, 100, 1);
  const double w2 = sc.num.r_max * sc.num.r_max - 1e4;
  const double mean = sc.dep.lambda_density * std::numbers::pi * w2;
  const int reps = 10000;
  double total = 0;
  int in_ring = 0, los_in_ring = 0;
  for (int i = 0; i < reps; ++i) {
    Rng rng = trial_rng(3, i);
    const auto pts = sample_network(sc.env, sc.dep, sc.num, rng);
    total += static_cast<double>(pts.size());
    for (const auto& p : pts) {
      CHECK(p.z * p.z <= w2 * (1 + 1e-12));
      if (p.z > 200 && p.z < 260) {
        ++in_ring;
        los_in_ring += p.link == LinkClass::los;
      }
    }
  }
  CHECK(std::abs(total / reps - mean) < 3 * std::sqrt(mean / reps));
  const double p = los_probability(sc.env, 100, 230);
  const double frac = static_cast<double>(los_in_ring) / in_ring;
  CHECK(std::abs(frac - p) < 3 * std::sqrt(p * (1 - p) / in_ring) + 0.01);

  Deployment empty = sc.dep;
  empty.lambda_density = 0;
  Rng rng(1);
  CHECK(sample_network(sc.env, empty, sc.num, rng).empty());
  const auto rec = evaluate_network(sc.env, empty, {}, rng);
  CHECK_FALSE(rec.serving_link.has_value());
  CHECK(rec.sinr == 0.0);
}

TEST_CASE("single link without fading has the closed-form SNR") {
  const Scenario sc = dense_urban_scenario(5, 100);
  const std::vector<NetworkPoint> pts{{250.0, LinkClass::los}};
  Rng rng(1);
  const auto rec = evaluate_network(sc.env, sc.dep, pts, rng, {.unit_fading = true});
  const double d2 = 250.0 * 250.0 + 1e4;
  CHECK(rec.serving_link == LinkClass::los);
  CHECK(rec.serving_distance == doctest::Approx(std::sqrt(d2)));
  CHECK(rec.sinr == doctest::Approx(derived_zeta(sc.env, sc.dep, LinkClass::los) / d2 /
                                    sc.dep.noise_power).epsilon(1e-14));
}

TEST_CASE("serving point has the largest mean power of the realization") {
  const Scenario sc = small_window(9, 150, 1);
  for (int i = 0; i < 300; ++i) {
    Rng rng = trial_rng(11, i);
    const auto pts = sample_network(sc.env, sc.dep, sc.num, rng);
    const auto rec = evaluate_network(sc.env, sc.dep, pts, rng);
    if (pts.empty()) continue;
    double best = 0;
    for (const auto& p : pts) {
      best = std::max(best, mean_path_gain(sc.env, sc.dep, p.link, std::hypot(p.z, 150.0)));
    }
    const double serving = mean_path_gain(sc.env, sc.dep, *rec.serving_link, rec.serving_distance);
    CHECK(serving == doctest::Approx(best).epsilon(1e-12));
    CHECK(rec.sinr > 0);
    CHECK(rec.serving_distance >= 150.0);
    CHECK_FALSE(exclusion_violated(sc.env, 150.0, rec));
  }
}

TEST_CASE("exclusion check flags a crafted violation") {
  const Environment env = Environment::dense_urban();
  TrialRecord rec;
  rec.serving_link = LinkClass::nlos;
  rec.serving_distance = 120;
  rec.nearest_los = 5000;  // far below the LoS exclusion distance for r = 120
  CHECK(exclusion_violated(env, 100, rec));
  rec.nearest_los.reset();
  CHECK_FALSE(exclusion_violated(env, 100, rec));
}

TEST_CASE("trials are reproducible and independent of the worker count") {
  const Scenario sc = small_window(5, 100, 200);
  const auto a = simulate(sc, TrialKind::full, 1);
  const auto b = simulate(sc, TrialKind::full, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sinr == b[i].sinr);
    CHECK(a[i].serving_distance == b[i].serving_distance);
  }
  CHECK(format_trial_dump(a) == format_trial_dump(b));
  CHECK(format_trial_dump(a).rfind("trial,serving,distance_m,sinr_db\n", 0) == 0);
}

TEST_CASE("geometry trials agree with full realizations in distribution") {
  const Scenario sc = small_window(5, 100, 4000);
  const auto full = summarize(simulate(sc, TrialKind::full), std::vector<double>{});
  const auto geo = summarize(simulate(sc, TrialKind::geometry), std::vector<double>{});
  const DistanceLaw law(sc.env, sc.dep, sc.num);
  for (const auto* est : {&full, &geo}) {
    const double ks = ks_statistic(
        est->nearest_nlos, est->trials,
        [&](double r) { return law.nearest_distance_cdf(LinkClass::nlos, r); },
        law.nearest_distance_cdf(LinkClass::nlos, law.r_max()));
    CHECK(ks < 1.63 / std::sqrt(4000.0));
  }
}

TEST_CASE("estimates: nested coverage events and CLT scaling") {
  Scenario sc = small_window(5, 100, 2000);
  const std::vector<double> t{1e-12, 0.1, 1.0, 10.0, 1e12};
  const auto small = estimate(sc, t);
  CHECK(small.coverage[0].value == 1.0);
  CHECK(small.coverage[4].value == 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(small.coverage[i].value <= small.coverage[i - 1].value);

  sc.num.trials = 8000;
  const auto large = estimate(sc, t);
  const double ratio = large.coverage[2].half_width / small.coverage[2].half_width;
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.1));
  CHECK(large.rate.half_width / small.rate.half_width == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("ks statistic") {
  const std::vector<double> u{0.1, 0.3, 0.5, 0.7, 0.9};
  CHECK(ks_statistic(u, 5, [](double x) { return x; }, 1.0) == doctest::Approx(0.1));
  // two draws never landed inside the window
  CHECK(ks_statistic(std::vector<double>{0.5}, 3, [](double x) { return x / 2; }, 0.5) ==
        doctest::Approx(0.25));
}
