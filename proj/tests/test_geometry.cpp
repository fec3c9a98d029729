#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aerocov/channel.hpp"
#include "aerocov/geometry.hpp"

using namespace aerocov;

namespace {

Scenario preset(double density, double h) { return dense_urban_scenario(density, h); }

}  // namespace

TEST_CASE("exclusion distances") {
  const Environment env = Environment::dense_urban();
  CHECK(exclusion_distance_los(env, 100) == doctest::Approx(37148.3512420134).epsilon(1e-12));
  CHECK(nlos_exclusion_threshold(env, 100) == doctest::Approx(37148.3512420134).epsilon(1e-12));
  CHECK(exclusion_distance_nlos(env, 100, 500) == 100);
  // the two maps invert each other above the threshold
  for (double r : {4e4, 6e4, 1e5}) {
    const double d = exclusion_distance_nlos(env, 100, r);
    CHECK(exclusion_distance_los(env, d) == doctest::Approx(r).epsilon(1e-12));
    CHECK(d >= 100);
  }
  CHECK(horizontal_from_3d(100, 100) == 0);
  CHECK(horizontal_from_3d(100, 99) == 0);
  CHECK(horizontal_from_3d(3, 5) == doctest::Approx(4));
}

TEST_CASE("tabulated laws match direct quadrature inside the window") {
  const Scenario sc = preset(5, 100);
  const DistanceLaw law(sc.env, sc.dep, sc.num);
  CHECK(law.window() == doctest::Approx(std::sqrt(2e4 * 2e4 - 1e4)));
  for (LinkClass link : kLinkClasses) {
    for (double r : {100.0, 100.5, 150.0, 400.0, 1234.5, 5000.0, 19000.0}) {
      CHECK(law.nearest_distance_cdf(link, r) ==
            doctest::Approx(nearest_distance_cdf(sc.env, sc.dep, link, r)).epsilon(1e-9));
      CHECK(law.nearest_distance_pdf(link, r) ==
            doctest::Approx(nearest_distance_pdf(sc.env, sc.dep, link, r)).epsilon(1e-9));
    }
  }
}

TEST_CASE("pdf is the derivative of the cdf") {
  const Scenario sc = preset(3, 200);
  const DistanceLaw law(sc.env, sc.dep, sc.num);
  for (LinkClass link : kLinkClasses) {
    for (double r : {210.0, 300.0, 800.0, 2500.0}) {
      const double dr = 1e-3 * r;
      const double fd =
          (law.nearest_distance_cdf(link, r + dr) - law.nearest_distance_cdf(link, r - dr)) / (2 * dr);
      CHECK(law.nearest_distance_pdf(link, r) == doctest::Approx(fd).epsilon(1e-5));
    }
    const double z = 700;
    const double fd =
        (law.horizontal_distance_cdf(link, z + 0.5) - law.horizontal_distance_cdf(link, z - 0.5));
    CHECK(law.horizontal_distance_pdf(link, z) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("cumulative mass against a trapezoid oracle") {
  const Scenario sc = preset(5, 100);
  const DistanceLaw law(sc.env, sc.dep, sc.num);
  const double zmax = 3000;
  const int n = 300000;
  const double dz = zmax / n;
  double trap = 0;
  for (int i = 0; i <= n; ++i) {
    const double z = i * dz;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    trap += w * z * link_probability(sc.env, 100, LinkClass::nlos, z) * dz;
  }
  CHECK(law.cumulative_mass(LinkClass::nlos, zmax) == doctest::Approx(trap).epsilon(1e-8));
  CHECK(law.cumulative_mass(LinkClass::los, zmax) + law.cumulative_mass(LinkClass::nlos, zmax) ==
        doctest::Approx(zmax * zmax / 2).epsilon(1e-12));
}

TEST_CASE("laws saturate at the window edge") {
  const Scenario sc = preset(0.001, 100);
  const DistanceLaw law(sc.env, sc.dep, sc.num);
  for (LinkClass link : kLinkClasses) {
    const double edge = law.nearest_distance_cdf(link, 2e4);
    CHECK(edge < 1.0);
    CHECK(law.nearest_distance_cdf(link, 3e4) == edge);
    CHECK(law.nearest_distance_pdf(link, 3e4) == 0);
    CHECK(law.nearest_distance_cdf(link, 100) == 0);
    CHECK(law.support_limit(link) == doctest::Approx(2e4));
  }
}

TEST_CASE("association probabilities") {
  for (double density : {3.0, 5.0, 9.0}) {
    for (double h : {100.0, 300.0}) {
      const Scenario sc = preset(density, h);
      const double a = association_probability_los(sc.env, sc.dep, sc.num);
      CHECK(a >= 0);
      CHECK(a <= 1);
      CHECK(a + (1 - a) == 1.0);
    }
  }
  // with the NLoS penalty removed and equal exponents the closer point wins,
  // so A_L is the chance that the nearest point overall is LoS
  Scenario sc = preset(5, 100);
  sc.env.eta_nlos = sc.env.eta_los;
  sc.env.alpha_nlos = sc.env.alpha_los + 1e-9;
  const DistanceLaw law(sc.env, sc.dep, sc.num);
  const auto r = law.association_probability_los({1e-10, 1e-14});
  CHECK(r.converged);
  auto f = [&](double z) {
    return law.horizontal_distance_pdf(LinkClass::los, z) *
           law.void_probability(LinkClass::nlos, z);
  };
  const auto direct = quad::integrate(f, 0.0, law.window(), {1e-10, 1e-14});
  CHECK(r.value == doctest::Approx(direct.value).epsilon(1e-6));
}
