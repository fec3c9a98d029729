#include "aerocov/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "aerocov/channel.hpp"

namespace aerocov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 1 - 1/(1 + x)
double rayleigh_interferer(double x) { return x / (1.0 + x); }

// 1 - (m / (m + x))^m
double nakagami_interferer(double x, int m) {
  const double u = x / m;
  if (u < 1e-3) return -std::expm1(-m * std::log1p(u));
  const double q = 1.0 / (1.0 + u);
  double p = q;
  for (int i = 1; i < m; ++i) p *= q;
  return 1.0 - p;
}

const Scenario& validated(const Scenario& sc) {
  sc.validate();
  return sc;
}

}  // namespace

double nats_to_bits_per_second(double nats_per_hz, double bandwidth_hz) {
  return nats_per_hz * bandwidth_hz / std::numbers::ln2;
}

NetworkAnalysis::NetworkAnalysis(const Scenario& scenario)
    : sc_(validated(scenario)),
      law_(scenario.env, scenario.dep, scenario.num),
      tol_{scenario.num.quad_rel_tol, scenario.num.quad_abs_tol} {
  for (LinkClass link : kLinkClasses) {
    zeta_[index(link)] = derived_zeta(sc_.env, sc_.dep, link);
    support_[index(link)] = law_.support_limit(link);
  }
  const quad::Result assoc = law_.association_probability_los(tol_);
  association_numerics_.absorb(assoc);
  a_los_ = std::clamp(assoc.value, 0.0, 1.0);
}

void NetworkAnalysis::laplace_batch(LinkClass serving, double r, double base, int count,
                                    const quad::Tolerance& tol, Diagnostics& diag,
                                    quad::Batch& out) const {
  const auto n = static_cast<std::size_t>(count);
  const double lambda = sc_.dep.lambda_density;
  if (base <= 0.0 || lambda <= 0.0) {
    std::fill_n(out.begin(), n, 1.0);
    return;
  }

  const Environment& env = sc_.env;
  const double h = sc_.dep.altitude;
  const double window = law_.window();

  double nlos_from = 0.0;
  double los_from = 0.0;
  if (serving == LinkClass::nlos) {
    nlos_from = horizontal_from_3d(h, r);
    los_from = horizontal_from_3d(h, exclusion_distance_los(env, r));
  } else {
    nlos_from = horizontal_from_3d(h, exclusion_distance_nlos(env, h, r));
    los_from = horizontal_from_3d(h, r);
  }

  const double s_nlos = base * zeta(LinkClass::nlos);
  const double s_los = base * zeta(LinkClass::los);
  const double half_nlos = 0.5 * env.alpha_nlos;
  const double half_los = 0.5 * env.alpha_los;
  const int m = env.m;

  auto nlos_field = [&](double t, quad::Batch& v) {
    const double x = s_nlos * inverse_power(t * t + h * h, half_nlos);
    const double w = t * link_probability(env, h, LinkClass::nlos, t);
    for (std::size_t k = 0; k < n; ++k) v[k] = rayleigh_interferer((k + 1) * x) * w;
  };
  auto los_field = [&](double t, quad::Batch& v) {
    const double x = s_los * inverse_power(t * t + h * h, half_los);
    const double w = t * los_probability(env, h, t);
    for (std::size_t k = 0; k < n; ++k) v[k] = nakagami_interferer((k + 1) * x, m) * w;
  };

  // Linear near field below the altitude, log-mapped tail beyond.
  auto field_integral = [&](auto& field, double from, quad::Batch& acc) {
    std::fill_n(acc.begin(), n, 0.0);
    if (from < h) {
      const auto near = quad::integrate_many(field, n, from, std::min(h, window), tol);
      for (std::size_t k = 0; k < n; ++k) {
        diag.absorb(near[k]);
        acc[k] += near[k].value;
      }
    }
    const auto far = quad::integrate_tail_many(field, n, std::max(from, h), window, tol);
    for (std::size_t k = 0; k < n; ++k) {
      diag.absorb(far[k]);
      acc[k] += far[k].value;
    }
  };
  quad::Batch in{};
  quad::Batch il{};
  field_integral(nlos_field, nlos_from, in);
  field_integral(los_field, los_from, il);
  for (std::size_t k = 0; k < n; ++k) out[k] = std::exp(-kTwoPi * lambda * (in[k] + il[k]));
}

double NetworkAnalysis::laplace_interference(const LaplaceQuery& q, Diagnostics* diag) const {
  Diagnostics local;
  quad::Batch out{};
  laplace_batch(q.ctx.link, q.ctx.r, q.s, 1, tol_, local, out);
  if (diag) diag->merge(local);
  return out[0];
}

double NetworkAnalysis::conditional_success(LinkClass link, double threshold, double r,
                                            const quad::Tolerance& tol, Diagnostics& diag) const {
  if (threshold <= 0.0) return 1.0;
  const int shape = sc_.env.shape(link);
  const double base = alzer_alpha(shape) * shape * threshold / zeta(link) *
                      std::pow(r, sc_.env.alpha(link));
  quad::Batch transform{};
  laplace_batch(link, r, base, shape, tol, diag, transform);
  long double acc = 0.0L;
  for (int k = 1; k <= shape; ++k) {
    const double noise = std::exp(-k * base * sc_.dep.noise_power);
    acc += static_cast<long double>(binomial_term(shape, k)) * noise * transform[k - 1];
  }
  return static_cast<double>(acc);
}

template <class F>
double NetworkAnalysis::integrate_serving_distance(LinkClass link, F&& f,
                                                   const quad::Tolerance& tol,
                                                   Diagnostics& diag) const {
  const Environment& env = sc_.env;
  const double h = sc_.dep.altitude;
  const double upper = support_[index(link)];

  std::vector<double> cuts{h};
  if (link == LinkClass::los) {
    cuts.push_back(nlos_exclusion_threshold(env, h));
  } else {
    // where the LoS exclusion radius crosses the window edge
    const double gain = std::pow(env.eta_los / env.eta_nlos, 1.0 / env.alpha_los);
    cuts.push_back(std::pow(sc_.num.r_max / gain, env.alpha_los / env.alpha_nlos));
  }
  cuts.erase(std::remove_if(cuts.begin() + 1, cuts.end(),
                            [&](double c) { return !(c > h && c < upper); }),
             cuts.end());
  cuts.push_back(upper);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const quad::Result piece = quad::integrate(f, cuts[i], cuts[i + 1], tol);
    diag.absorb(piece);
    total += piece.value;
  }
  return total;
}

template <class F>
double NetworkAnalysis::integrate_log_threshold(F&& f, const quad::Tolerance& tol,
                                                Diagnostics& diag) const {
  const double y_max = sc_.num.y_max;
  const quad::Result head = quad::integrate(f, 0.0, y_max - 1.0, tol);
  const quad::Result tail = quad::integrate(f, y_max - 1.0, y_max, tol);
  diag.absorb(head);
  diag.absorb(tail);
  const double total = head.value + tail.value;
  if (std::abs(tail.value) > tol.rel * std::abs(total) + tol.abs) diag.under_truncated = true;
  return total;
}

double NetworkAnalysis::coverage_at(LinkClass link, double threshold, const quad::Tolerance& tol,
                                    Diagnostics& diag) const {
  const quad::Tolerance inner = tol.nested();
  auto integrand = [&](double r) {
    const double pdf = law_.nearest_distance_pdf(link, r);
    if (pdf == 0.0) return 0.0;
    return pdf * conditional_success(link, threshold, r, inner, diag);
  };
  return integrate_serving_distance(link, integrand, tol, diag);
}

double NetworkAnalysis::conditional_coverage(LinkClass link, double threshold,
                                             Diagnostics* diag) const {
  Diagnostics local;
  const double v = coverage_at(link, threshold, tol_, local);
  if (diag) diag->merge(local);
  return v;
}

MetricResult NetworkAnalysis::coverage(double threshold) const {
  MetricResult out;
  out.numerics = association_numerics_;
  out.conditional_los = coverage_at(LinkClass::los, threshold, tol_, out.numerics);
  out.conditional_nlos = coverage_at(LinkClass::nlos, threshold, tol_, out.numerics);
  out.weight_los = association_los();
  out.weight_nlos = association_nlos();
  out.value = out.conditional_los * out.weight_los + out.conditional_nlos * out.weight_nlos;
  return out;
}

double NetworkAnalysis::conditional_rate(LinkClass link, Diagnostics* diag) const {
  Diagnostics local;
  const quad::Tolerance middle = tol_.nested();
  const quad::Tolerance inner = middle.nested();
  auto integrand = [&](double r) {
    const double pdf = law_.nearest_distance_pdf(link, r);
    if (pdf == 0.0) return 0.0;
    auto over_y = [&](double y) {
      return conditional_success(link, std::expm1(y), r, inner, local);
    };
    return pdf * integrate_log_threshold(over_y, middle, local);
  };
  const double v = integrate_serving_distance(link, integrand, tol_, local);
  if (diag) diag->merge(local);
  return v;
}

MetricResult NetworkAnalysis::rate() const {
  MetricResult out;
  out.numerics = association_numerics_;
  out.conditional_los = conditional_rate(LinkClass::los, &out.numerics);
  out.conditional_nlos = conditional_rate(LinkClass::nlos, &out.numerics);
  out.weight_los = association_los();
  out.weight_nlos = association_nlos();
  out.value = out.conditional_los * out.weight_los + out.conditional_nlos * out.weight_nlos;
  return out;
}

double NetworkAnalysis::rate_via_coverage_at(LinkClass link, Diagnostics& diag) const {
  const quad::Tolerance middle = tol_.nested();
  auto over_y = [&](double y) { return coverage_at(link, std::expm1(y), middle, diag); };
  return integrate_log_threshold(over_y, tol_, diag);
}

MetricResult NetworkAnalysis::rate_via_coverage() const {
  MetricResult out;
  out.numerics = association_numerics_;
  out.conditional_los = rate_via_coverage_at(LinkClass::los, out.numerics);
  out.conditional_nlos = rate_via_coverage_at(LinkClass::nlos, out.numerics);
  out.weight_los = association_los();
  out.weight_nlos = association_nlos();
  out.value = out.conditional_los * out.weight_los + out.conditional_nlos * out.weight_nlos;
  return out;
}

double laplace_interference(const Environment& env, const Deployment& dep,
                            const NumericsConfig& num, const LaplaceQuery& q) {
  return NetworkAnalysis({env, dep, num}).laplace_interference(q);
}

double conditional_coverage(const Environment& env, const Deployment& dep,
                            const NumericsConfig& num, LinkClass link, double threshold) {
  return NetworkAnalysis({env, dep, num}).conditional_coverage(link, threshold);
}

MetricResult coverage(const Environment& env, const Deployment& dep, const NumericsConfig& num,
                      double threshold) {
  return NetworkAnalysis({env, dep, num}).coverage(threshold);
}

double conditional_rate(const Environment& env, const Deployment& dep, const NumericsConfig& num,
                        LinkClass link) {
  return NetworkAnalysis({env, dep, num}).conditional_rate(link);
}

MetricResult rate(const Environment& env, const Deployment& dep, const NumericsConfig& num) {
  return NetworkAnalysis({env, dep, num}).rate();
}

}  // namespace aerocov
