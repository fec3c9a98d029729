#pragma once

// Adaptive 7/15-point Gauss-Kronrod quadrature with interval bisection.
// Header-only so that nested integrands inline.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace aerocov::quad {

struct Tolerance {
  double rel = 1e-8;
  double abs = 1e-12;
  int max_subdivisions = 400;

  /// Budget for an integral evaluated inside another integrand.
  Tolerance nested() const { return {rel * 0.1, abs * 0.1, max_subdivisions}; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = true;
  Interval worst{};  ///< subinterval carrying the largest error estimate
};

struct TailResult : Result {
  double last_decade = 0.0;  ///< contribution of [r_max/10, r_max]
};

class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const Result& r)
      : std::runtime_error("quadrature did not converge: error " + std::to_string(r.error) +
                           " on value " + std::to_string(r.value) + ", worst subinterval [" +
                           std::to_string(r.worst.lo) + ", " + std::to_string(r.worst.hi) + "]"),
        result(r) {}
  Result result;
};

inline const Result& require_converged(const Result& r) {
  if (!r.converged) throw NonConvergence(r);
  return r;
}

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment kronrod15(F& f, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 7> f1{}, f2{};
  const double fc = f(centre);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    const double sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }

  const double scale = std::abs(half);
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {lo, hi, resk * half, err};
}

}  // namespace detail

/// Single 15-point Kronrod panel, no adaptivity.
template <class F>
double fixed_kronrod15(F&& f, double lo, double hi) {
  if (lo == hi) return 0.0;
  return detail::kronrod15(f, lo, hi).value;
}

/// Integrates f over [lo, hi]. Stops once the summed error estimate is within
/// max(abs, rel * |value|) or the subdivision budget is exhausted; in the
/// latter case `converged` is false and `worst` names the offending interval.
template <class F>
Result integrate(F&& f, double lo, double hi, const Tolerance& tol = {}) {
  if (!(lo <= hi)) throw std::invalid_argument("integrate: lower limit exceeds upper limit");
  Result out;
  out.worst = {lo, hi};
  if (lo == hi) return out;

  std::priority_queue<detail::Segment> heap;
  heap.push(detail::kronrod15(f, lo, hi));
  out.evaluations = 15;
  double value = heap.top().value;
  double error = heap.top().error;

  auto done = [&] { return error <= std::max(tol.abs, tol.rel * std::abs(value)); };
  while (!done()) {
    if (out.subdivisions >= tol.max_subdivisions) {
      out.converged = false;
      break;
    }
    const detail::Segment s = heap.top();
    const double mid = 0.5 * (s.lo + s.hi);
    if (!(s.lo < mid && mid < s.hi)) {
      out.converged = false;  // interval exhausted at machine resolution
      break;
    }
    heap.pop();
    const detail::Segment left = detail::kronrod15(f, s.lo, mid);
    const detail::Segment right = detail::kronrod15(f, mid, s.hi);
    out.evaluations += 30;
    ++out.subdivisions;
    value += left.value + right.value - s.value;
    error += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the pieces so the reported value carries no running-update drift.
  out.worst = {heap.top().lo, heap.top().hi};
  std::vector<detail::Segment> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const detail::Segment& a, const detail::Segment& b) { return a.lo < b.lo; });
  out.value = 0.0;
  out.error = 0.0;
  for (const auto& p : pieces) {
    out.value += p.value;
    out.error += p.error;
  }
  if (!out.converged && out.error <= std::max(tol.abs, tol.rel * std::abs(out.value))) {
    out.converged = true;
  }
  return out;
}

/// Integral over [lo, r_max] standing in for a semi-infinite tail. Empty when
/// lo >= r_max. Also reports the share of the last decade [r_max/10, r_max]
/// so callers can detect under-truncation.
///
/// For lo > 0 the integration runs in u = ln t, where power-law tails become
/// smooth and slowly varying; callers with lo == 0 should integrate the
/// near field separately.
template <class F>
TailResult integrate_tail(F&& f, double lo, double r_max, const Tolerance& tol = {}) {
  TailResult out;
  out.worst = {lo, r_max};
  if (lo >= r_max) return out;

  auto piece = [&](double a, double b) {
    if (a <= 0.0) return integrate(f, a, b, tol);
    auto mapped = [&](double u) {
      const double t = std::exp(u);
      return f(t) * t;
    };
    Result r = integrate(mapped, std::log(a), std::log(b), tol);
    r.worst = {std::exp(r.worst.lo), std::exp(r.worst.hi)};
    return r;
  };

  const double split = std::max(lo, 0.1 * r_max);
  Result head;
  if (split > lo) head = piece(lo, split);
  const Result tail = piece(split, r_max);
  out.value = head.value + tail.value;
  out.error = head.error + tail.error;
  out.evaluations = head.evaluations + tail.evaluations;
  out.subdivisions = head.subdivisions + tail.subdivisions;
  out.converged = head.converged && tail.converged;
  out.worst = head.error >= tail.error && split > lo ? head.worst : tail.worst;
  out.last_decade = tail.value;
  return out;
}

/// Upper bound on the number of integrands handled by integrate_many.
inline constexpr std::size_t kMaxBatch = 20;

using Batch = std::array<double, kMaxBatch>;

namespace detail {

struct BatchSegment {
  double lo, hi, priority;
  Batch value, error;
  bool operator<(const BatchSegment& o) const { return priority < o.priority; }
};

template <class F>
BatchSegment kronrod15_many(F& f, std::size_t n, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<Batch, 15> fv{};  // [0] centre, [1 + 2j] left, [2 + 2j] right
  f(centre, fv[0]);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f(centre - dx, fv[1 + 2 * j]);
    f(centre + dx, fv[2 + 2 * j]);
  }

  BatchSegment seg{lo, hi, 0.0, {}, {}};
  const double scale = std::abs(half);
  for (std::size_t c = 0; c < n; ++c) {
    const double fc = fv[0][c];
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
      const double a = fv[1 + 2 * j][c];
      const double b = fv[2 + 2 * j][c];
      resk += kWgk[j] * (a + b);
      resabs += kWgk[j] * (std::abs(a) + std::abs(b));
      if (j % 2 == 1) resg += kWg[j / 2] * (a + b);
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
      resasc += kWgk[j] * (std::abs(fv[1 + 2 * j][c] - mean) + std::abs(fv[2 + 2 * j][c] - mean));
    }
    resabs *= scale;
    resasc *= scale;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    seg.value[c] = resk * half;
    seg.error[c] = err;
  }
  return seg;
}

}  // namespace detail

/// Integrates n <= kMaxBatch integrands that share one evaluation
/// f(t, Batch& out), filling out[0..n). Bisection follows the component
/// furthest from its own tolerance; every component must converge.
template <class F>
std::array<Result, kMaxBatch> integrate_many(F&& f, std::size_t n, double lo, double hi,
                                             const Tolerance& tol = {}) {
  if (n > kMaxBatch) throw std::invalid_argument("integrate_many: batch too large");
  if (!(lo <= hi)) throw std::invalid_argument("integrate_many: lower limit exceeds upper limit");
  std::array<Result, kMaxBatch> out{};
  for (auto& r : out) r.worst = {lo, hi};
  if (lo == hi || n == 0) return out;

  detail::BatchSegment first = detail::kronrod15_many(f, n, lo, hi);
  Batch scale{};
  for (std::size_t c = 0; c < n; ++c) scale[c] = std::max(tol.abs, tol.rel * std::abs(first.value[c]));
  auto prioritize = [&](detail::BatchSegment& s) {
    s.priority = 0.0;
    for (std::size_t c = 0; c < n; ++c) s.priority = std::max(s.priority, s.error[c] / scale[c]);
  };
  prioritize(first);

  Batch value = first.value;
  Batch error = first.error;
  std::priority_queue<detail::BatchSegment> heap;
  heap.push(first);
  int evaluations = 15;
  int subdivisions = 0;
  bool converged = true;

  auto done = [&] {
    for (std::size_t c = 0; c < n; ++c) {
      if (error[c] > std::max(tol.abs, tol.rel * std::abs(value[c]))) return false;
    }
    return true;
  };
  while (!done()) {
    if (subdivisions >= tol.max_subdivisions) {
      converged = false;
      break;
    }
    const detail::BatchSegment s = heap.top();
    const double mid = 0.5 * (s.lo + s.hi);
    if (!(s.lo < mid && mid < s.hi)) {
      converged = false;
      break;
    }
    heap.pop();
    detail::BatchSegment left = detail::kronrod15_many(f, n, s.lo, mid);
    detail::BatchSegment right = detail::kronrod15_many(f, n, mid, s.hi);
    prioritize(left);
    prioritize(right);
    evaluations += 30;
    ++subdivisions;
    for (std::size_t c = 0; c < n; ++c) {
      value[c] += left.value[c] + right.value[c] - s.value[c];
      error[c] += left.error[c] + right.error[c] - s.error[c];
    }
    heap.push(left);
    heap.push(right);
  }

  const Interval worst{heap.top().lo, heap.top().hi};
  std::vector<detail::BatchSegment> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const detail::BatchSegment& a, const detail::BatchSegment& b) { return a.lo < b.lo; });
  for (std::size_t c = 0; c < n; ++c) {
    Result& r = out[c];
    for (const auto& p : pieces) {
      r.value += p.value[c];
      r.error += p.error[c];
    }
    r.evaluations = evaluations;
    r.subdivisions = subdivisions;
    r.worst = worst;
    r.converged = converged || r.error <= std::max(tol.abs, tol.rel * std::abs(r.value));
  }
  return out;
}

/// Batched counterpart of integrate_tail (log-mapped for lo > 0).
template <class F>
std::array<TailResult, kMaxBatch> integrate_tail_many(F&& f, std::size_t n, double lo,
                                                      double r_max, const Tolerance& tol = {}) {
  std::array<TailResult, kMaxBatch> out{};
  for (auto& r : out) r.worst = {lo, r_max};
  if (lo >= r_max || n == 0) return out;

  auto piece = [&](double a, double b) {
    if (a <= 0.0) return integrate_many(f, n, a, b, tol);
    auto mapped = [&](double u, Batch& values) {
      const double t = std::exp(u);
      f(t, values);
      for (std::size_t c = 0; c < n; ++c) values[c] *= t;
    };
    auto r = integrate_many(mapped, n, std::log(a), std::log(b), tol);
    for (std::size_t c = 0; c < n; ++c) r[c].worst = {std::exp(r[c].worst.lo), std::exp(r[c].worst.hi)};
    return r;
  };

  const double split = std::max(lo, 0.1 * r_max);
  std::array<Result, kMaxBatch> head{};
  if (split > lo) head = piece(lo, split);
  const auto tail = piece(split, r_max);
  for (std::size_t c = 0; c < n; ++c) {
    TailResult& o = out[c];
    o.value = head[c].value + tail[c].value;
    o.error = head[c].error + tail[c].error;
    o.evaluations = head[c].evaluations + tail[c].evaluations;
    o.subdivisions = head[c].subdivisions + tail[c].subdivisions;
    o.converged = head[c].converged && tail[c].converged;
    o.worst = head[c].error >= tail[c].error && split > lo ? head[c].worst : tail[c].worst;
    o.last_decade = tail[c].value;
  }
  return out;
}

}  // namespace aerocov::quad
