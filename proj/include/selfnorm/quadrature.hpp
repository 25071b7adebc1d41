#pragma once

// Global adaptive Gauss-Kronrod (7/15) integration in the style of QUADPACK's
// QAG, with exponential maps for semi-infinite and infinite ranges so that
// algebraic tails become exponentially decaying integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "selfnorm/errors.hpp"

namespace selfnorm {

struct QuadOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    abs_error += o.abs_error;
    intervals += o.intervals;
    converged = converged && o.converged;
    return *this;
  }
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv;
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  double kronrod = fv[7] * kKronrodWeights[7];
  double gauss = fv[7] * kGaussWeights[3];
  double resabs = std::abs(fv[7]) * kKronrodWeights[7];
  for (int j = 0; j < 7; ++j) {
    const double sum = fv[j] + fv[14 - j];
    kronrod += kKronrodWeights[j] * sum;
    resabs += kKronrodWeights[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  if (!std::isfinite(kronrod)) {
    throw numeric_failure("quadrature: non-finite integrand on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]",
                          -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity());
  }
  const double mean = 0.5 * kronrod;
  double resasc = kKronrodWeights[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j) resasc += kKronrodWeights[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  const double scale = std::abs(half);
  kronrod *= half;
  gauss *= half;
  resabs *= scale;
  resasc *= scale;
  // QUADPACK's scaling: |K - G| alone is optimistic near endpoint singularities.
  double err = std::abs(kronrod - gauss);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, kronrod, err};
}

// Adaptive bisection of the panel with the largest error estimate.
template <class F>
QuadResult adaptive_finite(const F& f, double a, double b, const QuadOptions& opt) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  Panel first = gauss_kronrod_15(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  auto done = [&] { return error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (!done() && intervals < opt.max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Panel cannot be split further in floating point; accept it.
      heap.push(Panel{worst.a, worst.b, worst.value, 0.0});
      error -= worst.error;
      continue;
    }
    Panel left = gauss_kronrod_15(f, worst.a, mid);
    Panel right = gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Recompute sums from panels to shed accumulated cancellation.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  QuadResult r{value, err, intervals, true};
  r.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value)) * 1.0000001;
  return r;
}

// u = a + expm1(tau), tau = t / (1 - t), t in [0, 1).
template <class F>
QuadResult adaptive_upper_tail(const F& f, double a, const QuadOptions& opt) {
  auto mapped = [&](double t) {
    const double tau = t / (1.0 - t);
    if (tau > 700.0) return 0.0;
    const double em1 = std::expm1(tau);
    const double val = f(a + em1);
    if (val == 0.0) return 0.0;
    return val * (em1 + 1.0) / ((1.0 - t) * (1.0 - t));
  };
  return adaptive_finite(mapped, 0.0, 1.0, opt);
}

}  // namespace detail

/// Integrates f over [a, b]; either endpoint may be infinite. Convergence is
/// reported in the result, not thrown.
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadOptions& opt = {}) {
  if (std::isnan(a) || std::isnan(b)) throw parameter_error("integrate: NaN bound");
  if (a == b) return {};
  if (a > b) {
    QuadResult r = integrate(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) return detail::adaptive_finite(f, a, b, opt);
  if (!lo_inf) return detail::adaptive_upper_tail(f, a, opt);
  if (!hi_inf) {
    auto reflected = [&](double u) { return f(-u); };
    return detail::adaptive_upper_tail(reflected, -b, opt);
  }
  QuadOptions half = opt;
  half.abs_tol *= 0.5;
  QuadResult r = integrate(f, -std::numeric_limits<double>::infinity(), 0.0, half);
  r += integrate(f, 0.0, std::numeric_limits<double>::infinity(), half);
  return r;
}

/// Integrates over [a, b] split at the given interior points (points outside
/// the range are ignored). The absolute tolerance is shared across pieces.
template <class F>
QuadResult integrate_split(const F& f, double a, double b, std::vector<double> splits,
                           const QuadOptions& opt = {}) {
  std::erase_if(splits, [&](double s) { return !(s > a && s < b); });
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  std::vector<double> edges;
  edges.reserve(splits.size() + 2);
  edges.push_back(a);
  edges.insert(edges.end(), splits.begin(), splits.end());
  edges.push_back(b);
  QuadOptions piece = opt;
  piece.abs_tol = opt.abs_tol / static_cast<double>(edges.size() - 1);
  QuadResult total;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) total += integrate(f, edges[i], edges[i + 1], piece);
  return total;
}

/// Throws numeric_failure carrying the bracket when the result did not converge.
inline double require_converged(const QuadResult& r, const std::string& what) {
  if (!r.converged) {
    throw numeric_failure(what + ": quadrature did not reach tolerance (error estimate " +
                              std::to_string(r.abs_error) + ")",
                          r.value - r.abs_error, r.value + r.abs_error);
  }
  return r.value;
}

}  // namespace selfnorm
