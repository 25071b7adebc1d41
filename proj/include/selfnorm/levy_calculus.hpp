#pragma once

// One-dimensional Levy measure Lambda on (0, inf), the bivariate measure Pi it
// induces together with the law F of X,
//
//   Pi((a,b] x (c,d]) = int_c^d (F(b/s) - F(a/s)) Lambda(ds),
//
// and the prelimit quantities n P{Y > a_n v}, n P{XY > a_n u, Y > a_n v} and
// the truncated moments whose convergence identifies the bivariate limit of
// (sum X_i Y_i / a_n, sum Y_i / a_n).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selfnorm/distributions.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/quadrature.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

/// Levy measure on (0, inf) given by its tail Lambda-bar(v) = Lambda((v, inf)).
struct LevyTail {
  std::string name;
  std::function<double(double)> tail;
  /// Optional density lambda with Lambda-bar(v) = int_v^inf lambda.
  std::function<double(double)> density;
  /// Optional generalized inverse of the tail; bisection is used otherwise.
  std::function<double(double)> inverse_tail;
  /// int_0^1 s Lambda(ds).
  double small_mean = 0.0;
  /// Drift alpha >= 0 of id(alpha, Lambda).
  double drift_alpha = 0.0;
  /// Tail index for the stable family (NaN otherwise).
  double stable_beta = kNaN;

  double operator()(double v) const { return tail(v); }
};

namespace detail {

inline double bisect_inverse_tail(const LevyTail& levy, double w) {
  // Smallest s with tail(s) <= w; tail is nonincreasing.
  double lo = 1.0, hi = 1.0;
  int guard = 0;
  while (levy.tail(lo) <= w && guard++ < 2000) lo *= 0.5;
  guard = 0;
  while (levy.tail(hi) > w && guard++ < 2000) hi *= 2.0;
  if (levy.tail(lo) <= w || levy.tail(hi) > w) {
    throw numeric_failure("levy tail inverse: could not bracket level " + std::to_string(w), lo, hi);
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (levy.tail(mid) <= w ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

inline double inverse_levy_tail(const LevyTail& levy, double w) {
  if (!(w > 0.0)) throw parameter_error("inverse_levy_tail: level must be positive");
  if (levy.inverse_tail) return levy.inverse_tail(w);
  return detail::bisect_inverse_tail(levy, w);
}

/// int_{(lo, hi]} g(s) Lambda(ds). With a density the integral runs in
/// s = e^t; without one it runs over levels w = Lambda-bar(s).
template <class G>
QuadResult levy_integral(const LevyTail& levy, const G& g, double lo, double hi, std::vector<double> splits = {},
                         const QuadOptions& opt = {}) {
  if (!(lo >= 0.0) || !(hi > lo)) return {};
  if (levy.density) {
    auto integrand = [&](double t) {
      const double s = std::exp(t);
      // Below the normal range the Levy mass of (0, s) is negligible.
      if (s < std::numeric_limits<double>::min() || !std::isfinite(s)) return 0.0;
      const double d = levy.density(s);
      if (d == 0.0 || !std::isfinite(d)) return 0.0;
      const double gv = g(s);
      return gv == 0.0 ? 0.0 : gv * d * s;
    };
    std::vector<double> log_splits;
    for (double s : splits) {
      if (s > 0.0 && std::isfinite(s)) log_splits.push_back(std::log(s));
    }
    const double a = lo > 0.0 ? std::log(lo) : -kInf;
    const double b = std::isfinite(hi) ? std::log(hi) : kInf;
    return integrate_split(integrand, a, b, std::move(log_splits), opt);
  }
  const double w_hi = lo > 0.0 ? levy.tail(lo) : kInf;
  const double w_lo = std::isfinite(hi) ? levy.tail(hi) : 0.0;
  auto integrand = [&](double w) { return w <= 0.0 ? 0.0 : g(inverse_levy_tail(levy, w)); };
  std::vector<double> level_splits;
  for (double s : splits) {
    if (s > 0.0 && std::isfinite(s)) level_splits.push_back(levy.tail(s));
  }
  return integrate_split(integrand, w_lo, w_hi, std::move(level_splits), opt);
}

/// Lambda-bar(v) = v^-beta, density beta v^{-beta-1}, 0 < beta < 1.
/// Normalized so that Lambda-bar(1) = 1.
inline LevyTail stable_levy_tail(double beta, double drift_alpha = 0.0) {
  if (!(beta > 0.0 && beta < 1.0)) throw parameter_error("stable levy tail: beta must lie in (0,1)");
  if (!(drift_alpha >= 0.0)) throw parameter_error("stable levy tail: drift must be non-negative");
  LevyTail l;
  l.name = "stable";
  l.tail = [beta](double v) { return v <= 0.0 ? kInf : std::pow(v, -beta); };
  l.density = [beta](double v) { return v <= 0.0 ? 0.0 : beta * std::pow(v, -beta - 1.0); };
  l.inverse_tail = [beta](double w) { return std::pow(w, -1.0 / beta); };
  l.small_mean = beta / (1.0 - beta);
  l.drift_alpha = drift_alpha;
  l.stable_beta = beta;
  return l;
}

/// General Levy tail; small_mean is computed by quadrature and the invariants
/// (finite small mean, non-negative drift, tail vanishing at infinity) checked.
inline LevyTail make_levy_tail(std::string name, std::function<double(double)> tail,
                               std::function<double(double)> density = {}, double drift_alpha = 0.0,
                               std::function<double(double)> inverse_tail = {}) {
  if (!tail) throw parameter_error("levy tail: tail function required");
  if (!(drift_alpha >= 0.0)) throw parameter_error("levy tail: drift must be non-negative");
  LevyTail l;
  l.name = std::move(name);
  l.tail = std::move(tail);
  l.density = std::move(density);
  l.inverse_tail = std::move(inverse_tail);
  l.drift_alpha = drift_alpha;
  if (!(l.tail(1e12) < 1e-3 * std::max(1.0, l.tail(1.0)))) {
    throw parameter_error("levy tail: tail must vanish at infinity");
  }
  auto r = levy_integral(l, [](double s) { return s; }, 0.0, 1.0);
  // A finite small mean forces s Lambda-bar(s) -> 0; the quadrature alone cannot
  // see divergence below the smallest normal double.
  const double s0 = 1e-300;
  const bool vanishing = s0 * l.tail(s0) <= 1e-2 * std::max(1.0, std::abs(r.value));
  if (!r.converged || !std::isfinite(r.value) || !vanishing) {
    throw parameter_error("levy tail: int_0^1 s Lambda(ds) must be finite");
  }
  l.small_mean = r.value;
  return l;
}

/// The pair (F, Lambda) realizing the bivariate Levy measure Pi.
struct BivariateLevyView {
  WeightLawPtr weight;
  LevyTail levy;
  QuadOptions quad{};
};

/// Flat record comparing prelimit values with their limits along a grid.
struct ConvergenceReport {
  std::string label;
  std::string coordinate;            // name of the grid variable
  std::optional<double> n;           // sample size of the prelimit (if any)
  std::optional<double> fixed_value; // the other coordinate, when fixed
  std::vector<double> grid;
  std::vector<double> prelimit;
  std::vector<double> limit;
  std::vector<double> std_error;     // empty when the prelimit is exact
  double sup_abs_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  void finalize(double abs_tol, double se_multiplier = 0.0) {
    sup_abs_gap = 0.0;
    pass = true;
    tolerance = abs_tol;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double gap = std::abs(prelimit[i] - limit[i]);
      sup_abs_gap = std::max(sup_abs_gap, gap);
      const double allowed = abs_tol + (std_error.empty() ? 0.0 : se_multiplier * std_error[i]);
      if (!(gap <= allowed)) pass = false;
    }
  }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

// ---------------------------------------------------------------------------
// Tails
// ---------------------------------------------------------------------------

inline double lambda_bar(const LevyTail& levy, double v) {
  if (!(v > 0.0)) throw parameter_error("lambda_bar: v must be positive");
  return levy.tail(v);
}

/// n P{Y > a_n v}.
inline double prelimit_lambda_n(const MultiplierLaw& y, double n, double v) {
  if (!(n >= 1.0)) throw parameter_error("prelimit_lambda_n: n must be >= 1");
  if (!(v > 0.0)) throw parameter_error("prelimit_lambda_n: v must be positive");
  const double a = y.norming(n);
  if (std::isfinite(a) && std::isfinite(a * v)) return n * y.survival(a * v);
  return n * y.survival_at_log(y.log_norming(n) + std::log(v));
}

namespace detail {

inline std::vector<double> positive_scale_splits(const WeightLaw& f, double u, bool negative_side) {
  std::vector<double> out;
  auto add = [&](double x) {
    const double t = negative_side ? -x : x;
    if (t > 0.0) out.push_back(u / t);
  };
  for (double b : f.breakpoints()) add(b);
  for (const auto& a : f.atoms()) add(a.location);
  return out;
}

}  // namespace detail

/// Pi-bar(u, v) = int_{(v, inf)} F-bar(u/s) Lambda(ds).
inline double pi_bar(const BivariateLevyView& view, double u, double v) {
  if (!(u >= 0.0) || !(v >= 0.0)) throw parameter_error("pi_bar: u and v must be non-negative");
  if (u == 0.0 && v == 0.0) throw parameter_error("pi_bar: (u, v) = (0, 0) is excluded");
  const WeightLaw& f = *view.weight;
  if (u == 0.0) return f.survival(0.0) * lambda_bar(view.levy, v);
  auto g = [&](double s) { return f.survival(u / s); };
  auto r = levy_integral(view.levy, g, v, kInf, detail::positive_scale_splits(f, u, false), view.quad);
  return require_converged(r, "pi_bar");
}

/// Pi(-u, v) = int_{(v, inf)} F(-u/s) Lambda(ds).
inline double pi_neg(const BivariateLevyView& view, double u, double v) {
  if (!(u > 0.0) || !(v >= 0.0)) throw parameter_error("pi_neg: u must be positive and v non-negative");
  const WeightLaw& f = *view.weight;
  auto g = [&](double s) { return f.cdf(-u / s); };
  auto r = levy_integral(view.levy, g, v, kInf, detail::positive_scale_splits(f, u, true), view.quad);
  return require_converged(r, "pi_neg");
}

/// Conditional Monte Carlo estimate of n P{XY > a_n u, Y > a_n v} (u >= 0) or
/// n P{XY <= -a_n |u|, Y > a_n v} (u < 0): X is sampled, the Y-probability is
/// exact given X. For continuous Y, P{Y >= y} = P{Y > y} is used.
inline Estimate prelimit_pi_n(const WeightLaw& x, const MultiplierLaw& y, double n, double u, double v,
                              SeedStream stream, std::size_t draws = 1'000'000) {
  if (!(n >= 1.0)) throw parameter_error("prelimit_pi_n: n must be >= 1");
  if (!(v >= 0.0)) throw parameter_error("prelimit_pi_n: v must be non-negative");
  if (u == 0.0 && v == 0.0) throw parameter_error("prelimit_pi_n: (u, v) = (0, 0) is excluded");
  if (draws < 2) throw parameter_error("prelimit_pi_n: need at least two draws");
  const double log_a = y.log_norming(n);
  const double a = y.norming(n);
  const bool linear = std::isfinite(a);
  const double au = std::abs(u);
  auto term = [&](double xv) {
    const bool right_side = u > 0.0 ? xv > 0.0 : (u < 0.0 ? xv < 0.0 : xv > 0.0);
    if (!right_side) return 0.0;
    const double ratio = std::max(au / std::abs(xv), v);
    if (linear) {
      const double level = a * ratio;
      if (std::isfinite(level)) return n * y.survival(level);
    }
    return n * y.survival_at_log(log_a + std::log(ratio));
  };
  Rng rng(stream);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double t = term(x.sample(rng));
    const double d = t - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (t - mean);
  }
  const double var = m2 / static_cast<double>(draws - 1);
  return {mean, std::sqrt(var / static_cast<double>(draws)), draws};
}

// ---------------------------------------------------------------------------
// Drift and truncated moments
// ---------------------------------------------------------------------------

/// alpha_h = alpha + int_0^h z Lambda(dz).
inline double alpha_h(const LevyTail& levy, double h, const QuadOptions& opt = {}) {
  if (!(h > 0.0)) throw parameter_error("alpha_h: h must be positive");
  auto r = levy_integral(levy, [](double z) { return z; }, 0.0, h, {}, opt);
  return levy.drift_alpha + require_converged(r, "alpha_h");
}

/// Prelimit int_0^h v Lambda_n(dv) = (n / a_n) E[Y ; Y <= a_n h].
inline double alpha_h_prelimit(const MultiplierLaw& y, double n, double h) {
  if (!(h > 0.0)) throw parameter_error("alpha_h_prelimit: h must be positive");
  if (!(n >= 1.0)) throw parameter_error("alpha_h_prelimit: n must be >= 1");
  const double a = y.norming(n);
  if (!std::isfinite(a) || !std::isfinite(a * h)) {
    throw parameter_error("alpha_h_prelimit: norming constant overflows for law " + y.name());
  }
  return n / a * y.trunc_mean(a * h);
}

struct PhiPsi {
  double phi;
  double psi;
};

/// phi(v) = F(c) - F(-c-) and psi(v) = v E[X ; |X| <= c], c = sqrt(h^2 - v^2)/v.
inline PhiPsi phi_psi(const BivariateLevyView& view, double v, double h) {
  if (!(h > 0.0)) throw parameter_error("phi_psi: h must be positive");
  if (!(v > 0.0) || v > h) throw parameter_error("phi_psi: v must lie in (0, h]");
  const WeightLaw& f = *view.weight;
  const double c = std::sqrt(std::max(0.0, h * h - v * v)) / v;
  const double phi = f.cdf(c) - f.cdf_left(-c);
  auto r = partial_expectation(f, [](double x) { return x; }, -c, c, {}, view.quad);
  return {phi, v * require_converged(r, "phi_psi")};
}

namespace detail {

// v-values in (0, h) where c(v) = sqrt(h^2 - v^2)/v crosses a breakpoint or an
// atom of F in absolute value: v = h / sqrt(1 + b^2).
inline std::vector<double> disk_splits(const WeightLaw& f, double h) {
  std::vector<double> out;
  auto add = [&](double b) {
    if (b != 0.0 && std::isfinite(b)) out.push_back(h / std::sqrt(1.0 + b * b));
  };
  for (double b : f.breakpoints()) add(b);
  for (const auto& a : f.atoms()) add(a.location);
  return out;
}

// E[g(X) ; |X| <= c] with a small-tolerance inner quadrature.
template <class G>
double inner_moment(const BivariateLevyView& view, double c, const G& g) {
  QuadOptions inner = view.quad;
  inner.abs_tol = std::max(1e-13, view.quad.abs_tol * 1e-2);
  auto r = partial_expectation(*view.weight, g, -c, c, {}, inner);
  return require_converged(r, "inner moment");
}

inline double disk_c(double v, double h) { return std::sqrt(std::max(0.0, h * h - v * v)) / v; }

}  // namespace detail

struct TruncatedFirstMoments {
  double y_part;   // alpha + int_0^h phi(v) v Lambda(dv)
  double xy_part;  // alpha E X + int_0^h psi(v) Lambda(dv)
};

inline TruncatedFirstMoments truncated_first_moments(const BivariateLevyView& view, double h) {
  if (!(h > 0.0)) throw parameter_error("truncated_first_moments: h must be positive");
  const WeightLaw& f = *view.weight;
  const auto splits = detail::disk_splits(f, h);
  auto phi_term = [&](double v) {
    const double c = detail::disk_c(v, h);
    return (f.cdf(c) - f.cdf_left(-c)) * v;
  };
  auto psi_term = [&](double v) {
    const double c = detail::disk_c(v, h);
    return v * detail::inner_moment(view, c, [](double x) { return x; });
  };
  const double alpha = view.levy.drift_alpha;
  const double y_int = require_converged(levy_integral(view.levy, phi_term, 0.0, h, splits, view.quad), "y_part");
  const double xy_int = require_converged(levy_integral(view.levy, psi_term, 0.0, h, splits, view.quad), "xy_part");
  const double drift_x = alpha == 0.0 ? 0.0 : alpha * f.mean();
  return {alpha + y_int, drift_x + xy_int};
}

struct TruncatedSecondMoments {
  double uu;     // int_{B_h} u^2 Pi(du, dv)
  double vv;     // int_{B_h} v^2 Pi(du, dv)
  double uv;     // int_{B_h} u v Pi(du, dv)
  double abs_u;  // int_{B_h} |u| Pi(du, dv)
};

inline TruncatedSecondMoments truncated_second_moments(const BivariateLevyView& view, double h) {
  if (!(h > 0.0)) throw parameter_error("truncated_second_moments: h must be positive");
  const WeightLaw& f = *view.weight;
  const auto splits = detail::disk_splits(f, h);
  auto integral = [&](auto inner_g, double v_power, const char* what) {
    auto term = [&](double v) {
      const double c = detail::disk_c(v, h);
      return std::pow(v, v_power) * detail::inner_moment(view, c, inner_g);
    };
    return require_converged(levy_integral(view.levy, term, 0.0, h, splits, view.quad), what);
  };
  TruncatedSecondMoments m{};
  m.uu = integral([](double x) { return x * x; }, 2.0, "uu");
  m.uv = integral([](double x) { return x; }, 2.0, "uv");
  m.abs_u = integral([](double x) { return std::abs(x); }, 1.0, "abs_u");
  auto vv_term = [&](double v) {
    const double c = detail::disk_c(v, h);
    return v * v * (f.cdf(c) - f.cdf_left(-c));
  };
  m.vv = require_converged(levy_integral(view.levy, vv_term, 0.0, h, splits, view.quad), "vv");
  return m;
}

struct SmallHScanRow {
  double h;
  TruncatedSecondMoments moments;
};

/// Second moments along h = 2^-k, k = 0..k_max.
inline std::vector<SmallHScanRow> small_h_scan(const BivariateLevyView& view, int k_max = 10) {
  std::vector<SmallHScanRow> rows;
  for (int k = 0; k <= k_max; ++k) {
    const double h = std::ldexp(1.0, -k);
    rows.push_back({h, truncated_second_moments(view, h)});
  }
  return rows;
}

struct PrelimitTruncatedMoments {
  Estimate y_part, xy_part, uu, vv, uv;
};

/// Prelimit truncated moments (n/a_n) E[(Y, XY) ; |(XY, Y)| <= a_n h] and
/// (n/a_n^2) E[((XY)^2, Y^2, XY^2) ; ...] by conditional Monte Carlo: the disk
/// condition is Y <= a_n h / sqrt(1 + X^2) and the Y-expectations are exact.
inline PrelimitTruncatedMoments prelimit_truncated_moments(const WeightLaw& x, const MultiplierLaw& y, double n,
                                                           double h, SeedStream stream,
                                                           std::size_t draws = 1'000'000) {
  if (!(h > 0.0)) throw parameter_error("prelimit_truncated_moments: h must be positive");
  if (!(n >= 1.0)) throw parameter_error("prelimit_truncated_moments: n must be >= 1");
  if (draws < 2) throw parameter_error("prelimit_truncated_moments: need at least two draws");
  const double a = y.norming(n);
  if (!std::isfinite(a) || !std::isfinite(a * a)) {
    throw parameter_error("prelimit_truncated_moments: norming constant overflows for law " + y.name());
  }
  struct Acc {
    double mean = 0.0, m2 = 0.0;
    void add(double t, std::size_t k) {
      const double d = t - mean;
      mean += d / static_cast<double>(k);
      m2 += d * (t - mean);
    }
    Estimate done(std::size_t k) const { return {mean, std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k)), k}; }
  };
  Acc y1, xy1, uu, vv, uv;
  Rng rng(stream);
  const double first_scale = n / a;
  const double second_scale = n / (a * a);
  for (std::size_t i = 1; i <= draws; ++i) {
    const double xv = x.sample(rng);
    const double cut = a * h / std::sqrt(1.0 + xv * xv);
    const double m1 = y.trunc_mean(cut);
    const double m2v = y.trunc_second(cut);
    y1.add(first_scale * m1, i);
    xy1.add(first_scale * xv * m1, i);
    vv.add(second_scale * m2v, i);
    uu.add(second_scale * xv * xv * m2v, i);
    uv.add(second_scale * xv * m2v, i);
  }
  return {y1.done(draws), xy1.done(draws), uu.done(draws), vv.done(draws), uv.done(draws)};
}

// ---------------------------------------------------------------------------
// Convergence scan
// ---------------------------------------------------------------------------

struct LevyGrid {
  std::vector<double> v_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> u_grid{0.5, 1.0, 2.0};
  double pi_v = 0.0;
  std::size_t mc_draws = 1'000'000;
};

struct LevyConvergenceScan {
  std::vector<ConvergenceReport> lambda_reports;  // one per n
  std::vector<ConvergenceReport> pi_reports;      // one per n
  std::vector<ConvergenceReport> increment_reports;  // Lambda_n((v_i, v_{i+1}]) per n
  bool monotone_improvement = true;
  bool all_pass = true;
};

/// Compares n P{Y > a_n v} with Lambda-bar(v) on the v-grid and the conditional
/// Monte Carlo n P{XY > a_n u, Y > a_n v} with Pi-bar(u, v) on the u-grid, for
/// each n. Grid points must avoid discontinuities of the limit. The Lambda-bar
/// comparison passes at 1e-12 relative; the Pi-bar one within 3 standard
/// errors.
inline LevyConvergenceScan check_levy_convergence(const WeightLaw& x, const MultiplierLaw& y,
                                                  const BivariateLevyView& view, const std::vector<double>& n_list,
                                                  const LevyGrid& grid, SeedStream stream) {
  LevyConvergenceScan scan;
  double prev_lambda = kInf, prev_pi = kInf;
  std::vector<double> pi_limits;
  for (double u : grid.u_grid) pi_limits.push_back(pi_bar(view, u, grid.pi_v));
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const double n = n_list[k];
    ConvergenceReport lam;
    lam.label = "lambda_bar";
    lam.coordinate = "v";
    lam.n = n;
    double scale = 0.0;
    for (double v : grid.v_grid) {
      lam.grid.push_back(v);
      lam.prelimit.push_back(prelimit_lambda_n(y, n, v));
      lam.limit.push_back(lambda_bar(view.levy, v));
      scale = std::max(scale, std::abs(lam.limit.back()));
    }
    lam.finalize(1e-12 * std::max(1.0, scale));

    ConvergenceReport inc;
    inc.label = "lambda_increments";
    inc.coordinate = "v_left";
    inc.n = n;
    for (std::size_t i = 0; i + 1 < grid.v_grid.size(); ++i) {
      inc.grid.push_back(grid.v_grid[i]);
      inc.prelimit.push_back(lam.prelimit[i] - lam.prelimit[i + 1]);
      inc.limit.push_back(lam.limit[i] - lam.limit[i + 1]);
    }
    inc.finalize(1e-12 * std::max(1.0, scale));

    ConvergenceReport pi;
    pi.label = "pi_bar";
    pi.coordinate = "u";
    pi.n = n;
    pi.fixed_value = grid.pi_v;
    for (std::size_t i = 0; i < grid.u_grid.size(); ++i) {
      const double u = grid.u_grid[i];
      const auto est = prelimit_pi_n(x, y, n, u, grid.pi_v, stream.substream(k * 1000 + i), grid.mc_draws);
      pi.grid.push_back(u);
      pi.prelimit.push_back(est.value);
      pi.std_error.push_back(est.std_error);
      pi.limit.push_back(pi_limits[i]);
    }
    pi.finalize(1e-9, 3.0);

    if (lam.sup_abs_gap > prev_lambda * (1.0 + 1e-9) + 1e-15) scan.monotone_improvement = false;
    prev_lambda = lam.sup_abs_gap;
    prev_pi = std::min(prev_pi, pi.sup_abs_gap);
    scan.all_pass = scan.all_pass && lam.pass && pi.pass;
    scan.lambda_reports.push_back(std::move(lam));
    scan.pi_reports.push_back(std::move(pi));
    scan.increment_reports.push_back(std::move(inc));
  }
  return scan;
}

}  // namespace selfnorm
