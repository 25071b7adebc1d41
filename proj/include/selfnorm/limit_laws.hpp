#pragma once

// Limit law of T_n = sum X_i Y_i / sum Y_i for Y in the domain of attraction
// of a positive stable law of index beta < 1:
//
//   P{T <= x} = 1/2 + (1/(pi beta)) arctan( I_s(x)/I_a(x) tan(pi beta/2) ),
//   I_s(x) = int |u-x|^beta sgn(x-u) F(du),   I_a(x) = int |u-x|^beta F(du),
//
// together with its upper-tail expansion and the product-tail ratio
// P{XY > y} / P{Y > y}.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "selfnorm/distributions.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/levy_calculus.hpp"
#include "selfnorm/quadrature.hpp"

namespace selfnorm {

struct BreimanLimit {
  double beta;
  WeightLawPtr weight;
  QuadOptions quad{1e-11, 1e-12, 4000};
  /// Declared margin eps with E|X|^(beta+eps) < inf.
  double moment_margin = 0.05;

  BreimanLimit(double beta_, WeightLawPtr weight_, QuadOptions quad_ = {1e-11, 1e-12, 4000},
               double moment_margin_ = 0.05)
      : beta(beta_), weight(std::move(weight_)), quad(quad_), moment_margin(moment_margin_) {
    if (!(beta > 0.0 && beta < 1.0)) throw parameter_error("breiman limit: beta must lie in (0,1)");
    if (!weight) throw parameter_error("breiman limit: weight law required");
    if (!(moment_margin > 0.0)) throw parameter_error("breiman limit: moment margin must be positive");
    const double b = beta + moment_margin;
    if (!std::isfinite(weight->beta_moment_pos(b) + weight->beta_moment_neg(b))) {
      throw parameter_error("breiman limit: E|X|^(beta+eps) must be finite for the declared eps");
    }
  }
};

/// tan(pi beta/2) / (pi beta (1 + tan^2(pi beta/2))) = sin(pi beta) / (2 pi beta).
inline double breiman_tail_prefactor(double beta) {
  const double t = std::tan(std::numbers::pi * beta / 2.0);
  return t / (std::numbers::pi * beta * (1.0 + t * t));
}

struct BreimanIntegrals {
  double left;   // int_{u<x} (x-u)^beta F(du)
  double right;  // int_{u>x} (u-x)^beta F(du)
  double i_s() const { return left - right; }
  double i_a() const { return left + right; }
};

inline BreimanIntegrals breiman_integrals(const BreimanLimit& lim, double x) {
  const double b = lim.beta;
  const WeightLaw& f = *lim.weight;
  // An atom exactly at x contributes |0|^beta = 0 to both sides (sgn(0) = 0).
  auto l = partial_expectation(f, [x, b](double u) { return u < x ? std::pow(x - u, b) : 0.0; }, -kInf, x, {}, lim.quad);
  auto r = partial_expectation(f, [x, b](double u) { return u > x ? std::pow(u - x, b) : 0.0; }, x, kInf, {}, lim.quad);
  return {require_converged(l, "breiman left integral"), require_converged(r, "breiman right integral")};
}

struct CheckedCdf {
  double value;
  bool degenerate;  // I_a(x) = 0: F is a point mass at x, value is the convention 1/2
};

inline CheckedCdf breiman_cdf_checked(const BreimanLimit& lim, double x) {
  if (std::isnan(x)) throw parameter_error("breiman_cdf: NaN argument");
  if (x == -kInf) return {0.0, false};
  if (x == kInf) return {1.0, false};
  const auto in = breiman_integrals(lim, x);
  const double ia = in.i_a();
  if (!(ia > 0.0)) return {0.5, true};
  const double ratio = std::clamp(in.i_s() / ia, -1.0, 1.0);
  const double b = lim.beta;
  const double v = 0.5 + std::atan(ratio * std::tan(std::numbers::pi * b / 2.0)) / (std::numbers::pi * b);
  return {std::clamp(v, 0.0, 1.0), false};
}

inline double breiman_cdf(const BreimanLimit& lim, double x) { return breiman_cdf_checked(lim, x).value; }

/// int_x^inf (u/x - 1)^beta F(du), x > 0.
inline double breiman_tail_integral(const BreimanLimit& lim, double x) {
  if (!(x > 0.0)) throw parameter_error("breiman tail: x must be positive");
  const double b = lim.beta;
  auto r = partial_expectation(*lim.weight, [x, b](double u) { return u > x ? std::pow(u / x - 1.0, b) : 0.0; }, x, kInf,
                               {}, lim.quad);
  return require_converged(r, "breiman tail integral");
}

/// Asymptotic upper tail 2 int_x^inf (u/x-1)^beta F(du) tan(pi beta/2)/(pi beta (1+tan^2(pi beta/2))).
inline double breiman_tail(const BreimanLimit& lim, double x) {
  return 2.0 * breiman_tail_prefactor(lim.beta) * breiman_tail_integral(lim, x);
}

struct TailBounds {
  double lower;  // 2 c (1 - F(2x))
  double upper;  // 2 c (1 - F(x) + beta x^-beta int_x^inf (1 - F(u)) u^(beta-1) du)
};

inline TailBounds breiman_tail_bounds(const BreimanLimit& lim, double x) {
  if (!(x > 0.0)) throw parameter_error("breiman tail bounds: x must be positive");
  const double b = lim.beta;
  const WeightLaw& f = *lim.weight;
  const double c = 2.0 * breiman_tail_prefactor(b);
  std::vector<double> splits = f.breakpoints();
  for (const auto& a : f.atoms()) splits.push_back(a.location);
  auto r = integrate_split([&](double u) { return f.survival(u) * std::pow(u, b - 1.0); }, x, kInf, splits, lim.quad);
  const double integral = require_converged(r, "breiman tail upper bound");
  return {c * f.survival(2.0 * x), c * (f.survival(x) + b * std::pow(x, -b) * integral)};
}

/// lim P{T > x}/(1 - F(x)) when 1 - F is regularly varying with index -alpha_rv:
/// 2 beta int_1^inf y^-alpha (y-1)^(beta-1) dy times the tail prefactor.
/// The integral is evaluated as (1/beta) int_0^inf (1 + w^(1/beta))^-alpha dw.
inline double regvar_tail_constant(double beta, double alpha_rv, const QuadOptions& opt = {1e-13, 1e-13, 4000}) {
  if (!(beta > 0.0 && beta < 1.0)) throw parameter_error("regvar_tail_constant: beta must lie in (0,1)");
  if (!(alpha_rv > beta) || !std::isfinite(alpha_rv)) {
    throw parameter_error("regvar_tail_constant: alpha must exceed beta");
  }
  auto r = integrate([beta, alpha_rv](double w) { return std::pow(1.0 + std::pow(w, 1.0 / beta), -alpha_rv); }, 0.0,
                     kInf, opt);
  return 2.0 * require_converged(r, "regvar tail constant") * breiman_tail_prefactor(beta);
}

/// Smallest x with breiman_cdf(x) >= p, located by bracketing and TOMS 748.
inline double breiman_quantile(const BreimanLimit& lim, double p) {
  if (!(p > 0.0 && p < 1.0)) throw parameter_error("breiman_quantile: p must lie in (0,1)");
  auto g = [&](double x) { return breiman_cdf(lim, x) - p; };
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 200 && g(lo) > 0.0; ++i) lo *= 2.0;
  for (int i = 0; i < 200 && g(hi) < 0.0; ++i) hi *= 2.0;
  const double glo = g(lo), ghi = g(hi);
  if (glo > 0.0 || ghi < 0.0) throw numeric_failure("breiman_quantile: could not bracket", lo, hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                  boost::math::tools::eps_tolerance<double>(45), iters);
  return 0.5 * (a + b);
}

struct ProductTailReport {
  ConvergenceReport positive;  // P{XY > y} / G-bar(y)  vs  int_0^inf x^beta F(dx)
  ConvergenceReport negative;  // P{XY < -y} / G-bar(y) vs  int_-inf^0 (-x)^beta F(dx)
};

/// Evaluates P{XY > y}/G-bar(y) = E[G-bar(y/X); X > 0]/G-bar(y) (and the mirrored
/// negative branch) by quadrature over F along y_grid.
inline ProductTailReport product_tail_ratio(const WeightLaw& x, const MultiplierLaw& y, const std::vector<double>& y_grid,
                                            double rel_tol = 0.05, const QuadOptions& opt = {1e-12, 1e-10, 4000}) {
  const TailClass tc = y.tail_class();
  if (tc.kind != TailKind::pareto) throw parameter_error("product_tail_ratio: Y must have a pareto tail class");
  const double beta = tc.beta;
  if (!std::isfinite(x.beta_moment_pos(beta)) || !std::isfinite(x.beta_moment_neg(beta))) {
    throw parameter_error("product_tail_ratio: E|X|^beta must be finite");
  }
  ProductTailReport rep;
  rep.positive.label = "product_tail_positive";
  rep.negative.label = "product_tail_negative";
  rep.positive.coordinate = rep.negative.coordinate = "y";
  const double lim_pos = x.beta_moment_pos(beta);
  const double lim_neg = x.beta_moment_neg(beta);
  for (double t : y_grid) {
    if (!(t > 0.0)) throw parameter_error("product_tail_ratio: grid points must be positive");
    const double gbar = y.survival(t);
    if (!(gbar > 0.0)) throw parameter_error("product_tail_ratio: G-bar vanishes on the grid");
    // y/x crosses the support minimum of Y at x = y / support_min.
    std::vector<double> splits{t / std::max(y.support_min(), 1e-300), -t / std::max(y.support_min(), 1e-300)};
    auto pos = partial_expectation(x, [&](double u) { return u > 0.0 ? y.survival(t / u) : 0.0; }, 0.0, kInf, splits, opt);
    auto neg = partial_expectation(x, [&](double u) { return u < 0.0 ? y.survival(-t / u) : 0.0; }, -kInf, 0.0, splits, opt);
    rep.positive.grid.push_back(t);
    rep.negative.grid.push_back(t);
    rep.positive.prelimit.push_back(require_converged(pos, "product tail (positive)") / gbar);
    rep.negative.prelimit.push_back(require_converged(neg, "product tail (negative)") / gbar);
    rep.positive.limit.push_back(lim_pos);
    rep.negative.limit.push_back(lim_neg);
  }
  rep.positive.finalize(rel_tol * std::max(lim_pos, 1e-300));
  rep.negative.finalize(rel_tol * std::max(lim_neg, 1e-300));
  return rep;
}

}  // namespace selfnorm
