#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "selfnorm/levy_calculus.hpp"

using namespace selfnorm;

namespace {

BivariateLevyView view_of(WeightSpec spec, double beta, double drift = 0.0) {
  return {make_weight_law(spec), stable_levy_tail(beta, drift), {1e-11, 1e-12, 4000}};
}

WeightSpec point_mass(double c) {
  WeightSpec s{WeightSpec::Kind::point_mass};
  s.c = c;
  return s;
}

// Pi-bar(u, v) = E[Lambda-bar(max(v, u/X)) ; X > 0] for X uniform on (0,1),
// integrated directly against the density of X.
double uniform_pi_bar_oracle(double beta, double u, double v) {
  auto f = [&](double x) { return std::pow(std::max(v, u / x), -beta); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  if (v > 0.0 && u / v < 1.0) return GK::integrate(f, 0.0, u / v, 15, 1e-13) + GK::integrate(f, u / v, 1.0, 15, 1e-13);
  return GK::integrate(f, 0.0, 1.0, 15, 1e-13);
}

}  // namespace

TEST(LevyTail, StableClosedForms) {
  auto l = stable_levy_tail(0.5);
  EXPECT_DOUBLE_EQ(lambda_bar(l, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(lambda_bar(l, 4.0), 0.5);
  EXPECT_DOUBLE_EQ(l.small_mean, 1.0);
  EXPECT_THROW(lambda_bar(l, 0.0), parameter_error);
  EXPECT_THROW(stable_levy_tail(1.0), parameter_error);
  EXPECT_THROW(stable_levy_tail(0.5, -1.0), parameter_error);
}

TEST(LevyTail, GammaProcessSmallMean) {
  auto l = make_levy_tail(
      "gamma", [](double v) { return boost::math::expint(1, v); }, [](double v) { return std::exp(-v) / v; });
  EXPECT_NEAR(l.small_mean, 1.0 - std::exp(-1.0), 1e-9);
  EXPECT_NEAR(inverse_levy_tail(l, l.tail(0.37)), 0.37, 1e-9);
  EXPECT_NEAR(alpha_h(l, 2.0), 1.0 - std::exp(-2.0), 1e-9);
}

TEST(LevyTail, RejectsInvalidMeasures) {
  EXPECT_THROW(make_levy_tail("flat", [](double) { return 1.0; }), parameter_error);
  EXPECT_THROW(make_levy_tail(
                   "heavy", [](double v) { return std::pow(v, -1.5); },
                   [](double v) { return 1.5 * std::pow(v, -2.5); }),
               parameter_error);
  EXPECT_THROW(make_levy_tail("neg", [](double v) { return std::exp(-v); }, {}, -0.1), parameter_error);
}

TEST(PiBar, Examples) {
  auto u = view_of({WeightSpec::Kind::uniform01}, 0.5);
  EXPECT_NEAR(pi_bar(u, 1.0, 0.0), 2.0 / 3.0, 1e-9);
  auto one = view_of(point_mass(1.0), 0.5);
  EXPECT_NEAR(pi_bar(one, 0.0, 1.0), 1.0, 1e-12);
  auto r = view_of({WeightSpec::Kind::rademacher}, 0.5);
  EXPECT_NEAR(pi_neg(r, 1.0, 1.0), 0.5, 1e-9);
  EXPECT_NEAR(pi_bar(r, 1.0, 1.0), 0.5, 1e-9);
  EXPECT_THROW(pi_bar(u, 0.0, 0.0), parameter_error);
}

TEST(PiBar, MatchesFubiniOracle) {
  for (double beta : {0.3, 0.5, 0.8}) {
    auto view = view_of({WeightSpec::Kind::uniform01}, beta);
    for (double u : {0.1, 0.5, 1.0, 3.0}) {
      for (double v : {0.0, 0.25, 1.0, 2.0}) {
        EXPECT_NEAR(pi_bar(view, u, v), uniform_pi_bar_oracle(beta, u, v), 1e-8)
            << "beta=" << beta << " u=" << u << " v=" << v;
      }
    }
  }
}

TEST(PiBar, StableScalingIdentity) {
  // Pi-bar(u, 0) = u^-beta E[(X^+)^beta] for stable Lambda.
  for (auto k : {WeightSpec::Kind::uniform01, WeightSpec::Kind::standard_gaussian, WeightSpec::Kind::rademacher}) {
    auto view = view_of({k}, 0.5);
    for (double u : {0.2, 1.0, 7.0}) {
      EXPECT_NEAR(pi_bar(view, u, 0.0), std::pow(u, -0.5) * view.weight->beta_moment_pos(0.5), 1e-8);
      EXPECT_NEAR(pi_neg(view, u, 0.0), std::pow(u, -0.5) * view.weight->beta_moment_neg(0.5), 1e-8);
    }
  }
}

TEST(PiBar, MonotoneAndBoundedByLambda) {
  auto view = view_of({WeightSpec::Kind::standard_gaussian}, 0.5);
  for (double v : {0.1, 1.0, 3.0}) {
    double prev = kInf;
    for (double u = 0.01; u < 100.0; u *= 1.7) {
      const double p = pi_bar(view, u, v);
      EXPECT_LE(p, prev + 1e-12);
      EXPECT_LE(p, lambda_bar(view.levy, v) * view.weight->survival(0.0) + 1e-12);
      prev = p;
    }
  }
}

TEST(PiBar, PointMassReducesToLambda) {
  auto view = view_of(point_mass(2.0), 0.5);
  for (double u : {0.5, 1.0, 4.0}) {
    for (double v : {0.25, 1.0, 3.0}) {
      EXPECT_NEAR(pi_bar(view, u, v), std::pow(std::max(v, u / 2.0), -0.5), 1e-10);
    }
  }
}

TEST(Prelimit, LambdaExactForPareto) {
  auto y = make_pareto_multiplier(0.5);
  auto l = stable_levy_tail(0.5);
  for (double n : {1e2, 1e4, 1e6}) {
    for (double v : {0.25, 1.0, 4.0}) EXPECT_NEAR(prelimit_lambda_n(*y, n, v), lambda_bar(l, v), 1e-13);
  }
}

TEST(Prelimit, SlowlyVaryingMassEscapes) {
  // n P{Y > a_n v} = n / (n + ln v) -> 1 for every fixed v > 0.
  auto y = make_slowly_varying_multiplier();
  EXPECT_NEAR(prelimit_lambda_n(*y, 1e6, 1.0), 1.0, 1e-12);
  for (double v : {0.5, 2.0, 100.0}) {
    EXPECT_NEAR(prelimit_lambda_n(*y, 1e6, v), 1e6 / (1e6 + std::log(v)), 1e-12);
  }
}

TEST(Prelimit, PointMassPiIsExact) {
  WeightSpec s = point_mass(1.0);
  auto x = make_weight_law(s);
  auto y = make_pareto_multiplier(0.5);
  for (double u : {0.5, 2.0}) {
    for (double v : {0.25, 1.0}) {
      const auto e = prelimit_pi_n(*x, *y, 1e4, u, v, SeedStream{1, 0}, 100);
      EXPECT_NEAR(e.value, prelimit_lambda_n(*y, 1e4, std::max(u, v)), 1e-13);
      EXPECT_EQ(e.std_error, 0.0);
    }
  }
}

TEST(Prelimit, PiConvergesForUniformWeights) {
  auto x = make_weight_law({WeightSpec::Kind::uniform01});
  auto y = make_pareto_multiplier(0.5);
  auto view = view_of({WeightSpec::Kind::uniform01}, 0.5);
  for (double u : {0.5, 2.0}) {
    const auto e = prelimit_pi_n(*x, *y, 1e6, u, 0.5, SeedStream{9, 0}, 200000);
    EXPECT_NEAR(e.value, pi_bar(view, u, 0.5), 4.0 * e.std_error + 1e-6);
  }
}

TEST(Prelimit, NegativeSideForRademacher) {
  auto x = make_weight_law({WeightSpec::Kind::rademacher});
  auto y = make_pareto_multiplier(0.5);
  const auto e = prelimit_pi_n(*x, *y, 1e6, -1.0, 1.0, SeedStream{2, 0}, 400000);
  EXPECT_NEAR(e.value, 0.5, 4.0 * e.std_error);
}

TEST(Drift, AlphaHStableClosedForm) {
  for (double beta : {0.3, 0.5, 0.8}) {
    auto l = stable_levy_tail(beta, 0.25);
    double prev = kInf;
    for (double h : {4.0, 1.0, 0.25, 1e-2, 1e-4}) {
      const double a = alpha_h(l, h);
      EXPECT_NEAR(a, 0.25 + beta / (1.0 - beta) * std::pow(h, 1.0 - beta), 1e-9);
      EXPECT_LT(a, prev);
      prev = a;
    }
  }
}

TEST(Drift, AlphaHPrelimitForPareto) {
  // (n / a_n) E[Y ; Y <= a_n h] = sqrt(h) - 1/n for Pareto(1/2).
  auto y = make_pareto_multiplier(0.5);
  for (double h : {0.5, 1.0, 3.0}) EXPECT_NEAR(alpha_h_prelimit(*y, 1e4, h), std::sqrt(h) - 1e-4, 1e-12);
}

TEST(PhiPsi, LimitsAsVShrinks) {
  auto view = view_of({WeightSpec::Kind::standard_gaussian}, 0.5);
  double prev = 0.0;
  for (double v : {0.9, 0.5, 0.1, 1e-3, 1e-6}) {
    const auto pp = phi_psi(view, v, 1.0);
    EXPECT_GE(pp.phi, prev);
    prev = pp.phi;
  }
  EXPECT_NEAR(prev, 1.0, 1e-9);
  auto u = view_of({WeightSpec::Kind::uniform01}, 0.5);
  EXPECT_NEAR(phi_psi(u, 1e-6, 1.0).psi / 1e-6, 0.5, 1e-9);
  EXPECT_THROW(phi_psi(u, 2.0, 1.0), parameter_error);
}

TEST(TruncatedMoments, PointMassClosedForms) {
  const double c = 1.5, beta = 0.5, h = 2.0, drift = 0.1;
  auto view = view_of(point_mass(c), beta, drift);
  const double m = h / std::sqrt(1.0 + c * c);
  const double first = beta / (1.0 - beta) * std::pow(m, 1.0 - beta);
  const double second = beta / (2.0 - beta) * std::pow(m, 2.0 - beta);
  const auto f = truncated_first_moments(view, h);
  EXPECT_NEAR(f.y_part, drift + first, 1e-9);
  EXPECT_NEAR(f.xy_part, c * (drift + first), 1e-9);
  const auto s = truncated_second_moments(view, h);
  EXPECT_NEAR(s.vv, second, 1e-9);
  EXPECT_NEAR(s.uu, c * c * second, 1e-9);
  EXPECT_NEAR(s.uv, c * second, 1e-9);
  EXPECT_NEAR(s.abs_u, c * first, 1e-9);
}

TEST(TruncatedMoments, UniformVvMatchesDirectQuadrature) {
  // vv = int_0^h v^2 P{|X| <= c(v)} beta v^{-beta-1} dv with P = min(1, c).
  const double beta = 0.5, h = 1.3;
  auto view = view_of({WeightSpec::Kind::uniform01}, beta);
  auto g = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double c = std::sqrt(h * h - v * v) / v;
    return std::min(1.0, c) * beta * std::pow(v, 1.0 - beta);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double knee = h / std::sqrt(2.0);
  const double oracle = ts.integrate(g, 0.0, knee) + ts.integrate(g, knee, h);
  EXPECT_NEAR(truncated_second_moments(view, h).vv, oracle, 1e-9);
}

TEST(TruncatedMoments, SymmetricWeightsHaveNoCrossTerms) {
  for (auto k : {WeightSpec::Kind::rademacher, WeightSpec::Kind::standard_gaussian}) {
    auto view = view_of({k}, 0.5);
    EXPECT_NEAR(truncated_first_moments(view, 1.0).xy_part, 0.0, 1e-10);
    EXPECT_NEAR(truncated_second_moments(view, 1.0).uv, 0.0, 1e-10);
  }
}

TEST(TruncatedMoments, DiskBounds) {
  for (auto k : {WeightSpec::Kind::uniform01, WeightSpec::Kind::standard_gaussian, WeightSpec::Kind::rademacher}) {
    auto view = view_of({k}, 0.5);
    for (double h : {0.1, 1.0, 5.0}) {
      const auto f = truncated_first_moments(view, h);
      const auto s = truncated_second_moments(view, h);
      EXPECT_LE(s.vv, h * f.y_part * (1.0 + 1e-9));
      EXPECT_LE(s.uu, h * s.abs_u * (1.0 + 1e-9));
      EXPECT_LE(std::abs(s.uv), std::sqrt(s.uu * s.vv) * (1.0 + 1e-9));
    }
  }
}

TEST(TruncatedMoments, SmallHScanIsSelfSimilarForStable) {
  const double beta = 0.5;
  auto view = view_of({WeightSpec::Kind::uniform01}, beta);
  const auto rows = small_h_scan(view, 10);
  ASSERT_EQ(rows.size(), 11u);
  for (const auto& r : rows) {
    const double scale = std::pow(r.h, 2.0 - beta);
    EXPECT_NEAR(r.moments.vv / scale, rows[0].moments.vv, 1e-8);
    EXPECT_NEAR(r.moments.uu / scale, rows[0].moments.uu, 1e-8);
  }
  EXPECT_LT(rows.back().moments.vv, 1e-4 * rows.front().moments.vv);
}

TEST(TruncatedMoments, PrelimitMatchesLimit) {
  auto x = make_weight_law({WeightSpec::Kind::uniform01});
  auto y = make_pareto_multiplier(0.5);
  auto view = view_of({WeightSpec::Kind::uniform01}, 0.5);
  const auto p = prelimit_truncated_moments(*x, *y, 1e6, 1.0, SeedStream{4, 0}, 200000);
  const auto f = truncated_first_moments(view, 1.0);
  const auto s = truncated_second_moments(view, 1.0);
  EXPECT_NEAR(p.y_part.value, f.y_part, 4.0 * p.y_part.std_error + 1e-5);
  EXPECT_NEAR(p.xy_part.value, f.xy_part, 4.0 * p.xy_part.std_error + 1e-5);
  EXPECT_NEAR(p.vv.value, s.vv, 4.0 * p.vv.std_error + 1e-5);
  EXPECT_NEAR(p.uu.value, s.uu, 4.0 * p.uu.std_error + 1e-5);
  EXPECT_NEAR(p.uv.value, s.uv, 4.0 * p.uv.std_error + 1e-5);
}

TEST(ConvergenceScan, ParetoUniformPasses) {
  auto x = make_weight_law({WeightSpec::Kind::uniform01});
  auto y = make_pareto_multiplier(0.5);
  auto view = view_of({WeightSpec::Kind::uniform01}, 0.5);
  LevyGrid grid;
  grid.mc_draws = 100000;
  grid.pi_v = 0.5;
  const auto scan = check_levy_convergence(*x, *y, view, {1e2, 1e4, 1e6}, grid, SeedStream{8, 0});
  EXPECT_TRUE(scan.all_pass);
  EXPECT_TRUE(scan.monotone_improvement);
  ASSERT_EQ(scan.lambda_reports.size(), 3u);
  EXPECT_EQ(scan.increment_reports[0].grid.size(), grid.v_grid.size() - 1);
}
