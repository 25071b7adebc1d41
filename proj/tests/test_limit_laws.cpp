#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "selfnorm/limit_laws.hpp"

using namespace selfnorm;

namespace {

WeightLawPtr law(WeightSpec::Kind k) { return make_weight_law({k}); }

WeightLawPtr sym_pareto(double gamma) {
  WeightSpec s{WeightSpec::Kind::symmetric_pareto};
  s.gamma = gamma;
  return make_weight_law(s);
}

// 1/2 + atan(r tan(pi b/2))/(pi b), the arctan form written independently.
double arctan_form(double beta, double left, double right) {
  const double r = (left - right) / (left + right);
  return 0.5 + std::atan(r * std::tan(std::numbers::pi * beta / 2.0)) / (std::numbers::pi * beta);
}

}  // namespace

TEST(BreimanCdf, UniformMatchesClosedForm) {
  // For X ~ U(0,1): left = x^(b+1)/(b+1), right = (1-x)^(b+1)/(b+1).
  for (double beta : {0.3, 0.5, 0.8}) {
    BreimanLimit lim(beta, law(WeightSpec::Kind::uniform01));
    EXPECT_NEAR(breiman_cdf(lim, 0.5), 0.5, 1e-12);
    for (double x = 0.01; x < 1.0; x += 0.07) {
      EXPECT_NEAR(breiman_cdf(lim, x), arctan_form(beta, std::pow(x, beta + 1.0), std::pow(1.0 - x, beta + 1.0)), 1e-10)
          << "beta=" << beta << " x=" << x;
    }
  }
}

TEST(BreimanCdf, RademacherMatchesClosedForm) {
  BreimanLimit lim(0.5, law(WeightSpec::Kind::rademacher));
  for (double x = -0.95; x < 1.0; x += 0.1) {
    EXPECT_NEAR(breiman_cdf(lim, x), arctan_form(0.5, std::sqrt(x + 1.0), std::sqrt(1.0 - x)), 1e-12);
  }
  EXPECT_DOUBLE_EQ(breiman_cdf(lim, -1.5), 0.0);
  EXPECT_DOUBLE_EQ(breiman_cdf(lim, 1.5), 1.0);
}

TEST(BreimanCdf, GaussianMatchesQuadratureOracle) {
  const double beta = 0.5;
  BreimanLimit lim(beta, law(WeightSpec::Kind::standard_gaussian));
  boost::math::normal_distribution<double> nd;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (double x : {-1.3, -0.2, 0.0, 0.7, 2.5}) {
    const double left =
        GK::integrate([&](double u) { return std::pow(x - u, beta) * boost::math::pdf(nd, u); }, -40.0, x, 20, 1e-14);
    const double right =
        GK::integrate([&](double u) { return std::pow(u - x, beta) * boost::math::pdf(nd, u); }, x, 40.0, 20, 1e-14);
    EXPECT_NEAR(breiman_cdf(lim, x), arctan_form(beta, left, right), 1e-9) << "x=" << x;
  }
}

TEST(BreimanCdf, PointMassIsStepWithDegenerateFlag) {
  WeightSpec s{WeightSpec::Kind::point_mass};
  s.c = 2.0;
  BreimanLimit lim(0.5, make_weight_law(s));
  EXPECT_DOUBLE_EQ(breiman_cdf(lim, 1.999), 0.0);
  EXPECT_DOUBLE_EQ(breiman_cdf(lim, 2.001), 1.0);
  const auto at = breiman_cdf_checked(lim, 2.0);
  EXPECT_TRUE(at.degenerate);
  EXPECT_DOUBLE_EQ(at.value, 0.5);
  EXPECT_FALSE(breiman_cdf_checked(lim, 3.0).degenerate);
}

TEST(BreimanCdf, NonnegativeWeightsGiveZeroBelowOrigin) {
  BreimanLimit lim(0.5, law(WeightSpec::Kind::uniform01));
  EXPECT_DOUBLE_EQ(breiman_cdf(lim, -0.1), 0.0);
  EXPECT_DOUBLE_EQ(breiman_cdf(lim, -kInf), 0.0);
  EXPECT_DOUBLE_EQ(breiman_cdf(lim, kInf), 1.0);
  EXPECT_THROW(breiman_cdf(lim, kNaN), parameter_error);
}

TEST(BreimanCdf, MonotoneAndSymmetric) {
  for (auto w : {law(WeightSpec::Kind::standard_gaussian), sym_pareto(1.2)}) {
    BreimanLimit lim(0.5, w);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = -10.0 + 0.02 * i;
      const double f = breiman_cdf(lim, x);
      EXPECT_GE(f, prev - 1e-12) << w->name() << " x=" << x;
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
      EXPECT_NEAR(f + breiman_cdf(lim, -x), 1.0, 1e-10);
      prev = f;
    }
    EXPECT_NEAR(breiman_cdf(lim, 0.0), 0.5, 1e-12);
  }
}

TEST(BreimanCdf, QuantileInvertsCdf) {
  BreimanLimit lim(0.5, law(WeightSpec::Kind::uniform01));
  for (double p : {0.01, 0.25, 0.5, 0.9, 0.999}) EXPECT_NEAR(breiman_cdf(lim, breiman_quantile(lim, p)), p, 1e-10);
  EXPECT_NEAR(breiman_quantile(lim, 0.5), 0.5, 1e-10);
  EXPECT_THROW(breiman_quantile(lim, 1.0), parameter_error);
}

TEST(BreimanLimit, RejectsInvalidInputs) {
  EXPECT_THROW(BreimanLimit(1.0, law(WeightSpec::Kind::uniform01)), parameter_error);
  EXPECT_THROW(BreimanLimit(0.5, nullptr), parameter_error);
  // E|X|^(beta+eps) infinite for gamma = 0.52 and eps = 0.05.
  EXPECT_THROW(BreimanLimit(0.5, sym_pareto(0.52)), parameter_error);
  EXPECT_NO_THROW(BreimanLimit(0.5, sym_pareto(0.52), {}, 0.01));
}

TEST(BreimanTail, Prefactor) {
  EXPECT_NEAR(breiman_tail_prefactor(0.5), 1.0 / std::numbers::pi, 1e-15);
  for (double b : {0.1, 0.3, 0.7, 0.95}) {
    EXPECT_NEAR(breiman_tail_prefactor(b), std::sin(std::numbers::pi * b) / (2.0 * std::numbers::pi * b), 1e-14);
  }
}

TEST(BreimanTail, RegvarConstantMatchesBetaFunction) {
  // 2 beta int_1^inf y^-a (y-1)^(beta-1) dy = 2 beta B(beta, a - beta).
  for (double beta : {0.3, 0.5, 0.8}) {
    for (double a : {beta + 0.1, 0.8, 1.0, 1.7, 5.0}) {
      if (a <= beta) continue;
      const double oracle = 2.0 * beta * std::beta(beta, a - beta) * breiman_tail_prefactor(beta);
      EXPECT_NEAR(regvar_tail_constant(beta, a) / oracle, 1.0, 1e-8) << "beta=" << beta << " a=" << a;
    }
  }
  EXPECT_NEAR(regvar_tail_constant(0.5, 1.0), 1.0, 1e-10);
  EXPECT_NEAR(regvar_tail_constant(0.5, 0.8), 1.44972426, 1e-8);
  EXPECT_THROW(regvar_tail_constant(0.5, 0.5), parameter_error);
}

TEST(BreimanTail, RegvarConstantVanishesForLightTails) {
  double prev = kInf;
  for (double a : {1.0, 4.0, 16.0, 64.0, 256.0}) {
    const double c = regvar_tail_constant(0.5, a);
    EXPECT_LT(c, prev);
    prev = c;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(BreimanTail, ExactRatioForParetoWeights) {
  // For symmetric Pareto(gamma) the tail integral scales exactly as x^-gamma for x >= 1.
  const double beta = 0.5, gamma = 0.8;
  BreimanLimit lim(beta, sym_pareto(gamma));
  const double c = regvar_tail_constant(beta, gamma);
  for (int k = 0; k <= 20; k += 4) {
    const double x = std::ldexp(1.0, k);
    EXPECT_NEAR(breiman_tail(lim, x) / lim.weight->survival(x), c, 1e-6 * c) << "x=" << x;
  }
}

TEST(BreimanTail, WithinBounds) {
  for (auto w : {law(WeightSpec::Kind::standard_gaussian), sym_pareto(0.8), sym_pareto(1.5)}) {
    BreimanLimit lim(0.5, w);
    for (double x : {1.0, 2.0, 4.0, 16.0}) {
      const auto b = breiman_tail_bounds(lim, x);
      const double t = breiman_tail(lim, x);
      EXPECT_LE(b.lower, t * (1.0 + 1e-9)) << w->name() << " x=" << x;
      EXPECT_LE(t, b.upper * (1.0 + 1e-9)) << w->name() << " x=" << x;
    }
  }
}

TEST(BreimanTail, AsymptoteMatchesCdfFarOut) {
  // 1 - F_T(x) against the asymptotic tail for heavy-tailed symmetric weights.
  BreimanLimit lim(0.5, sym_pareto(0.8));
  for (double x : {1e3, 1e4}) {
    const double exact = 1.0 - breiman_cdf(lim, x);
    EXPECT_NEAR(exact / breiman_tail(lim, x), 1.0, 0.05) << "x=" << x;
  }
}

TEST(ProductTail, ExactForParetoMultipliers) {
  auto y = make_pareto_multiplier(0.5);
  const auto u = product_tail_ratio(*law(WeightSpec::Kind::uniform01), *y, {10.0, 1e3, 1e5});
  EXPECT_TRUE(u.positive.pass);
  for (double r : u.positive.prelimit) EXPECT_NEAR(r, 2.0 / 3.0, 1e-8);
  for (double r : u.negative.prelimit) EXPECT_NEAR(r, 0.0, 1e-12);

  WeightSpec pm{WeightSpec::Kind::point_mass};
  pm.c = 1.0;
  const auto one = product_tail_ratio(*make_weight_law(pm), *y, {2.0, 50.0});
  for (double r : one.positive.prelimit) EXPECT_NEAR(r, 1.0, 1e-12);

  const auto rad = product_tail_ratio(*law(WeightSpec::Kind::rademacher), *y, {1e3});
  EXPECT_NEAR(rad.positive.prelimit[0], 0.5, 1e-12);
  EXPECT_NEAR(rad.negative.prelimit[0], 0.5, 1e-12);
  EXPECT_TRUE(rad.negative.pass);
}

TEST(ProductTail, GaussianConvergesAtLargeY) {
  auto y = make_pareto_multiplier(0.5);
  auto x = law(WeightSpec::Kind::standard_gaussian);
  const auto rep = product_tail_ratio(*x, *y, {1e3, 1e5});
  EXPECT_TRUE(rep.positive.pass);
  EXPECT_TRUE(rep.negative.pass);
  EXPECT_NEAR(rep.positive.prelimit.back(), x->beta_moment_pos(0.5), 1e-4);
}

TEST(ProductTail, RejectsNonParetoMultipliers) {
  auto x = law(WeightSpec::Kind::uniform01);
  EXPECT_THROW(product_tail_ratio(*x, *make_slowly_varying_multiplier(), {10.0}), parameter_error);
  EXPECT_THROW(product_tail_ratio(*x, *make_pareto_multiplier(0.5), {-1.0}), parameter_error);
}
