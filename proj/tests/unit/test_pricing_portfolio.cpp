#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "genmarket/errors.hpp"
#include "genmarket/gdn.hpp"
#include "genmarket/ou.hpp"
#include "genmarket/portfolio.hpp"
#include "genmarket/pricing.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace genmarket;

TEST(Payoff, EvaluationAndLipschitz) {
  auto call = PayoffSpec::call_on_average(2, 1.0);
  EXPECT_DOUBLE_EQ(call(Eigen::Vector2d(1.5, 2.5)), 1.0);
  EXPECT_DOUBLE_EQ(call(Eigen::Vector2d(0.5, 0.5)), 0.0);
  EXPECT_NEAR(call.lipschitz(), 1.0 / std::sqrt(2.0), 1e-15);
  auto put = PayoffSpec::put_on_average(1, 2.0);
  EXPECT_DOUBLE_EQ(put(Vector::Constant(1, 0.5)), 1.5);
  auto basket = PayoffSpec::basket_linear(Eigen::Vector2d(3.0, -4.0), 1.0);
  EXPECT_DOUBLE_EQ(basket(Eigen::Vector2d(1.0, 1.0)), 0.0);
  EXPECT_DOUBLE_EQ(basket.lipschitz(), 5.0);

  PiecewiseLinear a{{0.0, 1.0, 2.0}, {0.0, 2.0, 2.5}};
  PiecewiseLinear b{{0.0, 4.0}, {1.0, 0.0}};
  auto table = PayoffSpec::custom_table({a, b});
  EXPECT_DOUBLE_EQ(table(Eigen::Vector2d(0.5, 2.0)), 1.0 + 0.5);
  EXPECT_DOUBLE_EQ(table(Eigen::Vector2d(9.0, 9.0)), 2.5);  // flat past the last knot
  EXPECT_NEAR(table.computed_lipschitz(), std::sqrt(4.0 + 0.0625), 1e-14);
  EXPECT_THROW(table.with_declared_lipschitz(1.0), ConfigError);
  EXPECT_DOUBLE_EQ(table.with_declared_lipschitz(3.0).lipschitz(), 3.0);
  EXPECT_EQ(payoff_kind_from_string(to_string(PayoffKind::kCustomTable)), PayoffKind::kCustomTable);
  EXPECT_THROW(payoff_kind_from_string("digital"), ConfigError);
}

TEST(Payoff, LipschitzNormOnClippedRange) {
  ClipConfig cfg{6.0, 1};
  auto call = PayoffSpec::call_on_average(1, 1.0);
  EXPECT_NEAR(call.sup_abs_on_clipped_range(cfg), std::exp(6.0) - 1.0, 1e-9);
  EXPECT_NEAR(call.lipschitz_norm(cfg), std::exp(6.0), 1e-9);
}

TEST(Pricing, ConstantPayoffIsExact) {
  auto c = PayoffSpec::basket_linear(Vector::Zero(2), 3.25);
  ASSERT_TRUE(c.is_constant());
  auto p = GDNParams::initialize(gdn_layer_dims(2, 8, 2), Activation::kTanh, 1);
  auto r = price_claim(p, Vector::Zero(2), 0.5, c, 1000, 1, ClipConfig{2.0, 2}, 0.1);
  EXPECT_EQ(r.price, 3.25);
  EXPECT_EQ(r.standard_error, 0.0);
  EXPECT_EQ(r.certified_bias_bound, 0.0);
}

TEST(Pricing, Preconditions) {
  auto p = GDNParams::initialize(gdn_layer_dims(1, 4, 2), Activation::kTanh, 1);
  auto call = PayoffSpec::call_on_average(1, 1.0);
  EXPECT_THROW(price_claim(p, Vector::Zero(1), 0.5, call, 100000, 1, ClipConfig{6.0, 1}, std::nullopt),
               PreconditionError);
  EXPECT_THROW(price_claim(p, Vector::Zero(1), 0.5, call, 999, 1, ClipConfig{6.0, 1}, 0.1),
               PreconditionError);
  EXPECT_THROW(price_claim(p, Vector::Zero(1), 0.5, PayoffSpec::call_on_average(2, 1.0), 1000, 1,
                           ClipConfig{6.0, 1}, 0.1),
               DimensionError);
}

TEST(Pricing, BlackScholesLimit) {
  const double s0 = 0.2, t = 1.0, x0 = 0.05;
  auto coeffs = OUCoefficients::constant(Vector::Constant(1, -0.5 * s0 * s0), Matrix::Zero(1, 1),
                                         Matrix::Constant(1, 1, s0));
  auto law = exact_marginal(coeffs, Vector::Constant(1, x0), t).law;
  ClipConfig cfg{6.0, 1};
  for (double strike : {0.9, 1.0, 1.2}) {
    auto r = price_under_law(law, PayoffSpec::call_on_average(1, strike), 200000, 11, cfg, 0.0);
    const double oracle = gm_test::black_scholes_call(std::exp(x0), strike, s0, t);
    EXPECT_LT(std::abs(r.price - oracle), 3.0 * r.standard_error + 1e-3) << strike;
    EXPECT_EQ(r.certified_bias_bound, 0.0);
  }
}

TEST(Pricing, StandardErrorScalesWithRootN) {
  GaussianMeasure law(Vector::Constant(1, 0.0), Matrix::Constant(1, 1, 0.04));
  ClipConfig cfg{6.0, 1};
  auto call = PayoffSpec::call_on_average(1, 1.0);
  double ratio = 0.0;
  for (int seed = 0; seed < 30; ++seed) {
    const double a = price_under_law(law, call, 4000, seed, cfg, 0.0).standard_error;
    const double b = price_under_law(law, call, 8000, seed + 1000, cfg, 0.0).standard_error;
    ratio += b / a / 30.0;
  }
  EXPECT_NEAR(ratio, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(Pricing, SeedDeterminismAndBound) {
  auto p = GDNParams::initialize(gdn_layer_dims(2, 8, 2), Activation::kTanh, 5);
  auto call = PayoffSpec::call_on_average(2, 1.0);
  ClipConfig cfg{2.0, 2};
  auto a = price_claim(p, Vector::Zero(2), 0.5, call, 5000, 3, cfg, 0.02);
  auto b = price_claim(p, Vector::Zero(2), 0.5, call, 5000, 3, cfg, 0.02);
  EXPECT_EQ(a.price, b.price);
  EXPECT_EQ(a.standard_error, b.standard_error);
  const double norm = call.lipschitz_norm(cfg);
  EXPECT_NEAR(a.certified_bias_bound, norm * std::sqrt(2.0) * std::exp(2.0) * 0.02, 1e-12);
}

TEST(Portfolio, KnownCases) {
  PortfolioInput id{0.0, Eigen::Vector3d(0.1, -0.3, 0.7), Matrix::Identity(3, 3)};
  auto w = efficient_portfolio(id);
  EXPECT_LT((w - Vector::Constant(3, 1.0 / 3)).cwiseAbs().maxCoeff(), 1e-15);
  PortfolioInput diag{0.0, Eigen::Vector2d(1.0, 2.0), Vector(Eigen::Vector2d(1, 4)).asDiagonal()};
  auto v = efficient_portfolio(diag);
  EXPECT_NEAR(v[0], 0.8, 1e-15);
  EXPECT_NEAR(v[1], 0.2, 1e-15);
}

TEST(Portfolio, MatchesQpOracleAndKkt) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + trial % 6;
    const double gamma = std::array<double, 3>{0.0, 0.5, 2.0}[trial % 3];
    Matrix sigma = gm_test::random_spd(rng, d);
    Vector mu = gm_test::random_vector(rng, d, 0.2);
    Vector w = efficient_portfolio({gamma, mu, sigma});
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_LT((w - gm_test::projected_gradient_qp(sigma, mu, gamma)).cwiseAbs().maxCoeff(), 1e-6);
    const Vector grad = sigma * w - gamma * mu;
    EXPECT_LT((grad.array() - grad.mean()).abs().maxCoeff(), 1e-10);
    if (gamma == 0.0) {
      Vector w2 = efficient_portfolio({0.0, gm_test::random_vector(rng, d), sigma});
      EXPECT_LT((w - w2).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(Portfolio, Errors) {
  Matrix singular = Vector(Eigen::Vector2d(1.0, 1e-15)).asDiagonal();
  EXPECT_THROW(efficient_portfolio({0.0, Vector::Zero(2), singular}), NearSingularError);
  EXPECT_THROW(efficient_portfolio({0.0, Vector::Zero(3), Matrix::Identity(2, 2)}), DimensionError);
  EXPECT_THROW(efficient_portfolio({-1.0, Vector::Zero(2), Matrix::Identity(2, 2)}), ConfigError);
}

TEST(Portfolio, FromModel) {
  auto zero = GDNParams::zeros(gdn_layer_dims(4, 6, 3));
  auto w = portfolio_from_model(zero, Vector::Zero(4), 0.5, 0.0);
  EXPECT_LT((w - Vector::Constant(4, 0.25)).cwiseAbs().maxCoeff(), 1e-15);

  auto p = GDNParams::initialize(gdn_layer_dims(3, 8, 3), Activation::kTanh, 2);
  const Vector x = Eigen::Vector3d(0.1, 0.2, -0.3);
  auto law = gdn_forward(p, x, 0.4);
  auto a = portfolio_from_model(p, x, 0.4, 0.5);
  auto b = efficient_portfolio({0.5, law.mean(), law.cov()});
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(a.sum(), 1.0, 1e-12);
}
