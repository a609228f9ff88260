#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "genmarket/dataset.hpp"
#include "genmarket/errors.hpp"
#include "genmarket/ou.hpp"
#include "genmarket/scenario.hpp"
#include "test_support.hpp"

using namespace genmarket;

namespace {

OUCoefficients brownian_2d() {
  Vector mu(2);
  mu << 0.1, -0.05;
  Matrix sigma(2, 2);
  sigma << 0.3, 0.1, 0.1, 0.2;
  return OUCoefficients::constant(mu, Matrix::Zero(2, 2), sigma);
}

Scenario small_scenario() {
  Scenario s;
  s.dimension = 2;
  s.domain = {{-1.0, 1.0}, {-1.0, 1.0}};
  s.delta = 0.1;
  s.horizon = 1.0;
  Matrix m(2, 2);
  m << -0.5, 0.1, 0.1, -0.3;
  Matrix sigma(2, 2);
  sigma << 0.3, 0.05, 0.05, 0.2;
  s.coefficients = OUCoefficients::constant(Eigen::Vector2d(0.05, -0.02), m, sigma);
  return s;
}

// Simpson's rule on s -> sigma0^2 e^{-2 theta (t - s)}.
double ou_variance_by_quadrature(double theta, double sigma0, double t) {
  const int n = 2000;
  const double h = t / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * sigma0 * sigma0 * std::exp(-2.0 * theta * (t - s));
  }
  return acc * h / 3.0;
}

}  // namespace

TEST(ExactMarginal, BrownianCaseMatchesClosedForm) {
  const auto c = brownian_2d();
  Vector x0(2);
  x0 << 0.3, -0.4;
  const double t = 0.7;
  const auto m = exact_marginal(c, x0, t);
  const Matrix s = c.vol(0.0);
  EXPECT_LT((m.law.mean() - (x0 + c.drift(0.0) * t)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((m.law.cov() - s * s.transpose() * t).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExactMarginal, PureDecayMean) {
  const double theta = 0.8;
  auto c = OUCoefficients::constant(Vector::Zero(2), -theta * Matrix::Identity(2, 2),
                                    1e-3 * Matrix::Identity(2, 2));
  Vector x0(2);
  x0 << 1.0, -2.0;
  const auto m = exact_marginal(c, x0, 1.5);
  EXPECT_LT((m.law.mean() - std::exp(-theta * 1.5) * x0).norm(), 1e-12);
}

TEST(ExactMarginal, OneDimensionalOuVariance) {
  const double theta = 1.3, sigma0 = 0.4, t = 0.9;
  auto c = OUCoefficients::constant(Vector::Zero(1), Matrix::Constant(1, 1, -theta),
                                    Matrix::Constant(1, 1, sigma0));
  const double v = exact_marginal(c, Vector::Zero(1), t).law.cov()(0, 0);
  EXPECT_NEAR(v, sigma0 * sigma0 * (1 - std::exp(-2 * theta * t)) / (2 * theta), 1e-10);
  EXPECT_NEAR(v, ou_variance_by_quadrature(theta, sigma0, t), 1e-10);
}

TEST(ExactMarginal, QuadratureConvergedAtDefaultSteps) {
  Matrix m(2, 2);
  m << -0.5, 0.3, -0.2, -0.4;
  auto c = OUCoefficients{TimeFunction::spline({0.0, 0.5, 1.0},
                                               {Matrix(Eigen::Vector2d(0.1, 0.0)),
                                                Matrix(Eigen::Vector2d(-0.1, 0.2)),
                                                Matrix(Eigen::Vector2d(0.0, 0.1))}),
                          TimeFunction::constant(m),
                          TimeFunction::spline({0.0, 1.0}, {Matrix(0.3 * Matrix::Identity(2, 2)),
                                                            Matrix(0.5 * Matrix::Identity(2, 2))})};
  const auto a = exact_marginal(c, Eigen::Vector2d(0.2, 0.1), 1.0, 1024);
  const auto b = exact_marginal(c, Eigen::Vector2d(0.2, 0.1), 1.0, 2048);
  EXPECT_LT((a.law.cov() - b.law.cov()).norm(), 1e-6);
}

TEST(ExactMarginal, Preconditions) {
  const auto c = brownian_2d();
  EXPECT_THROW(exact_marginal(c, Vector::Zero(2), 0.0), DomainError);
  EXPECT_THROW(exact_marginal(c, Vector::Zero(2), 1.0, 50), PreconditionError);
  EXPECT_THROW(exact_marginal(c, Vector::Zero(3), 1.0), DimensionError);
}

TEST(EulerMaruyama, DeterministicDrift) {
  auto c = OUCoefficients::constant(Eigen::Vector2d(0.5, -1.0), Matrix::Zero(2, 2),
                                    Matrix::Zero(2, 2));
  const auto paths = euler_maruyama_paths(c, Eigen::Vector2d(1.0, 2.0), 2.0, 10, 5, 3);
  for (Eigen::Index i = 0; i < paths.rows(); ++i) {
    EXPECT_NEAR(paths(i, 0), 2.0, 1e-12);
    EXPECT_NEAR(paths(i, 1), 0.0, 1e-12);
  }
}

TEST(EulerMaruyama, SeedDeterminismAndThreadIndependence) {
  const auto c = brownian_2d();
  const auto a = euler_maruyama_paths(c, Vector::Zero(2), 1.0, 50, 3000, 99);
  const auto b = euler_maruyama_paths(c, Vector::Zero(2), 1.0, 50, 3000, 99);
  EXPECT_TRUE((a.array() == b.array()).all());
  // A prefix of paths does not depend on how many paths were requested.
  const auto prefix = euler_maruyama_paths(c, Vector::Zero(2), 1.0, 50, 100, 99);
  EXPECT_TRUE((prefix.array() == a.topRows(100).array()).all());
  const auto other = euler_maruyama_paths(c, Vector::Zero(2), 1.0, 50, 100, 100);
  EXPECT_FALSE((prefix.array() == other.array()).all());
}

TEST(EulerMaruyama, MomentsMatchExactMarginal) {
  const auto s = small_scenario();
  const Vector x0 = Eigen::Vector2d(0.5, -0.5);
  const int n = 20000;
  const auto paths = euler_maruyama_paths(s.coefficients, x0, 1.0, 200, n, 5);
  const auto law = exact_marginal(s.coefficients, x0, 1.0).law;
  const Vector mean = paths.colwise().mean().transpose();
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(std::abs(mean[i] - law.mean()[i]), 4.0 * std::sqrt(law.cov()(i, i) / n));
  }
}

TEST(EulerMaruyama, WeakOrderOne) {
  // With sigma tiny the scheme is Euler on the mean ODE, whose bias is O(h).
  Matrix m(1, 1);
  m << -1.0;
  auto c = OUCoefficients::constant(Vector::Constant(1, 0.5), m, Matrix::Constant(1, 1, 1e-6));
  const Vector x0 = Vector::Constant(1, 1.0);
  const double exact = exact_marginal(c, x0, 1.0).law.mean()[0];
  const double bias_coarse = euler_maruyama_paths(c, x0, 1.0, 20, 1, 1)(0, 0) - exact;
  const double bias_fine = euler_maruyama_paths(c, x0, 1.0, 40, 1, 1)(0, 0) - exact;
  const double ratio = bias_coarse / bias_fine;
  EXPECT_GT(ratio, 1.0);
  EXPECT_LT(ratio, 4.0);
}

TEST(TrainingSet, SinglePairDecodesToExactLaw) {
  const auto s = small_scenario();
  const auto set = build_training_set(s, 1, 1, 3);
  ASSERT_EQ(set.size(), 1u);
  const auto law = exact_marginal(s.coefficients, set[0].x, set[0].t).law;
  EXPECT_NEAR(set[0].t, s.delta, 0.0);
  EXPECT_LT(w2_distance(chart_decode(set[0].target), law), 1e-9);
}

TEST(TrainingSet, FullGridShapeAndDecodability) {
  const auto s = small_scenario();
  const auto set = build_training_set(s, 64, 16, 3);
  ASSERT_EQ(set.size(), 1024u);
  for (const auto& p : set) {
    EXPECT_TRUE(s.in_domain(p.x));
    EXPECT_GE(p.t, s.delta - 1e-15);
    EXPECT_LE(p.t, s.horizon + 1e-15);
    EXPECT_GT(min_eigenvalue(chart_decode(p.target).cov()), 0.0);
  }
  EXPECT_EQ(build_training_set(s, 64, 16, 3)[17].x, set[17].x);
  EXPECT_NE(build_training_set(s, 64, 16, 4)[40].x, set[40].x);
}

TEST(TrainingSet, MeanShiftFollowsFlow) {
  // For constant coefficients the mean is affine in x with slope Phi(t) = e^{Mt}.
  const auto s = small_scenario();
  const double t = 0.6, h = 0.1;
  const Vector x = Eigen::Vector2d(0.1, 0.2);
  const Vector xh = x + h * Eigen::Vector2d(1.0, 0.0);
  const Vector dm = exact_marginal(s.coefficients, xh, t).law.mean() -
                    exact_marginal(s.coefficients, x, t).law.mean();
  const Matrix phi = Eigen::MatrixXd((s.coefficients.reversion(0.0) * t).exp());
  EXPECT_LT((dm - phi.col(0) * h).norm(), 1e-11);
}

TEST(TrainingSet, NonPositiveDeltaIsDomainError) {
  auto s = small_scenario();
  s.delta = 0.0;
  EXPECT_THROW(build_training_set(s, 4, 4, 1), DomainError);
}

TEST(MarginalStability, FittedConstantHolds) {
  const auto s = small_scenario();
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), ut(s.delta, s.horizon);
  auto ratio = [&] {
    const Vector x = Eigen::Vector2d(ux(rng), ux(rng));
    const Vector y = Eigen::Vector2d(ux(rng), ux(rng));
    const double t = ut(rng), u = ut(rng);
    const double w = w2_distance(exact_marginal(s.coefficients, x, t, 200).law,
                                 exact_marginal(s.coefficients, y, u, 200).law);
    return w / (std::sqrt(std::abs(t - u)) + (x - y).norm());
  };
  double c = 0.0;
  for (int i = 0; i < 100; ++i) c = std::max(c, ratio());
  c *= 1.5;
  for (int i = 0; i < 100; ++i) EXPECT_LE(ratio(), c);
}
