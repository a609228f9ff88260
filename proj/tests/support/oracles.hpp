#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "genmarket/linalg.hpp"

namespace gm_test {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Zero-rate Black-Scholes call.
inline double black_scholes_call(double spot, double strike, double vol, double t) {
  const double s = vol * std::sqrt(t);
  const double d1 = (std::log(spot / strike) + 0.5 * s * s) / s;
  return spot * normal_cdf(d1) - strike * normal_cdf(d1 - s);
}

// Projected gradient on min -gamma mu.w + w.Sigma.w / 2 over the budget
// hyperplane sum(w) = 1, step 1 / lambda_max.
inline genmarket::Vector projected_gradient_qp(const genmarket::Matrix& sigma,
                                               const genmarket::Vector& mu, double gamma,
                                               double tol = 1e-13, int max_iter = 2000000) {
  const auto n = sigma.rows();
  Eigen::SelfAdjointEigenSolver<genmarket::Matrix> es(sigma);
  const double step = 1.0 / es.eigenvalues().maxCoeff();
  genmarket::Vector w = genmarket::Vector::Constant(n, 1.0 / n);
  for (int it = 0; it < max_iter; ++it) {
    genmarket::Vector next = w - step * (sigma * w - gamma * mu);
    next.array() -= (next.sum() - 1.0) / n;
    const double change = (next - w).cwiseAbs().maxCoeff();
    w = next;
    if (change < tol) break;
  }
  return w;
}

}  // namespace gm_test
