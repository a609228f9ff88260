#pragma once

#include "genmarket/gdn.hpp"

namespace genmarket {

struct PortfolioInput {
  double gamma = 0.0;  // return/variance trade-off, >= 0
  Vector mu;
  Matrix sigma;  // SPD
};

/// Minimizer of -gamma mu.w + w.Sigma.w / 2 subject to sum(w) = 1, in closed
/// form via Cholesky solves. gamma = 0 gives the minimum-variance portfolio.
Vector efficient_portfolio(const PortfolioInput& input);

/// efficient_portfolio on the mean and covariance the network predicts at (x, t).
Vector portfolio_from_model(const GDNParams& params, const Vector& x, double t, double gamma);

}  // namespace genmarket
