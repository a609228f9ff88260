#include "genmarket/portfolio.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "genmarket/errors.hpp"

namespace genmarket {

Vector efficient_portfolio(const PortfolioInput& input) {
  const auto d = input.mu.size();
  if (d < 1 || input.sigma.rows() != d || input.sigma.cols() != d) {
    throw DimensionError("efficient_portfolio: mu and sigma shapes disagree");
  }
  if (!(input.gamma >= 0.0) || !std::isfinite(input.gamma)) {
    throw ConfigError("efficient_portfolio: gamma must be finite and non-negative");
  }
  if (!input.mu.allFinite() || !input.sigma.allFinite()) {
    throw NumericError("efficient_portfolio: non-finite input");
  }
  if (!is_symmetric(input.sigma)) throw DomainError("efficient_portfolio: sigma is not symmetric");

  const Matrix& sigma = input.sigma;
  const double lmin = min_eigenvalue(sigma);
  const double lmax = sigma.cwiseAbs().maxCoeff();
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success || !(lmin > kDefaultEigenFloor * lmax)) {
    std::ostringstream os;
    os << "efficient_portfolio: covariance is near-singular (smallest eigenvalue " << lmin << ")";
    throw NearSingularError(os.str(), lmin);
  }

  const Vector ones = Vector::Ones(d);
  const Vector inv_ones = llt.solve(ones);
  const Vector inv_mu = llt.solve(input.mu);
  const double a = inv_ones.sum();
  const double b = inv_mu.sum();
  const Vector min_var = inv_ones / a;
  Vector w = min_var;
  if (input.gamma != 0.0) w += input.gamma * (inv_mu - (b / a) * inv_ones);
  return w;
}

Vector portfolio_from_model(const GDNParams& params, const Vector& x, double t, double gamma) {
  const GaussianMeasure law = gdn_forward(params, x, t);
  return efficient_portfolio(PortfolioInput{gamma, law.mean(), law.cov()});
}

}  // namespace genmarket
