#include "genmarket/coefficients.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <sstream>

#include "genmarket/errors.hpp"

namespace genmarket {

TimeFunction TimeFunction::constant(Matrix value) {
  TimeFunction f;
  f.rows_ = value.rows();
  f.cols_ = value.cols();
  f.knots_ = {0.0};
  f.second_derivs_ = {Matrix::Zero(f.rows_, f.cols_)};
  f.values_ = {std::move(value)};
  return f;
}

TimeFunction TimeFunction::spline(std::vector<double> breakpoints, std::vector<Matrix> values) {
  if (breakpoints.empty() || breakpoints.size() != values.size()) {
    throw ConfigError("spline: need as many values as breakpoints (and at least one)");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw ConfigError("spline: breakpoints must be strictly increasing");
    }
  }
  for (const auto& v : values) {
    if (v.rows() != values[0].rows() || v.cols() != values[0].cols()) {
      throw DimensionError("spline: all knot values must share one shape");
    }
  }
  if (breakpoints.size() == 1) return constant(values[0]);

  TimeFunction f;
  f.rows_ = values[0].rows();
  f.cols_ = values[0].cols();
  f.knots_ = std::move(breakpoints);
  f.values_ = std::move(values);

  // Natural spline: second derivatives vanish at both ends; interior ones
  // solve a tridiagonal system (Thomas algorithm, entrywise).
  const std::size_t n = f.knots_.size();
  const Matrix zero = Matrix::Zero(f.rows_, f.cols_);
  f.second_derivs_.assign(n, zero);
  if (n > 2) {
    std::vector<double> diag(n, 0.0), upper(n, 0.0);
    std::vector<Matrix> rhs(n, zero);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = f.knots_[i] - f.knots_[i - 1];
      const double h1 = f.knots_[i + 1] - f.knots_[i];
      const double lower = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      upper[i] = h1 / 6.0;
      rhs[i] = (f.values_[i + 1] - f.values_[i]) / h1 - (f.values_[i] - f.values_[i - 1]) / h0;
      if (i > 1) {
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
      }
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      Matrix acc = rhs[i];
      if (i + 2 < n) acc -= upper[i] * f.second_derivs_[i + 1];
      f.second_derivs_[i] = acc / diag[i];
      if (i == 1) break;
    }
  }
  return f;
}

Matrix TimeFunction::operator()(double t) const {
  if (knots_.size() == 1) return values_[0];
  if (t <= knots_.front()) return values_.front();
  if (t >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = (t - knots_[i]) / h;
  return a * values_[i] + b * values_[i + 1] +
         ((a * a * a - a) * second_derivs_[i] + (b * b * b - b) * second_derivs_[i + 1]) *
             (h * h / 6.0);
}

OUCoefficients OUCoefficients::constant(const Vector& mu, const Matrix& m, const Matrix& sigma) {
  return OUCoefficients{TimeFunction::constant(mu), TimeFunction::constant(m),
                        TimeFunction::constant(sigma)};
}

void OUCoefficients::validate(double horizon, int steps) const {
  const auto d = mu.rows();
  if (d < 1 || mu.cols() != 1) throw DimensionError("coefficients: mu must be a vector");
  if (m.rows() != d || m.cols() != d) throw DimensionError("coefficients: m must be D x D");
  if (sigma.rows() != d || sigma.cols() != d) {
    throw DimensionError("coefficients: sigma must be D x D");
  }
  const int nodes = 2 * std::max(steps, 1);
  for (int k = 0; k <= nodes; ++k) {
    const double t = horizon * k / nodes;
    const Matrix s = sigma(t);
    if (!mu(t).allFinite() || !m(t).allFinite() || !s.allFinite()) {
      std::ostringstream os;
      os << "coefficients: non-finite value at t=" << t;
      throw ConfigError(os.str());
    }
    if (!is_symmetric(s) || Eigen::LLT<Matrix>(s).info() != Eigen::Success) {
      std::ostringstream os;
      os << "coefficients: sigma is not symmetric positive definite at t=" << t;
      throw ConfigError(os.str());
    }
  }
}

}  // namespace genmarket
