#pragma once

#include <vector>

#include "genmarket/linalg.hpp"

namespace genmarket {

/// A matrix-valued function of time: either constant, or a natural cubic
/// spline through (breakpoint, value) knots applied entrywise. Outside the
/// knot range the end values are held.
class TimeFunction {
 public:
  TimeFunction() = default;  // empty 0 x 0 function
  static TimeFunction constant(Matrix value);
  static TimeFunction spline(std::vector<double> breakpoints, std::vector<Matrix> values);

  Matrix operator()(double t) const;
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool is_constant() const { return knots_.size() == 1; }

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<double> knots_;
  std::vector<Matrix> values_;
  std::vector<Matrix> second_derivs_;
};

/// Coefficients of dX = (mu_t + M_t X) dt + sigma_t dW.
struct OUCoefficients {
  TimeFunction mu;     // D x 1
  TimeFunction m;      // D x D
  TimeFunction sigma;  // D x D, SPD at every t

  int dim() const { return static_cast<int>(mu.rows()); }
  Vector drift(double t) const { return mu(t).col(0); }
  Matrix reversion(double t) const { return m(t); }
  Matrix vol(double t) const { return sigma(t); }

  /// Shape checks plus finiteness everywhere and SPD volatility at every
  /// node of a `steps`-interval grid (with midpoints) on [0, horizon].
  void validate(double horizon, int steps) const;

  static OUCoefficients constant(const Vector& mu, const Matrix& m, const Matrix& sigma);
};

}  // namespace genmarket
