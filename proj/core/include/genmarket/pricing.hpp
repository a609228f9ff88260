#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genmarket/gdn.hpp"
#include "genmarket/market.hpp"

namespace genmarket {

enum class PayoffKind { kCallOnAverage, kPutOnAverage, kBasketLinear, kCustomTable };

std::string to_string(PayoffKind k);
PayoffKind payoff_kind_from_string(const std::string& name);

/// Piecewise-linear function of one price coordinate, flat outside its knots.
struct PiecewiseLinear {
  std::vector<double> knots;
  std::vector<double> values;

  double operator()(double s) const;
  double max_slope() const;
  /// Extremes over [lo, hi].
  std::pair<double, double> range_on(double lo, double hi) const;
};

/// A Lipschitz payoff V of the D price coordinates.
///   call_on_avg   max(mean(s) - strike, 0)         Lip = 1/sqrt(D)
///   put_on_avg    max(strike - mean(s), 0)         Lip = 1/sqrt(D)
///   basket_linear weights . s + offset             Lip = |weights|
///   custom_table  sum_d table_d(s_d)               Lip = sqrt(sum_d slope_d^2)
/// A declared Lipschitz constant may be given; it must not be below the
/// computed one and is then used in bounds.
class PayoffSpec {
 public:
  static PayoffSpec call_on_average(int dim, double strike);
  static PayoffSpec put_on_average(int dim, double strike);
  static PayoffSpec basket_linear(Vector weights, double offset);
  static PayoffSpec custom_table(std::vector<PiecewiseLinear> tables);

  PayoffSpec with_declared_lipschitz(double lip) const;

  PayoffKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double strike() const { return strike_; }
  const Vector& weights() const { return weights_; }
  double offset() const { return offset_; }
  const std::vector<PiecewiseLinear>& tables() const { return tables_; }
  std::optional<double> declared_lipschitz() const { return declared_lip_; }

  double operator()(const double* prices) const;
  double operator()(const Vector& prices) const { return (*this)(prices.data()); }

  double computed_lipschitz() const;
  double lipschitz() const { return declared_lip_.value_or(computed_lipschitz()); }
  bool is_constant() const { return computed_lipschitz() == 0.0; }

  /// sup |V| over the price cube [e^{-M}, e^{M}]^D.
  double sup_abs_on_clipped_range(const ClipConfig& cfg) const;
  /// sup |V| + Lip(V) on the clipped range.
  double lipschitz_norm(const ClipConfig& cfg) const;

 private:
  PayoffKind kind_ = PayoffKind::kBasketLinear;
  int dim_ = 1;
  double strike_ = 0.0;
  Vector weights_;
  double offset_ = 0.0;
  std::vector<PiecewiseLinear> tables_;
  std::optional<double> declared_lip_;
};

struct PricingResult {
  double price = 0.0;
  double standard_error = 0.0;
  double certified_bias_bound = 0.0;
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;        // max held-out W2 used in the bound
  double lipschitz_norm = 0.0;
};

inline constexpr Eigen::Index kMinPricingSamples = 1000;

/// Monte Carlo mean of V(clipped_exp(U)), U ~ law. `epsilon` is the uniform
/// W2 accuracy of `law`; without it no bias bound exists and the call fails.
PricingResult price_under_law(const GaussianMeasure& law, const PayoffSpec& payoff,
                              Eigen::Index n, std::uint64_t seed, const ClipConfig& cfg,
                              std::optional<double> epsilon);

/// price_under_law with U drawn from the network's law at (x, t).
PricingResult price_claim(const GDNParams& params, const Vector& x, double t,
                          const PayoffSpec& payoff, Eigen::Index n, std::uint64_t seed,
                          const ClipConfig& cfg, std::optional<double> epsilon);

}  // namespace genmarket
