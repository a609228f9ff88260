#include "genmarket/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "genmarket/errors.hpp"
#include "genmarket/parallel.hpp"
#include "genmarket/random.hpp"

namespace genmarket {
namespace {

// Running mean / sum of squared deviations, merged block by block in index order.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }
};

}  // namespace

std::string to_string(PayoffKind k) {
  switch (k) {
    case PayoffKind::kCallOnAverage: return "call_on_avg";
    case PayoffKind::kPutOnAverage: return "put_on_avg";
    case PayoffKind::kBasketLinear: return "basket_linear";
    case PayoffKind::kCustomTable: return "custom_table";
  }
  return "unknown";
}

PayoffKind payoff_kind_from_string(const std::string& name) {
  if (name == "call_on_avg") return PayoffKind::kCallOnAverage;
  if (name == "put_on_avg") return PayoffKind::kPutOnAverage;
  if (name == "basket_linear") return PayoffKind::kBasketLinear;
  if (name == "custom_table") return PayoffKind::kCustomTable;
  throw ConfigError("unknown payoff kind '" + name +
                    "' (expected call_on_avg, put_on_avg, basket_linear, custom_table)");
}

double PiecewiseLinear::operator()(double s) const {
  if (s <= knots.front()) return values.front();
  if (s >= knots.back()) return values.back();
  const auto it = std::upper_bound(knots.begin(), knots.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
  const double w = (s - knots[i]) / (knots[i + 1] - knots[i]);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

double PiecewiseLinear::max_slope() const {
  double slope = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    slope = std::max(slope, std::abs(values[i + 1] - values[i]) / (knots[i + 1] - knots[i]));
  }
  return slope;
}

std::pair<double, double> PiecewiseLinear::range_on(double lo, double hi) const {
  double mn = std::min((*this)(lo), (*this)(hi));
  double mx = std::max((*this)(lo), (*this)(hi));
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i] > lo && knots[i] < hi) {
      mn = std::min(mn, values[i]);
      mx = std::max(mx, values[i]);
    }
  }
  return {mn, mx};
}

PayoffSpec PayoffSpec::call_on_average(int dim, double strike) {
  if (dim < 1) throw ConfigError("payoff dimension must be at least 1");
  if (!std::isfinite(strike)) throw ConfigError("payoff strike must be finite");
  PayoffSpec p;
  p.kind_ = PayoffKind::kCallOnAverage;
  p.dim_ = dim;
  p.strike_ = strike;
  return p;
}

PayoffSpec PayoffSpec::put_on_average(int dim, double strike) {
  PayoffSpec p = call_on_average(dim, strike);
  p.kind_ = PayoffKind::kPutOnAverage;
  return p;
}

PayoffSpec PayoffSpec::basket_linear(Vector weights, double offset) {
  if (weights.size() < 1) throw ConfigError("basket_linear needs at least one weight");
  if (!weights.allFinite() || !std::isfinite(offset)) {
    throw ConfigError("basket_linear weights and offset must be finite");
  }
  PayoffSpec p;
  p.kind_ = PayoffKind::kBasketLinear;
  p.dim_ = static_cast<int>(weights.size());
  p.weights_ = std::move(weights);
  p.offset_ = offset;
  return p;
}

PayoffSpec PayoffSpec::custom_table(std::vector<PiecewiseLinear> tables) {
  if (tables.empty()) throw ConfigError("custom_table needs one table per coordinate");
  for (const auto& t : tables) {
    if (t.knots.empty() || t.knots.size() != t.values.size()) {
      throw ConfigError("custom_table: each table needs matching, non-empty knots and values");
    }
    for (std::size_t i = 1; i < t.knots.size(); ++i) {
      if (!(t.knots[i] > t.knots[i - 1])) {
        throw ConfigError("custom_table: knots must be strictly increasing");
      }
    }
  }
  PayoffSpec p;
  p.kind_ = PayoffKind::kCustomTable;
  p.dim_ = static_cast<int>(tables.size());
  p.tables_ = std::move(tables);
  return p;
}

PayoffSpec PayoffSpec::with_declared_lipschitz(double lip) const {
  const double computed = computed_lipschitz();
  if (!(lip >= 0.0) || !std::isfinite(lip)) {
    throw ConfigError("payoff lip_const must be finite and non-negative");
  }
  if (lip < computed * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "payoff lip_const " << lip << " is below the payoff's actual Lipschitz constant "
       << computed;
    throw ConfigError(os.str());
  }
  PayoffSpec p = *this;
  p.declared_lip_ = lip;
  return p;
}

double PayoffSpec::operator()(const double* s) const {
  switch (kind_) {
    case PayoffKind::kCallOnAverage:
    case PayoffKind::kPutOnAverage: {
      double avg = 0.0;
      for (int j = 0; j < dim_; ++j) avg += s[j];
      avg /= dim_;
      return kind_ == PayoffKind::kCallOnAverage ? std::max(avg - strike_, 0.0)
                                                 : std::max(strike_ - avg, 0.0);
    }
    case PayoffKind::kBasketLinear: {
      double v = offset_;
      for (int j = 0; j < dim_; ++j) v += weights_[j] * s[j];
      return v;
    }
    case PayoffKind::kCustomTable: {
      double v = 0.0;
      for (int j = 0; j < dim_; ++j) v += tables_[static_cast<std::size_t>(j)](s[j]);
      return v;
    }
  }
  return 0.0;
}

double PayoffSpec::computed_lipschitz() const {
  switch (kind_) {
    case PayoffKind::kCallOnAverage:
    case PayoffKind::kPutOnAverage:
      return 1.0 / std::sqrt(static_cast<double>(dim_));
    case PayoffKind::kBasketLinear:
      return weights_.norm();
    case PayoffKind::kCustomTable: {
      double acc = 0.0;
      for (const auto& t : tables_) acc += t.max_slope() * t.max_slope();
      return std::sqrt(acc);
    }
  }
  return 0.0;
}

double PayoffSpec::sup_abs_on_clipped_range(const ClipConfig& cfg) const {
  const double lo = std::exp(-cfg.threshold);
  const double hi = std::exp(cfg.threshold);
  switch (kind_) {
    case PayoffKind::kCallOnAverage:
      return std::max(hi - strike_, 0.0);
    case PayoffKind::kPutOnAverage:
      return std::max(strike_ - lo, 0.0);
    case PayoffKind::kBasketLinear: {
      double vmin = offset_, vmax = offset_;
      for (int j = 0; j < dim_; ++j) {
        vmin += std::min(weights_[j] * lo, weights_[j] * hi);
        vmax += std::max(weights_[j] * lo, weights_[j] * hi);
      }
      return std::max(std::abs(vmin), std::abs(vmax));
    }
    case PayoffKind::kCustomTable: {
      double vmin = 0.0, vmax = 0.0;
      for (const auto& t : tables_) {
        const auto [mn, mx] = t.range_on(lo, hi);
        vmin += mn;
        vmax += mx;
      }
      return std::max(std::abs(vmin), std::abs(vmax));
    }
  }
  return 0.0;
}

double PayoffSpec::lipschitz_norm(const ClipConfig& cfg) const {
  return sup_abs_on_clipped_range(cfg) + lipschitz();
}

PricingResult price_under_law(const GaussianMeasure& law, const PayoffSpec& payoff,
                              Eigen::Index n, std::uint64_t seed, const ClipConfig& cfg,
                              std::optional<double> epsilon) {
  cfg.validate();
  if (!epsilon) {
    throw PreconditionError("pricing needs an evaluation report (max W2) for the bias bound");
  }
  if (!(*epsilon >= 0.0)) throw PreconditionError("pricing: epsilon must be non-negative");
  if (n < kMinPricingSamples) {
    std::ostringstream os;
    os << "pricing needs at least " << kMinPricingSamples << " samples, got " << n;
    throw PreconditionError(os.str());
  }
  if (law.dim() != cfg.dimension || payoff.dim() != cfg.dimension) {
    throw DimensionError("pricing: law, payoff and clip dimensions disagree");
  }

  PricingResult r;
  r.n = n;
  r.seed = seed;
  r.epsilon = *epsilon;

  if (payoff.is_constant()) {
    r.price = payoff(Vector::Ones(payoff.dim()));
    r.lipschitz_norm = payoff.lipschitz_norm(cfg);
    return r;  // no sampling error, and the bound is zero
  }

  const Matrix root = spd_sqrt(law.cov());
  const auto blocks = static_cast<std::size_t>((n + kRngBlockRows - 1) / kRngBlockRows);
  std::vector<Moments> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kRngBlockRows;
    const Eigen::Index rows = std::min(n, begin + kRngBlockRows) - begin;
    KeyedRng rng(seed, static_cast<std::uint64_t>(RngStream::kPricing), b);
    SampleMatrix z(rows, law.dim());
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (int j = 0; j < law.dim(); ++j) z(i, j) = rng.normal();
    }
    SampleMatrix u = z * root;
    u.rowwise() += law.mean().transpose();
    const SampleMatrix prices = clipped_exp_rows(u, cfg);
    Moments m;
    for (Eigen::Index i = 0; i < rows; ++i) m.add(payoff(prices.row(i).data()));
    partial[b] = m;
  });
  Moments total;
  for (const auto& m : partial) total.merge(m);

  r.price = total.mean;
  r.standard_error = std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  r.lipschitz_norm = payoff.lipschitz_norm(cfg);
  r.certified_bias_bound = r.lipschitz_norm * cfg.lipschitz_constant() * r.epsilon;
  return r;
}

PricingResult price_claim(const GDNParams& params, const Vector& x, double t,
                          const PayoffSpec& payoff, Eigen::Index n, std::uint64_t seed,
                          const ClipConfig& cfg, std::optional<double> epsilon) {
  return price_under_law(gdn_forward(params, x, t), payoff, n, seed, cfg, epsilon);
}

}  // namespace genmarket
