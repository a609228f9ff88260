#include "genmarket/market.hpp"

#include <cmath>
#include <sstream>

#include "genmarket/errors.hpp"
#include "genmarket/random.hpp"

namespace genmarket {
namespace {

void clip_row_inplace(double* row, int d, double threshold) {
  double norm2 = 0.0;
  for (int j = 0; j < d; ++j) norm2 += row[j] * row[j];
  const double norm = std::sqrt(norm2);
  const double scale = norm > threshold ? threshold / norm : 1.0;
  for (int j = 0; j < d; ++j) row[j] = std::exp(row[j] * scale);
}

}  // namespace

void ClipConfig::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    std::ostringstream os;
    os << "clip_threshold must be positive and finite, got " << threshold;
    throw ConfigError(os.str());
  }
  if (dimension < 1) throw ConfigError("clip dimension must be at least 1");
}

double ClipConfig::lipschitz_constant() const {
  return std::sqrt(static_cast<double>(dimension)) * std::exp(threshold);
}

Vector clipped_exp(const Vector& x, const ClipConfig& cfg) {
  if (x.size() != cfg.dimension) throw DimensionError("clipped_exp: dimension mismatch");
  if (!x.allFinite()) throw NumericError("clipped_exp: non-finite input");
  Vector out = x;
  clip_row_inplace(out.data(), cfg.dimension, cfg.threshold);
  return out;
}

SampleMatrix clipped_exp_rows(const SampleMatrix& x, const ClipConfig& cfg) {
  if (x.cols() != cfg.dimension) throw DimensionError("clipped_exp_rows: dimension mismatch");
  if (!x.allFinite()) throw NumericError("clipped_exp_rows: non-finite input");
  SampleMatrix out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    clip_row_inplace(out.row(i).data(), cfg.dimension, cfg.threshold);
  }
  return out;
}

SampleMatrix pushforward_rows(const GaussianMeasure& g, const ClipConfig& cfg,
                              const SampleMatrix& z) {
  if (g.dim() != cfg.dimension || z.cols() != g.dim()) {
    throw DimensionError("pushforward_rows: dimension mismatch");
  }
  const Matrix root = spd_sqrt(g.cov());
  SampleMatrix u = z * root;  // root is symmetric, so row i is (root z_i)^T
  u.rowwise() += g.mean().transpose();
  return clipped_exp_rows(u, cfg);
}

SampleMatrix pushforward_sample(const GaussianMeasure& g, const ClipConfig& cfg, Eigen::Index n,
                                std::uint64_t seed) {
  if (n < 1) throw PreconditionError("pushforward_sample: n must be at least 1");
  cfg.validate();
  return pushforward_rows(g, cfg, standard_normal_rows(n, g.dim(), seed, RngStream::kPushforward));
}

}  // namespace genmarket
