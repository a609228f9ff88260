#pragma once

#include "genmarket/linalg.hpp"

namespace genmarket {

/// A nondegenerate Gaussian N(mean, cov). Construction validates symmetry and
/// positive definiteness; instances are immutable afterwards.
class GaussianMeasure {
 public:
  GaussianMeasure(Vector mean, Matrix cov);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }

  static GaussianMeasure standard(int dim);

 private:
  Vector mean_;
  Matrix cov_;
};

/// Coordinates of the global chart (mean, sym-packed log covariance).
struct ChartCoords {
  Vector mu;
  Vector sigma_coords;

  int dim() const { return static_cast<int>(mu.size()); }
  /// Concatenation [mu, sigma_coords], the layout of a network output.
  Vector flat() const;
  static ChartCoords from_flat(const Vector& flat, int dim);
};

GaussianMeasure chart_decode(const ChartCoords& c);
ChartCoords chart_encode(const GaussianMeasure& g);

/// Closed-form 2-Wasserstein distance between Gaussians.
double w2_distance(const GaussianMeasure& a, const GaussianMeasure& b);

/// Linear part A of the optimal transport map x -> mean_b + A (x - mean_a)
/// pushing `a` onto `b`.
Matrix transport_matrix(const GaussianMeasure& a, const GaussianMeasure& b);

}  // namespace genmarket
