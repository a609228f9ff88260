#pragma once

#include <cstdint>

#include "genmarket/gaussian.hpp"

namespace genmarket {

/// Clipping threshold M of the price map: log-states are projected onto the
/// closed ball of radius M before exponentiation.
struct ClipConfig {
  double threshold = 2.0;
  int dimension = 1;

  void validate() const;
  /// sqrt(D) e^M, the Lipschitz constant of the price map and of its push-forward on W2.
  double lipschitz_constant() const;
};

/// exp(P(x)) componentwise, P the Euclidean projection onto the radius-M ball.
Vector clipped_exp(const Vector& x, const ClipConfig& cfg);

/// Applies clipped_exp to every row.
SampleMatrix clipped_exp_rows(const SampleMatrix& x, const ClipConfig& cfg);

/// Maps standard-normal rows z to prices clipped_exp(mean + sqrt(cov) z).
SampleMatrix pushforward_rows(const GaussianMeasure& g, const ClipConfig& cfg,
                              const SampleMatrix& z);

/// n draws from the push-forward of g through the price map.
SampleMatrix pushforward_sample(const GaussianMeasure& g, const ClipConfig& cfg, Eigen::Index n,
                                std::uint64_t seed);

}  // namespace genmarket
