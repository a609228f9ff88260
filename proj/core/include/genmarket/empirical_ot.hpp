#pragma once

#include <vector>

#include "genmarket/linalg.hpp"

namespace genmarket {

enum class OtMethod {
  kAuto,        // sorted for D = 1, Sinkhorn otherwise
  kSorted,      // exact, D = 1 only
  kSinkhorn,    // entropic, annealed regularization
  kAssignment,  // exact optimal assignment, n <= kMaxAssignmentSize
};

inline constexpr Eigen::Index kMaxAssignmentSize = 4096;

struct SinkhornOptions {
  // Regularization runs geometrically from start_fraction to end_fraction of
  // the median pairwise squared distance.
  double start_fraction = 0.5;
  double end_fraction = 0.01;
  int iterations = 500;
  int stages = 10;
};

struct EmpiricalW2 {
  double value = 0.0;
  /// Absolute entropic regularization of the final stage; 0 for exact methods.
  double regularization = 0.0;
  OtMethod method = OtMethod::kAuto;
};

/// W2 between the uniform empirical measures on the rows of `a` and `b`.
EmpiricalW2 empirical_w2(const SampleMatrix& a, const SampleMatrix& b,
                         OtMethod method = OtMethod::kAuto, const SinkhornOptions& opts = {});

/// Minimum-cost perfect matching of a square cost matrix (shortest augmenting
/// paths with potentials). Returns the column assigned to each row.
std::vector<int> optimal_assignment(const Matrix& cost);

/// Squared Euclidean distances between rows of a and rows of b.
Matrix pairwise_sq_dist(const SampleMatrix& a, const SampleMatrix& b);

}  // namespace genmarket
