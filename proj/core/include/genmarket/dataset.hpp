#pragma once

#include <cstdint>
#include <vector>

#include "genmarket/gdn.hpp"
#include "genmarket/scenario.hpp"
#include "genmarket/train.hpp"

namespace genmarket {

struct GridPoint {
  Vector x;
  double t = 0.0;
};

/// n_x states in K: the 2^D corners of K (when n_x > 2^D) followed by a
/// Halton sequence under a seeded Cranley-Patterson shift, crossed with n_t
/// equally spaced times on [delta, T]. Targets are the chart coordinates of
/// the exact marginal law.
std::vector<TrainingPair> build_training_set(const Scenario& scenario, int n_x, int n_t,
                                             std::uint64_t seed);

/// Tensor grid of EvalGrid, x varying fastest.
std::vector<GridPoint> eval_grid_points(const Scenario& scenario, const EvalGrid& grid);

/// Grid points paired with their exact laws.
std::vector<HeldOutPoint> heldout_set(const Scenario& scenario, const EvalGrid& grid);

}  // namespace genmarket
