#pragma once

#include <cstdint>
#include <vector>

#include "genmarket/dataset.hpp"
#include "genmarket/empirical_ot.hpp"
#include "genmarket/scenario.hpp"
#include "genmarket/train.hpp"

namespace genmarket {

/// Trains a freshly initialized network of the scenario's architecture,
/// holding out the scenario's evaluation grid.
TrainResult train(const Scenario& scenario, const std::vector<TrainingPair>& train_set,
                  const TrainConfig& cfg);

struct EvalPoint {
  Vector x;
  double t = 0.0;
  double w2 = 0.0;           // W2(network law, exact law) of the log-state
  double s_law_bound = 0.0;  // sqrt(D) e^M w2, certified bound for the price law
};

struct SpotCheck {
  std::size_t grid_index = 0;
  double empirical_w2 = 0.0;
  double regularization = 0.0;
  double bound = 0.0;  // sqrt(D) e^M epsilon
};

struct EvalReport {
  std::vector<EvalPoint> points;
  double max_w2 = 0.0;  // epsilon
  double mean_w2 = 0.0;
  double s_law_max = 0.0;
  double s_law_mean = 0.0;
  double lipschitz = 0.0;  // sqrt(D) e^M
  std::vector<SpotCheck> spot_checks;
};

struct EvalOptions {
  int spot_checks = 0;
  Eigen::Index spot_samples = 512;
  std::uint64_t seed = 0;
};

/// W2 of the network against the exact law at every grid point. Optional spot
/// checks estimate the price-law W2 from samples at evenly spaced grid points;
/// the two sample sets are drawn through the Gaussian optimal coupling.
EvalReport evaluate_rcd(const GDNParams& params, const Scenario& scenario, const EvalGrid& grid,
                        const EvalOptions& opts = {});

}  // namespace genmarket
