#pragma once

#include <cstdint>
#include <vector>

#include "genmarket/gdn.hpp"

namespace genmarket {

struct Architecture {
  int width = 64;
  int depth = 4;
  Activation activation = Activation::kTanh;
};

/// Minibatch gradient descent with heavy-ball momentum on the chart-MSE loss.
/// The step size decays geometrically from learning_rate to
/// learning_rate * final_lr_fraction over `epochs`.
struct TrainConfig {
  double learning_rate = 0.05;
  double final_lr_fraction = 0.01;
  double momentum = 0.9;
  int epochs = 2000;
  int batch_size = 64;
  std::uint64_t seed = 0;
  int patience = 20;  // epochs without a new best held-out max W2; 0 disables
  double divergence_threshold = 1e6;

  void validate() const;
};

/// A held-out point with its exact law.
struct HeldOutPoint {
  Vector x;
  double t = 0.0;
  GaussianMeasure law;
};

struct EpochRecord {
  int epoch = 0;
  double surrogate_loss = 0.0;
  double heldout_max_w2 = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double final_heldout_max_w2 = 0.0;
  bool early_stopped = false;
};

struct TrainResult {
  GDNParams params;  // the best held-out parameters seen
  TrainReport report;
};

/// Max over `heldout` of W2(network law, exact law).
double heldout_max_w2(const GDNParams& params, const std::vector<HeldOutPoint>& heldout);

TrainResult train(GDNParams initial, const std::vector<TrainingPair>& train_set,
                  const std::vector<HeldOutPoint>& heldout, const TrainConfig& cfg);

}  // namespace genmarket
