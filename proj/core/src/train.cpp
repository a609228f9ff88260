#include "genmarket/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "genmarket/errors.hpp"
#include "genmarket/random.hpp"

namespace genmarket {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("training.learning_rate must be positive");
  if (!(final_lr_fraction > 0.0) || final_lr_fraction > 1.0) {
    throw ConfigError("training.final_lr_fraction must lie in (0, 1]");
  }
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("training.momentum must lie in [0, 1)");
  if (epochs < 1) throw ConfigError("training.epochs must be positive");
  if (batch_size < 1) throw ConfigError("training.batch_size must be positive");
  if (patience < 0) throw ConfigError("training.patience must be non-negative");
}

double heldout_max_w2(const GDNParams& params, const std::vector<HeldOutPoint>& heldout) {
  double worst = 0.0;
  for (const auto& p : heldout) {
    worst = std::max(worst, w2_distance(gdn_forward(params, p.x, p.t), p.law));
  }
  return worst;
}

TrainResult train(GDNParams initial, const std::vector<TrainingPair>& train_set,
                  const std::vector<HeldOutPoint>& heldout, const TrainConfig& cfg) {
  cfg.validate();
  initial.validate();
  if (train_set.empty()) throw PreconditionError("train: empty training set");

  GDNParams params = std::move(initial);
  Vector theta = params.flatten();
  Vector velocity = Vector::Zero(theta.size());

  const std::size_t n = train_set.size();
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);
  std::vector<std::size_t> order(n);
  std::vector<TrainingPair> minibatch;
  minibatch.reserve(batch);

  TrainResult result{params, {}};
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr =
        cfg.learning_rate * std::pow(cfg.final_lr_fraction, static_cast<double>(epoch) / cfg.epochs);
    std::iota(order.begin(), order.end(), 0);
    KeyedRng rng(cfg.seed, static_cast<std::uint64_t>(RngStream::kShuffle),
                 static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng.engine());

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      minibatch.clear();
      for (std::size_t i = start; i < end; ++i) minibatch.push_back(train_set[order[i]]);
      const GDNGradient g = gdn_gradient(params, minibatch);
      if (!std::isfinite(g.loss) || g.loss > cfg.divergence_threshold) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << " (batch loss " << g.loss << ")";
        throw TrainingDivergedError(os.str(), epoch);
      }
      velocity = cfg.momentum * velocity - lr * g.flatten();
      theta += velocity;
      params.assign_flat(theta);
    }

    const double loss = chart_mse(params, train_set);
    if (!std::isfinite(loss) || loss > cfg.divergence_threshold) {
      std::ostringstream os;
      os << "training diverged at epoch " << epoch << " (loss " << loss << ")";
      throw TrainingDivergedError(os.str(), epoch);
    }
    double held = loss;
    if (!heldout.empty()) {
      try {
        held = heldout_max_w2(params, heldout);
      } catch (const Error& e) {
        // Overflowing parameters surface here as a broken decoded law.
        if (e.kind() != ErrorKind::kNumeric) throw;
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << " (" << e.what() << ")";
        throw TrainingDivergedError(os.str(), epoch);
      }
    }
    result.report.epochs.push_back({epoch, loss, held});

    if (held < best) {
      best = held;
      since_best = 0;
      result.params = params;
      result.report.best_epoch = epoch;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      result.report.early_stopped = true;
      break;
    }
  }
  result.report.final_heldout_max_w2 =
      heldout.empty() ? best : heldout_max_w2(result.params, heldout);
  return result;
}

}  // namespace genmarket
