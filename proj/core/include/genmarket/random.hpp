#pragma once

#include <cstdint>
#include <random>

#include "genmarket/linalg.hpp"

namespace genmarket {

/// Rows per independently keyed block when filling large sample matrices.
/// Fixed so that output never depends on the thread count.
inline constexpr Eigen::Index kRngBlockRows = 1024;

/// A generator keyed by (seed, stream, index): each path or sample block gets
/// its own engine, so results do not depend on evaluation order.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Stream tags keep different consumers of one seed apart.
enum class RngStream : std::uint64_t {
  kEulerMaruyama = 1,
  kPushforward = 2,
  kTrainingSet = 3,
  kInit = 4,
  kShuffle = 5,
  kPricing = 6,
  kSpotCheck = 7,
};

/// n x dim matrix of iid N(0,1) draws, filled in keyed blocks of kRngBlockRows.
SampleMatrix standard_normal_rows(Eigen::Index n, int dim, std::uint64_t seed, RngStream stream);

}  // namespace genmarket
