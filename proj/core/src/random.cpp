#include "genmarket/random.hpp"

#include <algorithm>

#include "genmarket/parallel.hpp"

namespace genmarket {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

KeyedRng::KeyedRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
    : engine_(make_engine(seed, stream, index)) {}

SampleMatrix standard_normal_rows(Eigen::Index n, int dim, std::uint64_t seed, RngStream stream) {
  SampleMatrix z(n, dim);
  const auto blocks = static_cast<std::size_t>((n + kRngBlockRows - 1) / kRngBlockRows);
  parallel_for(blocks, [&](std::size_t b) {
    KeyedRng rng(seed, static_cast<std::uint64_t>(stream), b);
    const Eigen::Index begin = static_cast<Eigen::Index>(b) * kRngBlockRows;
    const Eigen::Index end = std::min(n, begin + kRngBlockRows);
    for (Eigen::Index i = begin; i < end; ++i) {
      for (int j = 0; j < dim; ++j) z(i, j) = rng.normal();
    }
  });
  return z;
}

}  // namespace genmarket
