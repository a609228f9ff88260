#pragma once

#include "genmarket/empirical_ot.hpp"

namespace gm_test {

// Squared W2 between the laws behind two large sample sets, from exact
// assignments on consecutive minibatches of size m. The cross term
// overestimates by a sampling bias; the same-law terms (batch b against b+1)
// carry about the same bias and are subtracted.
inline double debiased_minibatch_w2_sq(const genmarket::SampleMatrix& x,
                                       const genmarket::SampleMatrix& y, Eigen::Index m) {
  const Eigen::Index batches = x.rows() / m;
  auto cost = [m](const genmarket::SampleMatrix& a, Eigen::Index ia, const genmarket::SampleMatrix& b,
                  Eigen::Index ib) {
    const genmarket::Matrix c =
        genmarket::pairwise_sq_dist(a.middleRows(ia * m, m), b.middleRows(ib * m, m));
    const auto assign = genmarket::optimal_assignment(c);
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) total += c(i, assign[static_cast<std::size_t>(i)]);
    return total / static_cast<double>(m);
  };
  double cross = 0.0, self_x = 0.0, self_y = 0.0;
  for (Eigen::Index b = 0; b < batches; ++b) {
    const Eigen::Index next = (b + 1) % batches;
    cross += cost(x, b, y, b);
    self_x += cost(x, b, x, next);
    self_y += cost(y, b, y, next);
  }
  return (cross - 0.5 * (self_x + self_y)) / static_cast<double>(batches);
}

}  // namespace gm_test
