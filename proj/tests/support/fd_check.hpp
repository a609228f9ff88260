#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "genmarket/gdn.hpp"
#include "test_support.hpp"

namespace gm_test {

struct FdOutcome {
  double worst_relative = 0.0;
  int coordinates = 0;
};

inline std::vector<genmarket::TrainingPair> random_batch(std::mt19937_64& rng, int dim, int n) {
  std::uniform_real_distribution<double> ut(0.1, 1.0);
  std::vector<genmarket::TrainingPair> batch;
  for (int i = 0; i < n; ++i) {
    genmarket::ChartCoords c{random_vector(rng, dim), random_vector(rng, genmarket::sym_size(dim))};
    batch.push_back({random_vector(rng, dim), ut(rng), c});
  }
  return batch;
}

// Central differences with step h on every parameter. The relative error is
// taken against max(|analytic|, |numeric|, 1e-3 * largest gradient entry) so
// coordinates that are zero up to round-off do not dominate.
inline FdOutcome finite_difference_check(const genmarket::GDNParams& params,
                                         const std::vector<genmarket::TrainingPair>& batch,
                                         double h = 1e-4) {
  const genmarket::Vector g = genmarket::gdn_gradient(params, batch).flatten();
  const genmarket::Vector theta = params.flatten();
  const double floor = 1e-3 * g.cwiseAbs().maxCoeff();
  genmarket::GDNParams probe = params;
  FdOutcome out;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    genmarket::Vector tp = theta, tm = theta;
    tp[i] += h;
    tm[i] -= h;
    probe.assign_flat(tp);
    const double lp = genmarket::chart_mse(probe, batch);
    probe.assign_flat(tm);
    const double lm = genmarket::chart_mse(probe, batch);
    const double fd = (lp - lm) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(g[i]), floor});
    out.worst_relative = std::max(out.worst_relative, std::abs(fd - g[i]) / scale);
    ++out.coordinates;
  }
  return out;
}

}  // namespace gm_test
