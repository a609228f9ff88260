#include "genmarket/dataset.hpp"

#include <cmath>
#include <sstream>

#include "genmarket/errors.hpp"
#include "genmarket/ou.hpp"
#include "genmarket/random.hpp"

namespace genmarket {
namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

std::vector<double> time_grid(double lo, double hi, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)] = n == 1 ? lo : lo + (hi - lo) * j / (n - 1);
  return t;
}

}  // namespace

std::vector<TrainingPair> build_training_set(const Scenario& scenario, int n_x, int n_t,
                                             std::uint64_t seed) {
  if (!(scenario.delta > 0.0)) {
    std::ostringstream os;
    os << "build_training_set: delta must be positive, got " << scenario.delta;
    throw DomainError(os.str());
  }
  if (n_x < 1 || n_t < 1) throw PreconditionError("build_training_set: n_x and n_t must be positive");
  const int d = scenario.dimension;
  if (d > static_cast<int>(std::size(kPrimes))) {
    throw ConfigError("build_training_set: Halton points supported up to dimension 16");
  }

  KeyedRng rng(seed, static_cast<std::uint64_t>(RngStream::kTrainingSet), 0);
  Vector shift(d);
  for (int i = 0; i < d; ++i) shift[i] = rng.uniform();

  // The sup over K is usually attained on its corners, which a shifted Halton
  // set never hits; seed the set with them when there is room.
  std::vector<Vector> states;
  if (d <= 10 && n_x > (1 << d)) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vector x(d);
      for (int i = 0; i < d; ++i) {
        const auto [lo, hi] = scenario.domain[static_cast<std::size_t>(i)];
        x[i] = (mask >> i) & 1 ? hi : lo;
      }
      states.push_back(std::move(x));
    }
  }
  const int n_halton = n_x - static_cast<int>(states.size());
  for (int k = 0; k < n_halton; ++k) {
    Vector x(d);
    for (int i = 0; i < d; ++i) {
      double u = radical_inverse(static_cast<std::uint64_t>(k) + 1, kPrimes[i]) + shift[i];
      u -= std::floor(u);
      const auto [lo, hi] = scenario.domain[static_cast<std::size_t>(i)];
      x[i] = lo + (hi - lo) * u;
    }
    states.push_back(std::move(x));
  }

  std::vector<TrainingPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n_x) * static_cast<std::size_t>(n_t));
  for (double t : time_grid(scenario.delta, scenario.horizon, n_t)) {
    for (const auto& x : states) {
      const auto law = exact_marginal(scenario.coefficients, x, t, scenario.quad_steps).law;
      pairs.push_back({x, t, chart_encode(law)});
    }
  }
  return pairs;
}

std::vector<GridPoint> eval_grid_points(const Scenario& scenario, const EvalGrid& grid) {
  if (grid.n_x < 1 || grid.n_t < 1) throw ConfigError("evaluation grid sizes must be positive");
  const int d = scenario.dimension;
  std::size_t per_time = 1;
  for (int i = 0; i < d; ++i) per_time *= static_cast<std::size_t>(grid.n_x);

  std::vector<GridPoint> pts;
  pts.reserve(per_time * static_cast<std::size_t>(grid.n_t));
  for (double t : time_grid(scenario.delta, scenario.horizon, grid.n_t)) {
    for (std::size_t flat = 0; flat < per_time; ++flat) {
      Vector x(d);
      std::size_t rem = flat;
      for (int i = 0; i < d; ++i) {
        const int k = static_cast<int>(rem % static_cast<std::size_t>(grid.n_x));
        rem /= static_cast<std::size_t>(grid.n_x);
        const auto [lo, hi] = scenario.domain[static_cast<std::size_t>(i)];
        x[i] = grid.n_x == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (grid.n_x - 1);
      }
      pts.push_back({std::move(x), t});
    }
  }
  return pts;
}

std::vector<HeldOutPoint> heldout_set(const Scenario& scenario, const EvalGrid& grid) {
  std::vector<HeldOutPoint> out;
  for (const auto& p : eval_grid_points(scenario, grid)) {
    out.push_back({p.x, p.t, exact_marginal(scenario.coefficients, p.x, p.t, scenario.quad_steps).law});
  }
  return out;
}

}  // namespace genmarket
