#include <benchmark/benchmark.h>

#include <random>

#include "genmarket/empirical_ot.hpp"
#include "genmarket/gaussian.hpp"
#include "genmarket/gdn.hpp"
#include "genmarket/ou.hpp"
#include "genmarket/random.hpp"

using namespace genmarket;

namespace {

GaussianMeasure random_law(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix a(d, d);
  Vector m(d);
  for (int i = 0; i < d; ++i) {
    m[i] = nd(rng);
    for (int j = 0; j < d; ++j) a(i, j) = nd(rng);
  }
  Matrix s = a * a.transpose() / d + 0.2 * Matrix::Identity(d, d);
  return {m, 0.5 * (s + s.transpose())};
}

void BM_W2Distance(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto a = random_law(d, 1), b = random_law(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(w2_distance(a, b));
}
BENCHMARK(BM_W2Distance)->Arg(2)->Arg(5)->Arg(10);

void BM_ExactMarginal(benchmark::State& state) {
  Matrix m(2, 2);
  m << -0.5, 0.1, 0.1, -0.3;
  Matrix s(2, 2);
  s << 0.3, 0.05, 0.05, 0.2;
  const auto c = OUCoefficients::constant(Eigen::Vector2d(0.05, -0.02), m, s);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_marginal(c, Eigen::Vector2d(0.2, 0.3), 1.0, steps));
}
BENCHMARK(BM_ExactMarginal)->Arg(256)->Arg(1024);

void BM_GdnGradient(benchmark::State& state) {
  const auto p = GDNParams::initialize(gdn_layer_dims(2, 64, 4), Activation::kTanh, 3);
  std::vector<TrainingPair> batch;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < state.range(0); ++i) {
    batch.push_back({Eigen::Vector2d(u(rng), u(rng)), 0.5 + 0.4 * u(rng),
                     ChartCoords{Eigen::Vector2d(u(rng), u(rng)), Eigen::Vector3d(u(rng), u(rng), u(rng))}});
  }
  for (auto _ : state) benchmark::DoNotOptimize(gdn_gradient(p, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GdnGradient)->Arg(64)->Arg(256);

void BM_EmpiricalW2(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto method = static_cast<OtMethod>(state.range(1));
  SampleMatrix a = standard_normal_rows(n, 2, 1, RngStream::kSpotCheck);
  SampleMatrix b = standard_normal_rows(n, 2, 2, RngStream::kSpotCheck);
  b.col(0).array() += 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(empirical_w2(a, b, method));
}
BENCHMARK(BM_EmpiricalW2)
    ->Args({256, static_cast<int>(OtMethod::kSinkhorn)})
    ->Args({256, static_cast<int>(OtMethod::kAssignment)})
    ->Args({1024, static_cast<int>(OtMethod::kAssignment)})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
