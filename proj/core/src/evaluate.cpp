#include "genmarket/experiment.hpp"

#include <algorithm>

#include "genmarket/errors.hpp"
#include "genmarket/market.hpp"
#include "genmarket/ou.hpp"
#include "genmarket/random.hpp"

namespace genmarket {

TrainResult train(const Scenario& scenario, const std::vector<TrainingPair>& train_set,
                  const TrainConfig& cfg) {
  const auto& arch = scenario.architecture;
  GDNParams init = GDNParams::initialize(
      gdn_layer_dims(scenario.dimension, arch.width, arch.depth), arch.activation, cfg.seed);
  init.declared_width = arch.width;
  return train(std::move(init), train_set, heldout_set(scenario, scenario.eval_grid), cfg);
}

EvalReport evaluate_rcd(const GDNParams& params, const Scenario& scenario, const EvalGrid& grid,
                        const EvalOptions& opts) {
  params.validate();
  if (params.dim() != scenario.dimension) {
    throw DimensionError("evaluate_rcd: network and scenario dimensions differ");
  }
  const ClipConfig clip = scenario.clip();
  EvalReport report;
  report.lipschitz = clip.lipschitz_constant();

  const auto pts = eval_grid_points(scenario, grid);
  std::vector<GaussianMeasure> exact, fitted;
  exact.reserve(pts.size());
  fitted.reserve(pts.size());
  double sum = 0.0;
  for (const auto& p : pts) {
    exact.push_back(exact_marginal(scenario.coefficients, p.x, p.t, scenario.quad_steps).law);
    fitted.push_back(gdn_forward(params, p.x, p.t));
    const double w = w2_distance(fitted.back(), exact.back());
    report.points.push_back({p.x, p.t, w, report.lipschitz * w});
    report.max_w2 = std::max(report.max_w2, w);
    sum += w;
  }
  report.mean_w2 = sum / static_cast<double>(pts.size());
  report.s_law_max = report.lipschitz * report.max_w2;
  report.s_law_mean = report.lipschitz * report.mean_w2;

  const int checks = std::min<int>(opts.spot_checks, static_cast<int>(pts.size()));
  for (int c = 0; c < checks; ++c) {
    const std::size_t idx =
        checks == 1 ? 0 : static_cast<std::size_t>(c) * (pts.size() - 1) / static_cast<std::size_t>(checks - 1);
    const GaussianMeasure& a = exact[idx];
    const GaussianMeasure& b = fitted[idx];
    SampleMatrix z = standard_normal_rows(opts.spot_samples, a.dim(), opts.seed + idx,
                                          RngStream::kSpotCheck);
    SampleMatrix u = z * spd_sqrt(a.cov());
    u.rowwise() += a.mean().transpose();
    SampleMatrix v = (u.rowwise() - a.mean().transpose()) * transport_matrix(a, b);
    v.rowwise() += b.mean().transpose();
    const auto est = empirical_w2(clipped_exp_rows(u, clip), clipped_exp_rows(v, clip));
    report.spot_checks.push_back({idx, est.value, est.regularization, report.s_law_max});
  }
  return report;
}

}  // namespace genmarket
