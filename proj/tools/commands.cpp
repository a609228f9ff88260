#include "commands.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <sstream>

#include "genmarket/checkpoint.hpp"
#include "genmarket/errors.hpp"
#include "genmarket/experiment.hpp"
#include "genmarket/ou.hpp"
#include "genmarket/portfolio.hpp"
#include "genmarket/pricing.hpp"
#include "genmarket/scenario.hpp"
#include "report_io.hpp"

namespace genmarket::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string scenario_path;
  std::string out_dir;  // empty: scenario's outputs.dir
  std::optional<std::uint64_t> seed;
};

struct SimulateOptions {
  std::optional<double> t;
  std::vector<double> x;
  int paths = 10000;
  int steps = 1000;
};

struct FitOptions {
  std::optional<int> epochs, n_x, n_t, width, depth, patience;
};

struct EvalOptionsCli {
  std::string checkpoint;
  std::optional<int> grid_n_x, grid_n_t;
  int spot_checks = 5;
  int spot_samples = 512;
};

struct PriceOptions {
  std::string checkpoint;
  std::string eval_summary;
  std::vector<double> x;
  std::optional<double> t;
  long long n = 100000;
};

struct PortfolioOptions {
  std::string checkpoint;
  std::optional<double> gamma;
  std::vector<double> x;
  std::optional<double> t;
};

fs::path output_dir(const CommonOptions& c, const Scenario& s) {
  fs::path dir = c.out_dir.empty() ? fs::path(s.output_dir) : fs::path(c.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::uint64_t seed_of(const CommonOptions& c, const Scenario& s) { return c.seed.value_or(s.seed); }

Vector state_or_center(const std::vector<double>& x, const Scenario& s) {
  if (x.empty()) {
    Vector c(s.dimension);
    for (int i = 0; i < s.dimension; ++i) {
      c[i] = 0.5 * (s.domain[static_cast<std::size_t>(i)].first + s.domain[static_cast<std::size_t>(i)].second);
    }
    return c;
  }
  if (static_cast<int>(x.size()) != s.dimension) {
    std::ostringstream os;
    os << "--x has " << x.size() << " entries, scenario dimension is " << s.dimension;
    throw DimensionError(os.str());
  }
  return Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

void require_query_in_scope(const Scenario& s, const Vector& x, double t) {
  if (!s.in_domain(x)) throw PreconditionError("query state --x lies outside the scenario domain K");
  if (t < s.delta - 1e-12 || t > s.horizon + 1e-12) {
    std::ostringstream os;
    os << "query time " << t << " lies outside [delta, horizon] = [" << s.delta << ", " << s.horizon << "]";
    throw PreconditionError(os.str());
  }
}

Checkpoint load_checked(const std::string& path, const Scenario& s, std::ostream& err) {
  Checkpoint c = load_checkpoint(path);
  if (c.params.dim() != s.dimension) {
    throw DimensionError("checkpoint dimension does not match the scenario");
  }
  if (!c.scenario_hash.empty() && c.scenario_hash != s.hash) {
    err << "warning: checkpoint was trained on scenario " << c.scenario_hash << ", current is "
        << s.hash << "\n";
  }
  return c;
}

std::string default_in(const std::string& given, const fs::path& dir, const char* name) {
  return given.empty() ? (dir / name).string() : given;
}

int cmd_simulate(const CommonOptions& c, const SimulateOptions& o, std::ostream& out) {
  const Scenario s = load_scenario(c.scenario_path);
  const fs::path dir = output_dir(c, s);
  const double t = o.t.value_or(s.horizon);
  const Vector x0 = state_or_center(o.x, s);
  const std::uint64_t seed = seed_of(c, s);
  if (o.paths < 1 || o.steps < 1) throw ConfigError("--paths and --steps must be positive");

  const MarginalLaw exact = exact_marginal(s.coefficients, x0, t, s.quad_steps);
  const SampleMatrix paths = euler_maruyama_paths(s.coefficients, x0, t, o.steps, o.paths, seed);

  std::vector<std::string> header;
  for (int i = 0; i < s.dimension; ++i) header.push_back("x" + std::to_string(i));
  CsvWriter csv(dir / "terminal_states.csv", s.hash, header);
  std::vector<double> row(static_cast<std::size_t>(s.dimension));
  for (Eigen::Index p = 0; p < paths.rows(); ++p) {
    for (int i = 0; i < s.dimension; ++i) row[static_cast<std::size_t>(i)] = paths(p, i);
    csv.row(row);
  }
  csv.close();

  const Vector mean = paths.colwise().mean().transpose();
  const SampleMatrix centered = paths.rowwise() - mean.transpose();
  const Matrix cov = paths.rows() > 1 ? Matrix(centered.transpose() * centered / double(paths.rows() - 1))
                                      : Matrix::Zero(s.dimension, s.dimension);
  json doc;
  doc["t"] = t;
  doc["x0"] = vector_to_json(x0);
  doc["exact_mean"] = vector_to_json(exact.law.mean());
  doc["exact_cov"] = matrix_to_json(exact.law.cov());
  doc["sample_mean"] = vector_to_json(mean);
  doc["sample_cov"] = matrix_to_json(cov);
  doc["n_paths"] = o.paths;
  doc["n_steps"] = o.steps;
  doc["seed"] = seed;
  write_json(dir / "exact_marginal.json", doc, s.hash);
  out << "simulated " << o.paths << " paths to t=" << t << " in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_fit(const CommonOptions& c, const FitOptions& o, std::ostream& out) {
  Scenario s = load_scenario(c.scenario_path);
  const fs::path dir = output_dir(c, s);
  if (o.epochs) s.train.epochs = *o.epochs;
  if (o.patience) s.train.patience = *o.patience;
  if (o.n_x) s.training_set.n_x = *o.n_x;
  if (o.n_t) s.training_set.n_t = *o.n_t;
  if (o.width) s.architecture.width = *o.width;
  if (o.depth) s.architecture.depth = *o.depth;
  if (c.seed) s.train.seed = *c.seed;

  const auto train_set = build_training_set(s, s.training_set.n_x, s.training_set.n_t, s.train.seed);
  const TrainResult result = train(s, train_set, s.train);

  save_checkpoint({result.params, s.hash, s.train.seed}, dir / "checkpoint.json");
  CsvWriter csv(dir / "training_report.csv", s.hash, {"epoch", "surrogate_loss", "heldout_max_w2"});
  for (const auto& e : result.report.epochs) {
    csv.row({static_cast<double>(e.epoch), e.surrogate_loss, e.heldout_max_w2});
  }
  csv.close();
  out << "trained " << train_set.size() << " pairs for " << result.report.epochs.size()
      << " epochs; best epoch " << result.report.best_epoch << ", held-out max W2 "
      << format_double(result.report.final_heldout_max_w2) << "\n";
  return kExitOk;
}

int cmd_eval(const CommonOptions& c, const EvalOptionsCli& o, std::ostream& out, std::ostream& err) {
  const Scenario s = load_scenario(c.scenario_path);
  const fs::path dir = output_dir(c, s);
  const Checkpoint ckpt = load_checked(default_in(o.checkpoint, dir, "checkpoint.json"), s, err);
  EvalGrid grid = s.eval_grid;
  if (o.grid_n_x) grid.n_x = *o.grid_n_x;
  if (o.grid_n_t) grid.n_t = *o.grid_n_t;
  if (o.spot_checks < 0 || o.spot_samples < 2) throw ConfigError("invalid spot-check settings");

  const EvalReport r = evaluate_rcd(ckpt.params, s, grid,
                                    EvalOptions{o.spot_checks, o.spot_samples, seed_of(c, s)});

  std::vector<std::string> header{"index"};
  for (int i = 0; i < s.dimension; ++i) header.push_back("x" + std::to_string(i));
  header.insert(header.end(), {"t", "w2_x_law", "s_law_bound"});
  CsvWriter csv(dir / "eval_report.csv", s.hash, header);
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    std::vector<double> row{static_cast<double>(k)};
    for (int i = 0; i < s.dimension; ++i) row.push_back(r.points[k].x[i]);
    row.insert(row.end(), {r.points[k].t, r.points[k].w2, r.points[k].s_law_bound});
    csv.row(row);
  }
  csv.close();

  json doc;
  doc["epsilon"] = r.max_w2;
  doc["mean_w2"] = r.mean_w2;
  doc["s_law_max"] = r.s_law_max;
  doc["s_law_mean"] = r.s_law_mean;
  doc["lipschitz"] = r.lipschitz;
  doc["grid"] = {{"n_x", grid.n_x}, {"n_t", grid.n_t}, {"points", r.points.size()}};
  json checks = json::array();
  for (const auto& sc : r.spot_checks) {
    checks.push_back({{"grid_index", sc.grid_index},
                      {"empirical_w2", sc.empirical_w2},
                      {"regularization", sc.regularization},
                      {"bound", sc.bound}});
  }
  doc["spot_checks"] = std::move(checks);
  write_json(dir / "eval_summary.json", doc, s.hash);
  out << "evaluated " << r.points.size() << " grid points: max W2 " << format_double(r.max_w2)
      << ", certified price-law bound " << format_double(r.s_law_max) << "\n";
  return kExitOk;
}

int cmd_price(const CommonOptions& c, const PriceOptions& o, std::ostream& out, std::ostream& err) {
  const Scenario s = load_scenario(c.scenario_path);
  const fs::path dir = output_dir(c, s);
  if (!s.payoff) throw ConfigError("scenario field 'payoff': missing (required by price)");
  const Vector x = state_or_center(o.x, s);
  const double t = o.t.value_or(s.horizon);
  require_query_in_scope(s, x, t);

  const fs::path summary_path = default_in(o.eval_summary, dir, "eval_summary.json");
  if (!fs::exists(summary_path)) {
    throw PreconditionError("evaluation report " + summary_path.string() +
                            " not found; run `genmarket eval` first");
  }
  const json summary = read_json(summary_path);
  if (!summary.contains("epsilon") || !summary.at("epsilon").is_number()) {
    throw PreconditionError("evaluation report lacks 'epsilon'");
  }
  const Checkpoint ckpt = load_checked(default_in(o.checkpoint, dir, "checkpoint.json"), s, err);
  const std::uint64_t seed = seed_of(c, s);
  const PricingResult r = price_claim(ckpt.params, x, t, *s.payoff, o.n, seed, s.clip(),
                                      summary.at("epsilon").get<double>());
  json doc;
  doc["price"] = r.price;
  doc["se"] = r.standard_error;
  doc["bias_bound"] = r.certified_bias_bound;
  doc["n"] = r.n;
  doc["seed"] = r.seed;
  doc["epsilon"] = r.epsilon;
  doc["lipschitz_norm"] = r.lipschitz_norm;
  doc["payoff"] = to_string(s.payoff->kind());
  doc["x"] = vector_to_json(x);
  doc["t"] = t;
  write_json(dir / "pricing.json", doc, s.hash);
  out << "price " << format_double(r.price) << " (se " << format_double(r.standard_error)
      << ", certified bias bound " << format_double(r.certified_bias_bound) << ")\n";
  return kExitOk;
}

int cmd_portfolio(const CommonOptions& c, const PortfolioOptions& o, std::ostream& out,
                  std::ostream& err) {
  const Scenario s = load_scenario(c.scenario_path);
  const fs::path dir = output_dir(c, s);
  double gamma = s.portfolio ? s.portfolio->gamma : 0.0;
  if (o.gamma) gamma = *o.gamma;

  json doc;
  Vector w;
  if (!o.checkpoint.empty()) {
    const Vector x = state_or_center(o.x, s);
    const double t = o.t.value_or(s.horizon);
    require_query_in_scope(s, x, t);
    const Checkpoint ckpt = load_checked(o.checkpoint, s, err);
    w = portfolio_from_model(ckpt.params, x, t, gamma);
    doc["source"] = "model";
    doc["x"] = vector_to_json(x);
    doc["t"] = t;
  } else {
    if (!s.portfolio || s.portfolio->mu.size() == 0 || s.portfolio->sigma.size() == 0) {
      throw ConfigError(
          "scenario field 'portfolio': needs 'mu' and 'sigma' when no --checkpoint is given");
    }
    w = efficient_portfolio(PortfolioInput{gamma, s.portfolio->mu, s.portfolio->sigma});
    doc["source"] = "explicit";
  }
  doc["gamma"] = gamma;
  doc["weights"] = vector_to_json(w);
  doc["budget"] = w.sum();
  write_json(dir / "portfolio.json", doc, s.hash);
  out << "weights";
  for (Eigen::Index i = 0; i < w.size(); ++i) out << ' ' << format_double(w[i]);
  out << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"genmarket: learn and query Gaussian market laws"};
  app.name(args.empty() ? "genmarket" : args.front());
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out-dir", common.out_dir, "Output directory (default: scenario outputs.dir)");
    sub->add_option("--seed", common.seed, "Override the scenario seed");
  };

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Euler-Maruyama paths and the exact marginal");
  add_common(simulate);
  simulate->add_option("--t", sim.t, "Horizon time (default: scenario horizon)");
  simulate->add_option("--x", sim.x, "Initial state, comma separated (default: centre of K)")->delimiter(',');
  simulate->add_option("--paths", sim.paths, "Number of paths");
  simulate->add_option("--steps", sim.steps, "Euler steps per path");

  FitOptions fit_o;
  auto* fit = app.add_subcommand("fit", "Train the network on the scenario");
  add_common(fit);
  fit->add_option("--epochs", fit_o.epochs);
  fit->add_option("--patience", fit_o.patience);
  fit->add_option("--n-x", fit_o.n_x, "Training states");
  fit->add_option("--n-t", fit_o.n_t, "Training times");
  fit->add_option("--width", fit_o.width);
  fit->add_option("--depth", fit_o.depth);

  EvalOptionsCli eval_o;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint against the exact law");
  add_common(eval);
  eval->add_option("--checkpoint", eval_o.checkpoint, "Checkpoint (default: <out-dir>/checkpoint.json)");
  eval->add_option("--grid-n-x", eval_o.grid_n_x, "Grid points per state coordinate");
  eval->add_option("--grid-n-t", eval_o.grid_n_t, "Grid times");
  eval->add_option("--spot-checks", eval_o.spot_checks, "Sample-based price-law checks");
  eval->add_option("--spot-samples", eval_o.spot_samples, "Samples per spot check");

  PriceOptions price_o;
  auto* price = app.add_subcommand("price", "Monte Carlo price of the scenario payoff");
  add_common(price);
  price->add_option("--checkpoint", price_o.checkpoint);
  price->add_option("--eval-summary", price_o.eval_summary,
                    "Evaluation summary (default: <out-dir>/eval_summary.json)");
  price->add_option("--x", price_o.x)->delimiter(',');
  price->add_option("--t", price_o.t);
  price->add_option("--n", price_o.n, "Monte Carlo samples");

  PortfolioOptions port_o;
  auto* portfolio = app.add_subcommand("portfolio", "Mean-variance efficient weights");
  add_common(portfolio);
  portfolio->add_option("--checkpoint", port_o.checkpoint, "Use the model's law at (x, t)");
  portfolio->add_option("--gamma", port_o.gamma);
  portfolio->add_option("--x", port_o.x)->delimiter(',');
  portfolio->add_option("--t", port_o.t);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(common, sim, out);
    if (fit->parsed()) return cmd_fit(common, fit_o, out);
    if (eval->parsed()) return cmd_eval(common, eval_o, out, err);
    if (price->parsed()) return cmd_price(common, price_o, out, err);
    if (portfolio->parsed()) return cmd_portfolio(common, port_o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kConfig ? kExitConfig : kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace genmarket::cli
