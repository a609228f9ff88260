#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "genmarket/coefficients.hpp"
#include "genmarket/market.hpp"
#include "genmarket/portfolio.hpp"
#include "genmarket/pricing.hpp"
#include "genmarket/train.hpp"

namespace genmarket {

/// Tensor grid over K x [delta, T]: n_x points per coordinate (ends included)
/// and n_t times (ends included).
struct EvalGrid {
  int n_x = 6;
  int n_t = 7;
};

struct TrainingSetSpec {
  int n_x = 64;
  int n_t = 16;
};

struct Scenario {
  std::string name;
  int dimension = 1;
  double clip_threshold = 2.0;
  std::vector<std::pair<double, double>> domain;  // per-coordinate [lo, hi]
  double delta = 0.1;
  double horizon = 1.0;
  OUCoefficients coefficients;
  std::uint64_t seed = 0;
  int quad_steps = 1024;
  std::string output_dir = "out";

  TrainingSetSpec training_set;
  Architecture architecture;
  TrainConfig train;
  EvalGrid eval_grid;
  std::optional<PayoffSpec> payoff;
  std::optional<PortfolioInput> portfolio;

  std::string hash;  // FNV-1a of the canonical JSON text

  ClipConfig clip() const { return ClipConfig{clip_threshold, dimension}; }
  bool in_domain(const Vector& x, double tol = 1e-12) const;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

/// Parsers shared with the CLI for flag values and records.
Vector json_to_vector(const nlohmann::json& j, const std::string& field);
Matrix json_to_matrix(const nlohmann::json& j, const std::string& field);
nlohmann::json vector_to_json(const Vector& v);
nlohmann::json matrix_to_json(const Matrix& m);

PayoffSpec parse_payoff(const nlohmann::json& j, int dim);

}  // namespace genmarket
