#include "genmarket/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "genmarket/errors.hpp"

namespace genmarket {
namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
  throw ConfigError("scenario field '" + field + "': " + msg);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) field_error(path + key, "missing");
  return obj.at(key);
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) field_error(field, "expected an integer");
  return j.get<int>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  return obj.contains(key) ? as_number(obj.at(key), path + key) : fallback;
}

int int_or(const json& obj, const std::string& key, int fallback, const std::string& path) {
  return obj.contains(key) ? as_int(obj.at(key), path + key) : fallback;
}

// Either a bare vector or matrix; vectors become D x 1 columns.
Matrix coefficient_value(const json& j, bool vector_valued, const std::string& field) {
  if (vector_valued) return json_to_vector(j, field);
  return json_to_matrix(j, field);
}

TimeFunction parse_time_function(const json& j, bool vector_valued, const std::string& field) {
  if (!j.is_object()) field_error(field, "expected {\"constant\": ...} or {\"breakpoints\", \"values\"}");
  if (j.contains("constant")) {
    return TimeFunction::constant(coefficient_value(j.at("constant"), vector_valued, field + ".constant"));
  }
  if (!j.contains("breakpoints") || !j.contains("values")) {
    field_error(field, "needs either 'constant' or both 'breakpoints' and 'values'");
  }
  const json& bp = j.at("breakpoints");
  const json& vals = j.at("values");
  if (!bp.is_array() || !vals.is_array() || bp.size() != vals.size() || bp.empty()) {
    field_error(field, "'breakpoints' and 'values' must be arrays of equal, non-zero length");
  }
  std::vector<double> knots;
  std::vector<Matrix> values;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    knots.push_back(as_number(bp[i], field + ".breakpoints"));
    values.push_back(coefficient_value(vals[i], vector_valued,
                                       field + ".values[" + std::to_string(i) + "]"));
  }
  try {
    return TimeFunction::spline(std::move(knots), std::move(values));
  } catch (const Error& e) {
    field_error(field, e.what());
  }
}

}  // namespace

Vector json_to_vector(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_number(j[i], field);
  return v;
}

Matrix json_to_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    field_error(field, "expected a row-major array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      field_error(field, "rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = as_number(row[static_cast<std::size_t>(c)], field);
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PayoffSpec parse_payoff(const json& j, int dim) {
  const std::string p = "payoff.";
  if (!j.is_object()) field_error("payoff", "expected an object");
  const json& kind_j = require(j, "kind", p);
  if (!kind_j.is_string()) field_error("payoff.kind", "expected a string");
  PayoffKind kind;
  try {
    kind = payoff_kind_from_string(kind_j.get<std::string>());
  } catch (const ConfigError& e) {
    field_error("payoff.kind", e.what());
  }
  PayoffSpec spec = PayoffSpec::call_on_average(dim, 0.0);
  try {
    switch (kind) {
      case PayoffKind::kCallOnAverage:
        spec = PayoffSpec::call_on_average(dim, as_number(require(j, "strike", p), "payoff.strike"));
        break;
      case PayoffKind::kPutOnAverage:
        spec = PayoffSpec::put_on_average(dim, as_number(require(j, "strike", p), "payoff.strike"));
        break;
      case PayoffKind::kBasketLinear: {
        Vector w = json_to_vector(require(j, "weights", p), "payoff.weights");
        if (w.size() != dim) field_error("payoff.weights", "length must equal dimension");
        spec = PayoffSpec::basket_linear(std::move(w), number_or(j, "offset", 0.0, p));
        break;
      }
      case PayoffKind::kCustomTable: {
        const json& tables = require(j, "tables", p);
        if (!tables.is_array() || static_cast<int>(tables.size()) != dim) {
          field_error("payoff.tables", "need one {knots, values} table per coordinate");
        }
        std::vector<PiecewiseLinear> parsed;
        for (const auto& t : tables) {
          const Vector k = json_to_vector(require(t, "knots", "payoff.tables[]."), "payoff.tables[].knots");
          const Vector v = json_to_vector(require(t, "values", "payoff.tables[]."), "payoff.tables[].values");
          parsed.push_back({std::vector<double>(k.data(), k.data() + k.size()),
                            std::vector<double>(v.data(), v.data() + v.size())});
        }
        spec = PayoffSpec::custom_table(std::move(parsed));
        // Tables must come with a declared constant.
        if (!j.contains("lip_const")) field_error("payoff.lip_const", "required for custom_table");
        break;
      }
    }
    if (j.contains("lip_const")) {
      spec = spec.with_declared_lipschitz(as_number(j.at("lip_const"), "payoff.lip_const"));
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("scenario field", 0) == 0) throw;
    field_error("payoff", what);
  }
  return spec;
}

bool Scenario::in_domain(const Vector& x, double tol) const {
  if (x.size() != dimension) return false;
  for (int i = 0; i < dimension; ++i) {
    if (x[i] < domain[static_cast<std::size_t>(i)].first - tol ||
        x[i] > domain[static_cast<std::size_t>(i)].second + tol) {
      return false;
    }
  }
  return true;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  Scenario s;
  s.name = doc.value("name", std::string("scenario"));
  s.dimension = as_int(require(doc, "dimension", ""), "dimension");
  if (s.dimension < 1) field_error("dimension", "must be at least 1");
  s.clip_threshold = as_number(require(doc, "clip_threshold", ""), "clip_threshold");
  if (!(s.clip_threshold > 0.0)) field_error("clip_threshold", "must be positive");

  const json& dom = require(doc, "domain", "");
  if (!dom.is_array() || static_cast<int>(dom.size()) != s.dimension) {
    field_error("domain", "expected one [lo, hi] pair per coordinate");
  }
  for (const auto& pair : dom) {
    if (!pair.is_array() || pair.size() != 2) field_error("domain", "each entry must be [lo, hi]");
    const double lo = as_number(pair[0], "domain");
    const double hi = as_number(pair[1], "domain");
    if (!(lo < hi)) field_error("domain", "need lo < hi for every coordinate");
    s.domain.emplace_back(lo, hi);
  }

  s.delta = as_number(require(doc, "delta", ""), "delta");
  s.horizon = as_number(require(doc, "horizon", ""), "horizon");
  if (!(s.delta > 0.0)) field_error("delta", "must be positive");
  if (!(s.delta < s.horizon)) field_error("horizon", "must exceed delta");

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) {
      field_error("seed", "expected a non-negative integer");
    }
    s.seed = doc.at("seed").get<std::uint64_t>();
  }
  s.quad_steps = int_or(doc, "quad_steps", 1024, "");
  if (s.quad_steps < 100) field_error("quad_steps", "must be at least 100");

  const json& coeffs = require(doc, "coefficients", "");
  s.coefficients = OUCoefficients{
      parse_time_function(require(coeffs, "mu", "coefficients."), true, "coefficients.mu"),
      parse_time_function(require(coeffs, "m", "coefficients."), false, "coefficients.m"),
      parse_time_function(require(coeffs, "sigma", "coefficients."), false, "coefficients.sigma")};
  if (s.coefficients.mu.rows() != s.dimension) {
    field_error("coefficients.mu", "length must equal dimension");
  }
  try {
    s.coefficients.validate(s.horizon, s.quad_steps);
  } catch (const Error& e) {
    field_error("coefficients", e.what());
  }

  if (doc.contains("outputs")) {
    s.output_dir = doc.at("outputs").value("dir", s.output_dir);
  }

  s.train.seed = s.seed;
  if (doc.contains("training")) {
    const json& t = doc.at("training");
    const std::string p = "training.";
    s.training_set.n_x = int_or(t, "n_x", s.training_set.n_x, p);
    s.training_set.n_t = int_or(t, "n_t", s.training_set.n_t, p);
    s.architecture.width = int_or(t, "width", s.architecture.width, p);
    s.architecture.depth = int_or(t, "depth", s.architecture.depth, p);
    if (t.contains("activation")) {
      try {
        s.architecture.activation = activation_from_string(t.at("activation").get<std::string>());
      } catch (const std::exception& e) {
        field_error("training.activation", e.what());
      }
    }
    s.train.learning_rate = number_or(t, "learning_rate", s.train.learning_rate, p);
    s.train.final_lr_fraction = number_or(t, "final_lr_fraction", s.train.final_lr_fraction, p);
    s.train.momentum = number_or(t, "momentum", s.train.momentum, p);
    s.train.epochs = int_or(t, "epochs", s.train.epochs, p);
    s.train.batch_size = int_or(t, "batch_size", s.train.batch_size, p);
    s.train.patience = int_or(t, "patience", s.train.patience, p);
    if (t.contains("seed")) s.train.seed = t.at("seed").get<std::uint64_t>();
  }
  if (s.training_set.n_x < 1 || s.training_set.n_t < 1) {
    field_error("training.n_x", "training grid sizes must be positive");
  }
  if (s.architecture.width < 1 || s.architecture.depth < 1) {
    field_error("training.width", "width and depth must be positive");
  }
  try {
    s.train.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("scenario ") + e.what());
  }

  if (doc.contains("eval_grid")) {
    const json& g = doc.at("eval_grid");
    s.eval_grid.n_x = int_or(g, "n_x", s.eval_grid.n_x, "eval_grid.");
    s.eval_grid.n_t = int_or(g, "n_t", s.eval_grid.n_t, "eval_grid.");
  }
  if (s.eval_grid.n_x < 1 || s.eval_grid.n_t < 1) field_error("eval_grid", "sizes must be positive");

  if (doc.contains("payoff")) s.payoff = parse_payoff(doc.at("payoff"), s.dimension);

  if (doc.contains("portfolio")) {
    const json& p = doc.at("portfolio");
    PortfolioInput in;
    in.gamma = number_or(p, "gamma", 0.0, "portfolio.");
    if (!(in.gamma >= 0.0)) field_error("portfolio.gamma", "must be non-negative");
    if (p.contains("mu")) in.mu = json_to_vector(p.at("mu"), "portfolio.mu");
    if (p.contains("sigma")) in.sigma = json_to_matrix(p.at("sigma"), "portfolio.sigma");
    if (in.mu.size() != 0 && in.mu.size() != s.dimension) {
      field_error("portfolio.mu", "length must equal dimension");
    }
    if (in.sigma.size() != 0 && (in.sigma.rows() != s.dimension || in.sigma.cols() != s.dimension)) {
      field_error("portfolio.sigma", "must be D x D");
    }
    s.portfolio = in;
  }

  s.hash = fnv1a_hex(doc.dump());
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace genmarket
