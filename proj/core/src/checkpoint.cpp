#include "genmarket/checkpoint.hpp"

#include <fstream>

#include "genmarket/errors.hpp"
#include "genmarket/scenario.hpp"

namespace genmarket {

using nlohmann::json;

json checkpoint_to_json(const Checkpoint& ckpt) {
  const GDNParams& p = ckpt.params;
  json doc;
  doc["format"] = "genmarket-gdn";
  doc["tool_version"] = kToolVersion;
  doc["scenario_hash"] = ckpt.scenario_hash;
  doc["seed"] = ckpt.seed;
  doc["layer_dims"] = p.layer_dims;
  doc["activation"] = to_string(p.activation);
  doc["declared_width"] = p.declared_width;
  json weights = json::array();
  json biases = json::array();
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    weights.push_back(matrix_to_json(p.weights[k]));
    biases.push_back(vector_to_json(p.biases[k]));
  }
  doc["weights"] = std::move(weights);
  doc["biases"] = std::move(biases);
  return doc;
}

Checkpoint checkpoint_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string()) != "genmarket-gdn") {
      throw ConfigError("checkpoint: missing or unknown 'format'");
    }
    Checkpoint c;
    c.scenario_hash = doc.value("scenario_hash", std::string());
    c.seed = doc.value("seed", std::uint64_t{0});
    c.params.layer_dims = doc.at("layer_dims").get<std::vector<int>>();
    c.params.activation = activation_from_string(doc.at("activation").get<std::string>());
    c.params.declared_width = doc.value("declared_width", 0);
    const json& w = doc.at("weights");
    const json& b = doc.at("biases");
    if (!w.is_array() || !b.is_array() || w.size() != b.size()) {
      throw ConfigError("checkpoint: 'weights' and 'biases' must be arrays of equal length");
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
      c.params.weights.push_back(json_to_matrix(w[k], "checkpoint.weights"));
      c.params.biases.push_back(json_to_vector(b[k], "checkpoint.biases"));
    }
    c.params.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("checkpoint: malformed field: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(ckpt).dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(doc);
}

}  // namespace genmarket
