#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "genmarket/gdn.hpp"

namespace genmarket {

inline constexpr const char* kToolVersion = GENMARKET_VERSION;

struct Checkpoint {
  GDNParams params;
  std::string scenario_hash;
  std::uint64_t seed = 0;
};

/// {"format", "tool_version", "scenario_hash", "seed", "layer_dims",
///  "activation", "declared_width", "weights": [[row, ...], ...], "biases": [[...], ...]}
nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace genmarket
