#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genmarket/linalg.hpp"

namespace genmarket::cli {

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// CSV writer; the first line is a `#` comment carrying tool version and scenario hash.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& scenario_hash,
            const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void close();

 private:
  std::filesystem::path path_;
  std::string body_;
};

/// Writes `doc` (with tool_version and scenario_hash added) as indented JSON.
void write_json(const std::filesystem::path& path, nlohmann::json doc,
                const std::string& scenario_hash);

nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace genmarket::cli
