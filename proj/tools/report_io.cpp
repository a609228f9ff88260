#include "report_io.hpp"

#include <charconv>
#include <fstream>

#include "genmarket/checkpoint.hpp"
#include "genmarket/errors.hpp"

namespace genmarket::cli {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& scenario_hash,
                     const std::vector<std::string>& header)
    : path_(path) {
  body_ = "# genmarket " + std::string(kToolVersion) + " scenario_hash=" + scenario_hash + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) body_ += (i ? "," : "") + header[i];
  body_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_double(values[i]);
  }
  body_ += '\n';
}

void CsvWriter::close() {
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path_.string());
  out << body_;
}

void write_json(const std::filesystem::path& path, nlohmann::json doc,
                const std::string& scenario_hash) {
  doc["tool_version"] = kToolVersion;
  doc["scenario_hash"] = scenario_hash;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace genmarket::cli
