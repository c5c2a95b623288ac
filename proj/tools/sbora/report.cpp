// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/report.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace sbora::cli {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  line += '\n';
  return line;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json report_header(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = cfg.command();
  j["config"] = cfg.to_json();
  return j;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void emit_json(const nlohmann::ordered_json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty())
    out << text;
  else
    write_file(path, text);
}

void require_input(const std::string& key, const std::string& path) {
  if (path.empty()) throw ConfigError(key + " is required");
  if (!std::filesystem::is_regular_file(path)) throw ConfigError(key + ": no such file " + path);
}

}  // namespace sbora::cli
