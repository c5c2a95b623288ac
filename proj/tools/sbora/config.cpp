// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#include "sbora/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sbora::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

double parse_f64(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ConfigError(what + ": expected a finite number, got '" + text + "'");
  return v;
}

std::vector<std::uint64_t> parse_int_grid(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_u64(item, "grid"));
      continue;
    }
    const auto lo = parse_u64(trim(item.substr(0, dots)), "grid");
    const auto hi = parse_u64(trim(item.substr(dots + 2)), "grid");
    if (hi < lo) throw ConfigError("grid: empty range '" + item + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

RunConfig::RunConfig(std::string command, std::vector<KeySpec> schema)
    : command_(std::move(command)), schema_(std::move(schema)) {
  for (const auto& s : schema_) values_[s.name] = s.fallback;
}

const KeySpec& RunConfig::spec(const std::string& key) const {
  const auto it = std::find_if(schema_.begin(), schema_.end(),
                               [&](const KeySpec& s) { return s.name == key; });
  if (it == schema_.end()) throw ConfigError("unknown key '" + key + "' for " + command_);
  return *it;
}

void RunConfig::check_value(const KeySpec& s, const std::string& value) const {
  switch (s.type) {
    case KeyType::integer: (void)parse_u64(value, s.name); break;
    case KeyType::real: (void)parse_f64(value, s.name); break;
    default: break;
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& s = spec(key);
  const auto v = trim(value);
  check_value(s, v);
  values_[key] = v;
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    const auto key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    try {
      set(key, body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

const std::string& RunConfig::raw(const std::string& key) const {
  (void)spec(key);
  return values_.at(key);
}

std::uint64_t RunConfig::integer(const std::string& key) const { return parse_u64(raw(key), key); }

std::uint64_t RunConfig::positive(const std::string& key) const {
  const auto v = integer(key);
  if (v == 0) throw ConfigError(key + " must be positive");
  return v;
}

double RunConfig::real(const std::string& key) const { return parse_f64(raw(key), key); }

const std::string& RunConfig::text(const std::string& key) const { return raw(key); }

std::vector<std::string> RunConfig::list(const std::string& key) const { return split_list(raw(key)); }

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& s : schema_) {
    const auto& v = values_.at(s.name);
    switch (s.type) {
      case KeyType::integer: j[s.name] = parse_u64(v, s.name); break;
      case KeyType::real: j[s.name] = parse_f64(v, s.name); break;
      case KeyType::text: j[s.name] = v; break;
      case KeyType::list: j[s.name] = split_list(v); break;
    }
  }
  return j;
}

}  // namespace sbora::cli
