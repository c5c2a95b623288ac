// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sbora::cli {

/// Bad command line, bad config file or an unusable setting. Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KeyType { integer, real, text, list };

struct KeySpec {
  std::string name;
  KeyType type;
  std::string fallback;
  std::string help;
};

/// Flat key=value settings for one subcommand.
///
/// Values start at the schema defaults, are replaced by a config file and
/// then by command-line flags. Keys outside the schema are rejected.
class RunConfig {
 public:
  RunConfig(std::string command, std::vector<KeySpec> schema);

  const std::string& command() const noexcept { return command_; }
  const std::vector<KeySpec>& schema() const noexcept { return schema_; }

  /// '#' starts a comment; blank lines are skipped; whitespace around keys and
  /// values is trimmed. A key may appear once per file.
  void load_file(const std::filesystem::path& path);
  void load_text(const std::string& text, const std::string& origin);
  void set(const std::string& key, const std::string& value);

  const std::string& raw(const std::string& key) const;
  std::uint64_t integer(const std::string& key) const;
  /// integer() that must also be > 0.
  std::uint64_t positive(const std::string& key) const;
  double real(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  /// Comma-separated items, trimmed; "" gives an empty list.
  std::vector<std::string> list(const std::string& key) const;

  /// Resolved values, typed, in schema order.
  nlohmann::ordered_json to_json() const;

 private:
  const KeySpec& spec(const std::string& key) const;
  void check_value(const KeySpec& spec, const std::string& value) const;

  std::string command_;
  std::vector<KeySpec> schema_;
  std::map<std::string, std::string> values_;
};

/// "1..4,8,10..12" -> {1,2,3,4,8,10,11,12}; "" -> {}.
std::vector<std::uint64_t> parse_int_grid(const std::string& text);

std::uint64_t parse_u64(const std::string& text, const std::string& what);
double parse_f64(const std::string& text, const std::string& what);

}  // namespace sbora::cli
