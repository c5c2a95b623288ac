// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbora/config.hpp"

namespace sbora::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr int kSchemaVersion = 1;

/// RFC 4180 field: quoted when it holds a comma, quote, CR or LF; quotes doubled.
std::string csv_field(std::string_view value);
std::string csv_line(const std::vector<std::string>& fields);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// {"schema_version", "command", "config"} header shared by every report.
nlohmann::ordered_json report_header(const RunConfig& cfg);

/// Writes bytes verbatim; throws std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Pretty JSON with a trailing newline, to `path` or to `out` when path is empty.
void emit_json(const nlohmann::ordered_json& j, const std::string& path, std::ostream& out);

/// ConfigError unless the file exists.
void require_input(const std::string& key, const std::string& path);

}  // namespace sbora::cli
