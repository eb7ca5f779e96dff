// Copyright 2026 The bundle-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bundle/error.hpp"

namespace bundle::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kManifestVersion = 1;
inline constexpr int kCsvSchemaVersion = 1;

/// Comma-separated output with a fixed header. Reals are written with 17
/// significant digits so that reruns compare bit-identical; missing values
/// are empty fields.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& operator<<(double x);
    CsvWriter& operator<<(std::optional<double> x);
    CsvWriter& operator<<(long long x);
    CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
    CsvWriter& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
    CsvWriter& operator<<(const std::string& s);
    CsvWriter& operator<<(std::string_view s) { return *this << std::string(s); }
    CsvWriter& operator<<(const char* s) { return *this << std::string(s); }
    void end_row();

  private:
    void separator();

    std::ofstream out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

std::string format_real(double x);

/// Lower-case hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestData {
    std::string experiment;
    nlohmann::json config;
    nlohmann::json derived = nlohmann::json::object();  ///< quantities resolved at run time, e.g. Δ
    double wall_time_s = 0.0;
    std::vector<std::string> files;  ///< names relative to the output directory
    Warnings warnings;
    std::optional<std::pair<ErrorKind, std::string>> error;
    int exit_code = 0;
};

/// Writes manifest.json (config echo, version, wall time, per-file checksums,
/// warnings, error record).
void write_manifest(const std::filesystem::path& dir, const ManifestData& m);

}  // namespace bundle::cli
