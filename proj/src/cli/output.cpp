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


#include "bundle/cli/output.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace bundle::cli {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw Error(ErrorKind::config_error, "cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::separator() {
    if (filled_ > 0) out_ << ',';
    ++filled_;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", x);
    return buf.data();
}

CsvWriter& CsvWriter::operator<<(double x) {
    separator();
    out_ << format_real(x);
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::optional<double> x) {
    separator();
    if (x) out_ << format_real(*x);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
    separator();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
    separator();
    if (s.find_first_of(",\"\n") == std::string::npos) {
        out_ << s;
    } else {
        out_ << '"';
        for (char ch : s) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
        out_ << '"';
    }
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) {
        throw Error(ErrorKind::invalid_argument, "csv row has " + std::to_string(filled_) +
                                                     " fields, header has " + std::to_string(columns_));
    }
    out_ << '\n';
    filled_ = 0;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::config_error, "cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

void write_manifest(const std::filesystem::path& dir, const ManifestData& m) {
    nlohmann::json j;
    j["manifest_version"] = kManifestVersion;
    j["tool"] = "bundle-sim";
    j["version"] = kToolVersion;
    j["csv_schema_version"] = kCsvSchemaVersion;
    j["experiment"] = m.experiment;
    j["config"] = m.config;
    j["derived"] = m.derived;
    j["wall_time_s"] = m.wall_time_s;
    j["files"] = nlohmann::json::array();
    for (const auto& f : m.files) {
        j["files"].push_back({{"name", f}, {"sha256", sha256_file(dir / f)}});
    }
    j["warnings"] = nlohmann::json::array();
    for (const auto& w : m.warnings) j["warnings"].push_back({{"code", w.code}, {"message", w.message}});
    if (m.error) {
        j["error"] = {{"kind", std::string(to_string(m.error->first))}, {"message", m.error->second}};
    } else {
        j["error"] = nullptr;
    }
    j["exit_code"] = m.exit_code;
    std::ofstream out(dir / "manifest.json");
    out << j.dump(2) << '\n';
}

}  // namespace bundle::cli
