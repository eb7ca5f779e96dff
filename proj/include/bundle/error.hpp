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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bundle {

enum class ErrorKind {
    invalid_argument,
    index_error,
    config_error,
    degenerate_drive,
    no_resonance,
    integration_failure,
    truncation_leak,
    no_unique_steady_state,
    solver_failure,
    undefined_correlation,
    insufficient_statistics,
    missing_snapshot,
};

std::string_view to_string(ErrorKind kind);

/// Base for every error raised by the library. The kind maps onto the CLI
/// exit codes and the machine-readable error record.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) {
        throw Error(kind, what);
    }
}

/// Non-fatal diagnostic (truncation advisories, regime guards, statistics).
struct Warning {
    std::string code;
    std::string message;
};

using Warnings = std::vector<Warning>;

inline void warn(Warnings* sink, std::string code, std::string message) {
    if (sink != nullptr) {
        sink->push_back({std::move(code), std::move(message)});
    }
}

}  // namespace bundle
