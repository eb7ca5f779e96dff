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
#include <string>
#include <vector>

#include "bundle/cli/config.hpp"
#include "bundle/cli/output.hpp"

namespace bundle::cli {

/// Output directory bookkeeping shared by the commands.
class RunContext {
  public:
    explicit RunContext(std::filesystem::path dir) : dir_(std::move(dir)) {}

    CsvWriter open(const std::string& name, const std::vector<std::string>& header);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    const std::vector<std::string>& files() const noexcept { return files_; }
    Warnings& warnings() noexcept { return warnings_; }
    nlohmann::json& derived() noexcept { return derived_; }

  private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
    Warnings warnings_;
    nlohmann::json derived_ = nlohmann::json::object();
};

/// Truncation size used when the config does not set hilbert.n_max.
HilbertConfig default_hilbert(const RunConfig& cfg);

/// System parameters with Δ resolved (explicit, resonance block, or the
/// experiment's default resonance).
SystemParams resolve_params(const RunConfig& cfg, const HilbertConfig& h);

StateVector initial_state(const InitialState& s, const SystemParams& p, const HilbertConfig& h);

void cmd_rabi(const RunConfig& cfg, RunContext& ctx);
void cmd_scan(const RunConfig& cfg, RunContext& ctx);
void cmd_map(const RunConfig& cfg, RunContext& ctx);
void cmd_trajectories(const RunConfig& cfg, RunContext& ctx);
/// Returns false when statistics did not converge (partial row written).
bool cmd_purity(const RunConfig& cfg, RunContext& ctx);
void cmd_purity_map(const RunConfig& cfg, RunContext& ctx);

int exit_code(ErrorKind kind);

/// Runs the configured experiment, writes its files and manifest.json into
/// cfg.output_dir and returns the process exit code.
int execute(const RunConfig& cfg);

}  // namespace bundle::cli
