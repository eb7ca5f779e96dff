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


#include <iostream>

#include "CLI11.hpp"

#include "bundle/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace bundle::cli;

    CLI::App app{"Stokes-resonance phonon bundle simulator"};
    app.set_version_flag("--version", kToolVersion);
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    app.add_option("command", command, "Experiment to run")
        ->required()
        ->check(CLI::IsMember({"rabi", "scan", "map", "trajectories", "purity", "purity-map"}));
    app.add_option("--config", config_path, "JSON configuration or result manifest")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Override the master seed");
    app.add_option("--out", out, "Override the output directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (experiment_from_string(command) != cfg.experiment) {
            throw bundle::Error(bundle::ErrorKind::config_error,
                                "command '" + command + "' does not match config experiment '" +
                                    std::string(to_string(cfg.experiment)) + "'");
        }
        apply_overrides(cfg, seed, out ? std::optional<std::filesystem::path>(*out) : std::nullopt);
        return execute(cfg);
    } catch (const bundle::Error& e) {
        std::cerr << nlohmann::json{{"error", std::string(bundle::to_string(e.kind()))},
                                    {"message", e.what()}}
                         .dump()
                  << '\n';
        return exit_code(e.kind());
    }
}
