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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "bundle/correlations.hpp"
#include "bundle/dynamics.hpp"
#include "bundle/spectra.hpp"
#include "bundle/trajectories.hpp"

namespace bundle::cli {

enum class Experiment { rabi, scan, map, trajectories, purity, purity_map };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view s);

/// Tensor basis state |n, ket⟩; plus/minus are the dressed kets at the run's Δ and Ω.
struct InitialState {
    int n = 0;
    BasisKet ket = BasisKet::v;
};

/// Δ derived from a Stokes resonance instead of given directly.
struct ResonanceSpec {
    int n = 2;
    Regime regime = Regime::strong_driving;
    bool refined = true;  ///< exact avoided crossing; false uses the closed form
};

struct Tolerances {
    std::optional<double> rtol;  ///< unset: the solver default
    std::optional<double> atol;
    double leak_tol = 1e-6;
    double residual_tol = 1e-10;
    double uniqueness_tol = 1e-6;
};

struct RabiSpec {
    Regime regime = Regime::perturbative;
    int n = 2;
    std::optional<TimeGrid> grid;  ///< default: three predicted periods, 4001 points
    std::optional<Frame> frame;    ///< default follows the regime
    std::optional<InitialState> initial;
    SchrodingerMethod method = SchrodingerMethod::spectral;
};

struct ScanSpec {
    std::vector<double> deltas;
    std::vector<int> orders{2, 3};
};

struct MapSpec {
    ScanAxis axis = ScanAxis::lambda;
    std::vector<double> axis_values;
    std::vector<double> deltas;
    int order = 2;
    double ridge_search = 0.25;
};

struct TrajectoriesSpec {
    double duration = 0.0;
    int count = 25;
    std::optional<double> gap;  ///< default 5/κ
    std::vector<double> snapshot_times;
    InitialState initial;
};

struct PuritySpec {
    int n_target = 2;
    std::optional<double> window;  ///< default 5/κ
    std::size_t n_windows = 1'000'000;
    double duration = 0.0;
    int count = 25;
    WindowAnchor anchor = WindowAnchor::uniform;
    bool hard_fail = false;
    InitialState initial;
};

struct PurityMapSpec {
    std::vector<double> lambda_grid;
    std::vector<double> kappa_grid;
    int n_target = 2;
    double window_factor = 5.0;  ///< T = window_factor/κ at each point
    std::size_t n_windows = 1'000'000;
    double duration = 0.0;
    int count = 25;
    WindowAnchor anchor = WindowAnchor::uniform;
    bool refined = true;
};

using ExperimentSpec =
    std::variant<RabiSpec, ScanSpec, MapSpec, TrajectoriesSpec, PuritySpec, PurityMapSpec>;

struct RunConfig {
    Experiment experiment = Experiment::rabi;
    SystemParams params;
    bool delta_given = false;
    std::optional<ResonanceSpec> resonance;
    std::optional<int> n_max;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    int threads = 0;
    Tolerances tolerances;
    ExperimentSpec spec;
    nlohmann::json echo;  ///< validated input with overrides applied
};

/// Parses and validates a configuration document. A result manifest is also
/// accepted; its echoed config is used. Throws Error(config_error).
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Applies command-line overrides and refreshes the echo.
void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<std::filesystem::path> output_dir);

}  // namespace bundle::cli
