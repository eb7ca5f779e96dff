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

#include <optional>
#include <string>
#include <vector>

#include "bundle/dynamics.hpp"
#include "bundle/spectra.hpp"

namespace bundle {

double mean_phonon_number(const DensityMatrix& rho, const HilbertConfig& h);
/// ⟨b†ⁿ bⁿ⟩ = Σ_k ρ_kk k!/(k−n)!, summed over both QD states.
double normal_ordered_moment(const DensityMatrix& rho, int n, const HilbertConfig& h);

/// Equal-time g⁽ⁿ⁾ = ⟨b†ⁿbⁿ⟩/⟨b†b⟩ⁿ. Throws UndefinedCorrelation when
/// ⟨b†b⟩ ≤ floor.
double gn(const DensityMatrix& rho, int n, const HilbertConfig& h, double floor = 1e-12);

enum class ScanAxis { delta, lambda, omega_drive };

std::string_view to_string(ScanAxis a);
ScanAxis scan_axis_from_string(std::string_view s);

struct ScanOptions {
    double floor = 1e-12;
    int threads = 0;  ///< 0: OpenMP default
    SteadyStateOptions steady;
};

/// One steady-state evaluation. Values are missing (nullopt) when ⟨b†b⟩ is at
/// or below the floor or the solve failed; `error` then says why.
struct ScanPoint {
    std::optional<double> mean_occupation;
    std::vector<std::optional<double>> g;  ///< one per requested order
    std::optional<std::string> error;
};

struct CorrelationScan {
    ScanAxis axis_name = ScanAxis::delta;
    std::vector<double> axis_values;
    std::vector<int> orders;
    std::vector<ScanPoint> points;  ///< aligned with axis_values

    std::optional<double> g(std::size_t point, int order) const;
};

ScanPoint evaluate_point(const SystemParams& p, const HilbertConfig& h, const std::vector<int>& orders,
                         const ScanOptions& opt = {});

/// Stationary ⟨b†b⟩ and g⁽ⁿ⁾ over a detuning grid, points solved concurrently.
CorrelationScan detuning_scan(const SystemParams& p_base, const HilbertConfig& h,
                              const std::vector<double>& deltas, const std::vector<int>& orders,
                              const ScanOptions& opt = {});

struct RidgePoint {
    double axis_value;
    double delta_analytic;             ///< closed-form resonance for this axis value
    std::optional<double> delta_ridge;  ///< located from the map, if found
};

struct ResonanceMap {
    ScanAxis axis = ScanAxis::lambda;
    int order = 2;
    std::vector<double> axis_values;
    std::vector<double> deltas;
    std::vector<CorrelationScan> rows;  ///< one detuning scan (order 2) per axis value
    std::vector<RidgePoint> ridge;
};

/// Locates the g⁽²⁾ resonance of a detuning cut: the centre of the resonant
/// feature, where the n-phonon population peaks and g⁽²⁾ dips inside its
/// bunching peak. Only grid points within ±search of the analytic curve count.
std::optional<double> locate_ridge(const CorrelationScan& cut, double delta_analytic,
                                   double search);

/// 2-D map of g⁽²⁾ over (axis value, Δ) with the n = `order` ridge compared to
/// the closed-form Δₙ(λ) (lambda axis) or Δₙ(Ω) (omega_drive axis).
ResonanceMap resonance_map(const SystemParams& p_base, const HilbertConfig& h, ScanAxis axis,
                           const std::vector<double>& axis_values, const std::vector<double>& deltas,
                           const ScanOptions& opt = {}, int order = 2, double ridge_search = 0.25);

}  // namespace bundle
