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

#include <string_view>

#include "bundle/model.hpp"

namespace bundle {

enum class Regime { perturbative, strong_coupling, strong_driving };

std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view s);

/// Eigenstates of the driven two-level QD, H₂ = [[0, Ω], [Ω, Δ]] in {|v⟩, |c⟩}:
/// |+⟩ = c₊|v⟩ + c₋|c⟩, |−⟩ = c₋|v⟩ − c₊|c⟩.
struct DressedState {
    double c_plus;
    double c_minus;
    double e_plus;
    double e_minus;
};

/// Throws DegenerateDrive when omega_drive == 0.
DressedState dressed_states(double delta, double omega_drive);

struct RabiPrediction {
    int n;
    double omega_eff;         ///< |Ω_eff⁽ⁿ⁾|, units of ω_b
    double omega_eff_signed;  ///< carries the (−1)ⁿ and product sign of the driven formula
    double delta_res;         ///< resonant detuning, units of ω_b

    /// Full-transfer period T = π/|Ω_eff| (|0,v⟩ → |n,c⟩ → |0,v⟩ in P(t) = sin²(Ω_eff t)).
    double period() const;
};

/// Stokes resonance detuning for bundle order n in the given regime.
/// Throws NoResonance for strong_driving when 2Ω ≥ nω_b.
double resonance_detuning(int n, Regime regime, const SystemParams& p);

/// Closed-form super-Rabi rate. Warns (perturbative tag) when λ/ω_b > 0.2 or Ω/ω_b > 0.3.
RabiPrediction effective_rabi(int n, Regime regime, const SystemParams& p,
                              Warnings* warnings = nullptr);

/// Exact Stokes resonance of the full rotating Hamiltonian, found at the avoided
/// crossing between |0,+⟩ and the displaced |ñ,−⟩. The closed-form conditions
/// omit the polaron and light shifts, which in the weak-drive regime exceed
/// Ω_eff by orders of magnitude.
struct StokesResonance {
    int n;
    double seed;       ///< starting estimate
    double delta;      ///< located resonance
    double half_gap;   ///< numerical Ω_eff (half the avoided-crossing splitting)
    double period() const;
};

struct ResonanceSearch {
    double window = 0.05;  ///< half-width around the seed, units of ω_b
    int max_iterations = 200;
};

/// Seed combining the polaron shift and the dressed-state condition:
/// λ²/ω_b − √((nω_b)² − 4Ω²e^{−λ²/ω_b²}).
double stokes_seed(int n, const SystemParams& p);

StokesResonance locate_stokes_resonance(int n, const SystemParams& p, const HilbertConfig& h,
                                        const ResonanceSearch& search = {});
StokesResonance locate_stokes_resonance(int n, const SystemParams& p, const HilbertConfig& h,
                                        double seed, const ResonanceSearch& search = {});

}  // namespace bundle
