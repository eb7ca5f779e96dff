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
#include <string_view>
#include <vector>

#include "bundle/operators.hpp"

namespace bundle {

/// Physical parameters, all in units of the phonon frequency omega_b.
struct SystemParams {
    double omega_b = 1.0;
    double delta = 0.0;        ///< laser detuning ω_σ − ω_L
    double lambda = 0.0;       ///< electron–phonon coupling
    double omega_drive = 0.0;  ///< laser amplitude Ω
    double kappa = 0.0;        ///< phonon (cavity) decay
    double gamma = 0.0;        ///< QD radiative decay
    double gamma_phi = 0.0;    ///< QD pure dephasing
    /// ω_b/2π in Hz; only used when reporting physical rates and times.
    std::optional<double> omega_b_physical;

    /// Throws InvalidArgument on negative rates, omega_b ≤ 0 or non-finite values.
    void validate() const;
};

enum class ChannelKind { phonon, photon, dephase };

std::string_view to_string(ChannelKind kind);

struct JumpChannel {
    ChannelKind kind;
    double rate;
    QuantumOperator op;  ///< already scaled by √rate
};

/// H = ω_b b†b + Δ σ†σ + λ σ†σ(b† + b) + Ω(σ + σ†), the frame rotating at ω_L.
QuantumOperator rotating_hamiltonian(const SystemParams& p, const HilbertConfig& h);

/// D·H·D† with D = exp[(λ/ω_b) σ†σ (b† − b)], computed numerically.
QuantumOperator displaced_hamiltonian(const SystemParams& p, const HilbertConfig& h,
                                      Warnings* warnings = nullptr);

/// [√κ b, √γ σ, √γ_φ σ†σ], skipping channels whose rate is zero.
std::vector<JumpChannel> jump_channels(const SystemParams& p, const HilbertConfig& h);

}  // namespace bundle
