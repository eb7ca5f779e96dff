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

#include "bundle/model.hpp"

#include <cmath>
#include <string>

namespace bundle {

void SystemParams::validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    require(finite(omega_b) && omega_b > 0.0, ErrorKind::invalid_argument, "omega_b must be > 0");
    require(finite(delta) && finite(lambda), ErrorKind::invalid_argument,
            "delta and lambda must be finite");
    require(finite(omega_drive) && omega_drive >= 0.0, ErrorKind::invalid_argument,
            "omega_drive must be >= 0");
    require(finite(kappa) && kappa >= 0.0, ErrorKind::invalid_argument, "kappa must be >= 0");
    require(finite(gamma) && gamma >= 0.0, ErrorKind::invalid_argument, "gamma must be >= 0");
    require(finite(gamma_phi) && gamma_phi >= 0.0, ErrorKind::invalid_argument,
            "gamma_phi must be >= 0");
    if (omega_b_physical) {
        require(finite(*omega_b_physical) && *omega_b_physical > 0.0,
                ErrorKind::invalid_argument, "omega_b_physical must be > 0");
    }
}

std::string_view to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::phonon: return "phonon";
        case ChannelKind::photon: return "photon";
        case ChannelKind::dephase: return "dephase";
    }
    return "unknown";
}

QuantumOperator rotating_hamiltonian(const SystemParams& p, const HilbertConfig& h) {
    p.validate();
    const Matrix b = destroy(h).matrix();
    const Matrix s = qd_lowering(h).matrix();
    const Matrix ns = s.adjoint() * s;
    Matrix H = p.omega_b * (b.adjoint() * b) + p.delta * ns +
               p.lambda * ns * (b.adjoint() + b) + p.omega_drive * (s + s.adjoint());
    // Exact hermiticity; the products above are already real symmetric.
    H = 0.5 * (H + H.adjoint()).eval();
    return QuantumOperator(std::move(H));
}

QuantumOperator displaced_hamiltonian(const SystemParams& p, const HilbertConfig& h,
                                      Warnings* warnings) {
    const Matrix H = rotating_hamiltonian(p, h).matrix();
    const Matrix D = displacement(h, p.lambda / p.omega_b, warnings).matrix();
    Matrix out = D * H * D.adjoint();
    out = 0.5 * (out + out.adjoint()).eval();
    return QuantumOperator(std::move(out));
}

std::vector<JumpChannel> jump_channels(const SystemParams& p, const HilbertConfig& h) {
    p.validate();
    std::vector<JumpChannel> out;
    if (p.kappa > 0.0) {
        out.push_back({ChannelKind::phonon, p.kappa, destroy(h) * std::sqrt(p.kappa)});
    }
    if (p.gamma > 0.0) {
        out.push_back({ChannelKind::photon, p.gamma, qd_lowering(h) * std::sqrt(p.gamma)});
    }
    if (p.gamma_phi > 0.0) {
        out.push_back(
            {ChannelKind::dephase, p.gamma_phi, qd_excited_projector(h) * std::sqrt(p.gamma_phi)});
    }
    return out;
}

}  // namespace bundle
