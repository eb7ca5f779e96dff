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

#include <span>
#include <string>
#include <vector>

#include "bundle/integrator.hpp"
#include "bundle/model.hpp"

namespace bundle {

/// Uniform sample times t_start, …, t_end (inclusive).
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_points = 2;

    void validate() const;
    std::vector<double> times() const;
};

/// Time-independent Hermitian generators are propagated exactly in the
/// eigenbasis; Runge–Kutta is the general-purpose integrator.
enum class SchrodingerMethod { spectral, runge_kutta };
enum class MasterMethod { runge_kutta, exponential };

struct SchrodingerOptions {
    SchrodingerMethod method = SchrodingerMethod::spectral;
    double rtol = 1e-11;  ///< runge_kutta only; norm drift grows as rtol·t
    double atol = 1e-14;
    double leak_tol = 1e-6;
    bool check_leak = true;
};

struct MasterOptions {
    MasterMethod method = MasterMethod::runge_kutta;
    double rtol = 1e-8;
    double atol = 1e-12;
    double leak_tol = 1e-6;
    bool check_leak = true;
};

/// i d|ψ⟩/dt = H|ψ⟩ sampled on the grid. Throws TruncationLeak when the
/// population of Fock level n_max exceeds leak_tol.
std::vector<StateVector> evolve_schrodinger(const QuantumOperator& H, const StateVector& psi0,
                                            const TimeGrid& grid, const SchrodingerOptions& opt = {});

/// dρ/dt = −i[H,ρ] + Σ_c (c ρ c† − ½{c†c, ρ}). Outputs are hermitized.
std::vector<DensityMatrix> evolve_master(const QuantumOperator& H,
                                         const std::vector<JumpChannel>& channels,
                                         const DensityMatrix& rho0, const TimeGrid& grid,
                                         const MasterOptions& opt = {});

/// Liouvillian acting on column-stacked vec(ρ) (index i + j·dim).
SparseMatrix liouvillian(const QuantumOperator& H, const std::vector<JumpChannel>& channels);

/// Applies the Liouvillian to ρ without vectorizing.
DensityMatrix apply_liouvillian(const QuantumOperator& H, const std::vector<JumpChannel>& channels,
                                const DensityMatrix& rho);

struct SteadyStateOptions {
    double residual_tol = 1e-10;    ///< relative to ‖L‖_F
    double uniqueness_tol = 1e-6;   ///< agreement of two independently constrained solves
};

/// Solves L(ρ) = 0 with tr ρ = 1 by sparse LU, one population equation replaced
/// by the trace constraint. Uniqueness is checked by repeating the solve with a
/// different replaced row.
DensityMatrix steady_state(const QuantumOperator& H, const std::vector<JumpChannel>& channels,
                           const SteadyStateOptions& opt = {});

enum class Frame { bare, displaced, dressed };
enum class BasisKet { v, c, plus, minus };

std::string_view to_string(Frame f);
Frame frame_from_string(std::string_view s);

struct BasisLabel {
    int n;
    BasisKet ket;
    Frame frame;
    /// Column name, e.g. "P_2c", "P_2~c", "P_0+".
    std::string name() const;
};

/// Basis kets of a frame in label order: all lower-QD kets (v or +) for
/// n = 0..n_max, then all upper ones (c or −). Displaced-frame populations are
/// |⟨n,c|D|ψ⟩|², i.e. the rotating-frame kets are D†|n,c⟩, the polaron
/// eigenstates of the undriven Hamiltonian.
std::vector<BasisLabel> frame_labels(Frame frame, const HilbertConfig& h);
std::vector<StateVector> frame_basis(Frame frame, const SystemParams& p, const HilbertConfig& h);

struct PopulationTrace {
    std::vector<double> times;
    std::vector<BasisLabel> labels;
    Eigen::MatrixXd values;  ///< rows: times, columns: labels

    Eigen::Index column(int n, BasisKet ket) const;
    Eigen::VectorXd series(int n, BasisKet ket) const { return values.col(column(n, ket)); }
};

PopulationTrace project_populations(std::span<const double> times,
                                    std::span<const StateVector> states, Frame frame,
                                    const SystemParams& p, const HilbertConfig& h);
PopulationTrace project_populations(std::span<const double> times,
                                    std::span<const DensityMatrix> states, Frame frame,
                                    const SystemParams& p, const HilbertConfig& h);

struct PeriodEstimate {
    double period;
    int cycles;  ///< upward midline crossings used
    double max;
    double min;
};

/// Period of a population oscillation from the spacing of upward midline
/// crossings (with hysteresis of a quarter amplitude). Throws InvalidArgument
/// if fewer than two crossings are present.
PeriodEstimate estimate_period(std::span<const double> times, std::span<const double> values);

}  // namespace bundle
