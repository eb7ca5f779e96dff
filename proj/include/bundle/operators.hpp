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

#include <complex>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bundle/error.hpp"

namespace bundle {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<complex>;

/// Amplitudes of a pure state in the composite basis (see HilbertConfig).
using StateVector = Vector;
/// Density matrix in the composite basis.
using DensityMatrix = Matrix;

enum class QdState { v, c };

/// Truncated two-level ⊗ Fock space.
///
/// Basis layout is qd-major: indices 0..n_max hold |n,v⟩ and indices
/// n_max+1..2·n_max+1 hold |n,c⟩, i.e. index(n, q) = q·(n_max+1) + n with
/// v = 0 and c = 1. Click analysis and snapshot output rely on this order.
class HilbertConfig {
  public:
    explicit HilbertConfig(int n_max);

    /// Truncation used when studying bundles of order n_target.
    static HilbertConfig for_bundle_order(int n_target);
    /// Recovers the configuration from a composite dimension 2·(n_max+1).
    static HilbertConfig from_dim(Eigen::Index dim);

    int n_max() const noexcept { return n_max_; }
    int fock_dim() const noexcept { return n_max_ + 1; }
    Eigen::Index dim() const noexcept { return 2 * static_cast<Eigen::Index>(n_max_ + 1); }
    Eigen::Index index(int n, QdState q) const;

    friend bool operator==(const HilbertConfig&, const HilbertConfig&) = default;

  private:
    int n_max_;
};

/// Immutable complex operator on the composite space. Integrators only use
/// apply(); the dense matrix is exposed for algebra and diagonalization.
class QuantumOperator {
  public:
    QuantumOperator() = default;
    explicit QuantumOperator(Matrix m);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }

    void apply(const Vector& in, Vector& out) const { out.noalias() = m_ * in; }
    Vector apply(const Vector& in) const { return m_ * in; }

    QuantumOperator adjoint() const { return QuantumOperator(m_.adjoint()); }
    /// max |A − A†| elementwise.
    double hermiticity_error() const;
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }

    SparseMatrix sparse() const;

    QuantumOperator operator+(const QuantumOperator& o) const;
    QuantumOperator operator-(const QuantumOperator& o) const;
    QuantumOperator operator*(const QuantumOperator& o) const;
    QuantumOperator operator*(complex s) const;
    friend QuantumOperator operator*(complex s, const QuantumOperator& a) { return a * s; }

  private:
    Matrix m_;
};

QuantumOperator identity(const HilbertConfig& h);
/// Phonon annihilation b ⊗ identity on the QD factor.
QuantumOperator destroy(const HilbertConfig& h);
/// QD lowering σ = |v⟩⟨c| ⊗ identity on the Fock factor.
QuantumOperator qd_lowering(const HilbertConfig& h);
QuantumOperator phonon_number(const HilbertConfig& h);
/// σ†σ.
QuantumOperator qd_excited_projector(const HilbertConfig& h);

/// Conditional displacement exp[alpha·σ†σ(b† − b)], exact on the truncated
/// space. Warns (truncation) when the Poisson tail of a displaced vacuum
/// beyond n_max exceeds leak_tol.
QuantumOperator displacement(const HilbertConfig& h, double alpha, Warnings* warnings = nullptr,
                             double leak_tol = 1e-6);

StateVector tensor_basis_state(const HilbertConfig& h, int n, QdState q);

/// Coherent state |alpha⟩ on the phonon factor with the QD in state q, normalized
/// on the truncated space.
StateVector coherent_state(const HilbertConfig& h, complex alpha, QdState q);

DensityMatrix pure_density(const StateVector& psi);

/// Population of Fock level n_max summed over both QD states.
double top_level_population(const HilbertConfig& h, const StateVector& psi);
double top_level_population(const HilbertConfig& h, const DensityMatrix& rho);

}  // namespace bundle
