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

#include "bundle/operators.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace bundle {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "InvalidArgument";
        case ErrorKind::index_error: return "IndexError";
        case ErrorKind::config_error: return "ConfigError";
        case ErrorKind::degenerate_drive: return "DegenerateDrive";
        case ErrorKind::no_resonance: return "NoResonance";
        case ErrorKind::integration_failure: return "IntegrationFailure";
        case ErrorKind::truncation_leak: return "TruncationLeak";
        case ErrorKind::no_unique_steady_state: return "NoUniqueSteadyState";
        case ErrorKind::solver_failure: return "SolverFailure";
        case ErrorKind::undefined_correlation: return "UndefinedCorrelation";
        case ErrorKind::insufficient_statistics: return "InsufficientStatistics";
        case ErrorKind::missing_snapshot: return "MissingSnapshot";
    }
    return "Unknown";
}

HilbertConfig::HilbertConfig(int n_max) : n_max_(n_max) {
    require(n_max >= 1, ErrorKind::invalid_argument,
            "HilbertConfig: n_max must be >= 1, got " + std::to_string(n_max));
}

HilbertConfig HilbertConfig::for_bundle_order(int n_target) {
    require(n_target >= 1, ErrorKind::invalid_argument, "bundle order must be >= 1");
    return HilbertConfig(4 * n_target + 4);
}

HilbertConfig HilbertConfig::from_dim(Eigen::Index dim) {
    require(dim >= 4 && dim % 2 == 0, ErrorKind::invalid_argument,
            "dimension " + std::to_string(dim) + " is not 2·(n_max+1)");
    return HilbertConfig(static_cast<int>(dim / 2 - 1));
}

Eigen::Index HilbertConfig::index(int n, QdState q) const {
    if (n < 0 || n > n_max_) {
        throw Error(ErrorKind::index_error, "Fock index " + std::to_string(n) +
                                                " outside 0.." + std::to_string(n_max_));
    }
    return (q == QdState::c ? fock_dim() : 0) + n;
}

QuantumOperator::QuantumOperator(Matrix m) : m_(std::move(m)) {
    require(m_.rows() == m_.cols(), ErrorKind::invalid_argument, "operator must be square");
}

double QuantumOperator::hermiticity_error() const {
    if (m_.size() == 0) {
        return 0.0;
    }
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

SparseMatrix QuantumOperator::sparse() const {
    std::vector<Eigen::Triplet<complex>> entries;
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        for (Eigen::Index i = 0; i < m_.rows(); ++i) {
            if (m_(i, j) != complex(0.0)) {
                entries.emplace_back(i, j, m_(i, j));
            }
        }
    }
    SparseMatrix s(m_.rows(), m_.cols());
    s.setFromTriplets(entries.begin(), entries.end());
    return s;
}

QuantumOperator QuantumOperator::operator+(const QuantumOperator& o) const {
    return QuantumOperator(m_ + o.m_);
}
QuantumOperator QuantumOperator::operator-(const QuantumOperator& o) const {
    return QuantumOperator(m_ - o.m_);
}
QuantumOperator QuantumOperator::operator*(const QuantumOperator& o) const {
    return QuantumOperator(m_ * o.m_);
}
QuantumOperator QuantumOperator::operator*(complex s) const { return QuantumOperator(m_ * s); }

namespace {

Eigen::MatrixXd fock_annihilation(int fock_dim) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(fock_dim, fock_dim);
    for (int n = 1; n < fock_dim; ++n) {
        b(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return b;
}

// qd ⊗ fock with the qd factor as the slow index.
Matrix embed(const Eigen::Matrix2cd& qd, const Matrix& fock) {
    const Eigen::Index f = fock.rows();
    Matrix out = Matrix::Zero(2 * f, 2 * f);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            if (qd(r, c) != complex(0.0)) {
                out.block(r * f, c * f, f, f) = qd(r, c) * fock;
            }
        }
    }
    return out;
}

}  // namespace

QuantumOperator identity(const HilbertConfig& h) {
    return QuantumOperator(Matrix::Identity(h.dim(), h.dim()));
}

QuantumOperator destroy(const HilbertConfig& h) {
    return QuantumOperator(embed(Eigen::Matrix2cd::Identity(),
                                 fock_annihilation(h.fock_dim()).cast<complex>()));
}

QuantumOperator qd_lowering(const HilbertConfig& h) {
    Eigen::Matrix2cd sigma = Eigen::Matrix2cd::Zero();
    sigma(0, 1) = 1.0;  // |v⟩⟨c|
    return QuantumOperator(embed(sigma, Matrix::Identity(h.fock_dim(), h.fock_dim())));
}

QuantumOperator phonon_number(const HilbertConfig& h) {
    Matrix m = Matrix::Zero(h.dim(), h.dim());
    for (int n = 0; n <= h.n_max(); ++n) {
        m(h.index(n, QdState::v), h.index(n, QdState::v)) = n;
        m(h.index(n, QdState::c), h.index(n, QdState::c)) = n;
    }
    return QuantumOperator(std::move(m));
}

QuantumOperator qd_excited_projector(const HilbertConfig& h) {
    Matrix m = Matrix::Zero(h.dim(), h.dim());
    for (int n = 0; n <= h.n_max(); ++n) {
        m(h.index(n, QdState::c), h.index(n, QdState::c)) = 1.0;
    }
    return QuantumOperator(std::move(m));
}

QuantumOperator displacement(const HilbertConfig& h, double alpha, Warnings* warnings,
                             double leak_tol) {
    const int f = h.fock_dim();
    // Weight of a displaced vacuum (Poisson, mean alpha²) at or beyond n_max.
    const double mean = alpha * alpha;
    double below = 0.0;
    double term = std::exp(-mean);
    for (int k = 0; k < h.n_max(); ++k) {
        below += term;
        term *= mean / (k + 1);
    }
    const double tail = std::max(0.0, 1.0 - below);
    if (tail > leak_tol) {
        warn(warnings, "TruncationWarning",
             "displacement alpha=" + std::to_string(alpha) + " places weight " +
                 std::to_string(tail) + " at Fock level n_max=" + std::to_string(h.n_max()) +
                 "; raise n_max");
    }

    const Eigen::MatrixXd b = fock_annihilation(f);
    const Eigen::MatrixXd generator = alpha * (b.transpose() - b);
    const Eigen::MatrixXd d = generator.exp();

    Matrix out = Matrix::Identity(h.dim(), h.dim());
    out.block(f, f, f, f) = d.cast<complex>();
    return QuantumOperator(std::move(out));
}

StateVector tensor_basis_state(const HilbertConfig& h, int n, QdState q) {
    StateVector psi = StateVector::Zero(h.dim());
    psi(h.index(n, q)) = 1.0;
    return psi;
}

StateVector coherent_state(const HilbertConfig& h, complex alpha, QdState q) {
    StateVector psi = StateVector::Zero(h.dim());
    complex amp = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n <= h.n_max(); ++n) {
        psi(h.index(n, q)) = amp;
        amp *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    psi.normalize();
    return psi;
}

DensityMatrix pure_density(const StateVector& psi) { return psi * psi.adjoint(); }

double top_level_population(const HilbertConfig& h, const StateVector& psi) {
    const double total = psi.squaredNorm();
    if (total == 0.0) {
        return 0.0;
    }
    return (std::norm(psi(h.index(h.n_max(), QdState::v))) +
            std::norm(psi(h.index(h.n_max(), QdState::c)))) /
           total;
}

double top_level_population(const HilbertConfig& h, const DensityMatrix& rho) {
    return rho(h.index(h.n_max(), QdState::v), h.index(h.n_max(), QdState::v)).real() +
           rho(h.index(h.n_max(), QdState::c), h.index(h.n_max(), QdState::c)).real();
}

}  // namespace bundle
