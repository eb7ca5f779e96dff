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

#include "bundle/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "bundle/spectra.hpp"

namespace bundle {

void TimeGrid::validate() const {
    require(std::isfinite(t_start) && std::isfinite(t_end) && t_end > t_start,
            ErrorKind::invalid_argument, "time grid needs t_end > t_start");
    require(n_points >= 2, ErrorKind::invalid_argument, "time grid needs at least 2 points");
}

std::vector<double> TimeGrid::times() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(n_points));
    const double step = (t_end - t_start) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        out[static_cast<std::size_t>(i)] = t_start + step * i;
    }
    out.back() = t_end;
    return out;
}

namespace {

void check_leak(const HilbertConfig& h, double population, double tol, double t) {
    if (population > tol) {
        throw Error(ErrorKind::truncation_leak,
                    "population " + std::to_string(population) + " at Fock level n_max=" +
                        std::to_string(h.n_max()) + " (t=" + std::to_string(t) +
                        ") exceeds leak tolerance; raise n_max");
    }
}

SparseMatrix effective_generator(const QuantumOperator& H, const std::vector<JumpChannel>& channels) {
    Matrix heff = H.matrix();
    for (const auto& ch : channels) {
        heff -= complex(0.0, 0.5) * ch.op.matrix().adjoint() * ch.op.matrix();
    }
    Matrix k = complex(0.0, -1.0) * heff;
    return QuantumOperator(std::move(k)).sparse();
}

}  // namespace

std::vector<StateVector> evolve_schrodinger(const QuantumOperator& H, const StateVector& psi0,
                                            const TimeGrid& grid, const SchrodingerOptions& opt) {
    const auto times = grid.times();
    require(psi0.size() == H.dim(), ErrorKind::invalid_argument, "state/operator size mismatch");
    require(H.is_hermitian(1e-10), ErrorKind::invalid_argument, "Hamiltonian is not Hermitian");
    require(std::abs(psi0.norm() - 1.0) < 1e-9, ErrorKind::invalid_argument,
            "initial state is not normalized");
    const HilbertConfig h = HilbertConfig::from_dim(H.dim());

    std::vector<StateVector> out;
    out.reserve(times.size());
    if (opt.method == SchrodingerMethod::spectral) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(H.matrix());
        require(es.info() == Eigen::Success, ErrorKind::solver_failure, "eigensolver failed");
        const Vector coeff = es.eigenvectors().adjoint() * psi0;
        const Eigen::VectorXd& e = es.eigenvalues();
        for (double t : times) {
            const double dt = t - grid.t_start;
            Vector phased(coeff.size());
            for (Eigen::Index k = 0; k < coeff.size(); ++k) {
                phased(k) = coeff(k) * std::polar(1.0, -e(k) * dt);
            }
            out.push_back(es.eigenvectors() * phased);
        }
    } else {
        const SparseMatrix k = (H * complex(0.0, -1.0)).sparse();
        auto rhs = [&k](double, const Vector& y, Vector& dy) { dy.noalias() = k * y; };
        IntegratorOptions io;
        io.rtol = opt.rtol;
        io.atol = opt.atol;
        Vector y = psi0;
        double t = grid.t_start;
        double step = 0.0;
        for (double target : times) {
            dormand_prince(rhs, t, y, target, step, io);
            out.push_back(y);
        }
    }
    if (opt.check_leak) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            check_leak(h, top_level_population(h, out[i]), opt.leak_tol, times[i]);
        }
    }
    return out;
}

std::vector<DensityMatrix> evolve_master(const QuantumOperator& H,
                                         const std::vector<JumpChannel>& channels,
                                         const DensityMatrix& rho0, const TimeGrid& grid,
                                         const MasterOptions& opt) {
    const auto times = grid.times();
    require(rho0.rows() == H.dim() && rho0.cols() == H.dim(), ErrorKind::invalid_argument,
            "density matrix/operator size mismatch");
    const HilbertConfig h = HilbertConfig::from_dim(H.dim());

    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    if (opt.method == MasterMethod::runge_kutta) {
        const SparseMatrix k = effective_generator(H, channels);
        std::vector<SparseMatrix> jumps;
        for (const auto& ch : channels) {
            jumps.push_back(ch.op.sparse());
        }
        Matrix scratch;
        auto rhs = [&](double, const Matrix& rho, Matrix& drho) {
            // K ρ + ρ K† + Σ c ρ c†, with K = −i H_eff.
            drho.noalias() = k * rho;
            scratch.noalias() = k * rho.adjoint();
            drho += scratch.adjoint();
            for (const auto& c : jumps) {
                scratch.noalias() = c * rho;
                Matrix cr = scratch.adjoint();
                scratch.noalias() = c * cr;
                drho += scratch.adjoint();
            }
        };
        IntegratorOptions io;
        io.rtol = opt.rtol;
        io.atol = opt.atol;
        Matrix y = rho0;
        double t = grid.t_start;
        double step = 0.0;
        for (double target : times) {
            dormand_prince(rhs, t, y, target, step, io);
            out.push_back(0.5 * (y + y.adjoint()));
        }
    } else {
        const Matrix l = Matrix(liouvillian(H, channels));
        const double dt = (grid.t_end - grid.t_start) / (grid.n_points - 1);
        const Matrix u = (l * complex(dt)).exp();
        const Eigen::Index d = H.dim();
        Vector v = Eigen::Map<const Vector>(rho0.data(), d * d);
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (i > 0) {
                v = u * v;
            }
            Matrix rho = Eigen::Map<const Matrix>(v.data(), d, d);
            out.push_back(0.5 * (rho + rho.adjoint()));
        }
    }
    if (opt.check_leak) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            check_leak(h, top_level_population(h, out[i]), opt.leak_tol, times[i]);
        }
    }
    return out;
}

SparseMatrix liouvillian(const QuantumOperator& H, const std::vector<JumpChannel>& channels) {
    const Eigen::Index d = H.dim();
    SparseMatrix id(d, d);
    id.setIdentity();
    const SparseMatrix hs = H.sparse();
    const SparseMatrix ht = SparseMatrix(hs.transpose());
    SparseMatrix l = complex(0.0, -1.0) *
                     (SparseMatrix(Eigen::kroneckerProduct(id, hs)) -
                      SparseMatrix(Eigen::kroneckerProduct(ht, id)));
    for (const auto& ch : channels) {
        const SparseMatrix c = ch.op.sparse();
        const SparseMatrix cdc = SparseMatrix(c.adjoint()) * c;
        const SparseMatrix cdc_t = SparseMatrix(cdc.transpose());
        const SparseMatrix c_conj = SparseMatrix(c.conjugate());
        l += SparseMatrix(Eigen::kroneckerProduct(c_conj, c));
        l -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(id, cdc));
        l -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(cdc_t, id));
    }
    l.makeCompressed();
    return l;
}

DensityMatrix apply_liouvillian(const QuantumOperator& H, const std::vector<JumpChannel>& channels,
                                const DensityMatrix& rho) {
    const Matrix& hm = H.matrix();
    Matrix out = complex(0.0, -1.0) * (hm * rho - rho * hm);
    for (const auto& ch : channels) {
        const Matrix& c = ch.op.matrix();
        const Matrix cdc = c.adjoint() * c;
        out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
    }
    return out;
}

namespace {

Vector constrained_solve(const SparseMatrix& l, Eigen::Index d, Eigen::Index replaced_diag) {
    const Eigen::Index n = d * d;
    const Eigen::Index row = replaced_diag + replaced_diag * d;
    std::vector<Eigen::Triplet<complex>> entries;
    entries.reserve(static_cast<std::size_t>(l.nonZeros() + d));
    for (Eigen::Index col = 0; col < l.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(l, col); it; ++it) {
            if (it.row() != row) {
                entries.emplace_back(it.row(), it.col(), it.value());
            }
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        entries.emplace_back(row, i + i * d, complex(1.0));
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw Error(ErrorKind::no_unique_steady_state,
                    "constrained Liouvillian is singular: " + lu.lastErrorMessage());
    }
    Vector rhs = Vector::Zero(n);
    rhs(row) = 1.0;
    Vector x = lu.solve(rhs);
    // One step of iterative refinement.
    const Vector r = rhs - a * x;
    x += lu.solve(r);
    if (!x.allFinite()) {
        throw Error(ErrorKind::no_unique_steady_state, "steady-state solve produced non-finite values");
    }
    return x;
}

}  // namespace

DensityMatrix steady_state(const QuantumOperator& H, const std::vector<JumpChannel>& channels,
                           const SteadyStateOptions& opt) {
    require(!channels.empty(), ErrorKind::no_unique_steady_state,
            "no dissipation channel: the steady state is not unique");
    const Eigen::Index d = H.dim();
    const SparseMatrix l = liouvillian(H, channels);

    const Vector x0 = constrained_solve(l, d, 0);
    const Vector x1 = constrained_solve(l, d, d - 1);
    const double disagreement = (x0 - x1).norm() / std::max(x0.norm(), 1e-300);
    if (disagreement > opt.uniqueness_tol) {
        throw Error(ErrorKind::no_unique_steady_state,
                    "steady state depends on the constraint row (relative difference " +
                        std::to_string(disagreement) + ")");
    }

    const double residual = (l * x0).norm();
    const double scale = l.norm();
    if (residual > opt.residual_tol * scale) {
        throw Error(ErrorKind::solver_failure, "steady-state residual " + std::to_string(residual) +
                                                   " exceeds tolerance");
    }
    Matrix rho = Eigen::Map<const Matrix>(x0.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return rho;
}

std::string_view to_string(Frame f) {
    switch (f) {
        case Frame::bare: return "bare";
        case Frame::displaced: return "displaced";
        case Frame::dressed: return "dressed";
    }
    return "unknown";
}

Frame frame_from_string(std::string_view s) {
    if (s == "bare") return Frame::bare;
    if (s == "displaced") return Frame::displaced;
    if (s == "dressed") return Frame::dressed;
    throw Error(ErrorKind::config_error, "unknown frame '" + std::string(s) + "'");
}

std::string BasisLabel::name() const {
    std::string out = "P_" + std::to_string(n);
    switch (ket) {
        case BasisKet::v: out += "v"; break;
        case BasisKet::c: out += frame == Frame::displaced ? "~c" : "c"; break;
        case BasisKet::plus: out += "+"; break;
        case BasisKet::minus: out += "-"; break;
    }
    return out;
}

std::vector<BasisLabel> frame_labels(Frame frame, const HilbertConfig& h) {
    const BasisKet lower = frame == Frame::dressed ? BasisKet::plus : BasisKet::v;
    const BasisKet upper = frame == Frame::dressed ? BasisKet::minus : BasisKet::c;
    std::vector<BasisLabel> out;
    for (int n = 0; n <= h.n_max(); ++n) out.push_back({n, lower, frame});
    for (int n = 0; n <= h.n_max(); ++n) out.push_back({n, upper, frame});
    return out;
}

std::vector<StateVector> frame_basis(Frame frame, const SystemParams& p, const HilbertConfig& h) {
    std::vector<StateVector> out;
    switch (frame) {
        case Frame::bare:
            for (int n = 0; n <= h.n_max(); ++n) out.push_back(tensor_basis_state(h, n, QdState::v));
            for (int n = 0; n <= h.n_max(); ++n) out.push_back(tensor_basis_state(h, n, QdState::c));
            break;
        case Frame::displaced: {
            const Matrix d = displacement(h, p.lambda / p.omega_b).matrix().adjoint();
            for (int n = 0; n <= h.n_max(); ++n) out.push_back(tensor_basis_state(h, n, QdState::v));
            for (int n = 0; n <= h.n_max(); ++n)
                out.push_back(d * tensor_basis_state(h, n, QdState::c));
            break;
        }
        case Frame::dressed: {
            const DressedState ds = dressed_states(p.delta, p.omega_drive);
            for (int n = 0; n <= h.n_max(); ++n)
                out.push_back(ds.c_plus * tensor_basis_state(h, n, QdState::v) +
                              ds.c_minus * tensor_basis_state(h, n, QdState::c));
            for (int n = 0; n <= h.n_max(); ++n)
                out.push_back(ds.c_minus * tensor_basis_state(h, n, QdState::v) -
                              ds.c_plus * tensor_basis_state(h, n, QdState::c));
            break;
        }
    }
    return out;
}

Eigen::Index PopulationTrace::column(int n, BasisKet ket) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].n == n && labels[i].ket == ket) {
            return static_cast<Eigen::Index>(i);
        }
    }
    throw Error(ErrorKind::index_error, "no population column for n=" + std::to_string(n));
}

namespace {

template <class State, class Overlap>
PopulationTrace project_impl(std::span<const double> times, std::span<const State> states,
                             Frame frame, const SystemParams& p, const HilbertConfig& h,
                             Overlap overlap) {
    require(times.size() == states.size(), ErrorKind::invalid_argument,
            "times and states differ in length");
    PopulationTrace trace;
    trace.times.assign(times.begin(), times.end());
    trace.labels = frame_labels(frame, h);
    const auto basis = frame_basis(frame, p, h);
    trace.values.resize(static_cast<Eigen::Index>(states.size()),
                        static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        require(states[i].rows() == h.dim(), ErrorKind::invalid_argument,
                "state dimension does not match Hilbert space");
        for (std::size_t k = 0; k < basis.size(); ++k) {
            trace.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                overlap(basis[k], states[i]);
        }
    }
    return trace;
}

}  // namespace

PopulationTrace project_populations(std::span<const double> times,
                                    std::span<const StateVector> states, Frame frame,
                                    const SystemParams& p, const HilbertConfig& h) {
    return project_impl(times, states, frame, p, h,
                        [](const Vector& k, const Vector& psi) { return std::norm(k.dot(psi)); });
}

PopulationTrace project_populations(std::span<const double> times,
                                    std::span<const DensityMatrix> states, Frame frame,
                                    const SystemParams& p, const HilbertConfig& h) {
    return project_impl(times, states, frame, p, h, [](const Vector& k, const Matrix& rho) {
        return k.dot(rho * k).real();
    });
}

PeriodEstimate estimate_period(std::span<const double> times, std::span<const double> values) {
    require(times.size() == values.size() && times.size() >= 3, ErrorKind::invalid_argument,
            "period estimate needs matching samples");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double mid = 0.5 * (lo + hi);
    const double band = 0.25 * (hi - lo);
    require(hi - lo > 0.0, ErrorKind::invalid_argument, "signal does not oscillate");

    std::vector<double> crossings;
    bool armed = values[0] < mid - band;
    std::size_t last_below = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < mid - band) {
            armed = true;
        }
        if (values[i - 1] < mid && values[i] >= mid) {
            last_below = i - 1;
        }
        if (armed && values[i] > mid + band) {
            armed = false;
            const std::size_t j = last_below;
            const double f = (mid - values[j]) / (values[j + 1] - values[j]);
            crossings.push_back(times[j] + f * (times[j + 1] - times[j]));
        }
    }
    require(crossings.size() >= 2, ErrorKind::invalid_argument,
            "fewer than two oscillation cycles in the sampled window");
    const double period =
        (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    return {period, static_cast<int>(crossings.size()), hi, lo};
}

}  // namespace bundle
