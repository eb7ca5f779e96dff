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

#include "bundle/spectra.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace bundle {

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::perturbative: return "perturbative";
        case Regime::strong_coupling: return "strong_coupling";
        case Regime::strong_driving: return "strong_driving";
    }
    return "unknown";
}

Regime regime_from_string(std::string_view s) {
    if (s == "perturbative") return Regime::perturbative;
    if (s == "strong_coupling") return Regime::strong_coupling;
    if (s == "strong_driving") return Regime::strong_driving;
    throw Error(ErrorKind::config_error, "unknown regime '" + std::string(s) + "'");
}

DressedState dressed_states(double delta, double omega_drive) {
    require(omega_drive != 0.0, ErrorKind::degenerate_drive,
            "dressed states are undefined without drive (omega_drive = 0)");
    const double root = std::sqrt(delta * delta + 4.0 * omega_drive * omega_drive);
    // √R ± Δ without cancellation: (√R + Δ)(√R − Δ) = 4Ω².
    const double four_w2 = 4.0 * omega_drive * omega_drive;
    const double s_plus = delta >= 0.0 ? root + delta : four_w2 / (root - delta);
    const double s_minus = delta >= 0.0 ? four_w2 / (root + delta) : root - delta;
    const double scale = std::numbers::sqrt2 * std::abs(omega_drive);
    DressedState d{};
    d.c_plus = scale / std::sqrt(root * s_plus);
    d.c_minus = scale / std::sqrt(root * s_minus);
    if (omega_drive < 0.0) {
        d.c_minus = -d.c_minus;
    }
    d.e_plus = 0.5 * delta + 0.5 * root;
    d.e_minus = 0.5 * delta - 0.5 * root;
    return d;
}

double RabiPrediction::period() const {
    return omega_eff > 0.0 ? std::numbers::pi / omega_eff : std::numeric_limits<double>::infinity();
}

double StokesResonance::period() const { return std::numbers::pi / half_gap; }

double resonance_detuning(int n, Regime regime, const SystemParams& p) {
    require(n >= 1, ErrorKind::invalid_argument, "bundle order must be >= 1");
    const double wb = p.omega_b;
    switch (regime) {
        case Regime::perturbative:
            return -n * wb;
        case Regime::strong_coupling:
            return p.lambda * p.lambda / wb - n * wb;
        case Regime::strong_driving: {
            const double arg = (n * wb) * (n * wb) - 4.0 * p.omega_drive * p.omega_drive;
            require(arg > 0.0, ErrorKind::no_resonance,
                    "no " + std::to_string(n) + "-phonon Mollow resonance: 2Ω >= nω_b");
            return -std::sqrt(arg);
        }
    }
    return 0.0;
}

RabiPrediction effective_rabi(int n, Regime regime, const SystemParams& p, Warnings* warnings) {
    const double delta_res = resonance_detuning(n, regime, p);
    const double ratio = p.lambda / p.omega_b;
    const double sqrt_nfact = std::sqrt(std::tgamma(n + 1.0));
    double value = 0.0;
    switch (regime) {
        case Regime::perturbative:
            if (ratio > 0.2 || p.omega_drive / p.omega_b > 0.3) {
                warn(warnings, "RegimeWarning",
                     "perturbative rate used outside lambda/omega_b <= 0.2, Omega/omega_b <= 0.3");
            }
            value = p.omega_drive * std::pow(ratio, n) / sqrt_nfact;
            break;
        case Regime::strong_coupling:
            value = p.omega_drive * std::exp(-0.5 * ratio * ratio) * std::pow(ratio, n) / sqrt_nfact;
            break;
        case Regime::strong_driving: {
            if (p.omega_drive == 0.0) {
                value = 0.0;
                break;
            }
            const double cm = dressed_states(delta_res, p.omega_drive).c_minus;
            double product = 1.0;
            for (int k = 1; k <= n - 1; ++k) {
                product *= n * cm * cm - k;
            }
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            value = sign * p.omega_drive * std::pow(ratio, n) * product /
                    (std::tgamma(static_cast<double>(n)) * sqrt_nfact);
            break;
        }
    }
    return RabiPrediction{n, std::abs(value), value, delta_res};
}

double stokes_seed(int n, const SystemParams& p) {
    require(n >= 1, ErrorKind::invalid_argument, "bundle order must be >= 1");
    const double wb = p.omega_b;
    const double ratio = p.lambda / wb;
    const double dressed_drive = p.omega_drive * std::exp(-0.5 * ratio * ratio);
    const double arg = (n * wb) * (n * wb) - 4.0 * dressed_drive * dressed_drive;
    require(arg > 0.0, ErrorKind::no_resonance,
            "no " + std::to_string(n) + "-phonon Stokes resonance for this drive");
    return p.lambda * p.lambda / wb - std::sqrt(arg);
}

StokesResonance locate_stokes_resonance(int n, const SystemParams& p, const HilbertConfig& h,
                                        const ResonanceSearch& search) {
    return locate_stokes_resonance(n, p, h, stokes_seed(n, p), search);
}

namespace {

struct CrossingProbe {
    double separation;  // E(A-like) − E(B-like); changes sign across the resonance
    double half_gap;    // half splitting of the two most hybridized states
};

class CrossingProbeFactory {
  public:
    CrossingProbeFactory(int n, const SystemParams& p, const HilbertConfig& h)
        : n_(n), p_(p), h_(h), d_(displacement(h, p.lambda / p.omega_b).matrix().adjoint()) {}

    CrossingProbe operator()(double delta) const {
        SystemParams q = p_;
        q.delta = delta;
        const Matrix H = rotating_hamiltonian(q, h_).matrix();
        Eigen::SelfAdjointEigenSolver<Matrix> es(H);
        require(es.info() == Eigen::Success, ErrorKind::solver_failure,
                "eigensolver failed while locating resonance");

        // Reference kets |0,+⟩ and |ñ,−⟩ built from polaron-shifted dressed states;
        // polaron eigenstates of the rotating frame are D†|n,c⟩.
        const DressedState ds = dressed_states(delta - p_.lambda * p_.lambda / p_.omega_b,
                                               p_.omega_drive);
        const Vector zero_c = d_ * tensor_basis_state(h_, 0, QdState::c);
        const Vector n_c = d_ * tensor_basis_state(h_, n_, QdState::c);
        const Vector ref_a = ds.c_plus * tensor_basis_state(h_, 0, QdState::v) + ds.c_minus * zero_c;
        const Vector ref_b = ds.c_minus * tensor_basis_state(h_, n_, QdState::v) - ds.c_plus * n_c;

        const Eigen::VectorXd wa = (es.eigenvectors().adjoint() * ref_a).cwiseAbs2();
        const Eigen::VectorXd wb = (es.eigenvectors().adjoint() * ref_b).cwiseAbs2();
        Eigen::Index ia = 0;
        Eigen::Index ib = 0;
        wa.maxCoeff(&ia);
        wb.maxCoeff(&ib);

        const Eigen::VectorXd both = wa + wb;
        Eigen::Index first = 0;
        both.maxCoeff(&first);
        Eigen::VectorXd rest = both;
        rest(first) = -1.0;
        Eigen::Index second = 0;
        rest.maxCoeff(&second);

        const Eigen::VectorXd& e = es.eigenvalues();
        return {ia == ib ? 0.0 : e(ia) - e(ib), 0.5 * std::abs(e(first) - e(second))};
    }

  private:
    int n_;
    SystemParams p_;
    HilbertConfig h_;
    Matrix d_;
};

}  // namespace

StokesResonance locate_stokes_resonance(int n, const SystemParams& p, const HilbertConfig& h,
                                        double seed, const ResonanceSearch& search) {
    require(n >= 1 && n < h.n_max(), ErrorKind::invalid_argument,
            "bundle order must lie in 1..n_max-1");
    require(p.omega_drive > 0.0, ErrorKind::no_resonance, "no Stokes resonance without drive");
    const CrossingProbeFactory probe(n, p, h);

    double lo = seed - search.window;
    double hi = seed + search.window;
    double s_lo = probe(lo).separation;
    double s_hi = probe(hi).separation;
    require(s_lo * s_hi < 0.0, ErrorKind::no_resonance,
            "no avoided crossing for order " + std::to_string(n) + " within ±" +
                std::to_string(search.window) + " of delta=" + std::to_string(seed));

    // The sign flips where the two reference states share their weight equally;
    // plain bisection converges on that switch point to machine precision.
    for (int it = 0; it < search.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double s_mid = probe(mid).separation;
        if (s_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((s_mid < 0.0) == (s_lo < 0.0)) {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    const double delta = 0.5 * (lo + hi);
    return StokesResonance{n, seed, delta, probe(delta).half_gap};
}

}  // namespace bundle
