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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bundle/operators.hpp"

namespace bundle {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 0.0;  ///< 0 picks a step from the derivative scale
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 500'000'000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
};

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const IntegratorOptions& o) {
    const auto scale =
        o.atol + o.rtol * y0.cwiseAbs().array().max(y1.cwiseAbs().array());
    return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
}

}  // namespace detail

/// Adaptive Dormand–Prince 5(4) from t to t_end. `h` carries the step size
/// across calls so sampling a grid does not restart step selection.
/// rhs(t, y, dydt) must write dy/dt into dydt.
template <class State, class Rhs>
void dormand_prince(Rhs&& rhs, double& t, State& y, double t_end, double& h,
                    const IntegratorOptions& opt, IntegratorStats* stats = nullptr) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (t_end <= t) {
        return;
    }
    State k1, k2, k3, k4, k5, k6, k7, tmp, y_new, err;
    rhs(t, y, k1);
    if (h <= 0.0) {
        const double scale = y.cwiseAbs().maxCoeff() + opt.atol;
        const double rate = k1.cwiseAbs().maxCoeff() / scale;
        h = rate > 0.0 ? 0.01 / rate : (t_end - t);
        if (opt.initial_step > 0.0) h = opt.initial_step;
    }
    long steps = 0;
    while (t < t_end) {
        if (++steps > opt.max_steps) {
            throw Error(ErrorKind::integration_failure, "step budget exhausted");
        }
        h = std::min(h, opt.max_step);
        bool last = false;
        if (t + h >= t_end) {
            h = t_end - t;
            last = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw Error(ErrorKind::integration_failure,
                        "step size underflow at t=" + std::to_string(t));
        }
        tmp = y + h * (a21 * k1);
        rhs(t + c2 * h, tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, tmp, k6);
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, y_new, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double en = detail::error_norm(err, y, y_new, opt);
        if (!std::isfinite(en)) {
            throw Error(ErrorKind::integration_failure, "non-finite error estimate");
        }
        if (en <= 1.0) {
            t = last ? t_end : t + h;
            y.swap(y_new);
            k1.swap(k7);
            if (stats) ++stats->accepted;
            const double factor = en == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(en, -0.2));
            if (!last) h *= factor;
        } else {
            if (stats) ++stats->rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        }
    }
}

/// Exact propagation y' = G·y for constant G, using precomputed
/// U_k = exp(G·step/2^k), k = 0..levels. Arbitrary durations are composed from
/// whole steps plus the binary digits of the remainder (resolution step/2^levels).
class ExponentialLadder {
  public:
    ExponentialLadder() = default;
    ExponentialLadder(const Matrix& generator, double step, int levels = 40);

    double step() const noexcept { return step_; }
    int levels() const noexcept { return static_cast<int>(rungs_.size()) - 1; }
    double resolution() const noexcept { return step_ / std::ldexp(1.0, levels()); }
    const Matrix& rung(int k) const { return rungs_[static_cast<std::size_t>(k)]; }

    /// Advances y by tau ≥ 0; returns the time actually applied (tau rounded down
    /// to the ladder resolution).
    double advance(Vector& y, double tau) const;

  private:
    double step_ = 0.0;
    std::vector<Matrix> rungs_;
};

}  // namespace bundle
