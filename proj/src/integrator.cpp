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

#include "bundle/integrator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace bundle {

ExponentialLadder::ExponentialLadder(const Matrix& generator, double step, int levels)
    : step_(step) {
    require(step > 0.0 && levels >= 0, ErrorKind::invalid_argument, "invalid ladder step");
    rungs_.reserve(static_cast<std::size_t>(levels) + 1);
    for (int k = 0; k <= levels; ++k) {
        const double dt = step / std::ldexp(1.0, k);
        rungs_.push_back((generator * complex(dt)).exp());
    }
}

double ExponentialLadder::advance(Vector& y, double tau) const {
    require(tau >= 0.0, ErrorKind::invalid_argument, "cannot propagate backwards");
    Vector scratch(y.size());
    const auto whole = static_cast<long>(std::floor(tau / step_));
    for (long i = 0; i < whole; ++i) {
        scratch.noalias() = rungs_[0] * y;
        y.swap(scratch);
    }
    double applied = static_cast<double>(whole) * step_;
    double remainder = tau - applied;
    for (int k = 1; k <= levels(); ++k) {
        const double dt = step_ / std::ldexp(1.0, k);
        if (remainder >= dt) {
            scratch.noalias() = rungs_[static_cast<std::size_t>(k)] * y;
            y.swap(scratch);
            remainder -= dt;
            applied += dt;
        }
    }
    return applied;
}

}  // namespace bundle
