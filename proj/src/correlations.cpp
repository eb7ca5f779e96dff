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

#include "bundle/correlations.hpp"

#include <cmath>

#include <omp.h>

namespace bundle {

double mean_phonon_number(const DensityMatrix& rho, const HilbertConfig& h) {
    return normal_ordered_moment(rho, 1, h);
}

double normal_ordered_moment(const DensityMatrix& rho, int n, const HilbertConfig& h) {
    require(n >= 1, ErrorKind::invalid_argument, "correlation order must be >= 1");
    require(rho.rows() == h.dim(), ErrorKind::invalid_argument, "density matrix size mismatch");
    double total = 0.0;
    for (int k = n; k <= h.n_max(); ++k) {
        double falling = 1.0;
        for (int j = 0; j < n; ++j) {
            falling *= k - j;
        }
        const double pop = rho(h.index(k, QdState::v), h.index(k, QdState::v)).real() +
                           rho(h.index(k, QdState::c), h.index(k, QdState::c)).real();
        total += falling * pop;
    }
    return total;
}

double gn(const DensityMatrix& rho, int n, const HilbertConfig& h, double floor) {
    const double mean = mean_phonon_number(rho, h);
    if (!(mean > floor)) {
        throw Error(ErrorKind::undefined_correlation,
                    "<b†b> = " + std::to_string(mean) + " is at or below the floor");
    }
    return normal_ordered_moment(rho, n, h) / std::pow(mean, n);
}

std::string_view to_string(ScanAxis a) {
    switch (a) {
        case ScanAxis::delta: return "delta";
        case ScanAxis::lambda: return "lambda";
        case ScanAxis::omega_drive: return "omega_drive";
    }
    return "unknown";
}

ScanAxis scan_axis_from_string(std::string_view s) {
    if (s == "delta") return ScanAxis::delta;
    if (s == "lambda") return ScanAxis::lambda;
    if (s == "omega_drive") return ScanAxis::omega_drive;
    throw Error(ErrorKind::config_error, "unknown scan axis '" + std::string(s) + "'");
}

std::optional<double> CorrelationScan::g(std::size_t point, int order) const {
    for (std::size_t k = 0; k < orders.size(); ++k) {
        if (orders[k] == order) {
            return points.at(point).g[k];
        }
    }
    return std::nullopt;
}

ScanPoint evaluate_point(const SystemParams& p, const HilbertConfig& h, const std::vector<int>& orders,
                         const ScanOptions& opt) {
    ScanPoint out;
    out.g.assign(orders.size(), std::nullopt);
    try {
        const DensityMatrix rho =
            steady_state(rotating_hamiltonian(p, h), jump_channels(p, h), opt.steady);
        const double mean = mean_phonon_number(rho, h);
        out.mean_occupation = mean;
        if (!(mean > opt.floor)) {
            out.error = "UndefinedCorrelation: <b†b> at or below floor";
            return out;
        }
        for (std::size_t k = 0; k < orders.size(); ++k) {
            out.g[k] = normal_ordered_moment(rho, orders[k], h) / std::pow(mean, orders[k]);
        }
    } catch (const Error& e) {
        out.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    return out;
}

namespace {

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace

CorrelationScan detuning_scan(const SystemParams& p_base, const HilbertConfig& h,
                              const std::vector<double>& deltas, const std::vector<int>& orders,
                              const ScanOptions& opt) {
    for (int n : orders) {
        require(n >= 1, ErrorKind::invalid_argument, "correlation order must be >= 1");
    }
    CorrelationScan scan;
    scan.axis_name = ScanAxis::delta;
    scan.axis_values = deltas;
    scan.orders = orders;
    scan.points.resize(deltas.size());
    const auto count = static_cast<long>(deltas.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(opt.threads))
    for (long i = 0; i < count; ++i) {
        SystemParams p = p_base;
        p.delta = deltas[static_cast<std::size_t>(i)];
        scan.points[static_cast<std::size_t>(i)] = evaluate_point(p, h, orders, opt);
    }
    return scan;
}

std::optional<double> locate_ridge(const CorrelationScan& cut, double delta_analytic,
                                   double search) {
    std::optional<std::size_t> best;
    double best_occupation = -1.0;
    for (std::size_t i = 0; i < cut.axis_values.size(); ++i) {
        if (std::abs(cut.axis_values[i] - delta_analytic) > search) continue;
        const auto& pt = cut.points[i];
        if (!pt.mean_occupation) continue;
        if (*pt.mean_occupation > best_occupation) {
            best_occupation = *pt.mean_occupation;
            best = i;
        }
    }
    if (!best) return std::nullopt;
    return cut.axis_values[*best];
}

ResonanceMap resonance_map(const SystemParams& p_base, const HilbertConfig& h, ScanAxis axis,
                           const std::vector<double>& axis_values, const std::vector<double>& deltas,
                           const ScanOptions& opt, int order, double ridge_search) {
    require(axis == ScanAxis::lambda || axis == ScanAxis::omega_drive, ErrorKind::invalid_argument,
            "resonance maps vary lambda or omega_drive");
    require(!axis_values.empty() && !deltas.empty(), ErrorKind::invalid_argument,
            "resonance map needs at least one axis value and one detuning");
    ResonanceMap map;
    map.axis = axis;
    map.order = order;
    map.axis_values = axis_values;
    map.deltas = deltas;
    map.rows.resize(axis_values.size());
    const std::vector<int> orders{2};
    for (auto& row : map.rows) {
        row.axis_name = ScanAxis::delta;
        row.axis_values = deltas;
        row.orders = orders;
        row.points.resize(deltas.size());
    }

    const long rows = static_cast<long>(axis_values.size());
    const long cols = static_cast<long>(deltas.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(opt.threads))
    for (long idx = 0; idx < rows * cols; ++idx) {
        const auto r = static_cast<std::size_t>(idx / cols);
        const auto c = static_cast<std::size_t>(idx % cols);
        SystemParams p = p_base;
        if (axis == ScanAxis::lambda) {
            p.lambda = axis_values[r];
        } else {
            p.omega_drive = axis_values[r];
        }
        p.delta = deltas[c];
        map.rows[r].points[c] = evaluate_point(p, h, orders, opt);
    }

    const Regime regime = axis == ScanAxis::lambda ? Regime::strong_coupling : Regime::strong_driving;
    for (std::size_t r = 0; r < axis_values.size(); ++r) {
        SystemParams p = p_base;
        if (axis == ScanAxis::lambda) {
            p.lambda = axis_values[r];
        } else {
            p.omega_drive = axis_values[r];
        }
        const double analytic = resonance_detuning(order, regime, p);
        map.ridge.push_back({axis_values[r], analytic, locate_ridge(map.rows[r], analytic, ridge_search)});
    }
    return map;
}

}  // namespace bundle
