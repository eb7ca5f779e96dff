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


#include "bundle/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include <omp.h>

namespace bundle {
namespace {

double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Matrix effective_generator(const QuantumOperator& H, const std::vector<JumpChannel>& channels) {
    Matrix g = complex(0.0, -1.0) * H.matrix();
    for (const auto& c : channels) g -= 0.5 * c.op.matrix().adjoint() * c.op.matrix();
    return g;
}

double auto_step(const std::vector<JumpChannel>& channels) {
    double gamma = 0.0;
    for (const auto& c : channels) {
        const Matrix cdc = c.op.matrix().adjoint() * c.op.matrix();
        gamma += cdc.cwiseAbs().rowwise().sum().maxCoeff();
    }
    if (gamma <= 0.0) return 1e3;
    return std::clamp(0.5 / gamma, 1e-3, 1e3);
}

}  // namespace

TrajectorySimulator::TrajectorySimulator(const QuantumOperator& H, std::vector<JumpChannel> channels,
                                         const TrajectoryOptions& opt)
    : h_(HilbertConfig::from_dim(H.dim())), channels_(std::move(channels)), opt_(opt) {
    require(H.is_hermitian(1e-10), ErrorKind::invalid_argument, "Hamiltonian is not Hermitian");
    require(opt.levels >= 1 && opt.levels <= 60, ErrorKind::invalid_argument,
            "levels must lie in [1, 60]");
    for (const auto& c : channels_) {
        require(c.op.dim() == H.dim(), ErrorKind::invalid_argument, "jump operator dimension mismatch");
        jumps_.push_back(c.op.sparse());
    }
    const double step = opt.step > 0.0 ? opt.step : auto_step(channels_);
    ladder_ = ExponentialLadder(effective_generator(H, channels_), step, opt.levels);
}

TrajectoryResult TrajectorySimulator::run(const StateVector& psi0, double duration,
                                          std::uint64_t seed,
                                          std::span<const double> snapshot_times) const {
    require(psi0.size() == h_.dim(), ErrorKind::invalid_argument, "initial state dimension mismatch");
    require(std::abs(psi0.squaredNorm() - 1.0) < 1e-10, ErrorKind::invalid_argument,
            "initial state is not normalized");
    require(duration > 0.0, ErrorKind::invalid_argument, "duration must be positive");
    require(std::is_sorted(snapshot_times.begin(), snapshot_times.end()),
            ErrorKind::invalid_argument, "snapshot times must be sorted");
    require(snapshot_times.empty() ||
                (snapshot_times.front() >= 0.0 && snapshot_times.back() <= duration),
            ErrorKind::invalid_argument, "snapshot times outside [0, duration]");

    std::mt19937_64 eng(seed);
    TrajectoryResult out;
    out.seed = seed;
    out.duration = duration;

    // psi is kept unnormalized between jumps; its squared norm decays to r.
    StateVector psi = psi0;
    StateVector next(psi.size());
    double t = 0.0;
    double r = 1.0 - uniform01(eng);
    std::size_t snap = 0;
    out.leak_max = top_level_population(h_, psi);

    const double dt = ladder_.step();
    const int levels = ladder_.levels();

    auto emit_snapshots = [&](double until, bool inclusive) {
        while (snap < snapshot_times.size() &&
               (inclusive ? snapshot_times[snap] <= until : snapshot_times[snap] < until)) {
            StateVector s = psi;
            ladder_.advance(s, std::max(0.0, snapshot_times[snap] - t));
            s.normalize();
            out.snapshots.push_back({snapshot_times[snap], std::move(s)});
            ++snap;
        }
    };

    while (t < duration) {
        const double span = std::min(dt, duration - t);
        next = psi;
        if (span == dt) {
            next = ladder_.rung(0) * psi;
        } else {
            ladder_.advance(next, span);
        }

        if (next.squaredNorm() > r) {
            const double t_next = span == dt ? t + dt : duration;
            emit_snapshots(t_next, true);
            psi.swap(next);
            t = t_next;
            out.leak_max = std::max(out.leak_max, top_level_population(h_, psi) / psi.squaredNorm());
            continue;
        }

        // The norm crosses r inside (t, t + span]: bisect over the ladder.
        double tau = 0.0;
        next = psi;
        StateVector trial(psi.size());
        for (int k = 1; k <= levels; ++k) {
            const double size = dt / std::ldexp(1.0, k);
            if (tau + size > span) continue;
            trial.noalias() = ladder_.rung(k) * next;
            if (trial.squaredNorm() > r) {
                next.swap(trial);
                tau += size;
            }
        }
        const double t_jump = std::min(t + tau + ladder_.resolution(), t + span);
        emit_snapshots(t_jump, false);

        double total = 0.0;
        std::vector<double> weights(jumps_.size());
        for (std::size_t i = 0; i < jumps_.size(); ++i) {
            weights[i] = (jumps_[i] * next).squaredNorm();
            total += weights[i];
        }
        if (total <= 0.0) {
            throw Error(ErrorKind::integration_failure, "jump with vanishing emission rate");
        }
        const double pick = uniform01(eng) * total;
        std::size_t chosen = 0;
        double acc = weights[0];
        while (chosen + 1 < weights.size() && acc <= pick) acc += weights[++chosen];

        psi = jumps_[chosen] * next;
        psi.normalize();
        t = t_jump;
        r = 1.0 - uniform01(eng);
        out.clicks.push_back({t_jump, channels_[chosen].kind});
        out.leak_max = std::max(out.leak_max, top_level_population(h_, psi));
    }
    emit_snapshots(duration, true);

    out.final_state = psi.normalized();
    if (opt_.check_leak && out.leak_max > opt_.leak_tol) {
        throw Error(ErrorKind::truncation_leak,
                    "top Fock level population " + std::to_string(out.leak_max) +
                        " exceeds tolerance; increase n_max");
    }
    return out;
}

TrajectoryResult run_trajectory(const QuantumOperator& H, const std::vector<JumpChannel>& channels,
                                const StateVector& psi0, double duration, std::uint64_t seed,
                                std::span<const double> snapshot_times,
                                const TrajectoryOptions& opt) {
    return TrajectorySimulator(H, channels, opt).run(psi0, duration, seed, snapshot_times);
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

std::vector<TrajectoryResult> run_ensemble(const TrajectorySimulator& sim, const StateVector& psi0,
                                           double duration, std::size_t count,
                                           std::uint64_t master_seed,
                                           std::span<const double> snapshot_times, int threads) {
    std::vector<TrajectoryResult> out(count);
    std::vector<std::optional<Error>> failures(count);
    const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (long i = 0; i < static_cast<long>(count); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            out[idx] = sim.run(psi0, duration, trajectory_seed(master_seed, idx), snapshot_times);
        } catch (const Error& e) {
            failures[idx] = e;
        }
    }
    for (auto& f : failures) {
        if (f) throw *f;
    }
    return out;
}

std::vector<Bundle> group_bundles(std::span<const ClickRecord> clicks, double gap) {
    require(gap > 0.0, ErrorKind::invalid_argument, "bundle gap must be positive");
    std::vector<Bundle> out;
    double last = 0.0;
    for (const auto& c : clicks) {
        if (c.channel != ChannelKind::phonon) continue;
        if (out.empty() || c.time - last >= gap) {
            out.push_back({c.time, 1});
        } else {
            ++out.back().size;
        }
        last = c.time;
    }
    return out;
}

std::size_t BundleStatistics::total_bundles() const {
    std::size_t n = 0;
    for (const auto& [size, c] : counts) n += c;
    return n;
}

std::size_t BundleStatistics::count(int size) const {
    const auto it = counts.find(size);
    return it == counts.end() ? 0 : it->second;
}

double BundleStatistics::rate(int size) const {
    return total_time > 0.0 ? static_cast<double>(count(size)) / total_time : 0.0;
}

double BundleStatistics::fraction(int size) const {
    const auto n = total_bundles();
    return n == 0 ? 0.0 : static_cast<double>(count(size)) / static_cast<double>(n);
}

BundleStatistics bundle_statistics(std::span<const TrajectoryResult> trajs, double gap) {
    BundleStatistics s;
    s.gap = gap;
    s.trajectories = trajs.size();
    for (const auto& tr : trajs) {
        s.total_time += tr.duration;
        for (const auto& b : group_bundles(tr.clicks, gap)) {
            ++s.counts[b.size];
            s.phonon_clicks += static_cast<std::size_t>(b.size);
        }
    }
    return s;
}

double physical_rate(double internal_rate, double omega_b_hz) {
    return internal_rate * 2.0 * std::numbers::pi * omega_b_hz;
}

std::string_view to_string(WindowAnchor a) {
    return a == WindowAnchor::uniform ? "uniform" : "first_click";
}

WindowAnchor window_anchor_from_string(std::string_view s) {
    if (s == "uniform") return WindowAnchor::uniform;
    if (s == "first_click") return WindowAnchor::first_click;
    throw Error(ErrorKind::config_error, "unknown window anchor '" + std::string(s) + "'");
}

PurityEstimate estimate_purity(std::span<const TrajectoryResult> trajs, int n_target, double window,
                               std::size_t n_windows, std::uint64_t seed,
                               const PurityOptions& opt) {
    require(n_target >= 1, ErrorKind::invalid_argument, "n_target must be at least 1");
    require(window > 0.0, ErrorKind::invalid_argument, "window must be positive");
    require(opt.batch > 0, ErrorKind::invalid_argument, "batch must be positive");

    std::vector<std::vector<double>> phonons(trajs.size());
    std::vector<double> cumulative;
    double usable = 0.0;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        for (const auto& c : trajs[i].clicks) {
            if (c.channel == ChannelKind::phonon) phonons[i].push_back(c.time);
        }
        usable += std::max(0.0, trajs[i].duration - window);
        cumulative.push_back(usable);
    }
    require(usable > 0.0, ErrorKind::invalid_argument, "window longer than every trajectory");

    PurityEstimate est;
    est.n_target = n_target;
    est.window = window;
    est.anchor = opt.anchor;
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_target) + 1, 0);
    std::mt19937_64 eng(trajectory_seed(seed, 0));

    auto finalize = [&] {
        std::size_t counted = 0;
        for (int i = 1; i <= n_target; ++i) counted += counts[static_cast<std::size_t>(i)];
        est.p_bar.assign(static_cast<std::size_t>(n_target), 0.0);
        for (int i = 1; i <= n_target; ++i) {
            est.p_bar[static_cast<std::size_t>(i - 1)] =
                est.nonempty == 0 ? 0.0
                                  : static_cast<double>(counts[static_cast<std::size_t>(i)]) /
                                        static_cast<double>(est.nonempty);
        }
        const double k = static_cast<double>(counts[static_cast<std::size_t>(n_target)]);
        const double n = static_cast<double>(counted);
        est.purity = counted == 0 ? 0.0 : k / n;
        // Laplace-smoothed binomial error so that Π = 0 or 1 is not reported exact.
        const double p = (k + 1.0) / (n + 2.0);
        est.stderr_ = counted == 0 ? 1.0 : std::sqrt(p * (1.0 - p) / n);
        return counted;
    };

    while (est.windows_sampled < n_windows) {
        const std::size_t batch = std::min(opt.batch, n_windows - est.windows_sampled);
        for (std::size_t b = 0; b < batch; ++b) {
            const double x = uniform01(eng) * usable;
            const auto j = static_cast<std::size_t>(
                std::upper_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
            const std::size_t ji = std::min(j, trajs.size() - 1);
            const double start = x - (ji == 0 ? 0.0 : cumulative[ji - 1]);
            const auto& times = phonons[ji];
            auto first = std::lower_bound(times.begin(), times.end(), start);
            double open = start;
            if (opt.anchor == WindowAnchor::first_click) {
                if (first == times.end() || *first + window > trajs[ji].duration) {
                    ++est.windows_sampled;
                    continue;
                }
                open = *first;
            }
            const auto last = std::lower_bound(first, times.end(), open + window);
            const auto clicks = static_cast<std::size_t>(last - first);
            ++est.windows_sampled;
            if (clicks == 0) continue;
            ++est.nonempty;
            if (clicks > static_cast<std::size_t>(n_target)) {
                ++est.overflow;
            } else {
                ++counts[clicks];
            }
        }
        const std::size_t counted = finalize();
        if (counted >= opt.min_counted && est.stderr_ < opt.target_stderr) {
            est.converged = true;
            return est;
        }
    }
    finalize();
    throw InsufficientStatistics("purity standard error " + std::to_string(est.stderr_) +
                                     " above target after " + std::to_string(est.windows_sampled) +
                                     " windows",
                                 est);
}

std::vector<DensityMatrix> snapshot_density(const TrajectoryResult& traj,
                                            std::span<const double> times) {
    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto it = std::find_if(traj.snapshots.begin(), traj.snapshots.end(), [&](const Snapshot& s) {
            return std::abs(s.time - t) <= 1e-9 * std::max(1.0, std::abs(t));
        });
        if (it == traj.snapshots.end()) {
            throw Error(ErrorKind::missing_snapshot,
                        "no snapshot recorded at t = " + std::to_string(t));
        }
        out.push_back(pure_density(it->state));
    }
    return out;
}

}  // namespace bundle
