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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "bundle/integrator.hpp"
#include "bundle/model.hpp"

namespace bundle {

struct ClickRecord {
    double time;
    ChannelKind channel;
};

struct Snapshot {
    double time;
    StateVector state;  ///< normalized conditional state
};

struct TrajectoryResult {
    std::uint64_t seed = 0;
    double duration = 0.0;
    std::vector<ClickRecord> clicks;
    std::vector<Snapshot> snapshots;
    double leak_max = 0.0;
    StateVector final_state;
};

struct TrajectoryOptions {
    double step = 0.0;  ///< propagation step; 0 picks 0.5/Σ‖c†c‖
    int levels = 40;    ///< jump times resolved to step/2^levels
    double leak_tol = 1e-6;
    bool check_leak = true;
};

/// Monte Carlo wavefunction unraveling of the master equation. The
/// non-Hermitian evolution under H_eff = H − (i/2)Σc†c is exact (matrix
/// exponentials); a jump happens when ‖ψ‖² falls to a uniform threshold, located
/// by bisection on the exponential ladder. Immutable after construction; run()
/// may be called concurrently.
class TrajectorySimulator {
  public:
    TrajectorySimulator(const QuantumOperator& H, std::vector<JumpChannel> channels,
                        const TrajectoryOptions& opt = {});

    TrajectoryResult run(const StateVector& psi0, double duration, std::uint64_t seed,
                         std::span<const double> snapshot_times = {}) const;

    double step() const noexcept { return ladder_.step(); }
    const HilbertConfig& hilbert() const noexcept { return h_; }

  private:
    HilbertConfig h_;
    std::vector<JumpChannel> channels_;
    std::vector<SparseMatrix> jumps_;
    ExponentialLadder ladder_;
    TrajectoryOptions opt_;
};

TrajectoryResult run_trajectory(const QuantumOperator& H, const std::vector<JumpChannel>& channels,
                                const StateVector& psi0, double duration, std::uint64_t seed,
                                std::span<const double> snapshot_times = {},
                                const TrajectoryOptions& opt = {});

/// Stream splitting: trajectory i of an ensemble seeded with `master` uses
/// splitmix64(master + (i+1)·0x9E3779B97F4A7C15) to seed its own mt19937_64.
std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index);

/// Runs `count` trajectories concurrently; result i always comes from stream i.
std::vector<TrajectoryResult> run_ensemble(const TrajectorySimulator& sim, const StateVector& psi0,
                                           double duration, std::size_t count,
                                           std::uint64_t master_seed,
                                           std::span<const double> snapshot_times = {},
                                           int threads = 0);

struct Bundle {
    double t_first;
    int size;
};

/// Groups phonon clicks: consecutive clicks closer than `gap` share a bundle.
/// Photon and dephasing clicks are ignored.
std::vector<Bundle> group_bundles(std::span<const ClickRecord> clicks, double gap);

struct BundleStatistics {
    double gap = 0.0;
    double total_time = 0.0;
    std::size_t trajectories = 0;
    std::size_t phonon_clicks = 0;
    std::map<int, std::size_t> counts;  ///< bundle size → number of bundles

    std::size_t total_bundles() const;
    std::size_t count(int size) const;
    /// Bundles of `size` per unit time (units of ω_b).
    double rate(int size) const;
    /// Fraction of all bundles with this size.
    double fraction(int size) const;
};

BundleStatistics bundle_statistics(std::span<const TrajectoryResult> trajs, double gap);

/// rate·ω_b with ω_b = 2π·omega_b_hz, i.e. events per second.
double physical_rate(double internal_rate, double omega_b_hz);

/// How purity windows are placed. `uniform` opens each window at a uniformly
/// random time. `first_click` draws the random time the same way but opens the
/// window at the first phonon click after it, so windows do not cut a bundle at
/// their leading edge.
enum class WindowAnchor { uniform, first_click };

std::string_view to_string(WindowAnchor a);
WindowAnchor window_anchor_from_string(std::string_view s);

struct PurityOptions {
    WindowAnchor anchor = WindowAnchor::uniform;
    double target_stderr = 0.01;
    std::size_t batch = 1000;
    std::size_t min_counted = 100;  ///< windows in the Πₙ denominator before stopping
};

struct PurityEstimate {
    int n_target = 0;
    double window = 0.0;
    WindowAnchor anchor = WindowAnchor::uniform;
    std::vector<double> p_bar;  ///< P̄₁..P̄ₙ, fractions of non-empty windows
    double purity = 0.0;        ///< P̄ₙ / Σ_{i≤n} P̄ᵢ
    double stderr_ = 0.0;
    std::size_t windows_sampled = 0;
    std::size_t nonempty = 0;
    std::size_t overflow = 0;  ///< non-empty windows with more than n_target clicks
    bool converged = false;

    double overflow_fraction() const {
        return nonempty == 0 ? 0.0 : static_cast<double>(overflow) / static_cast<double>(nonempty);
    }
};

class InsufficientStatistics : public Error {
  public:
    InsufficientStatistics(const std::string& what, PurityEstimate partial)
        : Error(ErrorKind::insufficient_statistics, what), partial_(std::move(partial)) {}
    const PurityEstimate& partial() const noexcept { return partial_; }

  private:
    PurityEstimate partial_;
};

/// Samples windows of length `window` across all trajectories in batches until
/// the binomial standard error of Πₙ drops below opt.target_stderr or
/// `n_windows` windows have been drawn (then throws InsufficientStatistics
/// carrying the partial estimate).
PurityEstimate estimate_purity(std::span<const TrajectoryResult> trajs, int n_target, double window,
                               std::size_t n_windows, std::uint64_t seed,
                               const PurityOptions& opt = {});

/// Pure-state projectors |ψ(t)⟩⟨ψ(t)| from snapshots recorded at run time.
/// Throws MissingSnapshot for times that were not requested.
std::vector<DensityMatrix> snapshot_density(const TrajectoryResult& traj,
                                            std::span<const double> times);

}  // namespace bundle
