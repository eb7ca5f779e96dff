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


#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "bundle/dynamics.hpp"
#include "bundle/trajectories.hpp"

using namespace bundle;

namespace {

std::vector<ClickRecord> phonons(std::initializer_list<double> times) {
    std::vector<ClickRecord> out;
    for (double t : times) out.push_back({t, ChannelKind::phonon});
    return out;
}

TrajectoryResult synthetic(std::vector<ClickRecord> clicks, double duration) {
    TrajectoryResult r;
    r.duration = duration;
    r.clicks = std::move(clicks);
    return r;
}

SystemParams driven_lossy() {
    SystemParams p;
    p.delta = -1.0;
    p.lambda = 0.2;
    p.omega_drive = 0.1;
    p.kappa = 0.05;
    p.gamma = 0.03;
    p.gamma_phi = 0.02;
    return p;
}

}  // namespace

TEST(Seeds, distinct_and_stable) {
    EXPECT_EQ(trajectory_seed(7, 3), trajectory_seed(7, 3));
    EXPECT_NE(trajectory_seed(7, 3), trajectory_seed(7, 4));
    EXPECT_NE(trajectory_seed(7, 3), trajectory_seed(8, 3));
}

TEST(Trajectory, without_channels_follows_schrodinger) {
    const HilbertConfig h(6);
    SystemParams p;
    p.delta = -0.9;
    p.lambda = 0.2;
    p.omega_drive = 0.15;
    const auto H = rotating_hamiltonian(p, h);
    const StateVector psi0 = tensor_basis_state(h, 0, QdState::v);
    const std::vector<double> times{0.0, 13.0, 77.7, 150.0};
    TrajectoryOptions opt;
    opt.step = 1.0;
    const auto traj = run_trajectory(H, {}, psi0, 150.0, 1, times, opt);
    EXPECT_TRUE(traj.clicks.empty());
    const auto ref = evolve_schrodinger(H, psi0, TimeGrid{0.0, 150.0, 2});
    ASSERT_EQ(traj.snapshots.size(), times.size());
    const auto exact = evolve_schrodinger(H, psi0, TimeGrid{0.0, 77.7, 2});
    EXPECT_NEAR(std::abs(exact.back().dot(traj.snapshots[2].state)), 1.0, 1e-7);
    EXPECT_NEAR(std::abs(ref.back().dot(traj.final_state)), 1.0, 1e-7);
}

TEST(Trajectory, single_decay_waiting_time_is_exponential) {
    const HilbertConfig h(2);
    SystemParams p;
    p.kappa = 1.0;
    const TrajectorySimulator sim(QuantumOperator(Matrix::Zero(h.dim(), h.dim())), jump_channels(p, h));
    const auto trajs = run_ensemble(sim, tensor_basis_state(h, 1, QdState::v), 30.0, 10000, 42);
    std::vector<double> first;
    for (const auto& t : trajs) {
        ASSERT_LE(t.clicks.size(), 1u);
        first.push_back(t.clicks.empty() ? 30.0 : t.clicks[0].time);
    }
    std::sort(first.begin(), first.end());
    double ks = 0.0;
    const double n = static_cast<double>(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        const double cdf = 1.0 - std::exp(-first[i]);
        ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    EXPECT_LT(ks, 0.02);
}

TEST(Trajectory, click_times_are_ordered_and_channels_labelled) {
    const HilbertConfig h(12);
    const SystemParams p = driven_lossy();
    const auto traj = run_trajectory(rotating_hamiltonian(p, h), jump_channels(p, h),
                                     tensor_basis_state(h, 0, QdState::v), 500.0, 9);
    ASSERT_FALSE(traj.clicks.empty());
    EXPECT_TRUE(std::is_sorted(traj.clicks.begin(), traj.clicks.end(),
                               [](const auto& a, const auto& b) { return a.time < b.time; }));
    EXPECT_LE(traj.clicks.back().time, 500.0);
    EXPECT_NEAR(traj.final_state.norm(), 1.0, 1e-12);
}

TEST(Ensemble, bit_exact_across_thread_counts) {
    const HilbertConfig h(12);
    const SystemParams p = driven_lossy();
    const TrajectorySimulator sim(rotating_hamiltonian(p, h), jump_channels(p, h));
    const StateVector psi0 = tensor_basis_state(h, 0, QdState::v);
    const auto a = run_ensemble(sim, psi0, 300.0, 12, 2024, {}, 1);
    const auto b = run_ensemble(sim, psi0, 300.0, 12, 2024, {}, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].seed, trajectory_seed(2024, i));
        ASSERT_EQ(a[i].clicks.size(), b[i].clicks.size());
        for (std::size_t k = 0; k < a[i].clicks.size(); ++k) {
            EXPECT_EQ(a[i].clicks[k].time, b[i].clicks[k].time);
            EXPECT_EQ(a[i].clicks[k].channel, b[i].clicks[k].channel);
        }
        EXPECT_EQ(a[i].final_state, b[i].final_state);
    }
}

TEST(Ensemble, averages_match_master_equation) {
    const HilbertConfig h(12);
    const SystemParams p = driven_lossy();
    const auto H = rotating_hamiltonian(p, h);
    const auto ch = jump_channels(p, h);
    const StateVector psi0 = tensor_basis_state(h, 0, QdState::v);
    const std::vector<double> times{10.0, 40.0};
    const auto trajs = run_ensemble(TrajectorySimulator(H, ch), psi0, 40.0, 500, 5, times);
    const auto rhos = evolve_master(H, ch, pure_density(psi0), TimeGrid{0.0, 40.0, 5});
    const std::vector<std::size_t> master_index{1, 4};
    for (std::size_t s = 0; s < times.size(); ++s) {
        const Eigen::VectorXd exact = rhos[master_index[s]].diagonal().real();
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(h.dim());
        Eigen::VectorXd sq = Eigen::VectorXd::Zero(h.dim());
        for (const auto& t : trajs) {
            const Eigen::VectorXd pop = t.snapshots[s].state.cwiseAbs2();
            mean += pop;
            sq += pop.cwiseAbs2();
        }
        const double n = static_cast<double>(trajs.size());
        mean /= n;
        for (Eigen::Index k = 0; k < h.dim(); ++k) {
            if (exact(k) < 0.01) continue;  // sample stderr is unreliable for rare levels
            const double var = std::max(sq(k) / n - mean(k) * mean(k), 0.0);
            const double se = std::sqrt(var / (n - 1.0));
            EXPECT_LE(std::abs(mean(k) - exact(k)), 3.0 * se + 1e-9) << "t=" << times[s] << " k=" << k;
        }
    }
}

TEST(Bundles, grouping_by_gap) {
    const auto clicks = phonons({10.0, 10.4, 500.0, 500.3});
    const auto b = group_bundles(clicks, 5.0);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].size, 2);
    EXPECT_DOUBLE_EQ(b[0].t_first, 10.0);
    EXPECT_EQ(b[1].size, 2);
    EXPECT_DOUBLE_EQ(b[1].t_first, 500.0);
    EXPECT_TRUE(group_bundles({}, 5.0).empty());
}

TEST(Bundles, photons_are_ignored_and_gap_is_exclusive) {
    std::vector<ClickRecord> clicks = phonons({1.0, 6.0, 6.5});
    clicks.insert(clicks.begin() + 1, {3.0, ChannelKind::photon});
    const auto b = group_bundles(clicks, 5.0);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].size, 1);
    EXPECT_EQ(b[1].size, 2);
}

TEST(Bundles, statistics_account_for_every_phonon) {
    std::vector<TrajectoryResult> trajs{synthetic(phonons({1.0, 1.5, 100.0}), 200.0),
                                        synthetic(phonons({5.0, 5.1, 5.2, 5.3, 80.0, 80.1}), 300.0)};
    const auto s = bundle_statistics(trajs, 2.0);
    EXPECT_EQ(s.phonon_clicks, 9u);
    EXPECT_EQ(s.total_bundles(), 4u);
    EXPECT_EQ(s.count(1), 1u);
    EXPECT_EQ(s.count(2), 2u);
    EXPECT_EQ(s.count(4), 1u);
    EXPECT_EQ(s.count(3), 0u);
    std::size_t phonons_in_bundles = 0;
    for (const auto& [size, count] : s.counts) phonons_in_bundles += static_cast<std::size_t>(size) * count;
    EXPECT_EQ(phonons_in_bundles, s.phonon_clicks);
    EXPECT_DOUBLE_EQ(s.total_time, 500.0);
    EXPECT_DOUBLE_EQ(s.rate(2), 2.0 / 500.0);
    EXPECT_DOUBLE_EQ(s.fraction(4), 0.25);
    EXPECT_DOUBLE_EQ(physical_rate(1.0, 1e12), 2.0 * M_PI * 1e12);
}

TEST(Purity, perfect_pairs) {
    std::vector<ClickRecord> clicks;
    for (int k = 0; k < 200; ++k) {
        clicks.push_back({100.0 * k + 10.0, ChannelKind::phonon});
        clicks.push_back({100.0 * k + 10.01, ChannelKind::phonon});
    }
    const std::vector<TrajectoryResult> trajs{synthetic(clicks, 20000.0)};
    for (auto anchor : {WindowAnchor::uniform, WindowAnchor::first_click}) {
        PurityOptions opt;
        opt.anchor = anchor;
        const auto est = estimate_purity(trajs, 2, 50.0, 1'000'000, 3, opt);
        EXPECT_TRUE(est.converged);
        EXPECT_GT(est.purity, 0.99);
        EXPECT_LT(est.stderr_, 0.01);
        EXPECT_EQ(est.overflow, 0u);
        EXPECT_NEAR(est.p_bar[0] + est.p_bar[1], 1.0, 1e-12);
    }
}

TEST(Purity, uniform_windows_cut_bundles_at_their_edges) {
    std::vector<ClickRecord> clicks;
    for (int k = 0; k < 200; ++k) {
        clicks.push_back({100.0 * k + 10.0, ChannelKind::phonon});
        clicks.push_back({100.0 * k + 10.1, ChannelKind::phonon});
    }
    const std::vector<TrajectoryResult> trajs{synthetic(clicks, 20000.0)};
    PurityOptions opt;
    opt.target_stderr = 0.002;
    // Both clicks fall inside for starts in a span of 0.9, one click for 0.2.
    const auto est = estimate_purity(trajs, 2, 1.0, 50'000'000, 5, opt);
    EXPECT_NEAR(est.purity, 0.9 / 1.1, 5.0 * est.stderr_);
}

TEST(Purity, uniform_anchor_counts_empty_windows_out) {
    std::vector<ClickRecord> clicks;
    for (int k = 0; k < 400; ++k) clicks.push_back({50.0 * k + 1.0, ChannelKind::phonon});
    const std::vector<TrajectoryResult> trajs{synthetic(clicks, 20000.0)};
    PurityOptions opt;
    opt.anchor = WindowAnchor::uniform;
    opt.target_stderr = 0.02;
    const auto est = estimate_purity(trajs, 2, 1.0, 2'000'000, 3, opt);
    EXPECT_EQ(est.purity, 0.0);
    EXPECT_LT(est.nonempty, est.windows_sampled / 10);
}

TEST(Purity, deterministic_for_seed) {
    std::vector<ClickRecord> clicks = phonons({1.0, 1.2, 7.0, 30.0, 30.5, 30.7, 60.0});
    const std::vector<TrajectoryResult> trajs{synthetic(clicks, 100.0)};
    PurityOptions opt;
    opt.target_stderr = 0.05;
    const auto a = estimate_purity(trajs, 2, 3.0, 100000, 11, opt);
    const auto b = estimate_purity(trajs, 2, 3.0, 100000, 11, opt);
    EXPECT_EQ(a.purity, b.purity);
    EXPECT_EQ(a.windows_sampled, b.windows_sampled);
    EXPECT_GT(a.overflow, 0u);
}

TEST(Purity, insufficient_statistics_carries_partial_estimate) {
    const std::vector<TrajectoryResult> trajs{synthetic(phonons({1.0, 1.2}), 100.0)};
    try {
        estimate_purity(trajs, 2, 1.0, 500, 1);
        FAIL();
    } catch (const InsufficientStatistics& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_statistics);
        EXPECT_EQ(e.partial().windows_sampled, 500u);
        EXPECT_FALSE(e.partial().converged);
    }
}

TEST(Purity, rejects_windows_longer_than_data) {
    const std::vector<TrajectoryResult> trajs{synthetic(phonons({1.0}), 10.0)};
    EXPECT_THROW(estimate_purity(trajs, 2, 20.0, 10, 1), Error);
    EXPECT_THROW(estimate_purity(trajs, 0, 1.0, 10, 1), Error);
    EXPECT_EQ(window_anchor_from_string(to_string(WindowAnchor::uniform)), WindowAnchor::uniform);
}

TEST(Snapshots, conditional_states_are_pure) {
    const HilbertConfig h(12);
    const SystemParams p = driven_lossy();
    const std::vector<double> times{0.0, 25.0, 100.0};
    const auto traj = run_trajectory(rotating_hamiltonian(p, h), jump_channels(p, h),
                                     tensor_basis_state(h, 0, QdState::v), 100.0, 4, times);
    const auto rhos = snapshot_density(traj, times);
    ASSERT_EQ(rhos.size(), 3u);
    for (const auto& rho : rhos) {
        EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
        EXPECT_NEAR((rho * rho).trace().real(), 1.0, 1e-12);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        EXPECT_LT(es.eigenvalues().head(h.dim() - 1).cwiseAbs().maxCoeff(), 1e-12);
    }
    const std::vector<double> missing{50.0};
    try {
        snapshot_density(traj, missing);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::missing_snapshot);
    }
}
