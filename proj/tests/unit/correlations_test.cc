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


#include <cmath>

#include <gtest/gtest.h>

#include "bundle/correlations.hpp"
#include "bundle/spectra.hpp"

using namespace bundle;

namespace {

DensityMatrix fock_density(const HilbertConfig& h, int n) {
    return pure_density(tensor_basis_state(h, n, QdState::v));
}

// Boltzmann weights p_n ∝ x^n, renormalised on the truncated ladder.
DensityMatrix thermal_density(const HilbertConfig& h, double nbar) {
    const double x = nbar / (1.0 + nbar);
    DensityMatrix rho = DensityMatrix::Zero(h.dim(), h.dim());
    double z = 0.0;
    for (int n = 0; n <= h.n_max(); ++n) z += std::pow(x, n);
    for (int n = 0; n <= h.n_max(); ++n) {
        rho(h.index(n, QdState::v), h.index(n, QdState::v)) = std::pow(x, n) / z;
    }
    return rho;
}

double truncated_thermal_g2(const HilbertConfig& h, double nbar) {
    const double x = nbar / (1.0 + nbar);
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (int n = 0; n <= h.n_max(); ++n) {
        const double w = std::pow(x, n);
        z += w;
        m1 += n * w;
        m2 += n * (n - 1.0) * w;
    }
    return (m2 / z) / std::pow(m1 / z, 2);
}

SystemParams scan_point(double delta) {
    SystemParams p;
    p.delta = delta;
    p.lambda = 0.03;
    p.omega_drive = 0.003;
    p.kappa = 0.002;
    p.gamma = 0.0002;
    p.gamma_phi = 0.0004;
    return p;
}

}  // namespace

TEST(Moments, coherent_state_is_poissonian) {
    const HilbertConfig h(40);
    const DensityMatrix rho = pure_density(coherent_state(h, complex(1.2, -0.5), QdState::v));
    EXPECT_NEAR(mean_phonon_number(rho, h), 1.69, 1e-9);
    for (int n = 1; n <= 4; ++n) EXPECT_NEAR(gn(rho, n, h), 1.0, 1e-6) << n;
}

TEST(Moments, fock_states) {
    const HilbertConfig h(6);
    const DensityMatrix two = fock_density(h, 2);
    EXPECT_NEAR(gn(two, 1, h), 1.0, 1e-14);
    EXPECT_NEAR(gn(two, 2, h), 0.5, 1e-14);
    EXPECT_NEAR(gn(two, 3, h), 0.0, 1e-14);
    EXPECT_NEAR(normal_ordered_moment(fock_density(h, 4), 3, h), 24.0, 1e-12);
}

TEST(Moments, thermal_state) {
    const HilbertConfig h(60);
    const DensityMatrix rho = thermal_density(h, 0.8);
    EXPECT_NEAR(gn(rho, 2, h), truncated_thermal_g2(h, 0.8), 1e-10);
    EXPECT_NEAR(gn(rho, 2, h), 2.0, 1e-6);
    EXPECT_NEAR(gn(rho, 3, h), 6.0, 1e-5);
}

TEST(Moments, qd_state_does_not_matter) {
    const HilbertConfig h(10);
    const DensityMatrix rho = 0.5 * (fock_density(h, 3) + pure_density(tensor_basis_state(h, 3, QdState::c)));
    EXPECT_NEAR(mean_phonon_number(rho, h), 3.0, 1e-14);
    EXPECT_NEAR(gn(rho, 2, h), 2.0 / 3.0, 1e-14);
}

TEST(Moments, undefined_below_floor) {
    const HilbertConfig h(4);
    try {
        gn(fock_density(h, 0), 2, h);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::undefined_correlation);
    }
    EXPECT_THROW(gn(fock_density(h, 1), 0, h), Error);
}

TEST(Scan, single_point_matches_steady_state) {
    const HilbertConfig h(12);
    const SystemParams p = scan_point(-2.0);
    const auto scan = detuning_scan(p, h, {-2.0}, {2, 3});
    ASSERT_EQ(scan.points.size(), 1u);
    const DensityMatrix rho = steady_state(rotating_hamiltonian(p, h), jump_channels(p, h));
    ASSERT_TRUE(scan.g(0, 2).has_value());
    EXPECT_NEAR(*scan.g(0, 2), gn(rho, 2, h), 1e-9 * gn(rho, 2, h));
    EXPECT_NEAR(*scan.g(0, 3), gn(rho, 3, h), 1e-9 * gn(rho, 3, h));
    EXPECT_NEAR(*scan.points[0].mean_occupation, mean_phonon_number(rho, h), 1e-15);
}

TEST(Scan, deterministic_across_threads) {
    const HilbertConfig h(8);
    const SystemParams p = scan_point(-2.0);
    const std::vector<double> deltas{-2.1, -2.0, -1.9, -1.0};
    ScanOptions one;
    one.threads = 1;
    ScanOptions two;
    two.threads = 2;
    const auto a = detuning_scan(p, h, deltas, {2}, one);
    const auto b = detuning_scan(p, h, deltas, {2}, two);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        EXPECT_EQ(a.g(i, 2), b.g(i, 2));
        EXPECT_EQ(a.points[i].mean_occupation, b.points[i].mean_occupation);
    }
}

TEST(Scan, enhancement_at_two_phonon_resonance) {
    const HilbertConfig h(12);
    const auto scan = detuning_scan(scan_point(-2.0), h, {-2.3, -2.0, -1.7}, {2});
    EXPECT_GT(*scan.points[1].mean_occupation, 10.0 * *scan.points[0].mean_occupation);
    EXPECT_GT(*scan.points[1].mean_occupation, 10.0 * *scan.points[2].mean_occupation);
}

TEST(Scan, undefined_point_is_recorded_not_thrown) {
    const HilbertConfig h(4);
    SystemParams p = scan_point(-2.0);
    p.omega_drive = 0.0;
    const auto scan = detuning_scan(p, h, {-2.0, -1.0}, {2});
    for (const auto& pt : scan.points) {
        EXPECT_TRUE(pt.error.has_value());
        EXPECT_FALSE(pt.g[0].has_value());
    }
}

TEST(Scan, axis_names_round_trip) {
    for (auto a : {ScanAxis::delta, ScanAxis::lambda, ScanAxis::omega_drive}) {
        EXPECT_EQ(scan_axis_from_string(to_string(a)), a);
    }
    EXPECT_THROW(scan_axis_from_string("kappa"), Error);
}

TEST(Ridge, argmax_inside_window) {
    CorrelationScan cut;
    cut.axis_values = {-2.2, -2.1, -2.0, -1.9, -1.5};
    cut.orders = {2};
    for (double n : {0.1, 0.5, 0.9, 0.4, 5.0}) {
        ScanPoint pt;
        pt.mean_occupation = n;
        pt.g = {1.0};
        cut.points.push_back(pt);
    }
    EXPECT_EQ(locate_ridge(cut, -2.0, 0.25), -2.0);
    EXPECT_EQ(locate_ridge(cut, -2.0, 0.6), -1.5);
    EXPECT_FALSE(locate_ridge(cut, 1.0, 0.25).has_value());
}

TEST(Map, lambda_ridge_follows_polaron_shift) {
    SystemParams p = scan_point(-2.0);
    const HilbertConfig h(12);
    std::vector<double> deltas;
    for (int i = 0; i <= 40; ++i) deltas.push_back(-2.05 + 0.0025 * i);
    const auto map = resonance_map(p, h, ScanAxis::lambda, {0.05, 0.1}, deltas);
    ASSERT_EQ(map.ridge.size(), 2u);
    for (const auto& r : map.ridge) {
        EXPECT_NEAR(r.delta_analytic, r.axis_value * r.axis_value - 2.0, 1e-15);
        ASSERT_TRUE(r.delta_ridge.has_value());
        EXPECT_NEAR(*r.delta_ridge, r.delta_analytic, 0.0025);
    }
}

TEST(Map, degenerate_axis_rejected) {
    const HilbertConfig h(4);
    EXPECT_THROW(resonance_map(scan_point(-2.0), h, ScanAxis::delta, {0.1}, {-2.0}), Error);
    EXPECT_THROW(resonance_map(scan_point(-2.0), h, ScanAxis::lambda, {}, {-2.0}), Error);
}
