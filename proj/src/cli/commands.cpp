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


#include "bundle/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include <omp.h>

namespace bundle::cli {
namespace {

template <class T>
const T& spec_as(const RunConfig& cfg) {
    return std::get<T>(cfg.spec);
}

double physical_seconds(double t, const SystemParams& p) {
    return t / (2.0 * std::numbers::pi * *p.omega_b_physical);
}

Frame default_frame(Regime r) {
    switch (r) {
        case Regime::perturbative: return Frame::bare;
        case Regime::strong_coupling: return Frame::displaced;
        case Regime::strong_driving: return Frame::dressed;
    }
    return Frame::bare;
}

ScanOptions scan_options(const RunConfig& cfg) {
    ScanOptions opt;
    opt.threads = cfg.threads;
    opt.steady.residual_tol = cfg.tolerances.residual_tol;
    opt.steady.uniqueness_tol = cfg.tolerances.uniqueness_tol;
    return opt;
}

TrajectoryOptions trajectory_options(const RunConfig& cfg) {
    TrajectoryOptions opt;
    opt.leak_tol = cfg.tolerances.leak_tol;
    return opt;
}

double resonance_delta(const ResonanceSpec& r, const SystemParams& p, const HilbertConfig& h) {
    if (r.refined) return locate_stokes_resonance(r.n, p, h).delta;
    return resonance_detuning(r.n, r.regime, p);
}

std::vector<std::string> population_header(const std::vector<BasisLabel>& labels, bool physical) {
    std::vector<std::string> header{"t"};
    if (physical) header.emplace_back("t_s");
    for (const auto& l : labels) header.push_back(l.name());
    return header;
}

void write_histogram(RunContext& ctx, std::span<const TrajectoryResult> trajs, double gap,
                     const SystemParams& p) {
    const bool physical = p.omega_b_physical.has_value();
    std::vector<std::string> header{"gap", "size", "count", "fraction", "rate"};
    if (physical) header.emplace_back("rate_per_s");
    auto csv = ctx.open("histogram.csv", header);
    // The configured gap first, then the sensitivity set 2/κ, 5/κ, 10/κ.
    std::vector<double> gaps{gap};
    if (p.kappa > 0.0) {
        for (double f : {2.0, 5.0, 10.0}) {
            const double g = f / p.kappa;
            if (std::abs(g - gap) > 1e-12 * g) gaps.push_back(g);
        }
    }
    for (double g : gaps) {
        const auto stats = bundle_statistics(trajs, g);
        for (const auto& [size, count] : stats.counts) {
            csv << g << size << count << stats.fraction(size) << stats.rate(size);
            if (physical) csv << physical_rate(stats.rate(size), *p.omega_b_physical);
            csv.end_row();
        }
    }
}

std::vector<TrajectoryResult> simulate(const RunConfig& cfg, const SystemParams& p,
                                       const HilbertConfig& h, const InitialState& init,
                                       double duration, int count, std::uint64_t seed,
                                       std::span<const double> snapshots = {}) {
    const TrajectorySimulator sim(rotating_hamiltonian(p, h), jump_channels(p, h),
                                  trajectory_options(cfg));
    return run_ensemble(sim, initial_state(init, p, h), duration, static_cast<std::size_t>(count),
                        seed, snapshots, cfg.threads);
}

void record_leak(RunContext& ctx, std::span<const TrajectoryResult> trajs) {
    double leak = 0.0;
    for (const auto& t : trajs) leak = std::max(leak, t.leak_max);
    ctx.derived()["leak_max"] = leak;
}

void write_purity_row(CsvWriter& csv, const PurityEstimate& e, const SystemParams& p) {
    csv << e.n_target << e.window;
    for (double x : e.p_bar) csv << x;
    csv << e.purity << e.stderr_ << e.overflow_fraction() << e.windows_sampled << e.nonempty
        << (e.converged ? 1 : 0) << to_string(e.anchor);
    if (p.omega_b_physical) csv << physical_seconds(e.window, p);
    csv.end_row();
}

}  // namespace

CsvWriter RunContext::open(const std::string& name, const std::vector<std::string>& header) {
    files_.push_back(name);
    return CsvWriter(dir_ / name, header);
}

HilbertConfig default_hilbert(const RunConfig& cfg) {
    if (cfg.n_max) return HilbertConfig(*cfg.n_max);
    int order = 2;
    switch (cfg.experiment) {
        case Experiment::rabi: order = spec_as<RabiSpec>(cfg).n; break;
        case Experiment::scan: {
            const auto& o = spec_as<ScanSpec>(cfg).orders;
            order = *std::max_element(o.begin(), o.end());
            break;
        }
        case Experiment::map: order = spec_as<MapSpec>(cfg).order; break;
        case Experiment::trajectories: order = cfg.resonance ? cfg.resonance->n : 2; break;
        case Experiment::purity: order = spec_as<PuritySpec>(cfg).n_target; break;
        case Experiment::purity_map: order = spec_as<PurityMapSpec>(cfg).n_target; break;
    }
    return HilbertConfig::for_bundle_order(order);
}

SystemParams resolve_params(const RunConfig& cfg, const HilbertConfig& h) {
    SystemParams p = cfg.params;
    if (cfg.delta_given) return p;
    if (cfg.resonance) {
        p.delta = resonance_delta(*cfg.resonance, p, h);
    } else if (cfg.experiment == Experiment::rabi) {
        const auto& r = spec_as<RabiSpec>(cfg);
        p.delta = resonance_detuning(r.n, r.regime, p);
    } else if (cfg.experiment == Experiment::purity) {
        p.delta = locate_stokes_resonance(spec_as<PuritySpec>(cfg).n_target, p, h).delta;
    }
    return p;
}

StateVector initial_state(const InitialState& s, const SystemParams& p, const HilbertConfig& h) {
    require(s.n <= h.n_max(), ErrorKind::config_error, "initial Fock number exceeds n_max");
    switch (s.ket) {
        case BasisKet::v: return tensor_basis_state(h, s.n, QdState::v);
        case BasisKet::c: return tensor_basis_state(h, s.n, QdState::c);
        case BasisKet::plus:
        case BasisKet::minus: {
            const auto d = dressed_states(p.delta, p.omega_drive);
            const StateVector v = tensor_basis_state(h, s.n, QdState::v);
            const StateVector c = tensor_basis_state(h, s.n, QdState::c);
            if (s.ket == BasisKet::plus) return d.c_plus * v + d.c_minus * c;
            return d.c_minus * v - d.c_plus * c;
        }
    }
    return {};
}

void cmd_rabi(const RunConfig& cfg, RunContext& ctx) {
    const auto& spec = spec_as<RabiSpec>(cfg);
    const HilbertConfig h = default_hilbert(cfg);
    const SystemParams p = resolve_params(cfg, h);
    const RabiPrediction pred = effective_rabi(spec.n, spec.regime, p, &ctx.warnings());
    ctx.derived()["delta"] = p.delta;
    ctx.derived()["n_max"] = h.n_max();

    TimeGrid grid;
    if (spec.grid) {
        grid = *spec.grid;
    } else if (std::isfinite(pred.period())) {
        grid = TimeGrid{0.0, 3.0 * pred.period(), 4001};
    } else {
        grid = TimeGrid{0.0, 100.0, 1001};
    }
    const Frame frame = spec.frame.value_or(default_frame(spec.regime));
    const InitialState init = spec.initial.value_or(
        InitialState{0, frame == Frame::dressed ? BasisKet::plus : BasisKet::v});

    const QuantumOperator H = rotating_hamiltonian(p, h);
    const auto channels = jump_channels(p, h);
    const StateVector psi0 = initial_state(init, p, h);
    const std::vector<double> times = grid.times();
    PopulationTrace trace;
    if (channels.empty()) {
        SchrodingerOptions opt;
        opt.method = spec.method;
        opt.rtol = cfg.tolerances.rtol.value_or(opt.rtol);
        opt.atol = cfg.tolerances.atol.value_or(opt.atol);
        opt.leak_tol = cfg.tolerances.leak_tol;
        const auto states = evolve_schrodinger(H, psi0, grid, opt);
        trace = project_populations(times, states, frame, p, h);
    } else {
        MasterOptions opt;
        opt.rtol = cfg.tolerances.rtol.value_or(opt.rtol);
        opt.atol = cfg.tolerances.atol.value_or(opt.atol);
        opt.leak_tol = cfg.tolerances.leak_tol;
        const auto states = evolve_master(H, channels, pure_density(psi0), grid, opt);
        trace = project_populations(times, states, frame, p, h);
    }

    const bool physical = p.omega_b_physical.has_value();
    {
        auto csv = ctx.open("populations.csv", population_header(trace.labels, physical));
        for (std::size_t i = 0; i < times.size(); ++i) {
            csv << times[i];
            if (physical) csv << physical_seconds(times[i], p);
            for (Eigen::Index k = 0; k < trace.values.cols(); ++k) {
                csv << trace.values(static_cast<Eigen::Index>(i), k);
            }
            csv.end_row();
        }
    }

    const BasisKet upper = frame == Frame::dressed ? BasisKet::minus : BasisKet::c;
    const BasisLabel target{spec.n, upper, frame};
    std::optional<double> target_max;
    std::optional<double> period_fit;
    if (spec.n <= h.n_max()) {
        const Eigen::VectorXd series = trace.series(spec.n, upper);
        target_max = series.maxCoeff();
        try {
            const std::vector<double> values(series.data(), series.data() + series.size());
            period_fit = estimate_period(times, values).period;
        } catch (const Error&) {
            warn(&ctx.warnings(), "PeriodWarning", "no full oscillation of " + target.name() + " in the time grid");
        }
    }
    std::vector<std::string> header{"n", "regime", "delta_res", "delta", "omega_eff", "period",
                                    "target", "target_max", "period_fit"};
    if (physical) {
        header.emplace_back("period_s");
        header.emplace_back("period_fit_s");
    }
    auto csv = ctx.open("prediction.csv", header);
    csv << spec.n << to_string(spec.regime) << pred.delta_res << p.delta << pred.omega_eff
        << pred.period() << target.name() << target_max << period_fit;
    if (physical) {
        csv << physical_seconds(pred.period(), p);
        csv << (period_fit ? std::optional<double>(physical_seconds(*period_fit, p)) : std::nullopt);
    }
    csv.end_row();
}

void cmd_scan(const RunConfig& cfg, RunContext& ctx) {
    const auto& spec = spec_as<ScanSpec>(cfg);
    const HilbertConfig h = default_hilbert(cfg);
    ctx.derived()["n_max"] = h.n_max();
    const auto scan = detuning_scan(cfg.params, h, spec.deltas, spec.orders, scan_options(cfg));

    std::vector<std::string> header{"delta", "mean_occupation"};
    for (int n : spec.orders) header.push_back("g" + std::to_string(n));
    auto csv = ctx.open("scan.csv", header);
    auto err = ctx.open("errors.csv", {"delta", "error"});
    for (std::size_t i = 0; i < scan.axis_values.size(); ++i) {
        const auto& pt = scan.points[i];
        csv << scan.axis_values[i] << pt.mean_occupation;
        for (const auto& g : pt.g) csv << g;
        csv.end_row();
        if (pt.error) {
            err << scan.axis_values[i] << *pt.error;
            err.end_row();
        }
    }
}

void cmd_map(const RunConfig& cfg, RunContext& ctx) {
    const auto& spec = spec_as<MapSpec>(cfg);
    const HilbertConfig h = default_hilbert(cfg);
    ctx.derived()["n_max"] = h.n_max();
    const auto map = resonance_map(cfg.params, h, spec.axis, spec.axis_values, spec.deltas,
                                   scan_options(cfg), spec.order, spec.ridge_search);

    auto csv = ctx.open("map.csv", {"axis_value", "delta", "g2", "mean_occupation"});
    auto err = ctx.open("errors.csv", {"axis_value", "delta", "error"});
    for (std::size_t r = 0; r < map.rows.size(); ++r) {
        for (std::size_t c = 0; c < map.deltas.size(); ++c) {
            const auto& pt = map.rows[r].points[c];
            csv << map.axis_values[r] << map.deltas[c] << pt.g[0] << pt.mean_occupation;
            csv.end_row();
            if (pt.error) {
                err << map.axis_values[r] << map.deltas[c] << *pt.error;
                err.end_row();
            }
        }
    }
    auto ridge = ctx.open("ridge.csv", {"axis_value", "delta_analytic", "delta_ridge"});
    for (const auto& rp : map.ridge) {
        ridge << rp.axis_value << rp.delta_analytic << rp.delta_ridge;
        ridge.end_row();
    }
}

void cmd_trajectories(const RunConfig& cfg, RunContext& ctx) {
    const auto& spec = spec_as<TrajectoriesSpec>(cfg);
    const HilbertConfig h = default_hilbert(cfg);
    const SystemParams p = resolve_params(cfg, h);
    ctx.derived()["delta"] = p.delta;
    ctx.derived()["n_max"] = h.n_max();
    const double gap = spec.gap ? *spec.gap : 5.0 / p.kappa;
    require(std::isfinite(gap), ErrorKind::config_error, "trajectories.gap is required when kappa = 0");
    ctx.derived()["gap"] = gap;

    const auto trajs = simulate(cfg, p, h, spec.initial, spec.duration, spec.count, cfg.seed,
                                spec.snapshot_times);
    record_leak(ctx, trajs);
    const bool physical = p.omega_b_physical.has_value();

    std::vector<std::string> click_header{"trajectory", "t", "channel"};
    if (physical) click_header.emplace_back("t_s");
    auto clicks = ctx.open("clicks.csv", click_header);
    std::vector<std::string> bundle_header{"trajectory", "t_first", "size"};
    if (physical) bundle_header.emplace_back("t_first_s");
    auto bundles = ctx.open("bundles.csv", bundle_header);
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        for (const auto& c : trajs[i].clicks) {
            clicks << i << c.time << to_string(c.channel);
            if (physical) clicks << physical_seconds(c.time, p);
            clicks.end_row();
        }
        for (const auto& b : group_bundles(trajs[i].clicks, gap)) {
            bundles << i << b.t_first << b.size;
            if (physical) bundles << physical_seconds(b.t_first, p);
            bundles.end_row();
        }
    }
    write_histogram(ctx, trajs, gap, p);

    if (!spec.snapshot_times.empty()) {
        const auto labels = frame_labels(Frame::bare, h);
        const auto basis = frame_basis(Frame::bare, p, h);
        std::vector<std::string> header{"trajectory", "t"};
        for (const auto& l : labels) header.push_back(l.name());
        auto snaps = ctx.open("snapshots.csv", header);
        for (std::size_t i = 0; i < trajs.size(); ++i) {
            const auto rhos = snapshot_density(trajs[i], spec.snapshot_times);
            for (std::size_t k = 0; k < rhos.size(); ++k) {
                snaps << i << spec.snapshot_times[k];
                for (const auto& b : basis) snaps << (b.adjoint() * rhos[k] * b)(0, 0).real();
                snaps.end_row();
            }
        }
    }
}

bool cmd_purity(const RunConfig& cfg, RunContext& ctx) {
    const auto& spec = spec_as<PuritySpec>(cfg);
    const HilbertConfig h = default_hilbert(cfg);
    const SystemParams p = resolve_params(cfg, h);
    const double window = spec.window ? *spec.window : 5.0 / p.kappa;
    require(std::isfinite(window), ErrorKind::config_error, "purity.window is required when kappa = 0");
    ctx.derived()["delta"] = p.delta;
    ctx.derived()["n_max"] = h.n_max();
    ctx.derived()["window"] = window;

    const auto trajs = simulate(cfg, p, h, spec.initial, spec.duration, spec.count, cfg.seed);
    record_leak(ctx, trajs);

    PurityOptions opt;
    opt.anchor = spec.anchor;
    PurityEstimate est;
    bool converged = true;
    try {
        est = estimate_purity(trajs, spec.n_target, window, spec.n_windows,
                              trajectory_seed(cfg.seed, trajs.size()), opt);
    } catch (const InsufficientStatistics& e) {
        est = e.partial();
        converged = false;
        warn(&ctx.warnings(), "InsufficientStatistics", e.what());
    }

    std::vector<std::string> header{"n_target", "window"};
    for (int i = 1; i <= spec.n_target; ++i) header.push_back("P_" + std::to_string(i));
    for (const char* c : {"purity", "stderr", "overflow_fraction", "windows_sampled", "nonempty",
                          "converged", "anchor"}) {
        header.emplace_back(c);
    }
    if (p.omega_b_physical) header.emplace_back("window_s");
    auto csv = ctx.open("purity.csv", header);
    write_purity_row(csv, est, p);
    return converged;
}

void cmd_purity_map(const RunConfig& cfg, RunContext& ctx) {
    const auto& spec = spec_as<PurityMapSpec>(cfg);
    const HilbertConfig h = default_hilbert(cfg);
    ctx.derived()["n_max"] = h.n_max();
    auto csv = ctx.open("purity_map.csv", {"lambda", "kappa", "delta", "window", "purity", "stderr",
                                           "overflow_fraction", "converged"});
    auto err = ctx.open("errors.csv", {"lambda", "kappa", "error"});
    PurityOptions opt;
    opt.anchor = spec.anchor;
    std::uint64_t point = 0;
    for (double lambda : spec.lambda_grid) {
        for (double kappa : spec.kappa_grid) {
            const std::uint64_t seed = trajectory_seed(cfg.seed, point++);
            SystemParams p = cfg.params;
            p.lambda = lambda;
            p.kappa = kappa;
            const double window = spec.window_factor / kappa;
            try {
                p.delta = spec.refined ? locate_stokes_resonance(spec.n_target, p, h).delta
                                       : stokes_seed(spec.n_target, p);
                const auto trajs = simulate(cfg, p, h, InitialState{}, spec.duration, spec.count, seed);
                PurityEstimate est;
                try {
                    est = estimate_purity(trajs, spec.n_target, window, spec.n_windows,
                                          trajectory_seed(seed, trajs.size()), opt);
                } catch (const InsufficientStatistics& e) {
                    est = e.partial();
                    warn(&ctx.warnings(), "InsufficientStatistics",
                         "lambda=" + format_real(lambda) + " kappa=" + format_real(kappa) + ": " + e.what());
                }
                csv << lambda << kappa << p.delta << window << est.purity << est.stderr_
                    << est.overflow_fraction() << (est.converged ? 1 : 0);
                csv.end_row();
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::config_error) throw;
                csv << lambda << kappa << std::optional<double>{} << window << std::optional<double>{}
                    << std::optional<double>{} << std::optional<double>{} << 0;
                csv.end_row();
                err << lambda << kappa << e.what();
                err.end_row();
            }
        }
    }
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config_error:
        case ErrorKind::invalid_argument:
        case ErrorKind::index_error:
        case ErrorKind::degenerate_drive:
        case ErrorKind::no_resonance:
            return 1;
        case ErrorKind::insufficient_statistics:
            return 3;
        default:
            return 2;
    }
}

int execute(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        std::cerr << "{\"error\": \"config_error\", \"message\": \"cannot create output directory "
                  << cfg.output_dir.string() << "\"}\n";
        return 1;
    }
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    RunContext ctx(cfg.output_dir);
    ManifestData m;
    m.experiment = std::string(to_string(cfg.experiment));
    m.config = cfg.echo;
    try {
        switch (cfg.experiment) {
            case Experiment::rabi: cmd_rabi(cfg, ctx); break;
            case Experiment::scan: cmd_scan(cfg, ctx); break;
            case Experiment::map: cmd_map(cfg, ctx); break;
            case Experiment::trajectories: cmd_trajectories(cfg, ctx); break;
            case Experiment::purity:
                if (!cmd_purity(cfg, ctx) && spec_as<PuritySpec>(cfg).hard_fail) {
                    m.error = {ErrorKind::insufficient_statistics, "purity did not converge"};
                    m.exit_code = 3;
                }
                break;
            case Experiment::purity_map: cmd_purity_map(cfg, ctx); break;
        }
    } catch (const Error& e) {
        m.error = {e.kind(), e.what()};
        m.exit_code = exit_code(e.kind());
    }
    m.files = ctx.files();
    m.warnings = ctx.warnings();
    m.derived = ctx.derived();
    m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(cfg.output_dir, m);
    if (m.error) {
        std::cerr << nlohmann::json{{"error", std::string(to_string(m.error->first))},
                                    {"message", m.error->second}}
                         .dump()
                  << '\n';
    }
    return m.exit_code;
}

}  // namespace bundle::cli
