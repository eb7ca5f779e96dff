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


#include "bundle/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

namespace bundle::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::config_error, msg); }

void check_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path + " must be an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    check_object(j, path);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.contains(key)) fail("unknown key '" + key + "' in " + path);
    }
}

const json& at(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) fail("missing required key " + path + "." + key);
    return j.at(key);
}

double number(const json& j, const std::string& key, const std::string& path) {
    const auto& v = at(j, key, path);
    if (!v.is_number()) fail(path + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path + "." + key + " must be finite");
    return x;
}

double number_or(const json& j, const std::string& key, const std::string& path, double dflt) {
    return j.contains(key) ? number(j, key, path) : dflt;
}

std::optional<double> optional_number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return number(j, key, path);
}

long long integer(const json& j, const std::string& key, const std::string& path) {
    const auto& v = at(j, key, path);
    if (!v.is_number_integer()) fail(path + "." + key + " must be an integer");
    return v.get<long long>();
}

long long integer_or(const json& j, const std::string& key, const std::string& path, long long dflt) {
    return j.contains(key) ? integer(j, key, path) : dflt;
}

std::string text(const json& j, const std::string& key, const std::string& path) {
    const auto& v = at(j, key, path);
    if (!v.is_string()) fail(path + "." + key + " must be a string");
    return v.get<std::string>();
}

bool boolean_or(const json& j, const std::string& key, const std::string& path, bool dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_boolean()) fail(path + "." + key + " must be a boolean");
    return j.at(key).get<bool>();
}

/// A grid is either an explicit array or {"start", "stop", "count"} (inclusive).
std::vector<double> grid(const json& j, const std::string& path) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number() || !std::isfinite(v.get<double>())) fail(path + " entries must be finite numbers");
            out.push_back(v.get<double>());
        }
    } else {
        check_keys(j, path, {"start", "stop", "count"});
        const double a = number(j, "start", path);
        const double b = number(j, "stop", path);
        const auto n = integer(j, "count", path);
        if (n < 1) fail(path + ".count must be at least 1");
        if (n == 1) {
            if (a != b) fail(path + ": a one-point grid needs start == stop");
            out.push_back(a);
        } else {
            for (long long i = 0; i < n; ++i) {
                out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
            }
        }
    }
    if (out.empty()) fail(path + " must not be empty");
    return out;
}

template <class T>
T wrap(const std::string& path, auto&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::config_error) throw;
        fail(path + ": " + e.what());
    }
}

BasisKet ket_from_string(const std::string& s, const std::string& path) {
    if (s == "v") return BasisKet::v;
    if (s == "c") return BasisKet::c;
    if (s == "plus" || s == "+") return BasisKet::plus;
    if (s == "minus" || s == "-") return BasisKet::minus;
    fail(path + ": unknown ket '" + s + "' (expected v, c, plus, minus)");
}

InitialState parse_initial(const json& j, const std::string& path) {
    check_keys(j, path, {"n", "ket"});
    InitialState s;
    s.n = static_cast<int>(integer_or(j, "n", path, 0));
    if (s.n < 0) fail(path + ".n must be non-negative");
    if (j.contains("ket")) s.ket = ket_from_string(text(j, "ket", path), path);
    return s;
}

SystemParams parse_params(const json& j, bool& delta_given) {
    const std::string path = "params";
    check_keys(j, path,
               {"omega_b", "delta", "lambda", "omega_drive", "kappa", "gamma", "gamma_phi",
                "omega_b_physical"});
    SystemParams p;
    p.omega_b = number_or(j, "omega_b", path, 1.0);
    delta_given = j.contains("delta");
    p.delta = number_or(j, "delta", path, 0.0);
    p.lambda = number_or(j, "lambda", path, 0.0);
    p.omega_drive = number_or(j, "omega_drive", path, 0.0);
    p.kappa = number_or(j, "kappa", path, 0.0);
    p.gamma = number_or(j, "gamma", path, 0.0);
    p.gamma_phi = number_or(j, "gamma_phi", path, 0.0);
    p.omega_b_physical = optional_number(j, "omega_b_physical", path);
    if (p.omega_b != 1.0) fail("params.omega_b must be 1: all quantities are in units of the phonon frequency");
    if (p.omega_b_physical && *p.omega_b_physical <= 0.0) fail("params.omega_b_physical must be positive");
    wrap<int>(path, [&] { p.validate(); return 0; });
    return p;
}

Tolerances parse_tolerances(const json& j) {
    const std::string path = "tolerances";
    check_keys(j, path, {"rtol", "atol", "leak_tol", "residual_tol", "uniqueness_tol"});
    Tolerances t;
    if (j.contains("rtol")) t.rtol = number_or(j, "rtol", path, 0.0);
    if (j.contains("atol")) t.atol = number_or(j, "atol", path, 0.0);
    t.leak_tol = number_or(j, "leak_tol", path, t.leak_tol);
    t.residual_tol = number_or(j, "residual_tol", path, t.residual_tol);
    t.uniqueness_tol = number_or(j, "uniqueness_tol", path, t.uniqueness_tol);
    for (double x : {t.rtol.value_or(1.0), t.atol.value_or(1.0), t.leak_tol, t.residual_tol, t.uniqueness_tol}) {
        if (!(x > 0.0)) fail("tolerances must be positive");
    }
    return t;
}

RabiSpec parse_rabi(const json& j) {
    const std::string path = "rabi";
    check_keys(j, path, {"regime", "n", "grid", "frame", "initial", "method"});
    RabiSpec s;
    s.regime = wrap<Regime>(path, [&] { return regime_from_string(text(j, "regime", path)); });
    s.n = static_cast<int>(integer(j, "n", path));
    if (s.n < 1) fail("rabi.n must be at least 1");
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, "rabi.grid", {"t_start", "t_end", "n_points"});
        TimeGrid tg;
        tg.t_start = number_or(g, "t_start", "rabi.grid", 0.0);
        tg.t_end = number(g, "t_end", "rabi.grid");
        tg.n_points = static_cast<int>(integer_or(g, "n_points", "rabi.grid", 4001));
        wrap<int>("rabi.grid", [&] { tg.validate(); return 0; });
        s.grid = tg;
    }
    if (j.contains("frame")) s.frame = wrap<Frame>(path, [&] { return frame_from_string(text(j, "frame", path)); });
    if (j.contains("initial")) s.initial = parse_initial(j.at("initial"), "rabi.initial");
    if (j.contains("method")) {
        const auto m = text(j, "method", path);
        if (m == "spectral") s.method = SchrodingerMethod::spectral;
        else if (m == "runge_kutta") s.method = SchrodingerMethod::runge_kutta;
        else fail("rabi.method must be spectral or runge_kutta");
    }
    return s;
}

std::vector<int> parse_orders(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path + " must be a non-empty array");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<int>() < 1) fail(path + " entries must be positive integers");
        out.push_back(v.get<int>());
    }
    return out;
}

ScanSpec parse_scan(const json& j) {
    check_keys(j, "scan", {"deltas", "orders"});
    ScanSpec s;
    s.deltas = grid(at(j, "deltas", "scan"), "scan.deltas");
    if (j.contains("orders")) s.orders = parse_orders(j.at("orders"), "scan.orders");
    return s;
}

MapSpec parse_map(const json& j) {
    const std::string path = "map";
    check_keys(j, path, {"axis", "axis_values", "deltas", "order", "ridge_search"});
    MapSpec s;
    s.axis = wrap<ScanAxis>(path, [&] { return scan_axis_from_string(text(j, "axis", path)); });
    if (s.axis == ScanAxis::delta) fail("map.axis must be lambda or omega_drive");
    s.axis_values = grid(at(j, "axis_values", path), "map.axis_values");
    s.deltas = grid(at(j, "deltas", path), "map.deltas");
    s.order = static_cast<int>(integer_or(j, "order", path, 2));
    if (s.order < 1) fail("map.order must be at least 1");
    s.ridge_search = number_or(j, "ridge_search", path, 0.25);
    if (!(s.ridge_search > 0.0)) fail("map.ridge_search must be positive");
    return s;
}

WindowAnchor parse_anchor(const json& j, const std::string& path) {
    if (!j.contains("anchor")) return WindowAnchor::uniform;
    return wrap<WindowAnchor>(path, [&] { return window_anchor_from_string(text(j, "anchor", path)); });
}

TrajectoriesSpec parse_trajectories(const json& j) {
    const std::string path = "trajectories";
    check_keys(j, path, {"duration", "count", "gap", "snapshot_times", "initial"});
    TrajectoriesSpec s;
    s.duration = number(j, "duration", path);
    if (!(s.duration > 0.0)) fail("trajectories.duration must be positive");
    s.count = static_cast<int>(integer_or(j, "count", path, 25));
    if (s.count < 1) fail("trajectories.count must be at least 1");
    s.gap = optional_number(j, "gap", path);
    if (s.gap && !(*s.gap > 0.0)) fail("trajectories.gap must be positive");
    if (j.contains("snapshot_times")) {
        s.snapshot_times = grid(j.at("snapshot_times"), "trajectories.snapshot_times");
        if (!std::is_sorted(s.snapshot_times.begin(), s.snapshot_times.end()) ||
            s.snapshot_times.front() < 0.0 || s.snapshot_times.back() > s.duration) {
            fail("trajectories.snapshot_times must be sorted and inside [0, duration]");
        }
    }
    if (j.contains("initial")) s.initial = parse_initial(j.at("initial"), "trajectories.initial");
    return s;
}

PuritySpec parse_purity(const json& j) {
    const std::string path = "purity";
    check_keys(j, path,
               {"n_target", "window", "n_windows", "duration", "count", "anchor", "hard_fail", "initial"});
    PuritySpec s;
    s.n_target = static_cast<int>(integer_or(j, "n_target", path, 2));
    if (s.n_target < 1) fail("purity.n_target must be at least 1");
    s.window = optional_number(j, "window", path);
    if (s.window && !(*s.window > 0.0)) fail("purity.window must be positive");
    const auto nw = integer_or(j, "n_windows", path, 1'000'000);
    if (nw < 1) fail("purity.n_windows must be positive");
    s.n_windows = static_cast<std::size_t>(nw);
    s.duration = number(j, "duration", path);
    if (!(s.duration > 0.0)) fail("purity.duration must be positive");
    s.count = static_cast<int>(integer_or(j, "count", path, 25));
    if (s.count < 1) fail("purity.count must be at least 1");
    s.anchor = parse_anchor(j, path);
    s.hard_fail = boolean_or(j, "hard_fail", path, false);
    if (j.contains("initial")) s.initial = parse_initial(j.at("initial"), "purity.initial");
    return s;
}

PurityMapSpec parse_purity_map(const json& j) {
    const std::string path = "purity_map";
    check_keys(j, path,
               {"lambda_grid", "kappa_grid", "n_target", "window_factor", "n_windows", "duration",
                "count", "anchor", "resonance_mode"});
    PurityMapSpec s;
    s.lambda_grid = grid(at(j, "lambda_grid", path), "purity_map.lambda_grid");
    s.kappa_grid = grid(at(j, "kappa_grid", path), "purity_map.kappa_grid");
    for (double k : s.kappa_grid) {
        if (!(k > 0.0)) fail("purity_map.kappa_grid entries must be positive");
    }
    for (double l : s.lambda_grid) {
        if (l < 0.0) fail("purity_map.lambda_grid entries must be non-negative");
    }
    s.n_target = static_cast<int>(integer_or(j, "n_target", path, 2));
    if (s.n_target < 1) fail("purity_map.n_target must be at least 1");
    s.window_factor = number_or(j, "window_factor", path, 5.0);
    if (!(s.window_factor > 0.0)) fail("purity_map.window_factor must be positive");
    const auto nw = integer_or(j, "n_windows", path, 1'000'000);
    if (nw < 1) fail("purity_map.n_windows must be positive");
    s.n_windows = static_cast<std::size_t>(nw);
    s.duration = number(j, "duration", path);
    if (!(s.duration > 0.0)) fail("purity_map.duration must be positive");
    s.count = static_cast<int>(integer_or(j, "count", path, 25));
    if (s.count < 1) fail("purity_map.count must be at least 1");
    s.anchor = parse_anchor(j, path);
    if (j.contains("resonance_mode")) {
        const auto m = text(j, "resonance_mode", path);
        if (m == "refined") s.refined = true;
        else if (m == "analytic") s.refined = false;
        else fail("purity_map.resonance_mode must be refined or analytic");
    }
    return s;
}

ResonanceSpec parse_resonance(const json& j) {
    const std::string path = "resonance";
    check_keys(j, path, {"n", "regime", "mode"});
    ResonanceSpec r;
    r.n = static_cast<int>(integer(j, "n", path));
    if (r.n < 1) fail("resonance.n must be at least 1");
    if (j.contains("regime")) r.regime = wrap<Regime>(path, [&] { return regime_from_string(text(j, "regime", path)); });
    if (j.contains("mode")) {
        const auto m = text(j, "mode", path);
        if (m == "refined") r.refined = true;
        else if (m == "analytic") r.refined = false;
        else fail("resonance.mode must be refined or analytic");
    }
    return r;
}

const char* section_key(Experiment e) {
    switch (e) {
        case Experiment::rabi: return "rabi";
        case Experiment::scan: return "scan";
        case Experiment::map: return "map";
        case Experiment::trajectories: return "trajectories";
        case Experiment::purity: return "purity";
        case Experiment::purity_map: return "purity_map";
    }
    return "";
}

}  // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::rabi: return "rabi";
        case Experiment::scan: return "scan";
        case Experiment::map: return "map";
        case Experiment::trajectories: return "trajectories";
        case Experiment::purity: return "purity";
        case Experiment::purity_map: return "purity-map";
    }
    return "?";
}

Experiment experiment_from_string(std::string_view s) {
    for (auto e : {Experiment::rabi, Experiment::scan, Experiment::map, Experiment::trajectories,
                   Experiment::purity, Experiment::purity_map}) {
        if (s == to_string(e)) return e;
    }
    if (s == "purity_map") return Experiment::purity_map;
    fail("unknown experiment '" + std::string(s) + "'");
}

RunConfig parse_config(const json& input) {
    check_object(input, "config");
    // Result manifests carry the validated config verbatim.
    if (input.contains("manifest_version")) {
        if (!input.contains("config")) fail("manifest has no config section");
        return parse_config(input.at("config"));
    }
    const json& j = input;
    check_keys(j, "config",
               {"experiment", "params", "resonance", "hilbert", "seed", "output_dir", "threads",
                "tolerances", "rabi", "scan", "map", "trajectories", "purity", "purity_map"});

    RunConfig cfg;
    cfg.experiment = experiment_from_string(text(j, "experiment", "config"));
    cfg.params = parse_params(j.value("params", json::object()), cfg.delta_given);
    if (j.contains("resonance")) cfg.resonance = parse_resonance(j.at("resonance"));
    if (cfg.resonance && cfg.delta_given) fail("give either params.delta or a resonance block, not both");
    if (j.contains("hilbert")) {
        const auto& hj = j.at("hilbert");
        check_keys(hj, "hilbert", {"n_max"});
        if (hj.contains("n_max")) {
            const auto n = integer(hj, "n_max", "hilbert");
            if (n < 1 || n > 200) fail("hilbert.n_max must lie in [1, 200]");
            cfg.n_max = static_cast<int>(n);
        }
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail("seed must be a non-negative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output_dir")) cfg.output_dir = text(j, "output_dir", "config");
    cfg.threads = static_cast<int>(integer_or(j, "threads", "config", 0));
    if (cfg.threads < 0) fail("threads must be non-negative");
    if (j.contains("tolerances")) cfg.tolerances = parse_tolerances(j.at("tolerances"));

    for (auto e : {Experiment::rabi, Experiment::scan, Experiment::map, Experiment::trajectories,
                   Experiment::purity, Experiment::purity_map}) {
        if (e != cfg.experiment && j.contains(section_key(e))) {
            fail(std::string("section '") + section_key(e) + "' does not belong to experiment '" +
                 std::string(to_string(cfg.experiment)) + "'");
        }
    }
    const char* key = section_key(cfg.experiment);
    const json section = at(j, key, "config");
    switch (cfg.experiment) {
        case Experiment::rabi: cfg.spec = parse_rabi(section); break;
        case Experiment::scan: cfg.spec = parse_scan(section); break;
        case Experiment::map: cfg.spec = parse_map(section); break;
        case Experiment::trajectories: cfg.spec = parse_trajectories(section); break;
        case Experiment::purity: cfg.spec = parse_purity(section); break;
        case Experiment::purity_map: cfg.spec = parse_purity_map(section); break;
    }
    if (cfg.experiment == Experiment::trajectories && !cfg.delta_given && !cfg.resonance) {
        fail("trajectories needs params.delta or a resonance block");
    }
    if ((cfg.experiment == Experiment::purity_map) && cfg.resonance) {
        fail("purity_map derives the resonance per point; remove the resonance block");
    }
    cfg.echo = j;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail("malformed config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<std::filesystem::path> output_dir) {
    if (seed) {
        cfg.seed = *seed;
        cfg.echo["seed"] = *seed;
    }
    if (output_dir) {
        cfg.output_dir = *output_dir;
        cfg.echo["output_dir"] = output_dir->string();
    }
}

}  // namespace bundle::cli
