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


#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bundle/cli/commands.hpp"

using namespace bundle;
using namespace bundle::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "bundle_sim_tests" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

int run(json doc, const fs::path& dir) {
    doc["output_dir"] = dir.string();
    return execute(parse_config(doc));
}

json scan_doc() {
    return json::parse(R"({
      "experiment": "scan",
      "params": {"lambda": 0.03, "omega_drive": 0.003, "kappa": 0.002, "gamma": 0.0002, "gamma_phi": 0.0004},
      "hilbert": {"n_max": 8},
      "scan": {"deltas": [-2.0], "orders": [2, 3]}
    })");
}

json trajectories_doc() {
    return json::parse(R"({
      "experiment": "trajectories",
      "params": {"delta": -1.0, "lambda": 0.2, "omega_drive": 0.1, "kappa": 0.05, "gamma": 0.03},
      "hilbert": {"n_max": 12},
      "seed": 99,
      "trajectories": {"duration": 200, "count": 4, "snapshot_times": [0, 100]}
    })");
}

ErrorKind parse_error_kind(const json& doc) {
    try {
        parse_config(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::invalid_argument;
}

}  // namespace

TEST(Config, unknown_keys_rejected_at_every_level) {
    json top = scan_doc();
    top["colour"] = "blue";
    EXPECT_EQ(parse_error_kind(top), ErrorKind::config_error);
    json params = scan_doc();
    params["params"]["lamda"] = 0.1;
    EXPECT_EQ(parse_error_kind(params), ErrorKind::config_error);
    json section = scan_doc();
    section["scan"]["step"] = 0.1;
    EXPECT_EQ(parse_error_kind(section), ErrorKind::config_error);
    json foreign = scan_doc();
    foreign["rabi"] = json::object();
    EXPECT_EQ(parse_error_kind(foreign), ErrorKind::config_error);
}

TEST(Config, validation) {
    json missing = scan_doc();
    missing.erase("scan");
    EXPECT_EQ(parse_error_kind(missing), ErrorKind::config_error);
    json negative = scan_doc();
    negative["params"]["kappa"] = -1.0;
    EXPECT_THROW(parse_config(negative), Error);
    json both = scan_doc();
    both["experiment"] = "rabi";
    both.erase("scan");
    both["rabi"] = {{"regime", "perturbative"}, {"n", 2}};
    both["params"]["delta"] = -2.0;
    both["resonance"] = {{"n", 2}};
    EXPECT_EQ(parse_error_kind(both), ErrorKind::config_error);
    json no_delta = trajectories_doc();
    no_delta["params"].erase("delta");
    EXPECT_EQ(parse_error_kind(no_delta), ErrorKind::config_error);
    EXPECT_EQ(experiment_from_string("purity_map"), Experiment::purity_map);
    EXPECT_EQ(experiment_from_string("purity-map"), Experiment::purity_map);
}

TEST(Config, grid_forms_are_equivalent) {
    json a = scan_doc();
    a["scan"]["deltas"] = {-2.0, -1.5, -1.0};
    json b = scan_doc();
    b["scan"]["deltas"] = {{"start", -2.0}, {"stop", -1.0}, {"count", 3}};
    const RunConfig ca = parse_config(a);
    const RunConfig cb = parse_config(b);
    EXPECT_EQ(std::get<ScanSpec>(ca.spec).deltas, std::get<ScanSpec>(cb.spec).deltas);
}

TEST(Scan, one_point_grid_gives_single_row) {
    const fs::path dir = scratch("one_point");
    ASSERT_EQ(run(scan_doc(), dir), 0);
    EXPECT_EQ(first_line(dir / "scan.csv"), "delta,mean_occupation,g2,g3");
    EXPECT_EQ(line_count(dir / "scan.csv"), 2u);
    EXPECT_EQ(first_line(dir / "errors.csv"), "delta,error");
    EXPECT_EQ(line_count(dir / "errors.csv"), 1u);
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Scan, undefined_points_are_empty_fields) {
    const fs::path dir = scratch("undefined");
    json doc = scan_doc();
    doc["params"]["omega_drive"] = 0.0;
    ASSERT_EQ(run(doc, dir), 0);
    std::ifstream in(dir / "scan.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(row.substr(row.find(',')), ",0,,");
    EXPECT_EQ(line_count(dir / "errors.csv"), 2u);
}

TEST(Manifest, replay_is_bit_identical) {
    const fs::path a = scratch("replay_a");
    const fs::path b = scratch("replay_b");
    ASSERT_EQ(run(trajectories_doc(), a), 0);
    const json manifest = json::parse(slurp(a / "manifest.json"));
    EXPECT_EQ(manifest.at("manifest_version"), 1);
    EXPECT_EQ(manifest.at("exit_code"), 0);
    RunConfig cfg = parse_config(manifest);
    apply_overrides(cfg, std::nullopt, b);
    ASSERT_EQ(execute(cfg), 0);
    for (const auto& f : manifest.at("files")) {
        const std::string name = f.at("name");
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
        EXPECT_EQ(f.at("sha256"), sha256_file(b / name));
    }
}

TEST(Trajectories, golden_headers) {
    const fs::path dir = scratch("traj_headers");
    ASSERT_EQ(run(trajectories_doc(), dir), 0);
    EXPECT_EQ(first_line(dir / "clicks.csv"), "trajectory,t,channel");
    EXPECT_EQ(first_line(dir / "bundles.csv"), "trajectory,t_first,size");
    EXPECT_EQ(first_line(dir / "histogram.csv"), "gap,size,count,fraction,rate");
    EXPECT_TRUE(fs::exists(dir / "snapshots.csv"));
}

TEST(Trajectories, tiny_run_has_empty_bundle_table) {
    const fs::path dir = scratch("tiny");
    json doc = trajectories_doc();
    doc["trajectories"] = {{"duration", 1e-3}, {"count", 1}};
    doc["params"]["kappa"] = 1e-6;
    ASSERT_EQ(run(doc, dir), 0);
    EXPECT_EQ(line_count(dir / "bundles.csv"), 1u);
}

TEST(Rabi, trivial_single_phonon_case) {
    const fs::path dir = scratch("trivial_rabi");
    const json doc = json::parse(R"({
      "experiment": "rabi",
      "params": {"delta": -1.0, "lambda": 0.0, "omega_drive": 0.003},
      "hilbert": {"n_max": 3},
      "rabi": {"regime": "perturbative", "n": 1, "grid": {"t_start": 0, "t_end": 100, "n_points": 11}}
    })");
    ASSERT_EQ(run(doc, dir), 0);
    std::ifstream in(dir / "prediction.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header.substr(0, header.find(",period")), "n,regime,delta_res,delta,omega_eff");
    std::stringstream ss(row);
    std::vector<std::string> fields;
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    ASSERT_GE(fields.size(), 5u);
    EXPECT_EQ(std::stod(fields[4]), 0.0);
    EXPECT_EQ(line_count(dir / "populations.csv"), 12u);
}

TEST(ExitCodes, mapping) {
    EXPECT_EQ(exit_code(ErrorKind::config_error), 1);
    EXPECT_EQ(exit_code(ErrorKind::invalid_argument), 1);
    EXPECT_EQ(exit_code(ErrorKind::insufficient_statistics), 3);
    EXPECT_EQ(exit_code(ErrorKind::truncation_leak), 2);
    EXPECT_EQ(exit_code(ErrorKind::no_unique_steady_state), 2);
}

TEST(ExitCodes, runtime_failure_still_writes_manifest) {
    const fs::path dir = scratch("leak");
    const json doc = json::parse(R"({
      "experiment": "rabi",
      "params": {"delta": -1.0, "lambda": 0.9, "omega_drive": 0.5},
      "hilbert": {"n_max": 3},
      "rabi": {"regime": "perturbative", "n": 1, "grid": {"t_start": 0, "t_end": 200, "n_points": 101}}
    })");
    EXPECT_EQ(run(doc, dir), 2);
    const json manifest = json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest.at("exit_code"), 2);
    EXPECT_EQ(manifest.at("error").at("kind"), "TruncationLeak");
}
