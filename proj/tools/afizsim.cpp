// Copyright 2026 The AFIZ Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "afiz/config.hpp"
#include "afiz/ensemble.hpp"
#include "afiz/io.hpp"
#include "afiz/trajectory.hpp"
#include "afiz/validation.hpp"

namespace {

using nlohmann::json;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kIntegration = 3, kIo = 4, kValidation = 5 };

void report_error(const std::string &kind, const std::string &message, const json &extra = json::object()) {
    json j = {{"error", kind}, {"message", message}};
    j.update(extra);
    std::cerr << j.dump() << std::endl;
}

struct CommonOptions {
    std::string config_path;
    std::string preset = "default";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trajectories;
    std::string mode;
    std::string out;
    bool record_full = false;
    std::optional<unsigned> threads;
    std::vector<std::string> overrides;
};

void add_common(CLI::App *cmd, CommonOptions &o) {
    cmd->add_option("--config", o.config_path, "key=value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--preset", o.preset, "built-in scenario: default, fig2, fig3, fig4, fig5a-2, fig5a-3");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--trajectories", o.trajectories, "number of trajectories");
    cmd->add_option("--mode", o.mode, "controller mode");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_flag("--record-full", o.record_full, "record every integration step");
    cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
    cmd->add_option("--set", o.overrides, "extra key=value setting, may repeat");
}

afiz::RunConfig build_config(const CommonOptions &o) {
    afiz::RunConfig cfg = afiz::preset(o.preset);
    if (!o.config_path.empty()) {
        cfg = afiz::load_config_file(o.config_path, cfg);
    }
    std::string sets;
    for (const std::string &kv : o.overrides) {
        sets += kv + "\n";
    }
    afiz::apply_config_text(cfg, sets);
    if (o.seed) {
        cfg.base_seed = *o.seed;
    }
    if (o.trajectories) {
        cfg.n_trajectories = *o.trajectories;
    }
    if (!o.mode.empty()) {
        cfg.controller.mode = afiz::parse_mode(o.mode);
    }
    if (!o.out.empty()) {
        cfg.output_path = o.out;
    }
    if (o.record_full) {
        cfg.record_stride = 1;
    }
    if (o.threads) {
        cfg.threads = *o.threads;
    }
    cfg.validate();
    return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_run(const afiz::RunConfig &cfg, std::uint64_t index) {
    auto start = std::chrono::steady_clock::now();
    afiz::TrajectoryResult r = afiz::run_trajectory(cfg, index);
    auto paths = afiz::write_trajectory(cfg.output_path, cfg, r);
    json j = {{"command", "run"},
              {"index", index},
              {"steps", r.steps},
              {"end_time", r.end_time},
              {"final_fidelity", r.final_fidelity()},
              {"final_phase", afiz::phase_name(r.final_phase)},
              {"verdicts", r.verdicts.size()},
              {"samples", paths.samples.string()},
              {"seconds", seconds_since(start)}};
    std::cout << j.dump() << std::endl;
    return kOk;
}

int cmd_ensemble(const afiz::RunConfig &cfg) {
    auto start = std::chrono::steady_clock::now();
    afiz::EnsembleOptions opt;
    opt.consumer = [&](const afiz::TrajectoryResult &r) {
        if (r.index < cfg.trajectory_files) {
            afiz::write_trajectory(cfg.output_path, cfg, r);
        }
    };
    afiz::EnsembleResult e = afiz::run_ensemble(cfg, opt);
    auto path = afiz::write_ensemble(cfg.output_path, cfg, e);
    json levels = json::object();
    for (auto [level, c] : e.first_verdict_counts) {
        levels[afiz::format_double(level)] = c;
    }
    json j = {{"command", "ensemble"},
              {"trajectories", e.n_trajectories},
              {"time_averaged_fidelity", e.time_averaged_fidelity()},
              {"final_mean_fidelity", e.mean_fidelity.empty() ? 0.0 : e.mean_fidelity.back()},
              {"first_verdicts", levels},
              {"failed", e.failures.size()},
              {"ensemble", path.string()},
              {"seconds", seconds_since(start)}};
    std::cout << j.dump() << std::endl;
    if (!e.ok()) {
        json failed = json::array();
        for (const auto &f : e.failures) {
            failed.push_back({{"index", f.index}, {"message", f.message}});
        }
        report_error("integration", "some trajectories failed", {{"failed", failed}});
        return kIntegration;
    }
    return kOk;
}

int cmd_reference(const afiz::RunConfig &cfg) {
    auto start = std::chrono::steady_clock::now();
    afiz::ReferenceSeries r = afiz::lindblad_reference(cfg);
    auto path = afiz::write_reference(cfg.output_path, cfg, r);
    json j = {{"command", "reference"},
              {"final_fidelity", r.fidelity.back()},
              {"reference", path.string()},
              {"seconds", seconds_since(start)}};
    std::cout << j.dump() << std::endl;
    return kOk;
}

int cmd_validate(const afiz::RunConfig &cfg) {
    auto checks = afiz::run_invariant_suite(cfg);
    bool all = true;
    for (const auto &c : checks) {
        std::printf("%s %-24s %6.2fs  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.seconds, c.detail.c_str());
        all = all && c.passed;
    }
    if (!all) {
        report_error("validation", "invariant suite failed");
        return kValidation;
    }
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Closed-loop quantum trajectory simulator for three-qubit pre-GHZ generation and AFIZ stabilization"};
    app.require_subcommand(1);

    CommonOptions run_o, ens_o, ref_o, val_o;
    std::uint64_t index = 0;
    CLI::App *run = app.add_subcommand("run", "simulate one trajectory");
    add_common(run, run_o);
    run->add_option("--index", index, "trajectory index (noise stream)");
    CLI::App *ens = app.add_subcommand("ensemble", "simulate many trajectories and average");
    add_common(ens, ens_o);
    CLI::App *ref = app.add_subcommand("reference", "integrate the deterministic ensemble-mean equation");
    add_common(ref, ref_o);
    CLI::App *val = app.add_subcommand("validate", "run the invariant suite");
    add_common(val, val_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        report_error("usage", e.what());
        return kConfig;
    }

    try {
        if (*run) {
            return cmd_run(build_config(run_o), index);
        }
        if (*ens) {
            return cmd_ensemble(build_config(ens_o));
        }
        if (*ref) {
            return cmd_reference(build_config(ref_o));
        }
        if (*val) {
            return cmd_validate(build_config(val_o));
        }
    } catch (const afiz::ConfigError &e) {
        report_error("config", e.what());
        return kConfig;
    } catch (const afiz::TrajectoryError &e) {
        report_error("integration", e.what(), {{"index", e.index()}});
        return kIntegration;
    } catch (const afiz::FormatError &e) {
        report_error("io", e.what());
        return kIo;
    } catch (const std::filesystem::filesystem_error &e) {
        report_error("io", e.what());
        return kIo;
    } catch (const std::exception &e) {
        report_error("internal", e.what());
        return kFailure;
    }
    return kFailure;
}
