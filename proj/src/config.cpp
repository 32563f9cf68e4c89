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

#include "afiz/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace afiz {

const char *indicator_name(Indicator i) {
    return i == Indicator::kFilteredCurrent ? "filtered" : "expectation";
}

Indicator parse_indicator(const std::string &name) {
    if (name == "filtered") {
        return Indicator::kFilteredCurrent;
    }
    if (name == "expectation") {
        return Indicator::kExpectation;
    }
    throw ConfigError("unknown indicator '" + name + "' (expected filtered or expectation)");
}

const char *initial_state_name(InitialState s) {
    switch (s) {
        case InitialState::kPlusPlusPlus:
            return "plus";
        case InitialState::kPreGhz:
            return "pre_ghz";
        case InitialState::kGhz:
            return "ghz";
    }
    return "?";
}

InitialState parse_initial_state(const std::string &name) {
    for (InitialState s : {InitialState::kPlusPlusPlus, InitialState::kPreGhz, InitialState::kGhz}) {
        if (name == initial_state_name(s)) {
            return s;
        }
    }
    throw ConfigError("unknown initial state '" + name + "'");
}

DensityMatrix initial_density(InitialState s) {
    const TargetStates &ts = target_states();
    switch (s) {
        case InitialState::kPlusPlusPlus:
            return DensityMatrix::from_pure(ts.plus_plus_plus);
        case InitialState::kPreGhz:
            return DensityMatrix::from_pure(ts.pre_ghz);
        case InitialState::kGhz:
            return DensityMatrix::from_pure(ts.ghz);
    }
    return DensityMatrix::from_pure(ts.plus_plus_plus);
}

void RunConfig::validate() const {
    model.validate();
    if (n_trajectories < 1) {
        throw ConfigError("run.trajectories must be at least 1");
    }
    if (!(duration > 0)) {
        throw ConfigError("run.duration must be positive");
    }
    if (record_stride < 1) {
        throw ConfigError("run.record_stride must be at least 1");
    }
    if (!(dt > 0) || dt > max_dt) {
        throw ConfigError("run.dt must lie in (0, run.max_dt]");
    }
    if (!(filter.rate > 0)) {
        throw ConfigError("filter.rate must be positive");
    }
    if (!(filter.discriminator.band > 0) || !(filter.discriminator.dwell >= 0)) {
        throw ConfigError("filter.band must be positive and filter.dwell non-negative");
    }
    if (!(controller.tau > 0)) {
        throw ConfigError("controller.tau must be positive");
    }
    if (!(reference_dt_divisor >= 1)) {
        throw ConfigError("run.reference_dt_divisor must be at least 1");
    }
    std::vector<double> levels = jz_levels(model.jz_weights);
    for (std::size_t i = 1; i < levels.size(); i++) {
        if (2 * filter.discriminator.band >= levels[i] - levels[i - 1]) {
            throw ConfigError("filter.band must be below half the J_z level spacing");
        }
    }
    bool feedback = mode_generates(controller.mode) || controller.mode == ControllerMode::kAfiz;
    if (feedback) {
        const QubitArray &w = model.jz_weights;
        if (!(w[0] == 1 && w[1] == 1 && w[2] == 2)) {
            throw ConfigError("controller mode " + std::string(mode_name(controller.mode)) +
                              " requires model.jz_weights = 1,1,2");
        }
    }
    if (mode_measures(controller.mode) && !model.has_measurement()) {
        throw ConfigError("controller mode " + std::string(mode_name(controller.mode)) + " requires model.gamma_d > 0");
    }
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string &s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string &key, const std::string &v) {
    double out = 0;
    std::string t = trim(v);
    auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string &key, const std::string &v) {
    std::uint64_t out = 0;
    std::string t = trim(v);
    auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

bool parse_bool(const std::string &key, const std::string &v) {
    std::string t = trim(v);
    if (t == "true" || t == "1") {
        return true;
    }
    if (t == "false" || t == "0") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

QubitArray parse_triple(const std::string &key, const std::string &v) {
    QubitArray out{};
    std::stringstream ss(v);
    std::string item;
    std::size_t n = 0;
    while (std::getline(ss, item, ',')) {
        if (n == kNumQubits) {
            throw ConfigError(key + ": expected three comma-separated values");
        }
        out[n++] = parse_double(key, item);
    }
    if (n == 1) {
        out = {out[0], out[0], out[0]};
    } else if (n != kNumQubits) {
        throw ConfigError(key + ": expected one or three comma-separated values");
    }
    return out;
}

std::string format_triple(const QubitArray &a) {
    return format_double(a[0]) + "," + format_double(a[1]) + "," + format_double(a[2]);
}

using Setter = std::function<void(RunConfig &, const std::string &, const std::string &)>;

void set_physical(RunConfig &c, const std::function<void(PhysicalParams &)> &f) {
    if (!c.physical) {
        c.physical = PhysicalParams{};
    }
    f(*c.physical);
}

bool is_physical_key(const std::string &key) {
    return key.rfind("physical.", 0) == 0;
}

void rebuild_from_physical(RunConfig &c) {
    c.model = ModelConfig::from_physical(*c.physical);
}

const std::map<std::string, Setter> &setters() {
    static const std::map<std::string, Setter> table = {
        {"model.gamma_d", [](RunConfig &c, const std::string &k, const std::string &v) { c.model.gamma_d = parse_double(k, v); }},
        {"model.eta", [](RunConfig &c, const std::string &k, const std::string &v) { c.model.eta = parse_double(k, v); }},
        {"model.gamma", [](RunConfig &c, const std::string &k, const std::string &v) { c.model.decay = parse_triple(k, v); }},
        {"model.dephasing", [](RunConfig &c, const std::string &k, const std::string &v) { c.model.dephasing = parse_triple(k, v); }},
        {"model.jz_weights", [](RunConfig &c, const std::string &k, const std::string &v) { c.model.jz_weights = parse_triple(k, v); }},
        {"model.z_rotation", [](RunConfig &c, const std::string &k, const std::string &v) { c.model.z_rotation = parse_triple(k, v); }},
        {"model.absorb_z_rotations", [](RunConfig &c, const std::string &k, const std::string &v) { c.model.absorb_z_rotations = parse_bool(k, v); }},
        {"physical.coupling", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.coupling = parse_triple(k, v); }); }},
        {"physical.detuning", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.detuning = parse_triple(k, v); }); }},
        {"physical.kappa", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.cavity_decay = parse_double(k, v); }); }},
        {"physical.drive", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.drive = parse_double(k, v); }); }},
        {"physical.relaxation", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.relaxation = parse_triple(k, v); }); }},
        {"physical.dephasing", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.dephasing = parse_triple(k, v); }); }},
        {"physical.qubit_detuning", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.qubit_detuning = parse_triple(k, v); }); }},
        {"physical.eta", [](RunConfig &c, const std::string &k, const std::string &v) { set_physical(c, [&](PhysicalParams &p) { p.efficiency = parse_double(k, v); }); }},
        {"filter.rate", [](RunConfig &c, const std::string &k, const std::string &v) { c.filter.rate = parse_double(k, v); }},
        {"filter.band", [](RunConfig &c, const std::string &k, const std::string &v) { c.filter.discriminator.band = parse_double(k, v); }},
        {"filter.dwell", [](RunConfig &c, const std::string &k, const std::string &v) { c.filter.discriminator.dwell = parse_double(k, v); }},
        {"filter.indicator", [](RunConfig &c, const std::string &, const std::string &v) { c.filter.indicator = parse_indicator(trim(v)); }},
        {"controller.mode", [](RunConfig &c, const std::string &, const std::string &v) { c.controller.mode = parse_mode(trim(v)); }},
        {"controller.tau", [](RunConfig &c, const std::string &k, const std::string &v) { c.controller.tau = parse_double(k, v); }},
        {"run.initial_state", [](RunConfig &c, const std::string &, const std::string &v) { c.initial = parse_initial_state(trim(v)); }},
        {"run.duration", [](RunConfig &c, const std::string &k, const std::string &v) { c.duration = parse_double(k, v); }},
        {"run.dt", [](RunConfig &c, const std::string &k, const std::string &v) { c.dt = parse_double(k, v); }},
        {"run.max_dt", [](RunConfig &c, const std::string &k, const std::string &v) { c.max_dt = parse_double(k, v); }},
        {"run.scheme", [](RunConfig &c, const std::string &, const std::string &v) { c.scheme = parse_scheme(trim(v)); }},
        {"run.check_stride", [](RunConfig &c, const std::string &k, const std::string &v) { c.check_stride = parse_u64(k, v); }},
        {"run.trajectories", [](RunConfig &c, const std::string &k, const std::string &v) { c.n_trajectories = parse_u64(k, v); }},
        {"run.seed", [](RunConfig &c, const std::string &k, const std::string &v) { c.base_seed = parse_u64(k, v); }},
        {"run.output", [](RunConfig &c, const std::string &, const std::string &v) { c.output_path = trim(v); }},
        {"run.record_stride", [](RunConfig &c, const std::string &k, const std::string &v) { c.record_stride = parse_u64(k, v); }},
        {"run.max_verdicts", [](RunConfig &c, const std::string &k, const std::string &v) { c.max_verdicts = parse_u64(k, v); }},
        {"run.trajectory_files", [](RunConfig &c, const std::string &k, const std::string &v) { c.trajectory_files = parse_u64(k, v); }},
        {"run.threads", [](RunConfig &c, const std::string &k, const std::string &v) { c.threads = static_cast<unsigned>(parse_u64(k, v)); }},
        {"run.reference_dt_divisor", [](RunConfig &c, const std::string &k, const std::string &v) { c.reference_dt_divisor = parse_double(k, v); }},
        {"run.preset", [](RunConfig &c, const std::string &, const std::string &v) { c.preset = trim(v); }},
    };
    return table;
}

}  // namespace

namespace {

void apply_one(RunConfig &cfg, const std::string &key, const std::string &value) {
    auto it = setters().find(key);
    if (it == setters().end()) {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
    it->second(cfg, key, value);
}

}  // namespace

void apply_config_value(RunConfig &cfg, const std::string &key, const std::string &value) {
    apply_one(cfg, key, value);
    if (is_physical_key(key)) {
        rebuild_from_physical(cfg);
    }
}

void apply_config_text(RunConfig &cfg, const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool physical = false;
    while (std::getline(in, line)) {
        line_no++;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = trim(t.substr(0, eq));
        apply_one(cfg, key, trim(t.substr(eq + 1)));
        physical = physical || is_physical_key(key);
    }
    // Device parameters are converted once, so their order in the text does not matter.
    if (physical) {
        rebuild_from_physical(cfg);
    }
}

RunConfig load_config_file(const std::string &path, RunConfig base) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open configuration file '" + path + "'");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    apply_config_text(base, ss.str());
    return base;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig &c) {
    return {
        {"run.preset", c.preset},
        {"model.gamma_d", format_double(c.model.gamma_d)},
        {"model.eta", format_double(c.model.eta)},
        {"model.gamma", format_triple(c.model.decay)},
        {"model.dephasing", format_triple(c.model.dephasing)},
        {"model.jz_weights", format_triple(c.model.jz_weights)},
        {"model.z_rotation", format_triple(c.model.z_rotation)},
        {"model.absorb_z_rotations", c.model.absorb_z_rotations ? "true" : "false"},
        {"filter.rate", format_double(c.filter.rate)},
        {"filter.band", format_double(c.filter.discriminator.band)},
        {"filter.dwell", format_double(c.filter.discriminator.dwell)},
        {"filter.indicator", indicator_name(c.filter.indicator)},
        {"controller.mode", mode_name(c.controller.mode)},
        {"controller.tau", format_double(c.controller.tau)},
        {"run.initial_state", initial_state_name(c.initial)},
        {"run.duration", format_double(c.duration)},
        {"run.dt", format_double(c.dt)},
        {"run.max_dt", format_double(c.max_dt)},
        {"run.scheme", scheme_name(c.scheme)},
        {"run.check_stride", std::to_string(c.check_stride)},
        {"run.trajectories", std::to_string(c.n_trajectories)},
        {"run.seed", std::to_string(c.base_seed)},
        {"run.output", c.output_path},
        {"run.record_stride", std::to_string(c.record_stride)},
        {"run.max_verdicts", std::to_string(c.max_verdicts)},
        {"run.trajectory_files", std::to_string(c.trajectory_files)},
        {"run.threads", std::to_string(c.threads)},
        {"run.reference_dt_divisor", format_double(c.reference_dt_divisor)},
    };
}

std::vector<std::string> preset_names() {
    return {"default", "fig2", "fig3", "fig4", "fig5a-2", "fig5a-3"};
}

RunConfig preset(const std::string &name) {
    RunConfig c;
    c.preset = name;
    c.output_path = "out/" + name;
    if (name == "default") {
        return c;
    }
    if (name == "fig2") {
        c.controller.mode = ControllerMode::kGenerateOnly;
        c.model.decay = {0, 0, 0};
        c.initial = InitialState::kPlusPlusPlus;
        c.duration = 1000;  // a cap; generation stops once pre-GHZ is reached
        c.n_trajectories = 2;
        c.trajectory_files = 2;
        return c;
    }
    if (name == "fig3") {
        c.controller.mode = ControllerMode::kZenoOnly;
        c.model.decay = {0.01, 0.01, 0.01};
        c.initial = InitialState::kPreGhz;
        c.duration = 100;
        return c;
    }
    if (name == "fig4") {
        c.controller.mode = ControllerMode::kAfizWithRecovery;
        c.model.decay = {0.01, 0.01, 0.01};
        c.initial = InitialState::kPlusPlusPlus;
        c.duration = 300;
        c.filter.indicator = Indicator::kExpectation;
        c.filter.discriminator.dwell = 0.4;
        return c;
    }
    if (name == "fig5a-2" || name == "fig5a-3") {
        double g = name == "fig5a-2" ? 0.01 : 0.001;
        c.controller.mode = ControllerMode::kAfizWithRecovery;
        c.model.decay = {g, g, g};
        c.initial = InitialState::kPlusPlusPlus;
        c.duration = 300;
        c.n_trajectories = 1000;
        c.filter.indicator = Indicator::kExpectation;
        c.filter.discriminator.dwell = 0.4;
        return c;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace afiz
