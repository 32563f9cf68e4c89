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

#include "afiz/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace afiz {

namespace fs = std::filesystem;

const std::string &CsvTable::meta_value(const std::string &key) const {
    for (const auto &[k, v] : meta) {
        if (k == key) {
            return v;
        }
    }
    throw FormatError("missing metadata key '" + key + "'");
}

bool CsvTable::has_meta(const std::string &key) const {
    for (const auto &kv : meta) {
        if (kv.first == key) {
            return true;
        }
    }
    return false;
}

std::size_t CsvTable::column(const std::string &name) const {
    for (std::size_t i = 0; i < columns.size(); i++) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw FormatError("missing column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(line);
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string join(const std::vector<std::string> &parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); i++) {
        if (i) {
            out += ',';
        }
        out += parts[i];
    }
    return out;
}

std::uint64_t parse_index(const std::string &text) {
    std::uint64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw FormatError("expected an integer, got '" + text + "'");
    }
    return v;
}

std::string level_key(double level) {
    return format_double(level);
}

}  // namespace

double parse_number(const std::string &text) {
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw FormatError("expected a number, got '" + text + "'");
    }
    return v;
}

void write_table(const fs::path &path, const CsvTable &table) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write '" + path.string() + "'");
    }
    for (const auto &[k, v] : table.meta) {
        out << "# " << k << '=' << v << '\n';
    }
    out << join(table.columns) << '\n';
    for (const auto &row : table.rows) {
        out << join(row) << '\n';
    }
    if (!out) {
        throw FormatError("write failed for '" + path.string() + "'");
    }
}

CsvTable read_table(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open '" + path.string() + "'");
    }
    CsvTable t;
    std::string line;
    bool header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!header && line.rfind("# ", 0) == 0) {
            std::string body = line.substr(2);
            std::size_t eq = body.find('=');
            if (eq == std::string::npos) {
                throw FormatError(path.string() + ":" + std::to_string(line_no) + ": malformed metadata line");
            }
            t.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (!header) {
            t.columns = split(line, ',');
            header = true;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        auto row = split(line, ',');
        if (row.size() != t.columns.size()) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(t.columns.size()) + " fields");
        }
        t.rows.push_back(std::move(row));
    }
    if (!t.has_meta("schema_version")) {
        throw FormatError(path.string() + ": metadata lacks schema_version");
    }
    if (t.meta_value("schema_version") != std::to_string(kSchemaVersion)) {
        throw FormatError(path.string() + ": unsupported schema_version " + t.meta_value("schema_version"));
    }
    if (!header) {
        throw FormatError(path.string() + ": missing header row");
    }
    return t;
}

std::vector<std::pair<std::string, std::string>> base_metadata(const RunConfig &cfg, const std::string &kind) {
    std::vector<std::pair<std::string, std::string>> meta = {
        {"schema_version", std::to_string(kSchemaVersion)},
        {"kind", kind},
    };
    for (auto &kv : config_entries(cfg)) {
        meta.push_back(std::move(kv));
    }
    return meta;
}

TrajectoryPaths trajectory_paths(const fs::path &dir, std::uint64_t index) {
    char name[32];
    std::snprintf(name, sizeof(name), "traj_%06llu", static_cast<unsigned long long>(index));
    std::string base(name);
    return {dir / (base + "_samples.csv"), dir / (base + "_events.csv"), dir / (base + "_state.csv")};
}

TrajectoryPaths write_trajectory(const fs::path &dir, const RunConfig &cfg, const TrajectoryResult &r) {
    TrajectoryPaths p = trajectory_paths(dir, r.index);
    auto meta = base_metadata(cfg, "trajectory_samples");
    meta.emplace_back("index", std::to_string(r.index));
    meta.emplace_back("steps", std::to_string(r.steps));
    meta.emplace_back("end_time", format_double(r.end_time));
    meta.emplace_back("stopped_early", r.stopped_early ? "true" : "false");
    meta.emplace_back("final_phase", phase_name(r.final_phase));

    CsvTable samples{meta, {"t", "step", "fidelity", "jz", "ibar", "phase"}, {}};
    samples.rows.reserve(r.samples.size());
    for (const TrajectorySample &s : r.samples) {
        samples.rows.push_back({format_double(s.t), std::to_string(s.step), format_double(s.fidelity),
                                format_double(s.jz), format_double(s.ibar), phase_name(s.phase)});
    }
    write_table(p.samples, samples);

    auto emeta = base_metadata(cfg, "trajectory_events");
    emeta.emplace_back("index", std::to_string(r.index));
    CsvTable events{emeta, {"t", "kind", "label"}, {}};
    for (const TrajectoryEvent &e : r.events) {
        events.rows.push_back({format_double(e.t), event_kind_name(e.kind), e.label});
    }
    write_table(p.events, events);

    auto smeta = base_metadata(cfg, "trajectory_state");
    smeta.emplace_back("index", std::to_string(r.index));
    smeta.emplace_back("t", format_double(r.end_time));
    CsvTable state{smeta, {"i", "j", "re", "im"}, {}};
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(kDim); i++) {
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kDim); j++) {
            cplx z = r.final_state(i, j);
            state.rows.push_back({std::to_string(i), std::to_string(j), format_double(z.real()), format_double(z.imag())});
        }
    }
    write_table(p.state, state);
    return p;
}

TrajectoryResult read_trajectory(const fs::path &dir, std::uint64_t index) {
    TrajectoryPaths p = trajectory_paths(dir, index);
    TrajectoryResult r;
    r.index = index;

    CsvTable s = read_table(p.samples);
    r.steps = parse_index(s.meta_value("steps"));
    r.end_time = parse_number(s.meta_value("end_time"));
    r.stopped_early = s.meta_value("stopped_early") == "true";
    r.final_phase = parse_phase(s.meta_value("final_phase"));
    std::size_t ct = s.column("t"), cs = s.column("step"), cf = s.column("fidelity"), cj = s.column("jz"),
                ci = s.column("ibar"), cp = s.column("phase");
    for (const auto &row : s.rows) {
        TrajectorySample sm;
        sm.t = parse_number(row[ct]);
        sm.step = parse_index(row[cs]);
        sm.fidelity = parse_number(row[cf]);
        sm.jz = parse_number(row[cj]);
        sm.ibar = parse_number(row[ci]);
        sm.phase = parse_phase(row[cp]);
        r.samples.push_back(sm);
    }

    CsvTable e = read_table(p.events);
    std::size_t et = e.column("t"), ek = e.column("kind"), el = e.column("label");
    for (const auto &row : e.rows) {
        TrajectoryEvent ev{parse_number(row[et]), parse_event_kind(row[ek]), row[el]};
        if (ev.kind == EventKind::kVerdict) {
            r.verdicts.push_back({ev.t, parse_number(ev.label[0] == '+' ? ev.label.substr(1) : ev.label)});
        }
        r.events.push_back(std::move(ev));
    }

    CsvTable st = read_table(p.state);
    std::size_t si = st.column("i"), sj = st.column("j"), sr = st.column("re"), sm = st.column("im");
    for (const auto &row : st.rows) {
        auto i = static_cast<Eigen::Index>(parse_index(row[si]));
        auto j = static_cast<Eigen::Index>(parse_index(row[sj]));
        if (i >= static_cast<Eigen::Index>(kDim) || j >= static_cast<Eigen::Index>(kDim)) {
            throw FormatError(p.state.string() + ": index out of range");
        }
        r.final_state(i, j) = cplx{parse_number(row[sr]), parse_number(row[sm])};
    }
    return r;
}

fs::path write_ensemble(const fs::path &dir, const RunConfig &cfg, const EnsembleResult &r) {
    auto meta = base_metadata(cfg, "ensemble");
    meta.emplace_back("n_trajectories", std::to_string(r.n_trajectories));
    for (const auto &[level, c] : r.verdict_counts) {
        meta.emplace_back("verdicts." + level_key(level), std::to_string(c));
    }
    for (const auto &[level, c] : r.first_verdict_counts) {
        meta.emplace_back("first_verdicts." + level_key(level), std::to_string(c));
    }
    std::string failed;
    for (const TrajectoryFailure &f : r.failures) {
        failed += (failed.empty() ? "" : ";") + std::to_string(f.index);
    }
    meta.emplace_back("failed", failed);
    CsvTable t{meta, {"t", "mean_fidelity", "se_fidelity", "n"}, {}};
    for (std::size_t i = 0; i < r.t.size(); i++) {
        t.rows.push_back({format_double(r.t[i]), format_double(r.mean_fidelity[i]), format_double(r.se_fidelity[i]),
                          std::to_string(r.count[i])});
    }
    fs::path path = dir / "ensemble.csv";
    write_table(path, t);
    return path;
}

EnsembleResult read_ensemble(const fs::path &path) {
    CsvTable t = read_table(path);
    if (t.meta_value("kind") != "ensemble") {
        throw FormatError(path.string() + ": not an ensemble file");
    }
    EnsembleResult r;
    r.n_trajectories = parse_index(t.meta_value("n_trajectories"));
    for (const auto &[k, v] : t.meta) {
        if (k.rfind("verdicts.", 0) == 0) {
            r.verdict_counts[parse_number(k.substr(9))] = parse_index(v);
        } else if (k.rfind("first_verdicts.", 0) == 0) {
            r.first_verdict_counts[parse_number(k.substr(15))] = parse_index(v);
        }
    }
    const std::string &failed = t.meta_value("failed");
    if (!failed.empty()) {
        for (const std::string &idx : split(failed, ';')) {
            r.failures.push_back({parse_index(idx), ""});
        }
    }
    std::size_t ct = t.column("t"), cm = t.column("mean_fidelity"), cs = t.column("se_fidelity"), cn = t.column("n");
    for (const auto &row : t.rows) {
        r.t.push_back(parse_number(row[ct]));
        r.mean_fidelity.push_back(parse_number(row[cm]));
        r.se_fidelity.push_back(parse_number(row[cs]));
        r.count.push_back(parse_index(row[cn]));
    }
    return r;
}

fs::path write_reference(const fs::path &dir, const RunConfig &cfg, const ReferenceSeries &r) {
    CsvTable t{base_metadata(cfg, "reference"), {"t", "fidelity", "jz"}, {}};
    for (std::size_t i = 0; i < r.t.size(); i++) {
        t.rows.push_back({format_double(r.t[i]), format_double(r.fidelity[i]), format_double(r.jz[i])});
    }
    fs::path path = dir / "reference.csv";
    write_table(path, t);
    return path;
}

ReferenceSeries read_reference(const fs::path &path) {
    CsvTable t = read_table(path);
    if (t.meta_value("kind") != "reference") {
        throw FormatError(path.string() + ": not a reference file");
    }
    ReferenceSeries r;
    std::size_t ct = t.column("t"), cf = t.column("fidelity"), cj = t.column("jz");
    for (const auto &row : t.rows) {
        r.t.push_back(parse_number(row[ct]));
        r.fidelity.push_back(parse_number(row[cf]));
        r.jz.push_back(parse_number(row[cj]));
    }
    return r;
}

}  // namespace afiz
