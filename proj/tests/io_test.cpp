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


#include <doctest.h>

#include <fstream>
#include <sstream>

#include "afiz/config.hpp"
#include "afiz/io.hpp"
#include "test_support.hpp"

using namespace afiz;
using namespace afiz::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void dump(const fs::path &p, const std::string &text) {
    std::ofstream out(p);
    out << text;
}

RunConfig echo_config(const CsvTable &t) {
    RunConfig probe;
    std::string text;
    for (const auto &[k, v] : config_entries(probe)) {
        text += k + "=" + t.meta_value(k) + "\n";
    }
    RunConfig c;
    apply_config_text(c, text);
    return c;
}

std::vector<std::pair<std::string, std::string>> entries(const RunConfig &c) {
    return config_entries(c);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("trajectory files round-trip exactly") {
    fs::path dir = scratch_dir("io_traj");
    RunConfig c = preset("fig4");
    c.duration = 25;
    c.record_stride = 13;
    TrajectoryResult r = run_trajectory(c, 7);
    REQUIRE_FALSE(r.events.empty());
    TrajectoryPaths p = write_trajectory(dir, c, r);
    CHECK(p.samples.filename() == "traj_000007_samples.csv");
    CHECK(fs::exists(p.events));
    CHECK(fs::exists(p.state));
    TrajectoryResult back = read_trajectory(dir, 7);
    CHECK(back.index == 7);
    CHECK(back.samples == r.samples);
    CHECK(back.events == r.events);
    CHECK(back.verdicts == r.verdicts);
    CHECK(back.final_state == r.final_state);
    CHECK(back.steps == r.steps);
    CHECK(back.end_time == r.end_time);
    CHECK(back.stopped_early == r.stopped_early);
    CHECK(back.final_phase == r.final_phase);
}

TEST_CASE("files carry the configuration echo") {
    fs::path dir = scratch_dir("io_echo");
    RunConfig c = preset("fig5a-3");
    c.duration = 2;
    c.base_seed = 987654321;
    write_trajectory(dir, c, run_trajectory(c, 0));
    for (const char *name : {"traj_000000_samples.csv", "traj_000000_events.csv", "traj_000000_state.csv"}) {
        CsvTable t = read_table(dir / name);
        CHECK(t.meta_value("schema_version") == "1");
        CHECK(entries(echo_config(t)) == entries(c));
    }
    CHECK(read_table(dir / "traj_000000_samples.csv").meta_value("kind") == "trajectory_samples");
}

TEST_CASE("ensemble files round-trip") {
    fs::path dir = scratch_dir("io_ens");
    RunConfig c = preset("fig4");
    c.n_trajectories = 4;
    c.duration = 8;
    c.record_stride = 40;
    EnsembleResult e = run_ensemble(c);
    e.failures.push_back({11, "synthetic"});
    e.failures.push_back({12, "synthetic"});
    fs::path p = write_ensemble(dir, c, e);
    CHECK(p.filename() == "ensemble.csv");
    EnsembleResult back = read_ensemble(p);
    CHECK(back.n_trajectories == 4);
    CHECK(back.t == e.t);
    CHECK(back.mean_fidelity == e.mean_fidelity);
    CHECK(back.se_fidelity == e.se_fidelity);
    CHECK(back.count == e.count);
    CHECK(back.verdict_counts == e.verdict_counts);
    CHECK(back.first_verdict_counts == e.first_verdict_counts);
    REQUIRE(back.failures.size() == 2);
    CHECK(back.failures[1].index == 12);
    CHECK(entries(echo_config(read_table(p))) == entries(c));
    CHECK_THROWS_AS(read_reference(p), FormatError);
}

TEST_CASE("reference files round-trip") {
    fs::path dir = scratch_dir("io_ref");
    RunConfig c;
    apply_config_text(c, "controller.mode=uncontrolled\nrun.initial_state=pre_ghz\nmodel.gamma=0.01\nrun.duration=5");
    c.record_stride = 250;
    ReferenceSeries r = lindblad_reference(c);
    fs::path p = write_reference(dir, c, r);
    ReferenceSeries back = read_reference(p);
    CHECK(back.t == r.t);
    CHECK(back.fidelity == r.fidelity);
    CHECK(back.jz == r.jz);
    CHECK_THROWS_AS(read_ensemble(p), FormatError);
}

TEST_CASE("schema version is enforced") {
    fs::path dir = scratch_dir("io_schema");
    dump(dir / "none.csv", "# kind=reference\nt,fidelity,jz\n0,1,0\n");
    CHECK_THROWS_WITH_AS(read_table(dir / "none.csv"), doctest::Contains("schema_version"), FormatError);
    dump(dir / "future.csv", "# schema_version=2\n# kind=reference\nt,fidelity,jz\n0,1,0\n");
    CHECK_THROWS_WITH_AS(read_table(dir / "future.csv"), doctest::Contains("unsupported schema_version 2"),
                         FormatError);
    dump(dir / "ok.csv", "# schema_version=1\n# kind=reference\nt,fidelity,jz\r\n0,1,0\r\n\n0.5,0.9,0\n");
    ReferenceSeries r = read_reference(dir / "ok.csv");
    CHECK(r.fidelity == std::vector<double>{1.0, 0.9});
}

TEST_CASE("malformed tables are rejected") {
    fs::path dir = scratch_dir("io_bad");
    dump(dir / "cols.csv", "# schema_version=1\n# kind=reference\nt,fid,jz\n0,1,0\n");
    CHECK_THROWS_WITH_AS(read_reference(dir / "cols.csv"), doctest::Contains("fidelity"), FormatError);
    dump(dir / "width.csv", "# schema_version=1\n# kind=reference\nt,fidelity,jz\n0,1\n");
    CHECK_THROWS_WITH_AS(read_table(dir / "width.csv"), doctest::Contains(":4: expected 3 fields"), FormatError);
    dump(dir / "meta.csv", "# schema_version=1\n# nonsense\nt\n");
    CHECK_THROWS_WITH_AS(read_table(dir / "meta.csv"), doctest::Contains("malformed metadata"), FormatError);
    dump(dir / "header.csv", "# schema_version=1\n");
    CHECK_THROWS_WITH_AS(read_table(dir / "header.csv"), doctest::Contains("header"), FormatError);
    dump(dir / "num.csv", "# schema_version=1\n# kind=reference\nt,fidelity,jz\n0,abc,0\n");
    CHECK_THROWS_AS(read_reference(dir / "num.csv"), FormatError);
    CHECK_THROWS_WITH_AS(read_table(dir / "missing.csv"), doctest::Contains("cannot open"), FormatError);
    CHECK_THROWS_AS(read_trajectory(dir, 3), FormatError);
}

TEST_CASE("table helpers") {
    CsvTable t{{{"a", "1"}}, {"x", "y"}, {}};
    CHECK(t.has_meta("a"));
    CHECK_FALSE(t.has_meta("b"));
    CHECK_THROWS_WITH_AS(t.meta_value("b"), doctest::Contains("b"), FormatError);
    CHECK(t.column("y") == 1);
    CHECK_THROWS_WITH_AS(t.column("z"), doctest::Contains("'z'"), FormatError);
    CHECK(parse_number("0.1") == 0.1);
    CHECK(parse_number("-4") == -4.0);
    CHECK_THROWS_AS(parse_number("1.5x"), FormatError);
    CHECK_THROWS_AS(parse_number(""), FormatError);

    fs::path dir = scratch_dir("io_helpers");
    write_table(dir / "nested" / "t.csv", CsvTable{{{"schema_version", "1"}}, {"x"}, {{"1"}, {"2"}}});
    CHECK(slurp(dir / "nested" / "t.csv") == "# schema_version=1\nx\n1\n2\n");
    CHECK(trajectory_paths("d", 123456).state == fs::path("d") / "traj_123456_state.csv");
}

}  // TEST_SUITE
