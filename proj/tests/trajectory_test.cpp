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

#include <cmath>
#include <set>

#include "afiz/config.hpp"
#include "afiz/trajectory.hpp"
#include "test_support.hpp"

using namespace afiz;
using namespace afiz::testing;

namespace {

double uncontrolled_fidelity(double g, double t) {
    return 0.25 * (std::exp(-g * t) + std::exp(-2 * g * t) + 2 * std::exp(-1.5 * g * t));
}

RunConfig base(const std::string &text) {
    RunConfig c;
    apply_config_text(c, text);
    return c;
}

}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("uncontrolled decay matches the closed form") {
    RunConfig c = base("controller.mode=uncontrolled\nmodel.gamma=0.01\nrun.initial_state=pre_ghz\nrun.duration=50");
    TrajectoryResult r = run_trajectory(c, 0);
    REQUIRE(r.samples.size() == 5001);
    double worst = 0, prev = 2;
    for (const TrajectorySample &s : r.samples) {
        worst = std::max(worst, std::abs(s.fidelity - uncontrolled_fidelity(0.01, s.t)));
        CHECK(s.fidelity < prev);
        prev = s.fidelity;
        CHECK(s.phase == Phase::kStabilizing);
    }
    CHECK(worst < 1e-6);
    CHECK(r.verdicts.empty());
    CHECK(r.events.empty());
}

TEST_CASE("sample series invariants") {
    RunConfig c = preset("fig4");
    c.duration = 20;
    c.record_stride = 7;
    TrajectoryResult r = run_trajectory(c, 2);
    REQUIRE(r.samples.size() >= 2);
    CHECK(r.samples.front().t == 0.0);
    CHECK(r.samples.front().step == 0);
    for (std::size_t i = 1; i < r.samples.size(); i++) {
        CHECK(r.samples[i].t > r.samples[i - 1].t);
        bool on_grid = r.samples[i].step % 7 == 0;
        bool last = i + 1 == r.samples.size();
        CHECK((on_grid || last));
    }
    for (const TrajectorySample &s : r.samples) {
        CHECK(s.fidelity >= 0.0);
        CHECK(s.fidelity <= 1.0);
    }
    CHECK(r.samples.back().step == r.steps);
    CHECK(r.steps == 20000);
    CHECK(r.end_time == doctest::Approx(20.0));
    CHECK_FALSE(r.stopped_early);
    CHECK(r.final_fidelity() == doctest::Approx(r.samples.back().fidelity).epsilon(1e-12));
    for (std::size_t i = 1; i < r.events.size(); i++) {
        CHECK(r.events[i].t >= r.events[i - 1].t);
    }
}

TEST_CASE("seeded determinism") {
    RunConfig c = preset("fig4");
    c.duration = 15;
    TrajectoryResult a = run_trajectory(c, 4), b = run_trajectory(c, 4), other = run_trajectory(c, 5);
    CHECK(a.samples == b.samples);
    CHECK(a.events == b.events);
    CHECK(a.final_state == b.final_state);
    CHECK_FALSE(a.samples == other.samples);
    c.base_seed++;
    CHECK_FALSE(run_trajectory(c, 4).samples == a.samples);
}

TEST_CASE("generate_only terminates in pre-GHZ without decay") {
    RunConfig c = preset("fig2");
    for (std::uint64_t i = 0; i < 12; i++) {
        TrajectoryResult r = run_trajectory(c, i);
        CHECK(r.stopped_early);
        CHECK(r.final_phase == Phase::kStabilizing);
        CHECK(r.final_fidelity() > 0.99);
        REQUIRE_FALSE(r.verdicts.empty());
        CHECK(r.verdicts.back().level == 0.0);
        CHECK(r.end_time == doctest::Approx(r.verdicts.back().t));
        // Every non-zero verdict was answered with gates at the same time.
        for (const DecidedVerdict &v : r.verdicts) {
            if (v.level == 0) {
                continue;
            }
            bool answered = false;
            for (const TrajectoryEvent &e : r.events) {
                answered = answered || (e.kind == EventKind::kGate && e.t == v.t);
            }
            CHECK(answered);
        }
    }
}

TEST_CASE("zeno_only holds pre-GHZ without decay") {
    RunConfig c = base("controller.mode=zeno_only\nrun.initial_state=pre_ghz\nrun.duration=10\nfilter.indicator=expectation");
    TrajectoryResult r = run_trajectory(c, 1);
    for (const TrajectorySample &s : r.samples) {
        CHECK(s.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    }
    REQUIRE(r.verdicts.size() == 1);
    CHECK(r.verdicts[0].level == 0.0);
    CHECK(r.verdicts[0].t == doctest::Approx(2.0 + c.dt));
    CHECK(r.events.size() == 1);
}

TEST_CASE("afiz flips on schedule") {
    RunConfig c = base("controller.mode=afiz\nrun.initial_state=pre_ghz\nrun.duration=10\ncontroller.tau=3\nmodel.gamma=0.01");
    TrajectoryResult r = run_trajectory(c, 0);
    std::vector<double> flips;
    for (const TrajectoryEvent &e : r.events) {
        if (e.kind == EventKind::kGate) {
            CHECK(e.label == "XXX");
            flips.push_back(e.t);
        }
    }
    REQUIRE(flips.size() == 3);
    for (std::size_t k = 0; k < 3; k++) {
        CHECK(std::abs(flips[k] - 3.0 * static_cast<double>(k + 1)) <= c.dt);
    }
}

TEST_CASE("max_verdicts stops the run") {
    RunConfig c = base("controller.mode=zeno_only\nrun.max_verdicts=1\nrun.duration=50");
    TrajectoryResult r = run_trajectory(c, 3);
    CHECK(r.verdicts.size() == 1);
    CHECK(r.stopped_early);
    CHECK(r.end_time == doctest::Approx(r.verdicts[0].t));
}

TEST_CASE("the filtered current is recorded whatever the indicator") {
    RunConfig c = base("controller.mode=zeno_only\nfilter.indicator=expectation\nrun.duration=5\nrun.initial_state=ghz");
    TrajectoryResult r = run_trajectory(c, 0);
    // |000> + |111> collapses to -4 or +4; the expectation is exact, the current is noisy.
    double noise = 0;
    for (const TrajectorySample &s : r.samples) {
        noise = std::max(noise, std::abs(s.ibar - s.jz));
    }
    CHECK(noise > 1e-3);
    CHECK(std::abs(r.samples.back().ibar - r.samples.back().jz) < 1.5);
}

TEST_CASE("observer sees every step after gates") {
    RunConfig c = preset("fig2");
    std::uint64_t calls = 0, last = 0;
    bool ordered = true;
    std::size_t gate_steps = 0;
    TrajectoryResult r = run_trajectory(c, 0, [&](const StepView &v) {
        ordered = ordered && (calls == 0 ? v.step == 0 : v.step == last + 1);
        last = v.step;
        calls++;
        if (!v.gates->empty()) {
            gate_steps++;
        }
        CHECK(v.rho != nullptr);
    });
    CHECK(ordered);
    CHECK(calls == r.steps + 1);
    std::set<double> gate_times;
    for (const TrajectoryEvent &e : r.events) {
        if (e.kind == EventKind::kGate) {
            gate_times.insert(e.t);
        }
    }
    CHECK(gate_steps == gate_times.size());
}

TEST_CASE("integration failures carry the trajectory index") {
    RunConfig c = base("run.scheme=euler_maruyama\nrun.dt=0.01\nrun.duration=5");
    CHECK_THROWS_WITH_AS(run_trajectory(c, 5), doctest::Contains("trajectory 5"), TrajectoryError);
    try {
        run_trajectory(c, 5);
    } catch (const TrajectoryError &e) {
        CHECK(e.index() == 5);
        CHECK(std::string(e.what()).find("reduce dt") != std::string::npos);
    }
}

TEST_CASE("invalid configuration is rejected before integrating") {
    RunConfig c;
    c.duration = -1;
    CHECK_THROWS_AS(run_trajectory(c, 0), ConfigError);
}

TEST_CASE("start state and phase") {
    RunConfig c = preset("fig4");
    CHECK(initial_phase(c) == Phase::kGenerating);
    c.initial = InitialState::kPreGhz;
    CHECK(initial_phase(c) == Phase::kStabilizing);
    CHECK(initial_phase(preset("fig3")) == Phase::kStabilizing);
    RunConfig u = base("controller.mode=uncontrolled");
    CHECK(effective_model(u).gamma_d == 0.0);
    CHECK(effective_model(preset("fig4")).gamma_d == 1.0);
    TrajectoryStart st = default_start(preset("fig4"));
    CHECK(st.controller.phase == Phase::kGenerating);
    CHECK(st.controller.tau == 3.0);
    CHECK(fidelity(st.rho, target_states().pre_ghz) == doctest::Approx(0.25));
}

TEST_CASE("recovery never deadlocks") {
    // Every start is treated as the zero branch of a +-2 recovery. The end
    // state must sit in the J_z = 0 space; its phase balance is not checked.
    RunConfig c = preset("fig4");
    c.model.decay = {0, 0, 0};
    c.duration = 150;
    std::vector<Operator> starts;
    for (std::size_t b = 0; b < kDim; b++) {
        starts.push_back(ket_bra(b, b));
    }
    starts.push_back(0.5 * (ket_bra(1, 1) + ket_bra(6, 6)));
    starts.push_back(0.5 * (ket_bra(2, 2) + ket_bra(4, 4)));
    starts.push_back(0.5 * (ket_bra(0, 0) + ket_bra(7, 7)));
    for (Indicator ind : {Indicator::kExpectation, Indicator::kFilteredCurrent}) {
        c.filter.indicator = ind;
        for (std::size_t k = 0; k < starts.size(); k++) {
            for (std::uint64_t seed = 0; seed < 2; seed++) {
                TrajectoryStart st;
                st.rho = DensityMatrix(starts[k]);
                st.controller.phase = Phase::kRecovering;
                st.controller.recovery_context = RecoveryContext::kAfterPm2;
                st.controller.tau = c.controller.tau;
                TrajectoryResult r = run_trajectory(c, 100 * k + seed, st);
                CAPTURE(k);
                CAPTURE(indicator_name(ind));
                CHECK(r.final_phase == Phase::kStabilizing);
                double p0 = r.final_state(1, 1).real() + r.final_state(6, 6).real();
                CHECK(p0 > 0.99);
            }
        }
    }
}

TEST_CASE("event names") {
    for (EventKind k : {EventKind::kVerdict, EventKind::kGate, EventKind::kPhase}) {
        CHECK(parse_event_kind(event_kind_name(k)) == k);
    }
    CHECK_THROWS(parse_event_kind("jump"));
}

}  // TEST_SUITE
