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

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#include "afiz/config.hpp"
#include "afiz/ensemble.hpp"
#include "test_support.hpp"

using namespace afiz;
using namespace afiz::testing;

namespace {

double uncontrolled_fidelity(double g, double t) {
    return 0.25 * (std::exp(-g * t) + std::exp(-2 * g * t) + 2 * std::exp(-1.5 * g * t));
}

RunConfig small_fig4(std::uint64_t n, double duration) {
    RunConfig c = preset("fig4");
    c.n_trajectories = n;
    c.duration = duration;
    c.record_stride = 50;
    c.trajectory_files = 0;
    return c;
}

RunConfig base_reference() {
    RunConfig c;
    apply_config_text(c, "controller.mode=zeno_only\nrun.initial_state=pre_ghz\nmodel.gamma=0.01\nrun.duration=50");
    c.record_stride = 100;
    return c;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("fixed point sums are exact and order independent") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> xs(1000);
    for (double &x : xs) {
        x = u(gen);
    }
    FixedPointSum fwd, rev, a, b;
    for (double x : xs) {
        fwd.add(x);
    }
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
        rev.add(*it);
    }
    for (std::size_t i = 0; i < xs.size(); i++) {
        (i % 3 ? a : b).add(xs[i]);
    }
    a.merge(b);
    CHECK(fwd == rev);
    CHECK(fwd == a);
    CHECK(fwd.count() == 1000);
    double direct = 0;
    for (double x : xs) {
        direct += x;
    }
    CHECK(std::abs(fwd.value() - direct) < 1000 / FixedPointSum::kScale);

    FixedPointSum q;
    q.add(0.25);
    q.add(-1.5);
    CHECK(q.value() == -1.25);
    CHECK(FixedPointSum().value() == 0.0);
}

TEST_CASE("series accumulator mean and standard error") {
    SeriesAccumulator s;
    for (double x : {1.0, 2.0, 3.0, 4.0}) {
        s.add(0, x);
    }
    s.add(2, 0.5);
    CHECK(s.size() == 3);
    CHECK(s.count(0) == 4);
    CHECK(s.count(1) == 0);
    CHECK(s.mean(0) == doctest::Approx(2.5));
    // Sample std of 1..4 is sqrt(5/3).
    CHECK(s.standard_error(0) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(s.standard_error(2) == 0.0);
    SeriesAccumulator a, b;
    a.add(0, 1.0);
    a.add(0, 2.0);
    b.add(0, 3.0);
    b.add(0, 4.0);
    b.add(2, 0.5);
    a.merge(b);
    CHECK(a == s);
}

TEST_CASE("parallel_for covers every index and rethrows") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 3, [&](std::uint64_t i) { hits[i]++; });
    for (auto &h : hits) {
        CHECK(h.load() == 1);
    }
    CHECK_THROWS_WITH_AS(parallel_for(10, 2,
                                      [](std::uint64_t i) {
                                          if (i == 4) {
                                              throw std::runtime_error("boom");
                                          }
                                      }),
                         "boom", std::runtime_error);
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("one trajectory ensemble equals the trajectory") {
    RunConfig c = small_fig4(1, 10);
    TrajectoryResult r = run_trajectory(c, 0);
    EnsembleResult e = run_ensemble(c);
    REQUIRE(e.ok());
    CHECK(e.n_trajectories == 1);
    REQUIRE(e.t.size() == e.mean_fidelity.size());
    std::size_t matched = 0;
    for (const TrajectorySample &s : r.samples) {
        if (s.step % c.record_stride != 0) {
            continue;
        }
        std::size_t bin = s.step / c.record_stride;
        REQUIRE(bin < e.t.size());
        CHECK(e.t[bin] == doctest::Approx(s.t));
        CHECK(std::abs(e.mean_fidelity[bin] - s.fidelity) < 1e-11);
        CHECK(e.se_fidelity[bin] == 0.0);
        CHECK(e.count[bin] == 1);
        matched++;
    }
    CHECK(matched == e.t.size());
    std::uint64_t verdicts = 0;
    for (auto [level, n] : e.verdict_counts) {
        verdicts += n;
    }
    CHECK(verdicts == r.verdicts.size());
}

TEST_CASE("ensemble is independent of order and threads") {
    RunConfig c = small_fig4(8, 12);
    EnsembleOptions serial;
    serial.threads = 1;
    EnsembleOptions shuffled;
    shuffled.threads = 3;
    shuffled.order = {5, 2, 7, 0, 3, 6, 1, 4};
    EnsembleResult a = run_ensemble(c, serial), b = run_ensemble(c, shuffled);
    CHECK(a.mean_fidelity == b.mean_fidelity);
    CHECK(a.se_fidelity == b.se_fidelity);
    CHECK(a.count == b.count);
    CHECK(a.verdict_counts == b.verdict_counts);
    CHECK(a.first_verdict_counts == b.first_verdict_counts);
    std::uint64_t firsts = 0;
    for (auto [level, n] : a.first_verdict_counts) {
        firsts += n;
    }
    CHECK(firsts <= 8);
    for (std::size_t i = 0; i < a.mean_fidelity.size(); i++) {
        CHECK(a.mean_fidelity[i] >= 0.0);
        CHECK(a.mean_fidelity[i] <= 1.0);
    }
}

TEST_CASE("early stopping trajectories leave later bins short") {
    RunConfig c = preset("fig2");
    c.n_trajectories = 6;
    c.duration = 60;
    c.record_stride = 100;
    EnsembleResult e = run_ensemble(c);
    REQUIRE(e.ok());
    CHECK(e.count.front() == 6);
    CHECK(e.count.back() < 6);
    for (std::size_t i = 1; i < e.count.size(); i++) {
        CHECK(e.count[i] <= e.count[i - 1]);
    }
}

TEST_CASE("consumer sees each trajectory once") {
    RunConfig c = small_fig4(5, 3);
    std::vector<int> seen(5, 0);
    EnsembleOptions opt;
    opt.threads = 2;
    opt.consumer = [&](const TrajectoryResult &r) { seen.at(r.index)++; };
    run_ensemble(c, opt);
    CHECK(seen == std::vector<int>(5, 1));
}

TEST_CASE("failed trajectories are reported") {
    RunConfig c = small_fig4(3, 3);
    c.scheme = Scheme::kEulerMaruyama;
    c.dt = 0.01;
    c.initial = InitialState::kPlusPlusPlus;
    EnsembleResult e;
    CHECK_NOTHROW(e = run_ensemble(c));
    CHECK_FALSE(e.ok());
    REQUIRE(e.failures.size() == 3);
    for (std::size_t i = 0; i < 3; i++) {
        CHECK(e.failures[i].index == i);
        CHECK(e.failures[i].message.find("reduce dt") != std::string::npos);
    }
}

TEST_CASE("time averaged fidelity") {
    EnsembleResult e;
    e.t = {0, 1, 2, 3};
    e.mean_fidelity = {1.0, 0.5, 0.25, 0.75};
    CHECK(e.time_averaged_fidelity() == doctest::Approx(0.625));
    CHECK(e.time_averaged_fidelity(1, 2) == doctest::Approx(0.375));
    CHECK(e.time_averaged_fidelity(5, 6) == 0.0);
}

TEST_CASE("reference without decay stays at pre-GHZ") {
    RunConfig c = base_reference();
    c.model.decay = {0, 0, 0};
    ReferenceSeries r = lindblad_reference(c);
    for (double f : r.fidelity) {
        CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (double j : r.jz) {
        CHECK(std::abs(j) < 1e-12);
    }
}

TEST_CASE("reference decay from pre-GHZ matches the closed form") {
    // Dephasing along J_z leaves the J_z = 0 target alone, so the measured
    // and unmeasured references agree.
    for (const char *mode : {"zeno_only", "uncontrolled"}) {
        RunConfig c = base_reference();
        c.controller.mode = parse_mode(mode);
        ReferenceSeries r = lindblad_reference(c);
        REQUIRE(r.t.size() == 501);
        for (std::size_t i = 0; i < r.t.size(); i++) {
            CHECK(r.t[i] == doctest::Approx(0.1 * static_cast<double>(i)));
            CHECK(std::abs(r.fidelity[i] - uncontrolled_fidelity(0.01, r.t[i])) < 1e-9);
        }
        CHECK(std::abs(r.final_state.trace().real() - 1.0) < 1e-12);
    }
}

TEST_CASE("reference states at chosen times") {
    RunConfig c = base_reference();
    std::vector<Operator> s = reference_states(c, {0.0, 10.0, 50.0});
    REQUIRE(s.size() == 3);
    CHECK(max_abs(s[0] - initial_density(InitialState::kPreGhz).matrix()) < 1e-15);
    ReferenceSeries r = lindblad_reference(c);
    CHECK(max_abs(s[2] - r.final_state) < 1e-10);
    CHECK_THROWS(reference_states(c, {2.0, 1.0}));
}

TEST_CASE("conditional states average to the reference") {
    RunConfig c;
    apply_config_text(c, "controller.mode=zeno_only\nrun.initial_state=plus\nmodel.gamma=0.05\nrun.duration=2");
    c.n_trajectories = 200;
    const std::vector<double> times = {0.5, 1.0, 2.0};
    StateMoments m = state_moments(c, times);
    std::vector<Operator> ref = reference_states(c, times);
    CHECK(m.n == 200);
    REQUIRE(m.mean.size() == 3);
    for (std::size_t k = 0; k < times.size(); k++) {
        for (Eigen::Index i = 0; i < 8; i++) {
            for (Eigen::Index j = 0; j < 8; j++) {
                double dr = std::abs(m.mean[k](i, j).real() - ref[k](i, j).real());
                double di = std::abs(m.mean[k](i, j).imag() - ref[k](i, j).imag());
                CHECK(dr <= 4 * m.se_real[k](i, j) + 1e-12);
                CHECK(di <= 4 * m.se_imag[k](i, j) + 1e-12);
            }
        }
    }
}

}  // TEST_SUITE
