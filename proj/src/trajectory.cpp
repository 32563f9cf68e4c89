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

#include "afiz/trajectory.hpp"

#include <algorithm>
#include <sstream>

#include "afiz/filter.hpp"
#include "afiz/integrator.hpp"
#include "afiz/noise.hpp"

namespace afiz {

const char *event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::kVerdict:
            return "verdict";
        case EventKind::kGate:
            return "gate";
        case EventKind::kPhase:
            return "phase";
    }
    return "?";
}

EventKind parse_event_kind(const std::string &name) {
    for (EventKind k : {EventKind::kVerdict, EventKind::kGate, EventKind::kPhase}) {
        if (name == event_kind_name(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown event kind '" + name + "'");
}

double TrajectoryResult::final_fidelity() const {
    return fidelity(DensityMatrix(final_state), target_states().pre_ghz);
}

ModelConfig effective_model(const RunConfig &cfg) {
    ModelConfig m = cfg.model;
    if (!mode_measures(cfg.controller.mode)) {
        m.gamma_d = 0;
    }
    return m;
}

Phase initial_phase(const RunConfig &cfg) {
    if (mode_generates(cfg.controller.mode) && cfg.initial != InitialState::kPreGhz) {
        return Phase::kGenerating;
    }
    return Phase::kStabilizing;
}

namespace {

std::string level_label(double level) {
    std::ostringstream ss;
    if (level > 0) {
        ss << '+';
    }
    ss << level;
    return ss.str();
}

}  // namespace

TrajectoryStart default_start(const RunConfig &cfg) {
    TrajectoryStart st;
    st.rho = initial_density(cfg.initial);
    st.controller.phase = initial_phase(cfg);
    st.controller.tau = cfg.controller.tau;
    st.controller.last_flip_time = 0;
    return st;
}

TrajectoryResult run_trajectory(const RunConfig &cfg, std::uint64_t index, const TrajectoryObserver &observer) {
    return run_trajectory(cfg, index, default_start(cfg), observer);
}

TrajectoryResult run_trajectory(const RunConfig &cfg, std::uint64_t index, const TrajectoryStart &start,
                                const TrajectoryObserver &observer) {
    cfg.validate();
    const ModelConfig model = effective_model(cfg);
    check_time_step(cfg.dt, cfg.max_dt);
    Stepper stepper(model, cfg.dt, cfg.scheme);
    NoiseSource noise(cfg.base_seed, index);
    const PureState &target = target_states().pre_ghz;

    FilterState filter;
    filter.rate = cfg.filter.rate;
    filter.gamma_m = model.gamma_m();
    const FilterKernel kernel(filter.rate, cfg.dt);
    Discriminator disc(jz_levels(model.jz_weights), cfg.filter.discriminator);

    Controller controller(cfg.controller.mode, start.controller);

    TrajectoryResult res;
    res.index = index;
    DensityMatrix rho = start.rho;

    const std::uint64_t n = steps_for(cfg.duration, cfg.dt);
    const std::uint64_t stride = std::max<std::uint64_t>(cfg.record_stride, 1);
    const std::uint64_t check = cfg.scheme == Scheme::kEulerMaruyama ? 1 : std::max<std::uint64_t>(cfg.check_stride, 1);
    const bool use_filter = cfg.filter.indicator == Indicator::kFilteredCurrent;
    // Without a measurement record there is nothing to discriminate.
    const bool discriminate = mode_measures(cfg.controller.mode);
    res.samples.reserve(static_cast<std::size_t>(n / stride + 2));

    double indicator = use_filter ? filter.value() : stepper.jz_expectation(rho);
    double ibar = filter.value();
    auto record = [&](std::uint64_t s, double t) {
        TrajectorySample sm;
        sm.step = s;
        sm.t = t;
        sm.fidelity = fidelity(rho, target);
        sm.jz = stepper.jz_expectation(rho);
        sm.ibar = ibar;
        sm.phase = controller.state().phase;
        res.samples.push_back(sm);
    };

    GateList applied;
    record(0, 0.0);
    if (observer) {
        StepView v{0, 0.0, &rho, 0.0, indicator, &controller.state(), &applied};
        observer(v);
    }

    std::uint64_t s = 0;
    bool was_decided = false;
    std::uint64_t decided_count = 0;
    while (s < n) {
        const double dI = stepper.advance(rho, noise.wiener(s, cfg.dt));
        s++;
        const double t = static_cast<double>(s) * cfg.dt;
        if (s % check == 0 || s == n) {
            StateReport report = validate_state(rho);
            if (!report.ok()) {
                std::ostringstream ss;
                ss << "state left the valid set at t=" << t << ": " << report.describe() << "; reduce dt (currently "
                   << cfg.dt << ")";
                throw TrajectoryError(index, ss.str());
            }
        }

        ibar = kernel.update(filter, dI);
        if (use_filter) {
            indicator = ibar;
        } else {
            indicator = stepper.jz_expectation(rho);
        }

        applied.clear();
        const Verdict &v = discriminate ? disc.observe(t, indicator) : disc.verdict();
        if (v.decided() && !was_decided) {
            Verdict fresh = v;
            res.verdicts.push_back({t, *fresh.level});
            res.events.push_back({t, EventKind::kVerdict, level_label(*fresh.level)});
            decided_count++;
            Phase before = controller.state().phase;
            GateList gates = controller.on_verdict(fresh);
            if (controller.state().phase != before) {
                res.events.push_back({t, EventKind::kPhase, phase_name(controller.state().phase)});
            }
            if (!gates.empty()) {
                rho = apply_gates(gates, rho);
                filter.reset();
                ibar = filter.value();
                disc.reset();
                applied = gates;
            }
        }
        GateList ticks = controller.on_tick(t);
        if (!ticks.empty()) {
            rho = apply_gates(ticks, rho);
            filter.negate();
            ibar = filter.value();
            disc.negate();
            applied.insert(applied.end(), ticks.begin(), ticks.end());
        }
        for (const GateCommand &g : applied) {
            res.events.push_back({t, EventKind::kGate, g.name()});
        }
        was_decided = disc.verdict().decided();
        if (!applied.empty() && !use_filter) {
            indicator = stepper.jz_expectation(rho);
        }

        if (observer) {
            StepView view{s, t, &rho, dI, indicator, &controller.state(), &applied};
            observer(view);
        }

        bool stop = controller.finished() || (cfg.max_verdicts > 0 && decided_count >= cfg.max_verdicts);
        if (s % stride == 0) {
            record(s, t);
        } else if (stop || s == n) {
            record(s, t);
        }
        if (stop) {
            res.stopped_early = s < n;
            break;
        }
    }
    res.steps = s;
    res.end_time = static_cast<double>(s) * cfg.dt;
    res.final_state = rho.matrix();
    res.final_phase = controller.state().phase;
    return res;
}

}  // namespace afiz
