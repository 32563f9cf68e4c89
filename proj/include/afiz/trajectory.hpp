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

#ifndef AFIZ_TRAJECTORY_HPP
#define AFIZ_TRAJECTORY_HPP

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "afiz/config.hpp"
#include "afiz/controller.hpp"
#include "afiz/qubit_algebra.hpp"

namespace afiz {

struct TrajectorySample {
    std::uint64_t step = 0;
    double t = 0;
    double fidelity = 0;  // to the pre-GHZ state
    double jz = 0;        // Tr[J rho_c]
    double ibar = 0;      // filtered homodyne current
    Phase phase = Phase::kGenerating;

    bool operator==(const TrajectorySample &) const = default;
};

enum class EventKind { kVerdict, kGate, kPhase };
const char *event_kind_name(EventKind k);
EventKind parse_event_kind(const std::string &name);

struct TrajectoryEvent {
    double t = 0;
    EventKind kind = EventKind::kVerdict;
    std::string label;  // level for verdicts, gate name, or phase name

    bool operator==(const TrajectoryEvent &) const = default;
};

struct DecidedVerdict {
    double t = 0;
    double level = 0;
    bool operator==(const DecidedVerdict &) const = default;
};

struct TrajectoryResult {
    std::uint64_t index = 0;
    std::vector<TrajectorySample> samples;
    std::vector<TrajectoryEvent> events;
    std::vector<DecidedVerdict> verdicts;
    Operator final_state = Operator::Zero();
    Phase final_phase = Phase::kGenerating;
    std::uint64_t steps = 0;
    double end_time = 0;
    /// True when the run stopped early (generate_only reached the target or
    /// max_verdicts was hit).
    bool stopped_early = false;

    double final_fidelity() const;
};

/// Everything an observer sees after one step, once gates have been applied.
struct StepView {
    std::uint64_t step = 0;  // completed steps; 0 is the initial state
    double t = 0;
    const DensityMatrix *rho = nullptr;
    double dI = 0;
    double indicator = 0;
    const ControllerState *controller = nullptr;
    const GateList *gates = nullptr;  // gates applied at this step
};

using TrajectoryObserver = std::function<void(const StepView &)>;

class TrajectoryError : public std::runtime_error {
   public:
    TrajectoryError(std::uint64_t index, const std::string &what)
        : std::runtime_error("trajectory " + std::to_string(index) + ": " + what), index_(index) {
    }
    std::uint64_t index() const {
        return index_;
    }

   private:
    std::uint64_t index_;
};

/// The model actually integrated: the uncontrolled mode switches the
/// measurement off.
ModelConfig effective_model(const RunConfig &cfg);

/// Phase the controller starts in for this configuration.
Phase initial_phase(const RunConfig &cfg);

/// Initial conditions of one trajectory.
struct TrajectoryStart {
    DensityMatrix rho;
    ControllerState controller;
};

/// The start implied by cfg.initial, initial_phase() and cfg.controller.tau.
TrajectoryStart default_start(const RunConfig &cfg);

/// Deterministic in (cfg, index). Integration failures are rethrown as
/// TrajectoryError carrying the index.
TrajectoryResult run_trajectory(const RunConfig &cfg, std::uint64_t index, const TrajectoryObserver &observer = {});

/// Same, from an explicit state and controller state.
TrajectoryResult run_trajectory(const RunConfig &cfg, std::uint64_t index, const TrajectoryStart &start,
                                const TrajectoryObserver &observer = {});

}  // namespace afiz

#endif
