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

#ifndef AFIZ_CONTROLLER_HPP
#define AFIZ_CONTROLLER_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "afiz/filter.hpp"
#include "afiz/qubit_algebra.hpp"

namespace afiz {

enum class GateKind {
    kXFlip,           // sigma_x on one qubit
    kYRotHalfPi,      // |1> -> (|0> + |1>)/sqrt 2
    kYRotThreeHalfPi, // |0> -> (|0> + |1>)/sqrt 2, up to global phase
    kFlipAll,         // sigma_x on all three qubits
};

struct GateCommand {
    GateKind kind = GateKind::kXFlip;
    std::size_t qubit = 0;  // 1..3; unused for kFlipAll
    double issued_at = 0;

    std::string name() const;
    bool operator==(const GateCommand &o) const {
        return kind == o.kind && qubit == o.qubit;
    }
};

using GateList = std::vector<GateCommand>;

/// Single-qubit rotation exp(-i theta sigma_y / 2) in the |1> = up convention.
Matrix2 y_rotation(double theta);

/// The fixed gate table. Every entry is checked for unitarity (1e-12) and for
/// its defining action when the table is first built.
const Operator &gate_unitary(GateKind kind, std::size_t qubit = 0);
const Operator &gate_unitary(const GateCommand &cmd);

/// Applies the gates in order.
DensityMatrix apply_gates(const GateList &gates, const DensityMatrix &rho);

enum class ControllerMode {
    kUncontrolled,      // no measurement, no gates
    kZenoOnly,          // measurement only
    kGenerateOnly,      // measurement + generation feedback; stops on reaching level 0
    kAfiz,              // measurement + periodic flips
    kAfizWithRecovery,  // generation, periodic flips and error recovery
};

const char *mode_name(ControllerMode m);
ControllerMode parse_mode(const std::string &name);
bool mode_measures(ControllerMode m);
bool mode_generates(ControllerMode m);

enum class Phase { kGenerating, kStabilizing, kRecovering };
const char *phase_name(Phase p);
Phase parse_phase(const std::string &name);

enum class RecoveryContext {
    kNone,
    kAfterPm2,  // a +-2 error was seen; a zero may be the incoherent |001>/|110> mixture
    kAfterPm4,  // the state was reset to |+++>; later verdicts follow the generation rules
};

struct ControllerState {
    Phase phase = Phase::kGenerating;
    double last_flip_time = 0;
    double tau = 3.0;
    RecoveryContext recovery_context = RecoveryContext::kNone;
};

struct PolicyOutput {
    GateList gates;
    ControllerState state;
};

/// Generation feedback. Undecided verdicts leave the state untouched.
PolicyOutput generation_policy(const ControllerState &cs, const Verdict &v);

/// Emits FlipAll once t reaches last_flip_time + tau.
PolicyOutput afiz_policy(const ControllerState &cs, double t);

/// Error recovery while stabilizing or recovering.
PolicyOutput recovery_policy(const ControllerState &cs, const Verdict &v);

/// Dispatches verdicts and clock ticks to the policies enabled by the mode.
class Controller {
   public:
    Controller(ControllerMode mode, ControllerState initial);

    /// Called once per newly decided verdict.
    GateList on_verdict(const Verdict &v);
    /// Called after every integration step.
    GateList on_tick(double t);

    const ControllerState &state() const {
        return state_;
    }
    ControllerMode mode() const {
        return mode_;
    }
    /// True once a generate-only run has reached the target level.
    bool finished() const;

   private:
    ControllerMode mode_;
    ControllerState state_;
};

}  // namespace afiz

#endif
