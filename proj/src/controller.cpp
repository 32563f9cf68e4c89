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

#include "afiz/controller.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "afiz/model.hpp"

namespace afiz {

std::string GateCommand::name() const {
    switch (kind) {
        case GateKind::kXFlip:
            return "X" + std::to_string(qubit);
        case GateKind::kYRotHalfPi:
            return "Y90_" + std::to_string(qubit);
        case GateKind::kYRotThreeHalfPi:
            return "Y270_" + std::to_string(qubit);
        case GateKind::kFlipAll:
            return "XXX";
    }
    return "?";
}

Matrix2 y_rotation(double theta) {
    return std::cos(0.5 * theta) * pauli::identity() - cplx{0, 1} * std::sin(0.5 * theta) * pauli::y();
}

namespace {

struct GateTable {
    std::array<Operator, kNumQubits> x;
    std::array<Operator, kNumQubits> y_half;
    std::array<Operator, kNumQubits> y_three_half;
    Operator flip_all;
};

// |<to|U|from>| must be 1, i.e. the action holds up to a global phase.
void check_single(const Matrix2 &u, const Eigen::Vector2cd &from, const Eigen::Vector2cd &to, const char *what) {
    Eigen::Vector2cd image = u * from;
    if (std::abs(std::abs(to.dot(image)) - 1.0) > 1e-12) {
        throw std::logic_error(std::string("gate table: ") + what + " does not have its defining action");
    }
}

GateTable build_table() {
    const Matrix2 x = pauli::x();
    const Matrix2 yh = y_rotation(0.5 * std::numbers::pi);
    const Matrix2 yt = y_rotation(1.5 * std::numbers::pi);
    const Eigen::Vector2cd zero(1, 0), one(0, 1);
    const Eigen::Vector2cd plus = Eigen::Vector2cd(1, 1) / std::sqrt(2.0);
    check_single(x, zero, one, "X");
    check_single(x, one, zero, "X");
    check_single(yh, one, plus, "Y(pi/2)");
    check_single(yt, zero, plus, "Y(3pi/2)");

    GateTable t;
    t.flip_all = Operator::Identity();
    for (std::size_t q = 1; q <= kNumQubits; q++) {
        t.x[q - 1] = embed_single_qubit(x, q);
        t.y_half[q - 1] = embed_single_qubit(yh, q);
        t.y_three_half[q - 1] = embed_single_qubit(yt, q);
        t.flip_all = t.x[q - 1] * t.flip_all;
    }
    auto check_unitary = [](const Operator &u) {
        if (!is_unitary(u, 1e-12)) {
            throw std::logic_error("gate table: non-unitary entry");
        }
    };
    for (std::size_t j = 0; j < kNumQubits; j++) {
        check_unitary(t.x[j]);
        check_unitary(t.y_half[j]);
        check_unitary(t.y_three_half[j]);
    }
    check_unitary(t.flip_all);
    return t;
}

const GateTable &table() {
    static const GateTable t = build_table();
    return t;
}

}  // namespace

const Operator &gate_unitary(GateKind kind, std::size_t qubit) {
    const GateTable &t = table();
    if (kind == GateKind::kFlipAll) {
        return t.flip_all;
    }
    if (qubit < 1 || qubit > kNumQubits) {
        throw std::invalid_argument("gate_unitary: qubit must be in 1..3");
    }
    switch (kind) {
        case GateKind::kXFlip:
            return t.x[qubit - 1];
        case GateKind::kYRotHalfPi:
            return t.y_half[qubit - 1];
        case GateKind::kYRotThreeHalfPi:
            return t.y_three_half[qubit - 1];
        case GateKind::kFlipAll:
            break;
    }
    return t.flip_all;
}

const Operator &gate_unitary(const GateCommand &cmd) {
    return gate_unitary(cmd.kind, cmd.qubit);
}

DensityMatrix apply_gates(const GateList &gates, const DensityMatrix &rho) {
    Operator m = rho.matrix();
    for (const GateCommand &g : gates) {
        const Operator &u = gate_unitary(g);
        m = u * m * u.adjoint();
    }
    return DensityMatrix(m);
}

const char *mode_name(ControllerMode m) {
    switch (m) {
        case ControllerMode::kUncontrolled:
            return "uncontrolled";
        case ControllerMode::kZenoOnly:
            return "zeno_only";
        case ControllerMode::kGenerateOnly:
            return "generate_only";
        case ControllerMode::kAfiz:
            return "afiz";
        case ControllerMode::kAfizWithRecovery:
            return "afiz_with_recovery";
    }
    return "?";
}

ControllerMode parse_mode(const std::string &name) {
    for (ControllerMode m : {ControllerMode::kUncontrolled, ControllerMode::kZenoOnly, ControllerMode::kGenerateOnly,
                             ControllerMode::kAfiz, ControllerMode::kAfizWithRecovery}) {
        if (name == mode_name(m)) {
            return m;
        }
    }
    throw ConfigError("unknown controller mode '" + name + "'");
}

bool mode_measures(ControllerMode m) {
    return m != ControllerMode::kUncontrolled;
}

bool mode_generates(ControllerMode m) {
    return m == ControllerMode::kGenerateOnly || m == ControllerMode::kAfizWithRecovery;
}

const char *phase_name(Phase p) {
    switch (p) {
        case Phase::kGenerating:
            return "generating";
        case Phase::kStabilizing:
            return "stabilizing";
        case Phase::kRecovering:
            return "recovering";
    }
    return "?";
}

Phase parse_phase(const std::string &name) {
    for (Phase p : {Phase::kGenerating, Phase::kStabilizing, Phase::kRecovering}) {
        if (name == phase_name(p)) {
            return p;
        }
    }
    throw std::invalid_argument("unknown phase '" + name + "'");
}

namespace {

// Gates shared by generation and recovery for a nonzero level.
GateList feedback_gates(double level, double t) {
    auto near = [level](double x) { return std::abs(level - x) < 0.5; };
    GateList g;
    if (near(2)) {
        g = {{GateKind::kXFlip, 1, t}, {GateKind::kYRotHalfPi, 3, t}};
    } else if (near(-2)) {
        g = {{GateKind::kXFlip, 1, t}, {GateKind::kYRotThreeHalfPi, 3, t}};
    } else if (near(4)) {
        g = {{GateKind::kYRotHalfPi, 1, t}, {GateKind::kYRotHalfPi, 2, t}, {GateKind::kYRotHalfPi, 3, t}};
    } else if (near(-4)) {
        g = {{GateKind::kYRotThreeHalfPi, 1, t},
             {GateKind::kYRotThreeHalfPi, 2, t},
             {GateKind::kYRotThreeHalfPi, 3, t}};
    } else {
        throw std::invalid_argument("no feedback rule for level " + std::to_string(level));
    }
    return g;
}

bool is_zero(double level) {
    return std::abs(level) < 0.5;
}

bool is_pm4(double level) {
    return std::abs(std::abs(level) - 4) < 0.5;
}

}  // namespace

PolicyOutput generation_policy(const ControllerState &cs, const Verdict &v) {
    PolicyOutput out{{}, cs};
    if (!v.decided()) {
        return out;
    }
    double level = *v.level;
    if (is_zero(level)) {
        out.state.phase = Phase::kStabilizing;
        out.state.last_flip_time = v.decided_at;
        out.state.recovery_context = RecoveryContext::kNone;
        return out;
    }
    out.gates = feedback_gates(level, v.decided_at);
    return out;
}

PolicyOutput afiz_policy(const ControllerState &cs, double t) {
    PolicyOutput out{{}, cs};
    if (cs.phase != Phase::kStabilizing) {
        return out;
    }
    // Half a nanostep of slack so accumulated floating-point time still fires on schedule.
    if (t + 1e-9 >= cs.last_flip_time + cs.tau) {
        out.gates.push_back({GateKind::kFlipAll, 0, t});
        out.state.last_flip_time = t;
    }
    return out;
}

PolicyOutput recovery_policy(const ControllerState &cs, const Verdict &v) {
    PolicyOutput out{{}, cs};
    if (!v.decided()) {
        return out;
    }
    double level = *v.level;
    double t = v.decided_at;
    if (is_zero(level)) {
        if (cs.phase == Phase::kRecovering && cs.recovery_context == RecoveryContext::kAfterPm2) {
            // The zero branch after a +-2 recovery may be an incoherent
            // |001>/|110> mixture; flipping qubit 3 sends it to +-4 instead.
            out.gates.push_back({GateKind::kXFlip, 3, t});
            out.state.recovery_context = RecoveryContext::kNone;
            return out;
        }
        out.state.phase = Phase::kStabilizing;
        out.state.recovery_context = RecoveryContext::kNone;
        out.state.last_flip_time = t;
        return out;
    }
    out.gates = feedback_gates(level, t);
    out.state.phase = Phase::kRecovering;
    if (is_pm4(level)) {
        out.state.recovery_context = RecoveryContext::kAfterPm4;
    } else if (cs.recovery_context != RecoveryContext::kAfterPm4) {
        out.state.recovery_context = RecoveryContext::kAfterPm2;
    }
    // A +-2 after a +-4 recovery comes from the pure |+++> restart, where a
    // following zero is the coherent target, so the context is kept.
    return out;
}

Controller::Controller(ControllerMode mode, ControllerState initial) : mode_(mode), state_(initial) {
}

bool Controller::finished() const {
    return mode_ == ControllerMode::kGenerateOnly && state_.phase == Phase::kStabilizing;
}

GateList Controller::on_verdict(const Verdict &v) {
    if (!v.decided() || finished()) {
        return {};
    }
    PolicyOutput out{{}, state_};
    switch (mode_) {
        case ControllerMode::kUncontrolled:
        case ControllerMode::kZenoOnly:
        case ControllerMode::kAfiz:
            return {};
        case ControllerMode::kGenerateOnly:
            out = generation_policy(state_, v);
            break;
        case ControllerMode::kAfizWithRecovery:
            if (state_.phase == Phase::kGenerating) {
                out = generation_policy(state_, v);
            } else if (state_.phase == Phase::kStabilizing && is_zero(*v.level)) {
                return {};
            } else {
                out = recovery_policy(state_, v);
            }
            break;
    }
    state_ = out.state;
    return out.gates;
}

GateList Controller::on_tick(double t) {
    if (mode_ != ControllerMode::kAfiz && mode_ != ControllerMode::kAfizWithRecovery) {
        return {};
    }
    PolicyOutput out = afiz_policy(state_, t);
    state_ = out.state;
    return out.gates;
}

}  // namespace afiz
