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

#include "afiz/model.hpp"

#include <algorithm>
#include <cmath>

namespace afiz {

SimRates derive_rates(const PhysicalParams &p) {
    if (!(p.cavity_decay > 0)) {
        throw ConfigError("cavity decay rate kappa must be positive");
    }
    if (!(p.efficiency > 0 && p.efficiency <= 1)) {
        throw ConfigError("quantum efficiency must lie in (0, 1]");
    }
    SimRates r;
    for (std::size_t j = 0; j < kNumQubits; j++) {
        if (p.coupling[j] == 0) {
            continue;
        }
        if (p.detuning[j] == 0) {
            throw ConfigError("qubit " + std::to_string(j + 1) + ": zero detuning with nonzero coupling");
        }
        r.lambda[j] = p.coupling[j] / p.detuning[j];
        if (std::abs(r.lambda[j]) >= PhysicalParams::kMaxDispersiveRatio) {
            throw ConfigError("qubit " + std::to_string(j + 1) + ": |g/Delta| = " +
                              std::to_string(std::abs(r.lambda[j])) + " violates the dispersive guard");
        }
        r.chi[j] = p.coupling[j] * p.coupling[j] / p.detuning[j];
    }
    r.chi_bar = (r.chi[0] + r.chi[1] + r.chi[2]) / static_cast<double>(kNumQubits);
    for (std::size_t j = 0; j < kNumQubits; j++) {
        r.weight[j] = r.chi_bar != 0 ? r.chi[j] / r.chi_bar : 0.0;
        r.purcell[j] = p.cavity_decay * r.lambda[j] * r.lambda[j];
        r.decay_total[j] = p.relaxation[j] + r.purcell[j];
    }
    r.alpha = cplx{0, -2.0 * p.drive / p.cavity_decay};
    r.gamma_d = 8.0 * std::norm(r.alpha) * r.chi_bar * r.chi_bar / p.cavity_decay;
    r.gamma_m = 2.0 * p.efficiency * r.gamma_d;
    return r;
}

ModelConfig ModelConfig::with_uniform_decay(double gamma) {
    ModelConfig c;
    c.decay = {gamma, gamma, gamma};
    return c;
}

ModelConfig ModelConfig::from_physical(const PhysicalParams &p) {
    SimRates r = derive_rates(p);
    if (r.weight[0] == 0) {
        throw ConfigError("qubit 1 has zero dispersive shift; cannot normalize J_z weights");
    }
    ModelConfig c;
    double s = r.weight[0];
    for (std::size_t j = 0; j < kNumQubits; j++) {
        c.jz_weights[j] = r.weight[j] / s;
        c.decay[j] = r.decay_total[j];
        c.dephasing[j] = p.dephasing[j];
        c.z_rotation[j] = 0.5 * (p.qubit_detuning[j] + r.chi[j]) + r.chi_bar * std::norm(r.alpha) * r.weight[j];
    }
    c.gamma_d = r.gamma_d * s * s;
    c.eta = p.efficiency;
    return c;
}

void ModelConfig::validate() const {
    if (!(gamma_d >= 0) || !std::isfinite(gamma_d)) {
        throw ConfigError("gamma_d must be finite and non-negative");
    }
    if (!(eta > 0 && eta <= 1)) {
        throw ConfigError("eta must lie in (0, 1]");
    }
    for (std::size_t j = 0; j < kNumQubits; j++) {
        std::string q = "qubit " + std::to_string(j + 1);
        if (!(decay[j] >= 0) || !(dephasing[j] >= 0)) {
            throw ConfigError(q + ": relaxation and dephasing rates must be non-negative");
        }
        if (jz_weights[j] == 0 || !std::isfinite(jz_weights[j])) {
            throw ConfigError(q + ": J_z weight must be finite and nonzero");
        }
    }
}

Operator build_jz(const QubitArray &weights) {
    Operator j = Operator::Zero();
    for (std::size_t b = 0; b < kDim; b++) {
        double v = 0;
        for (std::size_t q = 1; q <= kNumQubits; q++) {
            v += weights[q - 1] * sigma_z_sign(b, q);
        }
        j(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = v;
    }
    return j;
}

std::vector<double> jz_levels(const QubitArray &weights) {
    Operator j = build_jz(weights);
    std::vector<double> levels;
    for (std::size_t b = 0; b < kDim; b++) {
        levels.push_back(j(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real());
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 levels.end());
    return levels;
}

Operator z_hamiltonian(const ModelConfig &cfg) {
    if (cfg.absorb_z_rotations) {
        return Operator::Zero();
    }
    return build_jz(cfg.z_rotation);
}

namespace {

struct ChannelOps {
    std::array<Operator, kNumQubits> lower;
    std::array<Operator, kNumQubits> z;
};

const ChannelOps &channel_ops() {
    static const ChannelOps ops = [] {
        ChannelOps o;
        for (std::size_t q = 1; q <= kNumQubits; q++) {
            o.lower[q - 1] = embed_single_qubit(pauli::lower(), q);
            o.z[q - 1] = embed_single_qubit(pauli::z(), q);
        }
        return o;
    }();
    return ops;
}

}  // namespace

Operator liouvillian_apply(const ModelConfig &cfg, const Operator &rho) {
    const ChannelOps &ops = channel_ops();
    Operator out = Operator::Zero();
    if (!cfg.absorb_z_rotations) {
        Operator h = z_hamiltonian(cfg);
        out += cplx{0, -1} * (h * rho - rho * h);
    }
    for (std::size_t j = 0; j < kNumQubits; j++) {
        if (cfg.decay[j] != 0) {
            out += cfg.decay[j] * dissipator(ops.lower[j], rho);
        }
        if (cfg.dephasing[j] != 0) {
            out += 0.5 * cfg.dephasing[j] * dissipator(ops.z[j], rho);
        }
    }
    return out;
}

Operator mean_generator_apply(const ModelConfig &cfg, const Operator &rho) {
    Operator out = liouvillian_apply(cfg, rho);
    if (cfg.gamma_d != 0) {
        out += 0.5 * cfg.gamma_d * dissipator(build_jz(cfg.jz_weights), rho);
    }
    return out;
}

const TargetStates &target_states() {
    static const TargetStates states = [] {
        Amplitudes pre = Amplitudes::Zero();
        pre(0b001) = 1;
        pre(0b110) = 1;
        Amplitudes ghz = Amplitudes::Zero();
        ghz(0b000) = 1;
        ghz(0b111) = 1;
        Amplitudes plus = Amplitudes::Constant(1.0);
        return TargetStates{PureState(pre), PureState(ghz), PureState(plus)};
    }();
    return states;
}

}  // namespace afiz
