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

#include "afiz/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "afiz/controller.hpp"
#include "afiz/ensemble.hpp"
#include "afiz/filter.hpp"
#include "afiz/integrator.hpp"
#include "afiz/noise.hpp"
#include "afiz/trajectory.hpp"

namespace afiz {

namespace {

DensityMatrix random_state(NoiseSource &rng, std::uint64_t &k) {
    Operator a;
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            double re = rng.standard_normal(k++);
            a(i, j) = cplx{re, rng.standard_normal(k++)};
        }
    }
    Operator m = a * a.adjoint();
    return DensityMatrix(m / m.trace().real());
}

CheckResult timed(const std::string &name, const std::function<CheckResult()> &fn) {
    auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = fn();
    } catch (const std::exception &e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

CheckResult check_state_bounds(const RunConfig &base) {
    double worst_herm = 0, worst_trace = 0, worst_eig = 0;
    std::uint64_t checked = 0;
    std::vector<RunConfig> cases;
    RunConfig a = preset("fig4");
    a.duration = 40;
    cases.push_back(a);
    RunConfig b = a;
    b.model.eta = 0.5;
    b.model.dephasing = {0.01, 0.01, 0.01};
    b.filter.indicator = Indicator::kExpectation;
    cases.push_back(b);
    RunConfig c = a;
    c.controller.mode = ControllerMode::kGenerateOnly;
    c.model.decay = {0.02, 0.01, 0.03};
    cases.push_back(c);
    for (RunConfig &cfg : cases) {
        cfg.base_seed = base.base_seed;
        cfg.check_stride = 1;
        for (std::uint64_t i = 0; i < 2; i++) {
            run_trajectory(cfg, i, [&](const StepView &v) {
                if (v.step % 5 != 0) {
                    return;
                }
                StateReport r = validate_state(*v.rho);
                worst_herm = std::max(worst_herm, r.hermiticity_deviation);
                worst_trace = std::max(worst_trace, r.trace_deviation);
                worst_eig = std::min(worst_eig, r.min_eigenvalue);
                checked++;
            });
        }
    }
    StateTolerances tol;
    CheckResult r;
    r.passed = worst_herm <= tol.hermiticity && worst_trace <= tol.trace && worst_eig >= -tol.positivity;
    std::ostringstream ss;
    ss << checked << " states; max hermiticity deviation " << worst_herm << ", max trace deviation " << worst_trace
       << ", min eigenvalue " << worst_eig;
    r.detail = ss.str();
    return r;
}

CheckResult check_fixed_points(const RunConfig &base) {
    ModelConfig m;
    Stepper stepper(m, kDefaultDt);
    NoiseSource noise(base.base_seed, 7);
    std::vector<DensityMatrix> states;
    for (std::size_t b = 0; b < kDim; b++) {
        states.push_back(DensityMatrix::basis(b));
    }
    for (double theta : {0.3, 0.785398163397448, 1.2}) {
        Amplitudes amp = Amplitudes::Zero();
        amp(1) = std::cos(theta);
        amp(6) = cplx{0, 1} * std::sin(theta);
        states.push_back(DensityMatrix::from_pure(PureState(amp)));
    }
    double worst = 0;
    std::uint64_t k = 0;
    for (const DensityMatrix &rho0 : states) {
        DensityMatrix rho = rho0;
        for (int s = 0; s < 2000; s++) {
            DensityMatrix prev = rho;
            stepper.advance(rho, noise.wiener(k++, kDefaultDt));
            worst = std::max(worst, (rho.matrix() - prev.matrix()).cwiseAbs().maxCoeff());
        }
    }
    CheckResult r;
    r.passed = worst <= 1e-10;
    std::ostringstream ss;
    ss << states.size() << " eigenstates x 2000 steps; max per-step change " << worst;
    r.detail = ss.str();
    return r;
}

CheckResult check_gates() {
    double worst = 0;
    std::size_t n = 0;
    for (GateKind kind : {GateKind::kXFlip, GateKind::kYRotHalfPi, GateKind::kYRotThreeHalfPi}) {
        for (std::size_t q = 1; q <= kNumQubits; q++) {
            const Operator &u = gate_unitary(kind, q);
            worst = std::max(worst, (u * u.adjoint() - Operator::Identity()).cwiseAbs().maxCoeff());
            n++;
        }
    }
    const Operator &f = gate_unitary(GateKind::kFlipAll);
    worst = std::max(worst, (f * f.adjoint() - Operator::Identity()).cwiseAbs().maxCoeff());
    n++;
    CheckResult r;
    r.passed = worst <= 1e-12;
    std::ostringstream ss;
    ss << n << " gate unitaries; max |U U^dagger - I| " << worst;
    r.detail = ss.str();
    return r;
}

CheckResult check_superoperators(const RunConfig &base) {
    NoiseSource rng(base.base_seed, 11);
    std::uint64_t k = 0;
    ModelConfig m = ModelConfig::with_uniform_decay(0.05);
    m.dephasing = {0.02, 0.0, 0.01};
    const Operator jz = build_jz(m.jz_weights);
    std::vector<Operator> ls = {jz, embed_single_qubit(pauli::lower(), 1), embed_single_qubit(pauli::z(), 3)};
    double worst_trace = 0, worst_herm = 0;
    for (int i = 0; i < 50; i++) {
        DensityMatrix rho = random_state(rng, k);
        for (const Operator &l : ls) {
            worst_trace = std::max(worst_trace, std::abs(dissipator(l, rho.matrix()).trace()));
        }
        worst_trace = std::max(worst_trace, std::abs(unravel(jz, rho.matrix()).trace()));
        Operator lr = liouvillian_apply(m, rho.matrix());
        worst_trace = std::max(worst_trace, std::abs(lr.trace()));
        worst_herm = std::max(worst_herm, (lr - lr.adjoint()).cwiseAbs().maxCoeff());
    }
    CheckResult r;
    r.passed = worst_trace <= 1e-12 && worst_herm <= 1e-11;
    std::ostringstream ss;
    ss << "50 random states; max |trace| " << worst_trace << ", max anti-Hermitian part " << worst_herm;
    r.detail = ss.str();
    return r;
}

CheckResult check_reproducibility(const RunConfig &base) {
    RunConfig cfg = preset("fig4");
    cfg.base_seed = base.base_seed;
    cfg.duration = 30;
    TrajectoryResult a = run_trajectory(cfg, 3);
    TrajectoryResult b = run_trajectory(cfg, 3);
    bool same = a.samples == b.samples && a.events == b.events && a.final_state == b.final_state;

    cfg.n_trajectories = 6;
    cfg.duration = 10;
    EnsembleOptions serial;
    serial.threads = 1;
    EnsembleOptions reversed;
    reversed.threads = std::max(2u, resolve_threads(base.threads));
    for (std::uint64_t i = cfg.n_trajectories; i-- > 0;) {
        reversed.order.push_back(i);
    }
    EnsembleResult e1 = run_ensemble(cfg, serial);
    EnsembleResult e2 = run_ensemble(cfg, reversed);
    bool same_ensemble = e1.mean_fidelity == e2.mean_fidelity && e1.se_fidelity == e2.se_fidelity &&
                         e1.verdict_counts == e2.verdict_counts;
    CheckResult r;
    r.passed = same && same_ensemble;
    r.detail = std::string("repeated trajectory ") + (same ? "bit-identical" : "DIFFERS") +
               "; ensemble under reordering and threading " + (same_ensemble ? "bit-identical" : "DIFFERS");
    return r;
}

CheckResult check_filter() {
    FilterState fs;
    fs.rate = 0.5;
    fs.gamma_m = 2;
    const double dt = kDefaultDt;
    const double c = 4;
    double value = 0;
    for (int s = 0; s < static_cast<int>(5 / fs.rate / dt); s++) {
        auto [next, v] = filter_update(fs, std::sqrt(fs.gamma_m) * c * dt, dt);
        fs = next;
        value = v;
    }
    CheckResult r;
    r.passed = std::abs(value - c) <= 1e-3 * c;
    std::ostringstream ss;
    ss << "noiseless level " << c << " reads " << value << " after 5/gamma_ft";
    r.detail = ss.str();
    return r;
}

CheckResult check_noise() {
    auto out = philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
    std::array<std::uint32_t, 4> expect = {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1};
    NoiseSource a(5, 9), b(5, 9);
    std::vector<double> forward;
    for (std::uint64_t s = 0; s < 1000; s++) {
        forward.push_back(a.wiener(s, 1e-3));
    }
    bool stream_ok = true;
    for (std::uint64_t s = 1000; s-- > 0;) {
        stream_ok = stream_ok && b.wiener(s, 1e-3) == forward[s];
    }
    CheckResult r;
    r.passed = out == expect && stream_ok;
    r.detail = std::string("Philox4x32-10 known answer ") + (out == expect ? "matches" : "DIFFERS") +
               "; seeded stream " + (stream_ok ? "reproducible" : "NOT reproducible");
    return r;
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const RunConfig &base) {
    std::vector<CheckResult> out;
    out.push_back(timed("state_bounds", [&] { return check_state_bounds(base); }));
    out.push_back(timed("eigenstate_fixed_point", [&] { return check_fixed_points(base); }));
    out.push_back(timed("gate_unitarity", [] { return check_gates(); }));
    out.push_back(timed("superoperator_trace", [&] { return check_superoperators(base); }));
    out.push_back(timed("filter_settling", [] { return check_filter(); }));
    out.push_back(timed("noise_reproducibility", [] { return check_noise(); }));
    out.push_back(timed("seeded_reproducibility", [&] { return check_reproducibility(base); }));
    return out;
}

}  // namespace afiz
