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

#include "afiz/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace afiz {

const char *scheme_name(Scheme s) {
    switch (s) {
        case Scheme::kSplitKraus:
            return "split_kraus";
        case Scheme::kEulerMaruyama:
            return "euler_maruyama";
    }
    return "?";
}

Scheme parse_scheme(const std::string &name) {
    if (name == "split_kraus") {
        return Scheme::kSplitKraus;
    }
    if (name == "euler_maruyama") {
        return Scheme::kEulerMaruyama;
    }
    throw ConfigError("unknown integration scheme '" + name + "'");
}

void check_time_step(double dt, double max_dt) {
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be positive");
    }
    if (dt > max_dt) {
        std::ostringstream ss;
        ss << "time step " << dt << " exceeds the stability limit " << max_dt;
        throw std::invalid_argument(ss.str());
    }
}

namespace {

constexpr double kFlushBelow = 1e-150;

[[noreturn]] void throw_positivity(const StateReport &report, double dt, std::uint64_t step_index) {
    std::ostringstream ss;
    ss << "state left the valid set at step " << step_index << ": " << report.describe()
       << "; reduce dt (currently " << dt << ")";
    throw IntegrationError(ss.str(), report);
}

}  // namespace

Stepper::Stepper(const ModelConfig &cfg, double dt, Scheme scheme)
    : cfg_(cfg), dt_(dt), scheme_(scheme), sqrt_gamma_m_(std::sqrt(cfg.gamma_m())) {
    cfg_.validate();
    check_time_step(dt, std::numeric_limits<double>::infinity());
    jz_op_ = build_jz(cfg_.jz_weights);
    Operator h = z_hamiltonian(cfg_);
    for (std::size_t b = 0; b < kDim; b++) {
        jz_[b] = jz_op_(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real();
        double hb = h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real();
        phase_[b] = std::polar(1.0, -hb * dt);
    }
    for (std::size_t b = 0; b < kDim; b++) {
        real_kraus_ = real_kraus_ && phase_[b] == cplx{1, 0};
    }
    // Unmonitored part of the measurement dephasing plus intrinsic dephasing,
    // both diagonal in the computational basis and integrated exactly.
    double unmonitored = 0.5 * cfg_.gamma_d * (1.0 - cfg_.eta);
    for (std::size_t i = 0; i < kDim; i++) {
        for (std::size_t k = 0; k < kDim; k++) {
            double d = jz_[i] - jz_[k];
            double rate = 0.5 * unmonitored * d * d;
            for (std::size_t q = 1; q <= kNumQubits; q++) {
                if (qubit_bit(i, q) != qubit_bit(k, q)) {
                    rate += cfg_.dephasing[q - 1];
                }
            }
            dephase_[i + kDim * k] = std::exp(-rate * dt);
        }
    }

    // Per qubit: rho_00 += p rho_11, rho_11 *= 1 - p, coherences *= sqrt(1 - p).
    std::array<double, kNumQubits> jump{};
    for (std::size_t j = 0; j < kNumQubits; j++) {
        jump[j] = -std::expm1(-cfg_.decay[j] * dt);
        has_damping_ = has_damping_ || jump[j] > 0;
    }
    for (std::size_t i = 0; i < kDim; i++) {
        for (std::size_t k = 0; k < kDim; k++) {
            double scale = 1;
            std::size_t both_zero = 0;
            for (std::size_t q = 1; q <= kNumQubits; q++) {
                int excited = qubit_bit(i, q) + qubit_bit(k, q);
                if (excited == 2) {
                    scale *= 1 - jump[q - 1];
                } else if (excited == 1) {
                    scale *= std::sqrt(1 - jump[q - 1]);
                } else {
                    both_zero |= qubit_mask(q);
                }
            }
            // Every subset of the jointly unexcited qubits may have been fed by a decay.
            for (std::size_t sub = both_zero;; sub = (sub - 1) & both_zero) {
                double w = scale;
                for (std::size_t q = 1; q <= kNumQubits; q++) {
                    if (sub & qubit_mask(q)) {
                        w *= jump[q - 1];
                    }
                }
                if (w != 0) {
                    damping_.push_back({static_cast<std::uint8_t>(i + kDim * k),
                                        static_cast<std::uint8_t>((i | sub) + kDim * (k | sub)), w});
                }
                if (sub == 0) {
                    break;
                }
            }
        }
    }
}

double Stepper::jz_expectation(const DensityMatrix &rho) const {
    double s = 0;
    for (std::size_t b = 0; b < kDim; b++) {
        s += jz_[b] * rho(b, b).real();
    }
    return s;
}

double Stepper::advance(DensityMatrix &rho, double dW) const {
    if (scheme_ == Scheme::kSplitKraus) {
        return advance_split_kraus(rho, dW);
    }
    return advance_euler_maruyama(rho, dW);
}

double Stepper::advance_split_kraus(DensityMatrix &rho, double dW) const {
    const double dt = dt_;
    const double dI = sqrt_gamma_m_ * jz_expectation(rho) * dt + dW;
    cplx *m = rho.matrix().data();

    const double gm = cfg_.gamma_m();
    std::array<double, kDim> kraus;
    for (std::size_t b = 0; b < kDim; b++) {
        kraus[b] = std::exp(0.5 * sqrt_gamma_m_ * jz_[b] * dI - 0.25 * gm * jz_[b] * jz_[b] * dt);
    }
    // std::complex guarantees the (re, im) array layout; plain doubles keep
    // the compiler away from the generic complex multiply.
    double *d = reinterpret_cast<double *>(m);
    if (real_kraus_) {
        for (std::size_t k = 0; k < kDim; k++) {
            for (std::size_t i = 0; i < kDim; i++) {
                const std::size_t e = i + kDim * k;
                const double f = kraus[i] * kraus[k] * dephase_[e];
                d[2 * e] *= f;
                d[2 * e + 1] *= f;
            }
        }
    } else {
        for (std::size_t k = 0; k < kDim; k++) {
            for (std::size_t i = 0; i < kDim; i++) {
                m[i + kDim * k] *= (kraus[i] * kraus[k] * dephase_[i + kDim * k]) * (phase_[i] * std::conj(phase_[k]));
            }
        }
    }

    if (has_damping_) {
        std::array<double, 2 * kDim * kDim> out{};
        for (const DampingTerm &term : damping_) {
            out[2 * term.dst] += term.weight * d[2 * term.src];
            out[2 * term.dst + 1] += term.weight * d[2 * term.src + 1];
        }
        std::copy(out.begin(), out.end(), d);
    }

    double tr = 0;
    for (std::size_t b = 0; b < kDim; b++) {
        tr += d[2 * b * (kDim + 1)];
    }
    const double inv = 1.0 / tr;
    for (std::size_t e = 0; e < 2 * kDim * kDim; e++) {
        // Coherences between collapsed branches shrink geometrically; flushing
        // them before they turn subnormal keeps the step at full speed.
        const double v = d[e] * inv;
        d[e] = std::abs(v) < kFlushBelow ? 0.0 : v;
    }
    return dI;
}

double Stepper::advance_euler_maruyama(DensityMatrix &rho, double dW) const {
    const Operator &r = rho.matrix();
    const double dI = sqrt_gamma_m_ * jz_expectation(rho) * dt_ + dW;
    Operator drift = liouvillian_apply(cfg_, r) + 0.5 * cfg_.gamma_d * dissipator(jz_op_, r);
    Operator next = r + drift * dt_ + (0.5 * sqrt_gamma_m_ * dW) * unravel(jz_op_, r);
    rho = DensityMatrix(next);
    rho.symmetrize_and_normalize();
    return dI;
}

StepResult step(const ModelConfig &cfg, const StepInput &in, Scheme scheme, const StateTolerances &tol) {
    check_time_step(in.dt);
    Stepper stepper(cfg, in.dt, scheme);
    StepResult out{in.rho, 0};
    out.dI = stepper.advance(out.rho_next, in.dW);
    StateReport report = validate_state(out.rho_next, tol);
    if (!report.ok()) {
        throw_positivity(report, in.dt, 0);
    }
    return out;
}

std::uint64_t steps_for(double duration, double dt) {
    if (!(duration > 0)) {
        return 0;
    }
    // The small slack keeps e.g. 10 / 1e-3 from rounding up to 10001.
    return static_cast<std::uint64_t>(std::ceil(duration / dt - 1e-9));
}

DensityMatrix run_segment(const ModelConfig &cfg, const DensityMatrix &rho0, double duration, NoiseSource &noise,
                          const SegmentSink &sink, const SegmentOptions &opt) {
    if (duration < 0) {
        throw std::invalid_argument("run_segment: duration must be non-negative");
    }
    check_time_step(opt.dt, opt.max_dt);
    Stepper stepper(cfg, opt.dt, opt.scheme);
    const PureState &target = target_states().pre_ghz;
    const std::uint64_t n = steps_for(duration, opt.dt);
    const std::uint64_t stride =
        opt.scheme == Scheme::kEulerMaruyama ? 1 : std::max<std::uint64_t>(opt.check_stride, 1);

    DensityMatrix rho = rho0;
    for (std::uint64_t s = 0; s < n; s++) {
        const std::uint64_t global = opt.first_step + s;
        double dI = stepper.advance(rho, noise.wiener(global, opt.dt));
        if ((s + 1) % stride == 0 || s + 1 == n) {
            StateReport report = validate_state(rho, opt.tolerances);
            if (!report.ok()) {
                throw_positivity(report, opt.dt, global);
            }
        }
        if (sink) {
            SegmentSample sample;
            sample.step = global;
            sample.t = opt.t0 + static_cast<double>(s + 1) * opt.dt;
            sample.dI = dI;
            sample.fidelity = fidelity(rho, target);
            sample.jz = stepper.jz_expectation(rho);
            sample.state = &rho;
            sink(sample);
        }
    }
    return rho;
}

std::pair<cplx, cplx> null_result_amplitudes(cplx alpha0, cplx beta0, double gamma, double t) {
    cplx a = alpha0 * std::exp(-0.5 * gamma * t);
    cplx b = beta0 * std::exp(-gamma * t);
    double n = std::sqrt(std::norm(a) + std::norm(b));
    return {a / n, b / n};
}

MeanEvolution::MeanEvolution(const ModelConfig &cfg) : cfg_(cfg) {
    cfg_.validate();
    h_ = z_hamiltonian(cfg_);
    for (std::size_t q = 1; q <= kNumQubits; q++) {
        lower_[q - 1] = embed_single_qubit(pauli::lower(), q);
        lower_dl_[q - 1] = lower_[q - 1].adjoint() * lower_[q - 1];
        z_[q - 1] = embed_single_qubit(pauli::z(), q);
    }
    jz_ = build_jz(cfg_.jz_weights);
    jz2_ = jz_ * jz_;
}

Operator MeanEvolution::derivative(const Operator &rho) const {
    Operator out = Operator::Zero();
    if (!cfg_.absorb_z_rotations) {
        out += cplx{0, -1} * (h_ * rho - rho * h_);
    }
    for (std::size_t j = 0; j < kNumQubits; j++) {
        if (cfg_.decay[j] != 0) {
            out += cfg_.decay[j] *
                   (lower_[j] * rho * lower_[j].adjoint() - 0.5 * (lower_dl_[j] * rho + rho * lower_dl_[j]));
        }
        if (cfg_.dephasing[j] != 0) {
            out += 0.5 * cfg_.dephasing[j] * (z_[j] * rho * z_[j] - rho);
        }
    }
    if (cfg_.gamma_d != 0) {
        out += 0.5 * cfg_.gamma_d * (jz_ * rho * jz_ - 0.5 * (jz2_ * rho + rho * jz2_));
    }
    return out;
}

void MeanEvolution::rk4_step(Operator &rho, double h) const {
    Operator k1 = derivative(rho);
    Operator k2 = derivative(rho + 0.5 * h * k1);
    Operator k3 = derivative(rho + 0.5 * h * k2);
    Operator k4 = derivative(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Operator MeanEvolution::propagate(const Operator &rho, double duration, double h) const {
    Operator r = rho;
    if (!(duration > 0)) {
        return r;
    }
    std::uint64_t n = steps_for(duration, h);
    double hh = duration / static_cast<double>(n);
    if (n <= 64) {
        for (std::uint64_t s = 0; s < n; s++) {
            rk4_step(r, hh);
        }
        return r;
    }
    // Square and multiply on the one-step map.
    Eigen::MatrixXcd base = step_map(hh);
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(r.data(), kDim * kDim);
    for (; n > 0; n >>= 1) {
        if (n & 1) {
            v = base * v;
        }
        if (n > 1) {
            base = base * base;
        }
    }
    return Eigen::Map<const Operator>(v.data());
}

Eigen::MatrixXcd MeanEvolution::step_map(double h, std::uint64_t repeats) const {
    const Eigen::Index n = kDim * kDim;
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index c = 0; c < n; c++) {
        Operator e = Operator::Zero();
        e.data()[c] = 1.0;
        for (std::uint64_t k = 0; k < repeats; k++) {
            rk4_step(e, h);
        }
        m.col(c) = Eigen::Map<const Eigen::VectorXcd>(e.data(), n);
    }
    return m;
}

}  // namespace afiz
