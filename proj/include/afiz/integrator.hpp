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

#ifndef AFIZ_INTEGRATOR_HPP
#define AFIZ_INTEGRATOR_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "afiz/model.hpp"
#include "afiz/noise.hpp"
#include "afiz/qubit_algebra.hpp"

namespace afiz {

// Itô trajectory equation integrated here:
//   d rho = [L rho + (gamma_d/2) D[J] rho] dt + (sqrt(gamma_m)/2) H[J] rho dW
//   dI    = sqrt(gamma_m) Tr[J rho] dt + dW           (rho = pre-step state)

enum class Scheme {
    /// Measurement applied as the diagonal Kraus operator
    ///   M_b = exp((sqrt(gamma_m)/2) J_b dI - (gamma_m/4) J_b^2 dt),
    /// followed by the exact relaxation and dephasing channels for dt, then
    /// trace renormalization. Weak order one, completely positive by construction.
    kSplitKraus,
    /// Literal explicit Euler-Maruyama update, then symmetrization and trace
    /// renormalization. Not positivity preserving.
    kEulerMaruyama,
};

const char *scheme_name(Scheme s);
Scheme parse_scheme(const std::string &name);

inline constexpr double kDefaultDt = 1e-3;
inline constexpr double kMaxStableDt = 1e-2;

struct StepInput {
    DensityMatrix rho;
    double dt = kDefaultDt;
    double dW = 0;
};

struct StepResult {
    DensityMatrix rho_next;
    double dI = 0;
};

/// Thrown when a trajectory leaves the set of valid density matrices.
class IntegrationError : public std::runtime_error {
   public:
    IntegrationError(const std::string &what, StateReport report)
        : std::runtime_error(what), report_(std::move(report)) {
    }
    const StateReport &report() const {
        return report_;
    }

   private:
    StateReport report_;
};

/// Checks dt > 0 and dt <= max_dt; throws std::invalid_argument otherwise.
void check_time_step(double dt, double max_dt = kMaxStableDt);

/// One step of the trajectory equation. Positivity is checked after every
/// step; a violation beyond `tol` throws IntegrationError with a step-size advisory.
StepResult step(const ModelConfig &cfg, const StepInput &in, Scheme scheme = Scheme::kSplitKraus,
                const StateTolerances &tol = {});

/// Precomputed per-configuration step kernel for long runs.
class Stepper {
   public:
    Stepper(const ModelConfig &cfg, double dt, Scheme scheme = Scheme::kSplitKraus);

    /// Advances `rho` in place by one step with Wiener increment `dW`; returns dI.
    double advance(DensityMatrix &rho, double dW) const;

    double dt() const {
        return dt_;
    }
    Scheme scheme() const {
        return scheme_;
    }
    const ModelConfig &config() const {
        return cfg_;
    }
    /// Tr[J rho] using the diagonal of J.
    double jz_expectation(const DensityMatrix &rho) const;

   private:
    double advance_split_kraus(DensityMatrix &rho, double dW) const;
    double advance_euler_maruyama(DensityMatrix &rho, double dW) const;

    ModelConfig cfg_;
    double dt_;
    Scheme scheme_;
    double sqrt_gamma_m_;
    std::array<double, kDim> jz_{};
    std::array<cplx, kDim> phase_{};
    bool real_kraus_ = true;  // no coherent z rotation in the step
    std::array<double, kDim * kDim> dephase_{};  // column-major, like Operator

    /// Relaxation of all three qubits over dt as one linear map:
    /// rho'(dst) = sum weight * rho(src), indices into column-major storage.
    struct DampingTerm {
        std::uint8_t dst;
        std::uint8_t src;
        double weight;
    };
    std::vector<DampingTerm> damping_;
    bool has_damping_ = false;
    Operator jz_op_;
};

struct SegmentSample {
    std::uint64_t step = 0;  // global step index of the completed step
    double t = 0;            // time at the end of the step
    double dI = 0;
    double fidelity = 0;     // to the pre-GHZ state
    double jz = 0;           // Tr[J rho] after the step
    const DensityMatrix *state = nullptr;  // valid only during the callback
};

using SegmentSink = std::function<void(const SegmentSample &)>;

struct SegmentOptions {
    double dt = kDefaultDt;
    double max_dt = kMaxStableDt;
    Scheme scheme = Scheme::kSplitKraus;
    StateTolerances tolerances{};
    /// Steps between positivity checks for kSplitKraus (every step for Euler-Maruyama).
    std::uint64_t check_stride = 1000;
    double t0 = 0;
    std::uint64_t first_step = 0;
};

/// Integrates ceil(duration / dt) steps from `rho0`, calling `sink` after every step.
DensityMatrix run_segment(const ModelConfig &cfg, const DensityMatrix &rho0, double duration, NoiseSource &noise,
                          const SegmentSink &sink, const SegmentOptions &opt = {});

/// Number of steps used to cover `duration` with step `dt`.
std::uint64_t steps_for(double duration, double dt);

/// No-jump evolution of alpha|001> + beta|110> under uniform decay gamma:
/// (alpha e^{-gamma t/2}, beta e^{-gamma t}) renormalized.
std::pair<cplx, cplx> null_result_amplitudes(cplx alpha0, cplx beta0, double gamma, double t);

/// Deterministic evolution rho' = L rho + (gamma_d/2) D[J] rho by classical RK4
/// on dense matrices. Independent of Stepper; serves as the ensemble-mean oracle.
class MeanEvolution {
   public:
    explicit MeanEvolution(const ModelConfig &cfg);

    Operator derivative(const Operator &rho) const;
    void rk4_step(Operator &rho, double h) const;
    /// Integrates from rho over `duration` with at most `h` per step.
    Operator propagate(const Operator &rho, double duration, double h) const;
    /// The linear map of `repeats` RK4 steps of size h acting on the
    /// column-major vectorized density matrix.
    Eigen::MatrixXcd step_map(double h, std::uint64_t repeats = 1) const;

   private:
    ModelConfig cfg_;
    Operator h_;
    std::array<Operator, kNumQubits> lower_;
    std::array<Operator, kNumQubits> lower_dl_;
    std::array<Operator, kNumQubits> z_;
    Operator jz_;
    Operator jz2_;
};

}  // namespace afiz

#endif
