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

#ifndef AFIZ_MODEL_HPP
#define AFIZ_MODEL_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "afiz/qubit_algebra.hpp"

namespace afiz {

using QubitArray = std::array<double, kNumQubits>;

/// Raised for inconsistent physical or run configuration.
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Device parameters of three dispersively coupled qubits and a driven cavity.
/// All rates share one (arbitrary) angular-frequency unit.
struct PhysicalParams {
    QubitArray coupling{};       // g_j
    QubitArray detuning{};       // Delta_j = omega_r - Omega_j
    double cavity_decay = 1.0;   // kappa
    double drive = 0.0;          // epsilon
    QubitArray relaxation{};     // gamma_j (intrinsic)
    QubitArray dephasing{};      // gamma_phi_j
    QubitArray qubit_detuning{}; // omega_j in the drive frame
    double efficiency = 1.0;     // eta

    /// Dispersive validity guard: |g_j / Delta_j| must stay below this.
    static constexpr double kMaxDispersiveRatio = 0.2;
};

struct SimRates {
    QubitArray chi{};          // g^2 / Delta
    QubitArray lambda{};       // g / Delta
    QubitArray weight{};       // chi_j / chi_bar
    double chi_bar = 0;
    cplx alpha{};              // -2 i epsilon / kappa
    double gamma_d = 0;        // 8 |alpha|^2 chi_bar^2 / kappa
    double gamma_m = 0;        // 2 eta gamma_d
    QubitArray purcell{};      // kappa lambda^2
    QubitArray decay_total{};  // gamma_j + purcell_j
};

/// Throws ConfigError naming the offending qubit when the dispersive guard fails.
SimRates derive_rates(const PhysicalParams &p);

/// Rates entering the trajectory equation. Time is measured in units where
/// gamma_d is given explicitly (presets use gamma_d = 1).
struct ModelConfig {
    double gamma_d = 1.0;
    double eta = 1.0;
    QubitArray decay{};         // total relaxation rate per qubit
    QubitArray dephasing{};     // gamma_phi per qubit
    QubitArray jz_weights{1.0, 1.0, 2.0};
    QubitArray z_rotation{};    // H = sum_j z_rotation_j sigma_j^z
    bool absorb_z_rotations = true;

    double gamma_m() const {
        return 2.0 * eta * gamma_d;
    }
    bool has_measurement() const {
        return gamma_d > 0;
    }

    /// Same decay rate on every qubit, everything else default.
    static ModelConfig with_uniform_decay(double gamma);

    /// Builds the configuration from device parameters. The weight pattern
    /// chi_j / chi_1 becomes jz_weights and chi_1 / chi_bar is absorbed into
    /// gamma_d, so a 1:1:2 device yields weights (1, 1, 2).
    static ModelConfig from_physical(const PhysicalParams &p);

    /// Throws ConfigError on negative rates, eta outside (0, 1], or a zero weight.
    void validate() const;
};

/// sum_j w_j sigma_j^z.
Operator build_jz(const QubitArray &weights);

/// Distinct eigenvalues of build_jz(weights), ascending.
std::vector<double> jz_levels(const QubitArray &weights);

/// Qubit-only Hamiltonian sum_j h_j sigma_j^z (zero when rotations are absorbed).
Operator z_hamiltonian(const ModelConfig &cfg);

/// Deterministic Liouvillian: -i[H, rho] + sum gamma_j D[sigma_j^-] rho
/// + sum (gamma_phi_j / 2) D[sigma_j^z] rho.
Operator liouvillian_apply(const ModelConfig &cfg, const Operator &rho);

/// Liouvillian plus the measurement dephasing (gamma_d / 2) D[J_z] rho; the
/// generator of the unconditional (ensemble-mean) evolution.
Operator mean_generator_apply(const ModelConfig &cfg, const Operator &rho);

struct TargetStates {
    PureState pre_ghz;         // (|001> + |110>) / sqrt 2
    PureState ghz;             // (|000> + |111>) / sqrt 2
    PureState plus_plus_plus;  // equal superposition of all 8 basis states
};

const TargetStates &target_states();

}  // namespace afiz

#endif
