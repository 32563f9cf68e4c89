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

#ifndef AFIZ_QUBIT_ALGEBRA_HPP
#define AFIZ_QUBIT_ALGEBRA_HPP

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

namespace afiz {

// Basis convention used everywhere in this library:
//   index b in [0, 8) encodes |q1 q2 q3> with q1 the most significant bit.
//   sigma_z|1> = +|1>, sigma_z|0> = -|0>, sigma_minus|1> = |0>.
// Qubits are numbered 1..3.

using cplx = std::complex<double>;

inline constexpr std::size_t kNumQubits = 3;
inline constexpr std::size_t kDim = 8;

using Matrix2 = Eigen::Matrix<cplx, 2, 2>;
using Operator = Eigen::Matrix<cplx, 8, 8>;
using Amplitudes = Eigen::Matrix<cplx, 8, 1>;

/// Bit mask selecting qubit `qubit` (1..3) inside a basis index.
constexpr std::size_t qubit_mask(std::size_t qubit) {
    return std::size_t{1} << (kNumQubits - qubit);
}

/// Value (0 or 1) of qubit `qubit` in basis state `b`.
constexpr int qubit_bit(std::size_t b, std::size_t qubit) {
    return (b & qubit_mask(qubit)) ? 1 : 0;
}

/// Eigenvalue of sigma_z on qubit `qubit` for basis state `b`.
constexpr double sigma_z_sign(std::size_t b, std::size_t qubit) {
    return qubit_bit(b, qubit) ? 1.0 : -1.0;
}

/// Renders a basis index as "|q1q2q3>".
std::string basis_label(std::size_t b);

namespace pauli {
Matrix2 identity();
Matrix2 x();
/// sigma_y in the |1> = up convention: sigma_y|1> = i|0>, sigma_y|0> = -i|1>.
Matrix2 y();
Matrix2 z();
/// Lowering operator: |1> -> |0>.
Matrix2 lower();
/// Raising operator: |0> -> |1>.
Matrix2 raise();
}  // namespace pauli

/// Normalized three-qubit pure state.
class PureState {
   public:
    /// Normalizes `amplitudes`; throws std::invalid_argument for the zero vector.
    explicit PureState(const Amplitudes &amplitudes);

    static PureState basis(std::size_t b);

    const Amplitudes &amplitudes() const {
        return amps_;
    }
    cplx operator[](std::size_t b) const {
        return amps_(static_cast<Eigen::Index>(b));
    }
    Operator projector() const;

   private:
    Amplitudes amps_;
};

/// Conditional state of the three qubits.
///
/// Construction does not validate; call validate_state() for a report. The
/// integrator keeps instances Hermitian and trace one at every step boundary.
class DensityMatrix {
   public:
    DensityMatrix() : m_(Operator::Zero()) {
    }
    explicit DensityMatrix(const Operator &m) : m_(m) {
    }

    static DensityMatrix from_pure(const PureState &psi);
    static DensityMatrix basis(std::size_t b);
    static DensityMatrix maximally_mixed();

    const Operator &matrix() const {
        return m_;
    }
    Operator &matrix() {
        return m_;
    }
    cplx operator()(std::size_t i, std::size_t k) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    }

    double trace() const {
        return m_.trace().real();
    }
    /// Replaces the matrix with (rho + rho^dagger) / 2 divided by its trace.
    void symmetrize_and_normalize();

   private:
    Operator m_;
};

/// I (x) ... (x) op (x) ... (x) I with `op` on qubit `qubit` (1..3).
/// Throws std::invalid_argument when `qubit` is out of range.
Operator embed_single_qubit(const Matrix2 &op, std::size_t qubit);

/// L rho L^dagger - (1/2){L^dagger L, rho}.
Operator dissipator(const Operator &L, const Operator &rho);

/// L rho + rho L^dagger - Tr[(L + L^dagger) rho] rho.
Operator unravel(const Operator &L, const Operator &rho);

/// U rho U^dagger. Throws std::invalid_argument if U is not unitary to 1e-10.
DensityMatrix apply_unitary(const Operator &U, const DensityMatrix &rho);

/// <psi|rho|psi>, clamped to [0, 1].
double fidelity(const DensityMatrix &rho, const PureState &target);

/// Tr[A rho] for Hermitian A (imaginary residue discarded).
double expectation(const Operator &A, const DensityMatrix &rho);

bool is_hermitian(const Operator &A, double tol);
bool is_unitary(const Operator &U, double tol);

struct StateTolerances {
    double hermiticity = 1e-10;
    double trace = 1e-9;
    double positivity = 1e-8;
};

struct StateReport {
    double hermiticity_deviation = 0;  // max_ij |rho_ij - conj(rho_ji)|
    double trace_deviation = 0;        // |Tr rho - 1|
    double min_eigenvalue = 0;         // of the Hermitian part
    bool hermitian_ok = true;
    bool trace_ok = true;
    bool positive_ok = true;

    bool ok() const {
        return hermitian_ok && trace_ok && positive_ok;
    }
    std::string describe() const;
};

StateReport validate_state(const DensityMatrix &rho, const StateTolerances &tol = {});

}  // namespace afiz

#endif
