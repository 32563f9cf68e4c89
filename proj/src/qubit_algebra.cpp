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

#include "afiz/qubit_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace afiz {

std::string basis_label(std::size_t b) {
    std::string s = "|";
    for (std::size_t q = 1; q <= kNumQubits; q++) {
        s += qubit_bit(b, q) ? '1' : '0';
    }
    return s + ">";
}

namespace pauli {
// Row/column order is (|0>, |1>).
Matrix2 identity() {
    return Matrix2::Identity();
}
Matrix2 x() {
    Matrix2 m;
    m << 0, 1, 1, 0;
    return m;
}
Matrix2 y() {
    const cplx i{0, 1};
    Matrix2 m;
    m << 0, i, -i, 0;
    return m;
}
Matrix2 z() {
    Matrix2 m;
    m << -1, 0, 0, 1;
    return m;
}
Matrix2 lower() {
    Matrix2 m;
    m << 0, 1, 0, 0;
    return m;
}
Matrix2 raise() {
    Matrix2 m;
    m << 0, 0, 1, 0;
    return m;
}
}  // namespace pauli

PureState::PureState(const Amplitudes &amplitudes) : amps_(amplitudes) {
    double n = amps_.norm();
    if (!(n > 0) || !std::isfinite(n)) {
        throw std::invalid_argument("PureState: amplitudes must have finite nonzero norm");
    }
    amps_ /= n;
}

PureState PureState::basis(std::size_t b) {
    if (b >= kDim) {
        throw std::invalid_argument("PureState::basis: index out of range");
    }
    Amplitudes a = Amplitudes::Zero();
    a(static_cast<Eigen::Index>(b)) = 1;
    return PureState(a);
}

Operator PureState::projector() const {
    return amps_ * amps_.adjoint();
}

DensityMatrix DensityMatrix::from_pure(const PureState &psi) {
    return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::basis(std::size_t b) {
    return from_pure(PureState::basis(b));
}

DensityMatrix DensityMatrix::maximally_mixed() {
    return DensityMatrix(Operator::Identity() / static_cast<double>(kDim));
}

void DensityMatrix::symmetrize_and_normalize() {
    Operator h = 0.5 * (m_ + m_.adjoint());
    double tr = h.trace().real();
    m_ = h / tr;
}

Operator embed_single_qubit(const Matrix2 &op, std::size_t qubit) {
    if (qubit < 1 || qubit > kNumQubits) {
        throw std::invalid_argument("embed_single_qubit: qubit index must be in 1..3, got " + std::to_string(qubit));
    }
    Operator out = Operator::Zero();
    std::size_t mask = qubit_mask(qubit);
    for (std::size_t r = 0; r < kDim; r++) {
        for (std::size_t c = 0; c < kDim; c++) {
            // The other two qubits must agree for the identity factors.
            if ((r & ~mask) != (c & ~mask)) {
                continue;
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                op(qubit_bit(r, qubit), qubit_bit(c, qubit));
        }
    }
    return out;
}

Operator dissipator(const Operator &L, const Operator &rho) {
    Operator LdL = L.adjoint() * L;
    return L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL);
}

Operator unravel(const Operator &L, const Operator &rho) {
    cplx t = ((L + L.adjoint()) * rho).trace();
    return L * rho + rho * L.adjoint() - t * rho;
}

bool is_hermitian(const Operator &A, double tol) {
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Operator &U, double tol) {
    return (U.adjoint() * U - Operator::Identity()).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix apply_unitary(const Operator &U, const DensityMatrix &rho) {
    if (!is_unitary(U, 1e-10)) {
        throw std::invalid_argument("apply_unitary: operator is not unitary");
    }
    return DensityMatrix(U * rho.matrix() * U.adjoint());
}

double fidelity(const DensityMatrix &rho, const PureState &target) {
    const Amplitudes &psi = target.amplitudes();
    double f = (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
}

double expectation(const Operator &A, const DensityMatrix &rho) {
    return (A * rho.matrix()).trace().real();
}

std::string StateReport::describe() const {
    std::ostringstream ss;
    ss << "hermiticity_deviation=" << hermiticity_deviation << (hermitian_ok ? "" : " (VIOLATION)")
       << " trace_deviation=" << trace_deviation << (trace_ok ? "" : " (VIOLATION)")
       << " min_eigenvalue=" << min_eigenvalue << (positive_ok ? "" : " (VIOLATION)");
    return ss.str();
}

StateReport validate_state(const DensityMatrix &rho, const StateTolerances &tol) {
    StateReport r;
    const Operator &m = rho.matrix();
    r.hermiticity_deviation = (m - m.adjoint()).cwiseAbs().maxCoeff();
    r.trace_deviation = std::abs(m.trace() - cplx{1, 0});
    Operator h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(h, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    r.hermitian_ok = r.hermiticity_deviation <= tol.hermiticity;
    r.trace_ok = r.trace_deviation <= tol.trace;
    r.positive_ok = r.min_eigenvalue >= -tol.positivity;
    return r;
}

}  // namespace afiz
