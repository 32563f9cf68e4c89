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

#ifndef AFIZ_TEST_SUPPORT_HPP
#define AFIZ_TEST_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "afiz/qubit_algebra.hpp"

namespace afiz::testing {

// Plain Kronecker products, kept apart from the library's embedding so
// expected operators do not share code with the operators under test.
inline Operator kron3(const Matrix2 &a, const Matrix2 &b, const Matrix2 &c) {
    Operator out;
    for (int i = 0; i < 8; i++) {
        for (int j = 0; j < 8; j++) {
            out(i, j) = a(i >> 2, j >> 2) * b((i >> 1) & 1, (j >> 1) & 1) * c(i & 1, j & 1);
        }
    }
    return out;
}

inline Matrix2 m2(cplx a, cplx b, cplx c, cplx d) {
    Matrix2 m;
    m << a, b, c, d;
    return m;
}

// Index 0 is |0>, index 1 is |1>; sigma_z|1> = +|1>.
inline Matrix2 eye2() { return m2(1, 0, 0, 1); }
inline Matrix2 sx() { return m2(0, 1, 1, 0); }
inline Matrix2 sz() { return m2(-1, 0, 0, 1); }
inline Matrix2 lower2() { return m2(0, 1, 0, 0); }

inline Operator on_qubit(const Matrix2 &op, int q) {
    return kron3(q == 1 ? op : eye2(), q == 2 ? op : eye2(), q == 3 ? op : eye2());
}

inline Operator ket_bra(std::size_t i, std::size_t j) {
    Operator m = Operator::Zero();
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
    return m;
}

inline double max_abs(const Operator &m) {
    return m.cwiseAbs().maxCoeff();
}

inline Operator pre_ghz_projector() {
    Operator p = Operator::Zero();
    p(1, 1) = p(1, 6) = p(6, 1) = p(6, 6) = 0.5;
    return p;
}

inline DensityMatrix random_density(std::mt19937_64 &gen, int rank = 8) {
    std::normal_distribution<double> n;
    Eigen::Matrix<cplx, 8, Eigen::Dynamic> a(8, rank);
    for (int i = 0; i < 8; i++) {
        for (int j = 0; j < rank; j++) {
            a(i, j) = cplx{n(gen), n(gen)};
        }
    }
    Operator m = a * a.adjoint();
    return DensityMatrix(m / m.trace().real());
}

inline PureState random_pure(std::mt19937_64 &gen) {
    std::normal_distribution<double> n;
    Amplitudes a;
    for (int i = 0; i < 8; i++) {
        a(i) = cplx{n(gen), n(gen)};
    }
    return PureState(a);
}

inline std::filesystem::path scratch_dir(const std::string &name) {
    auto p = std::filesystem::temp_directory_path() / ("afiz_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace afiz::testing

#endif
