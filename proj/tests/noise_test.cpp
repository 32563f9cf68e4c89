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


#include <doctest.h>

#include <cmath>
#include <vector>

#include "afiz/noise.hpp"

using namespace afiz;

TEST_SUITE("noise") {

TEST_CASE("Philox4x32-10 known answers") {
    // Published test vectors of the Random123 reference implementation.
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and randomly accessible") {
    NoiseSource a(42, 3), b(42, 3);
    std::vector<double> fwd;
    for (std::uint64_t s = 0; s < 101; s++) {
        fwd.push_back(a.standard_normal(s));
    }
    for (std::uint64_t s : {57u, 3u, 100u, 2u, 58u, 0u, 99u}) {
        CHECK(b.standard_normal(s) == fwd[s]);
    }
    NoiseSource c(42, 4), d(43, 3);
    int same_stream = 0, same_seed = 0;
    for (std::uint64_t s = 0; s < 100; s++) {
        same_stream += c.standard_normal(s) == fwd[s];
        same_seed += d.standard_normal(s) == fwd[s];
    }
    CHECK(same_stream == 0);
    CHECK(same_seed == 0);
    CHECK(a.seed() == 42);
    CHECK(a.stream_index() == 3);
}

TEST_CASE("standard normal moments") {
    NoiseSource n(7, 0);
    const int count = 200000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (int s = 0; s < count; s++) {
        double x = n.standard_normal(static_cast<std::uint64_t>(s));
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    m1 /= count;
    m2 /= count;
    m4 /= count;
    // Five standard errors of each moment estimate.
    CHECK(std::abs(m1) < 5 * std::sqrt(1.0 / count));
    CHECK(std::abs(m2 - 1) < 5 * std::sqrt(2.0 / count));
    CHECK(std::abs(m4 - 3) < 5 * std::sqrt(96.0 / count));
}

TEST_CASE("wiener increments scale with sqrt dt") {
    NoiseSource a(1, 1), b(1, 1);
    for (std::uint64_t s = 0; s < 10; s++) {
        CHECK(a.wiener(s, 0.04) == doctest::Approx(0.2 * b.standard_normal(s)).epsilon(1e-15));
    }
}

}  // TEST_SUITE
