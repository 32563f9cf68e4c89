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

#ifndef AFIZ_NOISE_HPP
#define AFIZ_NOISE_HPP

#include <array>
#include <cstdint>

namespace afiz {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Stateless: the output
/// is a pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Wiener increments for one trajectory, keyed by (seed, stream_index, step).
///
/// Two standard normals are produced per Philox block (Box-Muller), so steps
/// 2k and 2k+1 share a block. The generator caches that block; random access
/// in any order still returns the same value for a given step.
class NoiseSource {
   public:
    NoiseSource(std::uint64_t seed, std::uint64_t stream_index) : seed_(seed), stream_(stream_index) {
    }

    std::uint64_t seed() const {
        return seed_;
    }
    std::uint64_t stream_index() const {
        return stream_;
    }

    /// Standard normal variate for `step`.
    double standard_normal(std::uint64_t step);

    /// dW ~ Normal(0, dt) for `step`.
    double wiener(std::uint64_t step, double dt);

   private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    double cached_[2] = {0, 0};
};

}  // namespace afiz

#endif
