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

#ifndef AFIZ_FILTER_HPP
#define AFIZ_FILTER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace afiz {

/// Exponential low-pass filter of the homodyne record,
///
///   I_bar(t) = integral e^{-rate (t - s)} dI(s) / (sqrt(gamma_m) * integral e^{-rate (t - s)} ds),
///
/// so a noiseless current sqrt(gamma_m) c dt reads exactly c, and in steady
/// state the normalization equals sqrt(gamma_m) / rate. Each increment is
/// weighted as if spread uniformly over its step, which makes the output
/// invariant under splitting a step into equal sub-steps.
struct FilterState {
    double rate = 0.5;     // gamma_ft
    double gamma_m = 2.0;
    double accumulator = 0;
    double weight = 0;     // integral of the kernel since the last reset

    /// Current estimate of <J_z>; zero before any input.
    double value() const;
    void reset() {
        accumulator = 0;
        weight = 0;
    }
    /// Maps the estimate to its negative (all three qubits were flipped, so J_z -> -J_z).
    void negate() {
        accumulator = -accumulator;
    }
};

/// Returns the updated state and the new estimate.
std::pair<FilterState, double> filter_update(FilterState fs, double dI, double dt);

/// filter_update with the coefficients for a fixed (rate, dt) computed once.
class FilterKernel {
   public:
    FilterKernel(double rate, double dt);
    /// Updates `fs` in place and returns the new estimate.
    double update(FilterState &fs, double dI) const;

   private:
    double dt_;
    double decay_;
    double weight_;
};

struct DiscriminatorParams {
    double band = 0.5;
    double dwell = 2.0;
};

struct Verdict {
    std::optional<double> level;
    double decided_at = 0;

    bool decided() const {
        return level.has_value();
    }
    static Verdict undecided() {
        return {};
    }
    static Verdict decided_level(double level, double t) {
        return {level, t};
    }
};

std::string describe(const Verdict &v);

/// Index of the level within `band` of `value`, if any.
std::optional<std::size_t> level_in_band(const std::vector<double> &levels, double band, double value);

struct IndicatorSample {
    double t = 0;
    double value = 0;
};

/// Decision from a full indicator history: decided(L) when every sample in
/// [t - dwell, t] lies within `band` of L and the history reaches back at least to t - dwell.
Verdict discriminate(std::span<const IndicatorSample> history, double t, const std::vector<double> &levels,
                     const DiscriminatorParams &params);

/// Streaming form of discriminate(). Keeps only the start of the current
/// in-band run, so memory is constant.
class Discriminator {
   public:
    Discriminator(std::vector<double> levels, DiscriminatorParams params);

    /// Feeds one sample and returns the verdict at time `t`.
    const Verdict &observe(double t, double value);
    /// Forgets all history; a new dwell starts with the next sample.
    void reset();
    /// Mirrors the in-progress run onto the negated level (J_z -> -J_z).
    void negate();

    const Verdict &verdict() const {
        return verdict_;
    }
    const std::vector<double> &levels() const {
        return levels_;
    }
    const DiscriminatorParams &params() const {
        return params_;
    }

   private:
    std::vector<double> levels_;
    DiscriminatorParams params_;
    std::optional<std::size_t> candidate_;
    double run_start_ = 0;
    Verdict verdict_;
};

}  // namespace afiz

#endif
