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

#include "afiz/filter.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace afiz {

namespace {

// Slack for comparing accumulated step times against the dwell.
constexpr double kTimeSlack = 1e-9;

// (1 - e^{-x}) / x, accurate near zero.
double uniform_weight(double x) {
    return x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
}

}  // namespace

double FilterState::value() const {
    if (weight <= 0 || gamma_m <= 0) {
        return 0.0;
    }
    return accumulator / (std::sqrt(gamma_m) * weight);
}

FilterKernel::FilterKernel(double rate, double dt) : dt_(dt) {
    if (!(dt > 0)) {
        throw std::invalid_argument("filter_update: dt must be positive");
    }
    if (!(rate > 0)) {
        throw std::invalid_argument("filter_update: rate must be positive");
    }
    double x = rate * dt;
    decay_ = std::exp(-x);
    weight_ = uniform_weight(x);
}

double FilterKernel::update(FilterState &fs, double dI) const {
    fs.accumulator = fs.accumulator * decay_ + dI * weight_;
    fs.weight = fs.weight * decay_ + dt_ * weight_;
    return fs.value();
}

std::pair<FilterState, double> filter_update(FilterState fs, double dI, double dt) {
    double v = FilterKernel(fs.rate, dt).update(fs, dI);
    return {fs, v};
}

std::string describe(const Verdict &v) {
    if (!v.decided()) {
        return "undecided";
    }
    std::ostringstream ss;
    ss << "decided(" << *v.level << ")";
    return ss.str();
}

std::optional<std::size_t> level_in_band(const std::vector<double> &levels, double band, double value) {
    for (std::size_t i = 0; i < levels.size(); i++) {
        if (std::abs(value - levels[i]) <= band) {
            return i;
        }
    }
    return std::nullopt;
}

Verdict discriminate(std::span<const IndicatorSample> history, double t, const std::vector<double> &levels,
                     const DiscriminatorParams &params) {
    // Last sample at or before t.
    std::size_t end = history.size();
    while (end > 0 && history[end - 1].t > t + kTimeSlack) {
        end--;
    }
    if (end == 0) {
        return Verdict::undecided();
    }
    auto candidate = level_in_band(levels, params.band, history[end - 1].value);
    if (!candidate) {
        return Verdict::undecided();
    }
    std::size_t first = end - 1;
    while (first > 0 && level_in_band(levels, params.band, history[first - 1].value) == candidate) {
        first--;
    }
    double run_start = history[first].t;
    if (t - run_start < params.dwell - kTimeSlack) {
        return Verdict::undecided();
    }
    double decided_at = t;
    for (std::size_t k = first; k < end; k++) {
        if (history[k].t - run_start >= params.dwell - kTimeSlack) {
            decided_at = history[k].t;
            break;
        }
    }
    return Verdict::decided_level(levels[*candidate], decided_at);
}

Discriminator::Discriminator(std::vector<double> levels, DiscriminatorParams params)
    : levels_(std::move(levels)), params_(params) {
    if (levels_.empty()) {
        throw std::invalid_argument("Discriminator: empty level set");
    }
    for (std::size_t i = 1; i < levels_.size(); i++) {
        if (2 * params_.band >= levels_[i] - levels_[i - 1]) {
            throw std::invalid_argument("Discriminator: band must be below half the level spacing");
        }
    }
    if (!(params_.dwell >= 0)) {
        throw std::invalid_argument("Discriminator: dwell must be non-negative");
    }
}

const Verdict &Discriminator::observe(double t, double value) {
    auto in_band = level_in_band(levels_, params_.band, value);
    if (in_band != candidate_) {
        candidate_ = in_band;
        run_start_ = t;
        verdict_ = Verdict::undecided();
    }
    if (candidate_ && !verdict_.decided() && t - run_start_ >= params_.dwell - kTimeSlack) {
        verdict_ = Verdict::decided_level(levels_[*candidate_], t);
    }
    return verdict_;
}

void Discriminator::reset() {
    candidate_.reset();
    run_start_ = 0;
    verdict_ = Verdict::undecided();
}

void Discriminator::negate() {
    if (!candidate_) {
        return;
    }
    double mirrored = -levels_[*candidate_];
    auto idx = level_in_band(levels_, 1e-12, mirrored);
    if (!idx) {
        reset();
        return;
    }
    candidate_ = idx;
    if (verdict_.decided()) {
        verdict_.level = mirrored;
    }
}

}  // namespace afiz
