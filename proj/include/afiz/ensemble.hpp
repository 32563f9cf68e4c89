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

#ifndef AFIZ_ENSEMBLE_HPP
#define AFIZ_ENSEMBLE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "afiz/config.hpp"
#include "afiz/trajectory.hpp"

namespace afiz {

/// Exact, order-independent accumulator: values are rounded to multiples of
/// 2^-40 and summed as integers.
class FixedPointSum {
   public:
    static constexpr double kScale = 1099511627776.0;  // 2^40

    void add(double x);
    void merge(const FixedPointSum &o);
    double value() const;
    std::uint64_t count() const {
        return count_;
    }
    bool operator==(const FixedPointSum &) const = default;

   private:
    __int128 sum_ = 0;
    std::uint64_t count_ = 0;
};

/// Mean and standard error of one time series across trajectories.
class SeriesAccumulator {
   public:
    void add(std::size_t bin, double x);
    void merge(const SeriesAccumulator &o);

    std::size_t size() const {
        return sum_.size();
    }
    std::uint64_t count(std::size_t bin) const;
    double mean(std::size_t bin) const;
    /// Standard error of the mean; zero for fewer than two samples.
    double standard_error(std::size_t bin) const;
    bool operator==(const SeriesAccumulator &) const = default;

   private:
    std::vector<FixedPointSum> sum_;
    std::vector<FixedPointSum> sum_sq_;
};

struct TrajectoryFailure {
    std::uint64_t index = 0;
    std::string message;
};

struct EnsembleResult {
    std::uint64_t n_trajectories = 0;
    std::vector<double> t;
    std::vector<double> mean_fidelity;
    std::vector<double> se_fidelity;
    std::vector<std::uint64_t> count;
    std::map<double, std::uint64_t> verdict_counts;        // every decided verdict
    std::map<double, std::uint64_t> first_verdict_counts;  // first decided verdict per trajectory
    std::vector<TrajectoryFailure> failures;

    bool ok() const {
        return failures.empty();
    }
    /// Mean of mean_fidelity over bins with t in [t_from, t_to].
    double time_averaged_fidelity(double t_from = 0, double t_to = 1e300) const;
};

/// Receives each finished trajectory; calls are serialized.
using TrajectoryConsumer = std::function<void(const TrajectoryResult &)>;

struct EnsembleOptions {
    unsigned threads = 0;  // 0: take RunConfig::threads, then hardware concurrency
    TrajectoryConsumer consumer;
    /// When set, trajectories are processed in this order (for order-independence tests).
    std::vector<std::uint64_t> order;
};

/// Runs cfg.n_trajectories trajectories on a worker pool. Failed trajectories
/// are listed in the result rather than thrown.
EnsembleResult run_ensemble(const RunConfig &cfg, const EnsembleOptions &opt = {});

unsigned resolve_threads(unsigned requested);

/// Runs fn(i) for i in [0, n) on `threads` workers pulling from a shared index.
/// The first exception thrown by fn is rethrown after all workers stop.
void parallel_for(std::uint64_t n, unsigned threads, const std::function<void(std::uint64_t)> &fn);

struct ReferenceSeries {
    std::vector<double> t;
    std::vector<double> fidelity;
    std::vector<double> jz;
    Operator final_state = Operator::Zero();
};

/// Deterministic ensemble-mean evolution rho' = L rho + (gamma_d/2) D[J] rho
/// integrated with RK4 at dt / reference_dt_divisor and sampled on the same
/// grid as run_trajectory.
ReferenceSeries lindblad_reference(const RunConfig &cfg);

/// Reference density matrices at the given times.
std::vector<Operator> reference_states(const RunConfig &cfg, const std::vector<double> &times);

/// Elementwise ensemble mean and standard error of the conditional state at
/// checkpoint times (feedback-free comparison with the reference).
struct StateMoments {
    std::vector<double> times;
    std::vector<Operator> mean;
    std::vector<Eigen::Matrix<double, kDim, kDim>> se_real;
    std::vector<Eigen::Matrix<double, kDim, kDim>> se_imag;
    std::uint64_t n = 0;
};

StateMoments state_moments(const RunConfig &cfg, const std::vector<double> &times, unsigned threads = 0);

}  // namespace afiz

#endif
