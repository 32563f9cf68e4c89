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

#include "afiz/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "afiz/integrator.hpp"

namespace afiz {

void FixedPointSum::add(double x) {
    sum_ += static_cast<__int128>(std::llround(x * kScale));
    count_++;
}

void FixedPointSum::merge(const FixedPointSum &o) {
    sum_ += o.sum_;
    count_ += o.count_;
}

double FixedPointSum::value() const {
    return static_cast<double>(sum_) / kScale;
}

void SeriesAccumulator::add(std::size_t bin, double x) {
    if (bin >= sum_.size()) {
        sum_.resize(bin + 1);
        sum_sq_.resize(bin + 1);
    }
    sum_[bin].add(x);
    sum_sq_[bin].add(x * x);
}

void SeriesAccumulator::merge(const SeriesAccumulator &o) {
    if (o.sum_.size() > sum_.size()) {
        sum_.resize(o.sum_.size());
        sum_sq_.resize(o.sum_.size());
    }
    for (std::size_t i = 0; i < o.sum_.size(); i++) {
        sum_[i].merge(o.sum_[i]);
        sum_sq_[i].merge(o.sum_sq_[i]);
    }
}

std::uint64_t SeriesAccumulator::count(std::size_t bin) const {
    return bin < sum_.size() ? sum_[bin].count() : 0;
}

double SeriesAccumulator::mean(std::size_t bin) const {
    std::uint64_t n = count(bin);
    return n == 0 ? 0.0 : sum_[bin].value() / static_cast<double>(n);
}

double SeriesAccumulator::standard_error(std::size_t bin) const {
    std::uint64_t n = count(bin);
    if (n < 2) {
        return 0.0;
    }
    double m = mean(bin);
    double nd = static_cast<double>(n);
    double var = (sum_sq_[bin].value() - nd * m * m) / (nd - 1);
    return std::sqrt(std::max(var, 0.0) / nd);
}

double EnsembleResult::time_averaged_fidelity(double t_from, double t_to) const {
    double acc = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); i++) {
        if (t[i] >= t_from - 1e-9 && t[i] <= t_to + 1e-9) {
            acc += mean_fidelity[i];
            n++;
        }
    }
    return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::uint64_t n, unsigned threads, const std::function<void(std::uint64_t)> &fn) {
    threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n, 1)));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned k = 0; k < threads; k++) {
            pool.emplace_back(worker);
        }
        for (std::thread &th : pool) {
            th.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

namespace {

struct Partial {
    SeriesAccumulator fidelity;
    std::map<double, std::uint64_t> verdicts;
    std::map<double, std::uint64_t> first;
    std::vector<TrajectoryFailure> failures;
};

}  // namespace

EnsembleResult run_ensemble(const RunConfig &cfg, const EnsembleOptions &opt) {
    cfg.validate();
    std::vector<std::uint64_t> order = opt.order;
    if (order.empty()) {
        order.resize(cfg.n_trajectories);
        for (std::uint64_t i = 0; i < cfg.n_trajectories; i++) {
            order[i] = i;
        }
    }
    const unsigned threads = resolve_threads(opt.threads > 0 ? opt.threads : cfg.threads);
    const std::uint64_t stride = std::max<std::uint64_t>(cfg.record_stride, 1);

    std::mutex mutex;
    std::vector<Partial> partials;
    auto body = [&](Partial &p, std::uint64_t index) {
        TrajectoryResult r;
        try {
            r = run_trajectory(cfg, index);
        } catch (const std::exception &e) {
            p.failures.push_back({index, e.what()});
            return;
        }
        for (const TrajectorySample &s : r.samples) {
            if (s.step % stride == 0) {
                p.fidelity.add(static_cast<std::size_t>(s.step / stride), s.fidelity);
            }
        }
        for (const DecidedVerdict &v : r.verdicts) {
            p.verdicts[v.level]++;
        }
        if (!r.verdicts.empty()) {
            p.first[r.verdicts.front().level]++;
        }
        if (opt.consumer) {
            std::lock_guard<std::mutex> lock(mutex);
            opt.consumer(r);
        }
    };

    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::size_t>(order.size(), 1)));
    partials.resize(workers);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&](unsigned w) {
        for (;;) {
            std::uint64_t k = next.fetch_add(1);
            if (k >= order.size()) {
                return;
            }
            body(partials[w], order[k]);
        }
    };
    if (workers <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; w++) {
            pool.emplace_back(worker, w);
        }
        for (std::thread &th : pool) {
            th.join();
        }
    }

    Partial total;
    for (const Partial &p : partials) {
        total.fidelity.merge(p.fidelity);
        for (auto [level, c] : p.verdicts) {
            total.verdicts[level] += c;
        }
        for (auto [level, c] : p.first) {
            total.first[level] += c;
        }
        total.failures.insert(total.failures.end(), p.failures.begin(), p.failures.end());
    }
    std::sort(total.failures.begin(), total.failures.end(),
              [](const TrajectoryFailure &a, const TrajectoryFailure &b) { return a.index < b.index; });

    EnsembleResult out;
    out.n_trajectories = order.size();
    for (std::size_t b = 0; b < total.fidelity.size(); b++) {
        out.t.push_back(static_cast<double>(b * stride) * cfg.dt);
        out.mean_fidelity.push_back(std::clamp(total.fidelity.mean(b), 0.0, 1.0));
        out.se_fidelity.push_back(total.fidelity.standard_error(b));
        out.count.push_back(total.fidelity.count(b));
    }
    out.verdict_counts = std::move(total.verdicts);
    out.first_verdict_counts = std::move(total.first);
    out.failures = std::move(total.failures);
    return out;
}

namespace {

double reference_step(const RunConfig &cfg) {
    return cfg.dt / cfg.reference_dt_divisor;
}

}  // namespace

ReferenceSeries lindblad_reference(const RunConfig &cfg) {
    cfg.validate();
    const ModelConfig model = effective_model(cfg);
    MeanEvolution evo(model);
    const Operator jz = build_jz(model.jz_weights);
    const PureState &target = target_states().pre_ghz;
    const std::uint64_t n = steps_for(cfg.duration, cfg.dt);
    const std::uint64_t stride = std::max<std::uint64_t>(cfg.record_stride, 1);
    const double h = reference_step(cfg);
    const int sub = static_cast<int>(std::llround(cfg.reference_dt_divisor));

    ReferenceSeries out;
    Operator rho = initial_density(cfg.initial).matrix();
    auto sample = [&](std::uint64_t s) {
        DensityMatrix d(rho);
        out.t.push_back(static_cast<double>(s) * cfg.dt);
        out.fidelity.push_back(fidelity(d, target));
        out.jz.push_back(expectation(jz, d));
    };
    sample(0);
    // The generator is constant, so each trajectory step is one fixed linear map.
    const bool whole = std::abs(cfg.reference_dt_divisor - sub) < 1e-12;
    const Eigen::MatrixXcd step = whole ? evo.step_map(h, static_cast<std::uint64_t>(sub))
                                        : evo.step_map(cfg.dt / static_cast<double>(steps_for(cfg.dt, h)),
                                                       steps_for(cfg.dt, h));
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), kDim * kDim);
    for (std::uint64_t s = 1; s <= n; s++) {
        v = step * v;
        if (s % stride == 0 || s == n) {
            rho = Eigen::Map<const Operator>(v.data());
            sample(s);
        }
    }
    out.final_state = rho;
    return out;
}

std::vector<Operator> reference_states(const RunConfig &cfg, const std::vector<double> &times) {
    const ModelConfig model = effective_model(cfg);
    MeanEvolution evo(model);
    std::vector<double> sorted = times;
    if (!std::is_sorted(sorted.begin(), sorted.end())) {
        throw std::invalid_argument("reference_states: times must be ascending");
    }
    std::vector<Operator> out;
    Operator rho = initial_density(cfg.initial).matrix();
    double now = 0;
    for (double t : sorted) {
        rho = evo.propagate(rho, t - now, reference_step(cfg));
        now = t;
        out.push_back(rho);
    }
    return out;
}

StateMoments state_moments(const RunConfig &cfg, const std::vector<double> &times, unsigned threads) {
    cfg.validate();
    std::vector<std::uint64_t> steps;
    for (double t : times) {
        steps.push_back(static_cast<std::uint64_t>(std::llround(t / cfg.dt)));
    }
    const std::size_t m = times.size();
    std::vector<std::vector<Operator>> snaps(cfg.n_trajectories, std::vector<Operator>(m, Operator::Zero()));
    parallel_for(cfg.n_trajectories, threads > 0 ? threads : cfg.threads, [&](std::uint64_t i) {
        run_trajectory(cfg, i, [&](const StepView &v) {
            for (std::size_t k = 0; k < m; k++) {
                if (steps[k] == v.step) {
                    snaps[i][k] = v.rho->matrix();
                }
            }
        });
    });

    StateMoments out;
    out.times = times;
    out.n = cfg.n_trajectories;
    const double n = static_cast<double>(cfg.n_trajectories);
    for (std::size_t k = 0; k < m; k++) {
        Operator sum = Operator::Zero();
        for (std::uint64_t i = 0; i < cfg.n_trajectories; i++) {
            sum += snaps[i][k];
        }
        Operator mean = sum / n;
        Eigen::Matrix<double, kDim, kDim> vr = Eigen::Matrix<double, kDim, kDim>::Zero();
        Eigen::Matrix<double, kDim, kDim> vi = Eigen::Matrix<double, kDim, kDim>::Zero();
        for (std::uint64_t i = 0; i < cfg.n_trajectories; i++) {
            Operator d = snaps[i][k] - mean;
            vr += d.real().cwiseAbs2();
            vi += d.imag().cwiseAbs2();
        }
        double denom = n > 1 ? (n - 1) * n : 1;
        out.mean.push_back(mean);
        out.se_real.push_back((vr / denom).cwiseSqrt());
        out.se_imag.push_back((vi / denom).cwiseSqrt());
    }
    return out;
}

}  // namespace afiz
