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

#ifndef AFIZ_CONFIG_HPP
#define AFIZ_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "afiz/controller.hpp"
#include "afiz/filter.hpp"
#include "afiz/integrator.hpp"
#include "afiz/model.hpp"

namespace afiz {

/// What the discriminator reads.
enum class Indicator {
    kFilteredCurrent,  // low-pass filtered homodyne record
    kExpectation,      // Tr[J rho_c] taken directly from the conditional state
};

const char *indicator_name(Indicator i);
Indicator parse_indicator(const std::string &name);

struct FilterConfig {
    double rate = 0.5;  // gamma_ft
    DiscriminatorParams discriminator{};
    Indicator indicator = Indicator::kFilteredCurrent;
};

struct ControllerConfig {
    ControllerMode mode = ControllerMode::kAfizWithRecovery;
    double tau = 3.0;
};

enum class InitialState { kPlusPlusPlus, kPreGhz, kGhz };
const char *initial_state_name(InitialState s);
InitialState parse_initial_state(const std::string &name);
DensityMatrix initial_density(InitialState s);

struct RunConfig {
    ModelConfig model{};
    /// Set when the model was derived from device parameters ("physical.*" keys).
    std::optional<PhysicalParams> physical;
    FilterConfig filter{};
    ControllerConfig controller{};
    InitialState initial = InitialState::kPlusPlusPlus;
    double duration = 50.0;
    double dt = kDefaultDt;
    double max_dt = kMaxStableDt;
    Scheme scheme = Scheme::kSplitKraus;
    std::uint64_t check_stride = 1000;
    std::uint64_t n_trajectories = 1;
    std::uint64_t base_seed = 20100915;
    std::string output_path = "out";
    std::uint64_t record_stride = 10;
    /// Stop a trajectory after this many decided verdicts (0: never).
    std::uint64_t max_verdicts = 0;
    /// Per-trajectory files written by an ensemble run.
    std::uint64_t trajectory_files = 8;
    unsigned threads = 0;  // 0: hardware concurrency
    double reference_dt_divisor = 10.0;
    std::string preset = "default";

    /// Throws ConfigError for any violated invariant.
    void validate() const;
};

/// Applies "key=value" assignments; unknown keys throw ConfigError. Blank
/// lines and lines starting with '#' are ignored, so an empty text is valid.
void apply_config_text(RunConfig &cfg, const std::string &text);
void apply_config_value(RunConfig &cfg, const std::string &key, const std::string &value);

RunConfig load_config_file(const std::string &path, RunConfig base = {});

/// Flat key=value echo of every setting; apply_config_text() on the result
/// reproduces the configuration.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig &cfg);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(const std::string &name);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace afiz

#endif
