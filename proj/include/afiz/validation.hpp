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

#ifndef AFIZ_VALIDATION_HPP
#define AFIZ_VALIDATION_HPP

#include <string>
#include <vector>

#include "afiz/config.hpp"

namespace afiz {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
};

/// State bounds along closed-loop trajectories, J_z eigenstate fixed points,
/// gate unitarity, superoperator tracelessness and seeded reproducibility.
/// `base` supplies the seed and thread count.
std::vector<CheckResult> run_invariant_suite(const RunConfig &base);

}  // namespace afiz

#endif
