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

#ifndef AFIZ_IO_HPP
#define AFIZ_IO_HPP

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "afiz/config.hpp"
#include "afiz/ensemble.hpp"
#include "afiz/trajectory.hpp"

namespace afiz {

inline constexpr int kSchemaVersion = 1;

class FormatError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A "# key=value" metadata block, one header row, then comma-separated rows.
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Throws FormatError when the key is absent.
    const std::string &meta_value(const std::string &key) const;
    bool has_meta(const std::string &key) const;
    /// Throws FormatError naming the column when it is absent.
    std::size_t column(const std::string &name) const;
};

void write_table(const std::filesystem::path &path, const CsvTable &table);
/// Rejects files without schema_version or with an unsupported version.
CsvTable read_table(const std::filesystem::path &path);

double parse_number(const std::string &text);

/// Metadata shared by every file: schema version, kind and the config echo.
std::vector<std::pair<std::string, std::string>> base_metadata(const RunConfig &cfg, const std::string &kind);

struct TrajectoryPaths {
    std::filesystem::path samples;
    std::filesystem::path events;
    std::filesystem::path state;
};

TrajectoryPaths trajectory_paths(const std::filesystem::path &dir, std::uint64_t index);

/// Writes samples, events and the final state of one trajectory.
TrajectoryPaths write_trajectory(const std::filesystem::path &dir, const RunConfig &cfg, const TrajectoryResult &r);
TrajectoryResult read_trajectory(const std::filesystem::path &dir, std::uint64_t index);

std::filesystem::path write_ensemble(const std::filesystem::path &dir, const RunConfig &cfg, const EnsembleResult &r);
EnsembleResult read_ensemble(const std::filesystem::path &path);

std::filesystem::path write_reference(const std::filesystem::path &dir, const RunConfig &cfg, const ReferenceSeries &r);
ReferenceSeries read_reference(const std::filesystem::path &path);

}  // namespace afiz

#endif
