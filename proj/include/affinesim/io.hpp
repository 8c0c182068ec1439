/*
 Copyright 2026 The affinesim Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef AFFINESIM_IO_HPP
#define AFFINESIM_IO_HPP

#include "affinesim/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

// File formats. Node indices in every file are 1-based; the library is 0-based.
//
//   framework : {"d": 2, "positions": [[x, y], ...], "edges": [[i, j], ...], "leaders": [i, ...]}
//   stress    : {"n": 5, "entries": [[...], ...], "precision": 5e-4}   (precision optional)
//   weights   : {"edges": [[i, j, w], ...]}
//   schedule  : {"segments": [{"k0", "k1", "kind", "params", "interp"}]}
//   scenario  : see README; file references are resolved relative to the scenario file.

namespace affinesim::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

struct FrameworkFile {
    Framework<double> framework;
    std::optional<LeaderPartition> partition;
};

struct StressFile {
    StressMatrix<double> stress;
    double precision = 0;
};

[[nodiscard]] json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

[[nodiscard]] FrameworkFile framework_from_json(const json& j);
[[nodiscard]] json framework_to_json(const Framework<double>& fw, const std::optional<LeaderPartition>& part);

[[nodiscard]] StressFile stress_from_json(const json& j);
[[nodiscard]] json stress_to_json(const StressMatrix<double>& s, double precision = 0);

[[nodiscard]] std::vector<WeightedEdge<double>> weights_from_json(const json& j);
[[nodiscard]] json weights_to_json(const EdgeWeights<double>& w);

[[nodiscard]] ManoeuvreSchedule<double> schedule_from_json(const json& j);

/// Dense matrix from [[...], ...], a flat [...] (column vector) or a bare number.
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const json& j);
[[nodiscard]] json matrix_to_json(const Eigen::MatrixXd& m);

/// Inlines every file reference in a scenario so the result is self-contained.
[[nodiscard]] json resolve_scenario(const json& scenario, const std::filesystem::path& base_dir);
[[nodiscard]] ScenarioSpec scenario_from_json(const json& resolved);

/// Shortest decimal string that round-trips to the same binary64 value.
[[nodiscard]] std::string format_roundtrip(double v);
/// Six significant digits, for human-readable reports.
[[nodiscard]] std::string format6(double v);

/// Trace CSV, one row per (k, agent, coordinate).
void write_trace_csv(std::ostream& os, const RunResult& result);
[[nodiscard]] json run_summary(const RunResult& result);

/// Agent trajectories in the plane: one polyline per agent plus target markers.
void write_trajectory_svg(std::ostream& os, const RunResult& result, const LeaderPartition& part);
/// Disagreement norm against step on a log scale.
void write_delta_svg(std::ostream& os, const RunResult& result);

}  // namespace affinesim::io

#endif  // AFFINESIM_IO_HPP
