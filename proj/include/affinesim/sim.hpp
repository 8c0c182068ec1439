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
#ifndef AFFINESIM_SIM_HPP
#define AFFINESIM_SIM_HPP

#include "affinesim/control.hpp"
#include "affinesim/riccati.hpp"
#include "affinesim/synthesis.hpp"
#include "affinesim/targets.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace affinesim {

enum class Law { Stationary, Dynamic, GeneralLinear };

[[nodiscard]] std::string to_string(Law law);
[[nodiscard]] Law law_from_string(const std::string& s);

struct SynthesizeStress {};

using StressSource = std::variant<StressMatrix<double>, EdgeWeights<double>, SynthesizeStress>;

struct GeneralLinearParams {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd Q;
    double epsilon = 0.1;
    double riccati_tol = 1e-10;
    int riccati_max_iter = 100000;
};

struct ScenarioSpec {
    Framework<double> framework;  // configuration is the reference formation
    LeaderPartition partition;
    StressSource stress = SynthesizeStress{};
    CertificateOptions certificate;
    Law law = Law::Stationary;
    double T = 1.0;
    ManoeuvreSchedule<double> schedule;
    Points<double> initial_followers;  // d x n_f, partition follower order
    int max_steps = 2000;
    double tol = 1e-9;
    int window = 10;
    double divergence_threshold = 1e9;
    std::uint64_t seed = 1;
    std::optional<GeneralLinearParams> linear;
};

/// Stability diagnostics recorded before a run starts.
struct TheoremFlags {
    Law law = Law::Stationary;
    double T = 0;
    std::optional<double> mu_min;          // stationary and dynamic laws
    std::optional<bool> theorem1_ok;       // T * mu_min > -2
    std::optional<bool> theorem2_ok;       // T < 2
    double error_spectral_radius = 0;      // spectral radius of the disagreement recursion
    std::optional<double> gain_spectral_radius;      // rho(A + BK), general-linear law
    std::optional<double> coupling_spectral_radius;  // rho(I - eps Omega), general-linear law
    std::optional<double> riccati_residual;
};

struct TraceRecord {
    int k = 0;
    Points<double> x;        // d x n, original agent order
    Points<double> xf_star;  // d x n_f, partition follower order
    double delta_norm = 0;
    bool converged = false;
    bool diverged = false;
};

enum class RunStatus { Converged, Diverged, BudgetExhausted };

struct RunResult {
    RigidityCertificate certificate;
    LeaderReport leaders;
    TheoremFlags flags;
    StressMatrix<double> stress;
    std::vector<TraceRecord> trace;
    std::optional<int> converged_at;
    RunStatus status = RunStatus::BudgetExhausted;
};

/// ||x_f - x_f*||_2 over the stacked coordinates.
[[nodiscard]] double disagreement(const Points<double>& xf, const Points<double>& xf_star);

/// First k with norms[k .. k+window) all <= tol.
[[nodiscard]] std::optional<int> detect_convergence(std::span<const double> norms, double tol, int window);
[[nodiscard]] std::optional<int> detect_convergence(const std::vector<TraceRecord>& trace, double tol, int window);

/// Stress for the scenario (explicit, assembled, or synthesized with spec.seed).
[[nodiscard]] StressMatrix<double> resolve_stress(const ScenarioSpec& spec);

/// Runs the scenario until convergence (window consecutive steps within tol,
/// checked once the manoeuvre schedule has finished), divergence (delta above
/// the threshold or non-finite), or the step budget.
/// Throws Error(Certificate) when the stress certificate or leader selection fails.
[[nodiscard]] RunResult run_scenario(const ScenarioSpec& spec);

/// Replays the scenario with the per-agent laws in lockstep with the global
/// matrix form; returns the largest state deviation seen over all steps.
[[nodiscard]] double compare_forms(const ScenarioSpec& spec);

/// Runs independent scenarios concurrently; results keep input order.
[[nodiscard]] std::vector<RunResult> run_batch(const std::vector<ScenarioSpec>& specs);

}  // namespace affinesim

#endif  // AFFINESIM_SIM_HPP
