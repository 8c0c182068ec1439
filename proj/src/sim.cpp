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
#include "affinesim/sim.hpp"

#include <cmath>
#include <future>
#include <sstream>

namespace affinesim {

std::string to_string(Law law) {
    switch (law) {
    case Law::Stationary:
        return "stationary";
    case Law::Dynamic:
        return "dynamic";
    case Law::GeneralLinear:
        return "general-linear";
    }
    return "unknown";
}

Law law_from_string(const std::string& s) {
    if (s == "stationary") {
        return Law::Stationary;
    }
    if (s == "dynamic") {
        return Law::Dynamic;
    }
    if (s == "general-linear") {
        return Law::GeneralLinear;
    }
    throw Error(ErrorKind::InvalidInput, "unknown law '" + s + "' (expected stationary|dynamic|general-linear)");
}

double disagreement(const Points<double>& xf, const Points<double>& xf_star) {
    require(xf.rows() == xf_star.rows() && xf.cols() == xf_star.cols(), "disagreement: dimension mismatch");
    return (xf - xf_star).norm();
}

std::optional<int> detect_convergence(std::span<const double> norms, double tol, int window) {
    require(window >= 1, "convergence window must be at least 1");
    int run = 0;
    for (std::size_t k = 0; k < norms.size(); ++k) {
        run = norms[k] <= tol ? run + 1 : 0;
        if (run >= window) {
            return static_cast<int>(k) - window + 1;
        }
    }
    return std::nullopt;
}

std::optional<int> detect_convergence(const std::vector<TraceRecord>& trace, double tol, int window) {
    std::vector<double> norms;
    norms.reserve(trace.size());
    for (const auto& r : trace) {
        norms.push_back(r.delta_norm);
    }
    return detect_convergence(norms, tol, window);
}

StressMatrix<double> resolve_stress(const ScenarioSpec& spec) {
    if (const auto* m = std::get_if<StressMatrix<double>>(&spec.stress)) {
        return *m;
    }
    if (const auto* w = std::get_if<EdgeWeights<double>>(&spec.stress)) {
        return assemble_stress(spec.framework.graph(), *w);
    }
    SynthesisOptions opts;
    opts.seed = spec.seed;
    return synthesize_stress(spec.framework, opts).stress;
}

namespace {

void validate_spec(const ScenarioSpec& spec) {
    const int d = spec.framework.dim();
    require(spec.partition.size() == spec.framework.size(), "partition size does not match framework");
    require(spec.initial_followers.rows() == d && spec.initial_followers.cols() == spec.partition.num_followers(),
            "initial follower positions must be d x n_f");
    require(spec.max_steps >= 1, "step budget must be at least 1");
    require(spec.tol > 0, "convergence tolerance must be positive");
    require(spec.window >= 1, "convergence window must be at least 1");
    if (spec.law == Law::GeneralLinear) {
        require(spec.linear.has_value(), "general-linear law needs plant parameters");
        require(spec.linear->A.rows() == d, "general-linear plant state must match the position dimension");
    }
}

std::string certificate_summary(const RigidityCertificate& c, const LeaderReport& l) {
    std::ostringstream os;
    os << "rank " << c.rank << "/" << c.expected_rank << ", min eigenvalue " << c.min_eigenvalue
       << (c.psd ? " (PSD)" : " (not PSD)") << ", connectivity " << (c.connectivity_ok ? "ok" : "insufficient")
       << ", leaders " << l.num_leaders << "/" << l.required_leaders << " spanning dim " << l.span_dimension;
    return os.str();
}

Points<double> scatter(const Points<double>& xl, const Points<double>& xf, const LeaderPartition& part) {
    Points<double> x(xl.rows(), part.size());
    for (int i = 0; i < part.num_leaders(); ++i) {
        x.col(part.leaders()[static_cast<std::size_t>(i)]) = xl.col(i);
    }
    for (int i = 0; i < part.num_followers(); ++i) {
        x.col(part.followers()[static_cast<std::size_t>(i)]) = xf.col(i);
    }
    return x;
}

struct LinearLaw {
    Eigen::MatrixXd K;
};

TheoremFlags stability_flags(const ScenarioSpec& spec, const StressMatrix<double>& omega,
                             const StressBlocks<double>& blocks, std::optional<LinearLaw>& linear) {
    TheoremFlags f;
    f.law = spec.law;
    f.T = spec.T;
    const SamplingPeriod<double> T(spec.T);
    if (spec.law == Law::GeneralLinear) {
        const auto& lp = *spec.linear;
        const LinearPlant<double> plant(lp.A, lp.B);
        const auto sol = solve_mare(plant, lp.Q, lp.riccati_tol, lp.riccati_max_iter);
        linear = LinearLaw{sol.K};
        f.riccati_residual = sol.residual;
        f.gain_spectral_radius = spectral_radius(lp.A + lp.B * sol.K);
        const int n = omega.size();
        const Eigen::MatrixXd coupling = Eigen::MatrixXd::Identity(n, n) - lp.epsilon * omega.entries();
        f.coupling_spectral_radius = spectral_radius(coupling);
        // Dense closed loop (I kron A) + ((I - eps Omega) kron BK).
        const int m = static_cast<int>(lp.A.rows());
        const Eigen::MatrixXd BK = lp.B * sol.K;
        Eigen::MatrixXd closed = Eigen::MatrixXd::Zero(n * m, n * m);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                closed.block(a * m, b * m, m, m) = coupling(a, b) * BK;
            }
            closed.block(a * m, a * m, m, m) += lp.A;
        }
        f.error_spectral_radius = spectral_radius(closed);
        return f;
    }
    f.mu_min = min_eig_neg_ff(blocks);
    f.theorem2_ok = check_theorem2(T);
    if (spec.law == Law::Stationary) {
        f.theorem1_ok = *f.mu_min < 0 ? check_theorem1(T, *f.mu_min) : false;
        f.error_spectral_radius = spectral_radius(stationary_error_matrix(blocks, T));
    } else {
        f.error_spectral_radius = std::abs(1.0 - spec.T);
    }
    return f;
}

}  // namespace

RunResult run_scenario(const ScenarioSpec& spec) {
    validate_spec(spec);
    RunResult result;
    result.stress = resolve_stress(spec);
    result.certificate = check_rigidity_certificate(result.stress, spec.framework, spec.certificate);
    result.leaders = validate_leader_selection(spec.framework, spec.partition);
    if (!result.certificate.pass || !result.leaders.pass) {
        throw Error(ErrorKind::Certificate,
                    "run refused: " + certificate_summary(result.certificate, result.leaders));
    }
    const auto blocks = partition_stress(result.stress, spec.partition);
    std::optional<LinearLaw> linear;
    result.flags = stability_flags(spec, result.stress, blocks, linear);

    const SamplingPeriod<double> T(spec.T);
    const auto& reference = spec.framework.config();
    const auto& part = spec.partition;

    Points<double> xl = leader_waypoints(spec.schedule, reference, part, 0).first;
    Points<double> xf = spec.initial_followers;
    int run = 0;
    result.trace.reserve(static_cast<std::size_t>(std::min(spec.max_steps, 100000)) + 1);

    for (int k = 0;; ++k) {
        TraceRecord rec;
        rec.k = k;
        rec.x = scatter(xl, xf, part);
        rec.xf_star = follower_targets(blocks, xl);
        rec.delta_norm = disagreement(xf, rec.xf_star);
        const bool diverged = !std::isfinite(rec.delta_norm) || rec.delta_norm > spec.divergence_threshold;
        rec.diverged = diverged;
        result.trace.push_back(std::move(rec));

        if (diverged) {
            result.status = RunStatus::Diverged;
            break;
        }
        run = result.trace.back().delta_norm <= spec.tol ? run + 1 : 0;
        // Leaders still manoeuvring: settling now says nothing about the final formation.
        if (run >= spec.window && k >= spec.schedule.final_step()) {
            result.converged_at = k - run + 1;
            result.status = RunStatus::Converged;
            break;
        }
        if (k >= spec.max_steps) {
            result.status = RunStatus::BudgetExhausted;
            break;
        }

        const Points<double> xl_next = leader_waypoints(spec.schedule, reference, part, k).second;
        switch (spec.law) {
        case Law::Stationary:
            xf = stationary_leader_step(blocks, T, xf, xl);
            xl = xl_next;
            break;
        case Law::Dynamic:
            xf = dynamic_leader_step(blocks, T, xf, xl, xl_next);
            xl = xl_next;
            break;
        case Law::GeneralLinear: {
            const auto& lp = *spec.linear;
            const Points<double> x_next =
                linear_step<double>(lp.A, lp.B, linear->K, lp.epsilon, result.stress, scatter(xl, xf, part));
            xl = select_columns(x_next, part.leaders());
            xf = select_columns(x_next, part.followers());
            break;
        }
        }
    }
    if (result.converged_at) {
        for (auto& r : result.trace) {
            r.converged = r.k >= *result.converged_at;
        }
    }
    return result;
}

namespace {

StateMap<double> states_of(const Points<double>& x, const std::vector<int>& nodes) {
    StateMap<double> m;
    for (int v : nodes) {
        m[v] = x.col(v);
    }
    return m;
}

}  // namespace

double compare_forms(const ScenarioSpec& spec) {
    require(spec.law == Law::Stationary || spec.law == Law::Dynamic, "form comparison needs the stationary or dynamic law");
    const RunResult global = run_scenario(spec);
    const auto& g = spec.framework.graph();
    const auto& part = spec.partition;
    const auto weights = edge_weights(global.stress, g);
    const SamplingPeriod<double> T(spec.T);
    const auto& reference = spec.framework.config();

    std::vector<int> all(static_cast<std::size_t>(part.size()));
    for (int v = 0; v < part.size(); ++v) {
        all[static_cast<std::size_t>(v)] = v;
    }

    Points<double> y = global.trace.front().x;
    double worst = 0;
    for (std::size_t step = 0; step + 1 < global.trace.size(); ++step) {
        const int k = global.trace[step].k;
        const Points<double> xl_next = leader_waypoints(spec.schedule, reference, part, k).second;
        Points<double> y_next = y;
        for (int i = 0; i < part.num_leaders(); ++i) {
            y_next.col(part.leaders()[static_cast<std::size_t>(i)]) = xl_next.col(i);
        }
        const StateMap<double> now = states_of(y, all);
        if (spec.law == Law::Stationary) {
            for (int f : part.followers()) {
                y_next.col(f) = y.col(f) + T.value() * local_control_input_stationary(g, weights, f, VectorX<double>(y.col(f)), now);
            }
        } else {
            // Each follower's update needs its neighbours' k+1 states; relax the
            // per-agent updates Gauss-Seidel style until they are self-consistent.
            constexpr int kMaxSweeps = 100000;
            int sweep = 0;
            for (; sweep < kMaxSweeps; ++sweep) {
                double change = 0;
                for (int f : part.followers()) {
                    const StateMap<double> next = states_of(y_next, all);
                    const VectorX<double> z =
                        y.col(f) + T.value() * local_control_input_dynamic(g, weights, f, VectorX<double>(y.col(f)), now, next, T);
                    change = std::max(change, (z - y_next.col(f)).cwiseAbs().maxCoeff());
                    y_next.col(f) = z;
                }
                if (change <= 1e-15 * std::max(1.0, y_next.cwiseAbs().maxCoeff())) {
                    break;
                }
            }
            require(sweep < kMaxSweeps, "per-agent dynamic law relaxation did not converge", ErrorKind::Solver);
        }
        y = y_next;
        worst = std::max(worst, (y - global.trace[step + 1].x).cwiseAbs().maxCoeff());
    }
    return worst;
}

std::vector<RunResult> run_batch(const std::vector<ScenarioSpec>& specs) {
    std::vector<std::future<RunResult>> futures;
    futures.reserve(specs.size());
    for (const auto& s : specs) {
        futures.push_back(std::async(std::launch::async, [&s] { return run_scenario(s); }));
    }
    std::vector<RunResult> out;
    out.reserve(specs.size());
    for (auto& f : futures) {
        out.push_back(f.get());
    }
    return out;
}

}  // namespace affinesim
