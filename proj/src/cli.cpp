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
#include "affinesim/cli.hpp"

#include "affinesim/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace affinesim::cli {

namespace fs = std::filesystem;
using io::format6;
using io::json;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidInput:
        return kParseError;
    case ErrorKind::Certificate:
    case ErrorKind::Localizability:
        return kCertificateFail;
    case ErrorKind::Solver:
        return kSolverFail;
    }
    return kParseError;
}

std::optional<std::uint64_t> env_seed() {
    if (const char* s = std::getenv("AFFINESIM_SEED"); s != nullptr && *s != '\0') {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, std::string("AFFINESIM_SEED is not an unsigned integer: ") + s);
        }
    }
    return std::nullopt;
}

std::vector<int> parse_index_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stoi(tok) - 1);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, "bad index '" + tok + "' in list '" + s + "'");
        }
    }
    return out;
}

void print_certificate(std::ostream& out, const RigidityCertificate& c, int d) {
    out << "connectivity: " << (c.connectivity_ok ? "" : "not ") << (d + 1) << "-connected\n";
    out << "rank " << c.rank << "/" << c.expected_rank << ", " << (c.psd ? "PSD" : "not PSD")
        << " (min eigenvalue " << format6(c.min_eigenvalue) << ")\n";
}

// --- validate -------------------------------------------------------------

struct ValidateArgs {
    std::string framework;
    std::string stress;
    double precision = -1;
    std::uint64_t seed = 1;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
    const auto fw = io::framework_from_json(io::read_json(a.framework));
    const auto& f = fw.framework;
    const int n = f.size();
    const int d = f.dim();
    out << "framework: n = " << n << ", d = " << d << ", " << f.graph().edges().size() << " edges\n";
    if (n < d + 2) {
        out << "certificate: FAIL (n < d+2: need at least " << d + 2 << " nodes)\n";
        return kCertificateFail;
    }

    CertificateOptions opts;
    StressMatrix<double> stress;
    if (!a.stress.empty()) {
        const auto sf = io::stress_from_json(io::read_json(a.stress));
        stress = sf.stress;
        opts.data_precision = a.precision >= 0 ? a.precision : sf.precision;
        if (stress.size() != n) {
            throw Error(ErrorKind::Parse, "stress size does not match framework");
        }
    } else {
        SynthesisOptions so;
        so.seed = env_seed().value_or(a.seed);
        try {
            stress = synthesize_stress(f, so).stress;
            out << "stress: synthesized (seed " << so.seed << ")\n";
        } catch (const Error& e) {
            out << "stress synthesis failed: " << e.what() << "\n";
            out << "certificate: FAIL\n";
            return kCertificateFail;
        }
    }
    const auto cert = check_rigidity_certificate(stress, f, opts);
    print_certificate(out, cert, d);
    if (opts.data_precision > 0) {
        out << "data precision: " << format6(opts.data_precision) << " (eigenvalues within "
            << format6(opts.data_precision * n) << " treated as zero)\n";
    }
    out << "equilibrium residual: " << format6(verify_equilibrium(stress, f.config())) << "\n";
    out << "row-sum defect: " << format6(stress.row_sum_defect()) << "\n";
    if (fw.partition) {
        const auto lr = validate_leader_selection(f, *fw.partition);
        out << "leaders: " << lr.num_leaders << "/" << lr.required_leaders << ", affine span dimension "
            << lr.span_dimension << " -> " << (lr.pass ? "ok" : "insufficient") << "\n";
    }
    out << "certificate: " << (cert.pass ? "PASS" : "FAIL") << "\n";
    return cert.pass ? kOk : kCertificateFail;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::string manifest;
    std::string out_dir;
    bool plot = false;
};

int status_exit(RunStatus s) {
    switch (s) {
    case RunStatus::Converged:
        return kOk;
    case RunStatus::Diverged:
        return kDiverged;
    case RunStatus::BudgetExhausted:
        return kBudgetExhausted;
    }
    return kBudgetExhausted;
}

json build_manifest(const json& resolved, const std::string& scenario_path, const fs::path& out_dir, std::uint64_t seed) {
    json m;
    m["tool"] = "affinesim";
    m["version"] = io::kToolVersion;
    m["inputs"] = {{"scenario", scenario_path}};
    m["output_dir"] = out_dir.string();
    m["seed"] = seed;
    m["scenario"] = resolved;
    return m;
}

int run_and_write(const json& resolved, const fs::path& out_dir, bool plot, std::ostream& out) {
    const ScenarioSpec spec = io::scenario_from_json(resolved);
    const RunResult result = run_scenario(spec);
    {
        std::ofstream csv(out_dir / "trace.csv");
        require(static_cast<bool>(csv), "cannot write trace.csv");
        io::write_trace_csv(csv, result);
    }
    const json summary = io::run_summary(result);
    io::write_json(out_dir / "summary.json", summary);
    if (plot) {
        if (spec.framework.dim() == 2) {
            std::ofstream svg(out_dir / "trajectories.svg");
            io::write_trajectory_svg(svg, result, spec.partition);
        } else {
            out << "plot: trajectories skipped (d != 2)\n";
        }
        std::ofstream dsvg(out_dir / "delta.svg");
        io::write_delta_svg(dsvg, result);
    }
    out << "law: " << to_string(spec.law) << ", T = " << format6(spec.T) << "\n";
    if (result.flags.theorem1_ok && spec.law == Law::Stationary) {
        out << "T*mu_min = " << format6(spec.T * *result.flags.mu_min) << (*result.flags.theorem1_ok ? " > -2" : " <= -2")
            << "\n";
    }
    out << "status: " << summary["status"].get<std::string>() << " after " << result.trace.back().k << " steps, final delta "
        << format6(result.trace.back().delta_norm) << "\n";
    const auto& x = result.trace.back().x;
    for (int f : spec.partition.followers()) {
        out << "agent " << f + 1 << ": (";
        for (Eigen::Index c = 0; c < x.rows(); ++c) {
            out << (c ? ", " : "") << format6(x(c, f));
        }
        out << ")\n";
    }
    return status_exit(result.status);
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    json resolved;
    std::string scenario_path = a.scenario;
    fs::path out_dir = a.out_dir;
    if (!a.manifest.empty()) {
        const json manifest = io::read_json(a.manifest);
        if (!manifest.contains("scenario")) {
            throw Error(ErrorKind::Parse, "manifest has no scenario");
        }
        resolved = manifest.at("scenario");
        resolved["seed"] = manifest.value("seed", resolved.value("seed", std::uint64_t{1}));
        scenario_path = manifest.value("inputs", json::object()).value("scenario", std::string());
        if (out_dir.empty()) {
            out_dir = manifest.value("output_dir", std::string());
        }
    } else {
        if (scenario_path.empty()) {
            throw Error(ErrorKind::Parse, "simulate needs a scenario file or --manifest");
        }
        resolved = io::resolve_scenario(io::read_json(scenario_path), fs::path(scenario_path).parent_path());
    }
    if (const auto s = env_seed()) {
        resolved["seed"] = *s;
    }
    if (out_dir.empty()) {
        throw Error(ErrorKind::Parse, "simulate needs --out");
    }
    fs::create_directories(out_dir);
    const std::uint64_t seed = resolved.value("seed", std::uint64_t{1});
    io::write_json(out_dir / "manifest.json", build_manifest(resolved, scenario_path, out_dir, seed));
    return run_and_write(resolved, out_dir, a.plot, out);
}

// --- batch ----------------------------------------------------------------

int cmd_batch(const std::vector<std::string>& scenarios, const std::string& out_root, std::ostream& out) {
    std::vector<json> resolved;
    std::vector<ScenarioSpec> specs;
    for (const auto& s : scenarios) {
        resolved.push_back(io::resolve_scenario(io::read_json(s), fs::path(s).parent_path()));
        if (const auto seed = env_seed()) {
            resolved.back()["seed"] = *seed;
        }
        specs.push_back(io::scenario_from_json(resolved.back()));
    }
    const auto results = run_batch(specs);
    int worst = kOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const fs::path dir = fs::path(out_root) / fs::path(scenarios[i]).stem();
        fs::create_directories(dir);
        io::write_json(dir / "manifest.json",
                       build_manifest(resolved[i], scenarios[i], dir, resolved[i].value("seed", std::uint64_t{1})));
        std::ofstream csv(dir / "trace.csv");
        io::write_trace_csv(csv, results[i]);
        io::write_json(dir / "summary.json", io::run_summary(results[i]));
        const int code = status_exit(results[i].status);
        out << scenarios[i] << ": " << io::run_summary(results[i])["status"].get<std::string>() << "\n";
        worst = std::max(worst, code);
    }
    return worst;
}

// --- stability ------------------------------------------------------------

struct StabilityArgs {
    std::string law = "stationary";
    std::string stress;
    std::string partition;
    double T = 1.0;
};

int cmd_stability(const StabilityArgs& a, std::ostream& out) {
    const Law law = law_from_string(a.law);
    require(law != Law::GeneralLinear, "stability report covers the stationary and dynamic laws; use `riccati` for general-linear");
    const SamplingPeriod<double> T(a.T);
    if (law == Law::Dynamic) {
        const double factor = 1.0 - a.T;
        out << "law: dynamic, T = " << format6(a.T) << "\n";
        out << "disagreement factor (1-T) = " << format6(factor) << ", spectral radius " << format6(std::abs(factor)) << "\n";
        if (std::abs(factor) < 1.0) {
            out << "T = " << format6(a.T) << " < 2: stable, decay " << format6(std::abs(factor)) << " per step\n";
        } else if (std::abs(factor) == 1.0) {
            out << "T = " << format6(a.T) << ": marginally unstable (|1-T| = 1)\n";
        } else {
            out << "T = " << format6(a.T) << " > 2: unstable (|1-T| = " << format6(std::abs(factor)) << ")\n";
        }
        return kOk;
    }
    require(!a.stress.empty() && !a.partition.empty(), "stationary stability needs --stress and --partition");
    const auto sf = io::stress_from_json(io::read_json(a.stress));
    const LeaderPartition part(sf.stress.size(), parse_index_list(a.partition));
    const auto blocks = partition_stress(sf.stress, part);
    const auto mu = neg_ff_eigenvalues(blocks);
    const double mu_min = mu(0);
    const double rho = spectral_radius(stationary_error_matrix(blocks, T));
    out << "law: stationary, T = " << format6(a.T) << "\n";
    out << "eigenvalues of -Omega_ff:";
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        out << " " << format6(mu(i));
    }
    out << "\nmu_min = " << format6(mu_min) << "\n";
    if (mu_min >= 0) {
        out << "Omega_ff is not positive definite: condition cannot hold\n";
        return kCertificateFail;
    }
    const bool ok = check_theorem1(T, mu_min);
    out << "T*mu_min = " << format6(a.T * mu_min) << (ok ? " > -2: stable" : " <= -2: unstable") << "\n";
    out << "spectral radius of I - T*Omega_ff: " << format6(rho) << "\n";
    return kOk;
}

// --- riccati --------------------------------------------------------------

struct RiccatiArgs {
    std::string A, B, Q;
    double tol = 1e-10;
    int max_iter = 100000;
};

void print_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
    out << name << " =\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << " ";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << " " << format6(m(r, c));
        }
        out << "\n";
    }
}

int cmd_riccati(const RiccatiArgs& a, std::ostream& out) {
    const Eigen::MatrixXd A = io::matrix_from_json(io::read_json(a.A));
    const Eigen::MatrixXd B = io::matrix_from_json(io::read_json(a.B));
    const Eigen::MatrixXd Q = io::matrix_from_json(io::read_json(a.Q));
    const LinearPlant<double> plant(A, B);
    const auto sol = solve_mare(plant, Q, a.tol, a.max_iter);
    print_matrix(out, "P", sol.P);
    print_matrix(out, "K", sol.K);
    out << "residual: " << format6(sol.residual) << "\n";
    out << "iterations: " << sol.iterations << "\n";
    out << "spectral radius of A+BK: " << format6(spectral_radius(A + B * sol.K)) << "\n";
    return kOk;
}

// --- synth ----------------------------------------------------------------

struct SynthArgs {
    std::string framework;
    std::string out_file;
    std::uint64_t seed = 1;
    int restarts = 32;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    const auto fw = io::framework_from_json(io::read_json(a.framework));
    SynthesisOptions opts;
    opts.seed = env_seed().value_or(a.seed);
    opts.restarts = a.restarts;
    try {
        const auto res = synthesize_stress(fw.framework, opts);
        out << "stress space dimension: " << res.stress_space_dim << "\n";
        print_certificate(out, res.certificate, fw.framework.dim());
        out << "equilibrium residual: " << format6(verify_equilibrium(res.stress, fw.framework.config())) << "\n";
        out << "certificate: PASS\n";
        if (!a.out_file.empty()) {
            io::write_json(a.out_file, io::weights_to_json(res.weights));
            out << "weights written to " << a.out_file << "\n";
        }
        return kOk;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Certificate) {
            throw;
        }
        out << "synthesis failed: " << e.what() << "\n";
        return kCertificateFail;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stress-matrix affine formation control toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::kToolVersion);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Check the universal-rigidity certificate of a framework");
    validate->add_option("framework", va.framework, "Framework JSON")->required();
    validate->add_option("--stress", va.stress, "Stress matrix JSON (synthesized when omitted)");
    validate->add_option("--precision", va.precision, "Entrywise precision of the stress values");
    validate->add_option("--seed", va.seed, "Seed for stress synthesis");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write trace, summary and manifest");
    simulate->add_option("scenario", sa.scenario, "Scenario JSON");
    simulate->add_option("--manifest", sa.manifest, "Re-run from a previously written manifest");
    simulate->add_option("--out", sa.out_dir, "Output directory");
    simulate->add_flag("--plot", sa.plot, "Write SVG plots");

    std::vector<std::string> batch_files;
    std::string batch_out;
    auto* batch = app.add_subcommand("batch", "Run independent scenarios concurrently");
    batch->add_option("scenarios", batch_files, "Scenario JSON files")->required();
    batch->add_option("--out", batch_out, "Output root directory")->required();

    StabilityArgs st;
    auto* stability = app.add_subcommand("stability", "Report the sampling-period stability condition");
    stability->add_option("--law", st.law, "stationary | dynamic")->check(CLI::IsMember({"stationary", "dynamic"}));
    stability->add_option("--stress", st.stress, "Stress matrix JSON");
    stability->add_option("--partition", st.partition, "Comma-separated 1-based leader indices");
    stability->add_option("--T", st.T, "Sampling period")->required();

    RiccatiArgs ra;
    auto* riccati = app.add_subcommand("riccati", "Solve the modified algebraic Riccati equation");
    riccati->add_option("--A", ra.A, "A matrix JSON")->required();
    riccati->add_option("--B", ra.B, "B matrix JSON")->required();
    riccati->add_option("--Q", ra.Q, "Q matrix JSON")->required();
    riccati->add_option("--tol", ra.tol, "Residual tolerance");
    riccati->add_option("--max-iter", ra.max_iter, "Iteration cap");

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Search for a certificate-passing stress");
    synth->add_option("framework", sy.framework, "Framework JSON")->required();
    synth->add_option("--out", sy.out_file, "Weights JSON to write");
    synth->add_option("--seed", sy.seed, "Random seed");
    synth->add_option("--restarts", sy.restarts, "Number of random restarts");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) {
        argv.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParseError;
    }

    try {
        if (*validate) {
            return cmd_validate(va, out);
        }
        if (*simulate) {
            return cmd_simulate(sa, out);
        }
        if (*batch) {
            return cmd_batch(batch_files, batch_out, out);
        }
        if (*stability) {
            return cmd_stability(st, out);
        }
        if (*riccati) {
            return cmd_riccati(ra, out);
        }
        if (*synth) {
            return cmd_synth(sy, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kParseError;
    }
    return kParseError;
}

}  // namespace affinesim::cli
