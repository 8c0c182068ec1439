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
#include "affinesim/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace affinesim::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        parse_error(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const std::string& what) {
    if (!j.is_number()) {
        parse_error(what + " must be a number");
    }
    return j.get<double>();
}

int integer(const json& j, const std::string& what) {
    if (!j.is_number_integer()) {
        parse_error(what + " must be an integer");
    }
    return j.get<int>();
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) {
        parse_error(what + " must be an array");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = number(j[i], what + " entry");
    }
    return v;
}

// Rows of equal-length numeric arrays as the columns of a d x m matrix.
Points<double> points_from_json(const json& j, int d, const std::string& what) {
    if (!j.is_array()) {
        parse_error(what + " must be an array of points");
    }
    Points<double> p(d, static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto v = vector_from_json(j[i], what);
        if (v.size() != d) {
            parse_error(what + ": point " + std::to_string(i + 1) + " has " + std::to_string(v.size()) +
                        " coordinates, expected " + std::to_string(d));
        }
        p.col(static_cast<Eigen::Index>(i)) = v;
    }
    return p;
}

json points_to_json(const Points<double>& p) {
    json out = json::array();
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
        json pt = json::array();
        for (Eigen::Index r = 0; r < p.rows(); ++r) {
            pt.push_back(p(r, c));
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        parse_error("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        parse_error(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

FrameworkFile framework_from_json(const json& j) {
    try {
        const int d = integer(field(j, "d"), "d");
        if (d < 1) {
            parse_error("d must be positive");
        }
        Points<double> pos = points_from_json(field(j, "positions"), d, "positions");
        const int n = static_cast<int>(pos.cols());
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : field(j, "edges")) {
            if (!e.is_array() || e.size() != 2) {
                parse_error("each edge must be a pair [i, j]");
            }
            edges.emplace_back(integer(e[0], "edge endpoint") - 1, integer(e[1], "edge endpoint") - 1);
        }
        FrameworkFile out{Framework<double>(Graph(n, edges), Configuration<double>(std::move(pos))), std::nullopt};
        if (j.contains("leaders")) {
            std::vector<int> leaders;
            for (const auto& l : j.at("leaders")) {
                leaders.push_back(integer(l, "leader index") - 1);
            }
            out.partition = LeaderPartition(n, leaders);
        }
        return out;
    } catch (const json::exception& e) {
        parse_error(std::string("framework: ") + e.what());
    }
}

json framework_to_json(const Framework<double>& fw, const std::optional<LeaderPartition>& part) {
    json j;
    j["d"] = fw.dim();
    j["positions"] = points_to_json(fw.config().positions());
    json edges = json::array();
    for (const auto& e : fw.graph().edges()) {
        edges.push_back({e.i + 1, e.j + 1});
    }
    j["edges"] = edges;
    if (part) {
        json leaders = json::array();
        for (int l : part->leaders()) {
            leaders.push_back(l + 1);
        }
        j["leaders"] = leaders;
    }
    return j;
}

StressFile stress_from_json(const json& j) {
    try {
        const int n = integer(field(j, "n"), "n");
        const Eigen::MatrixXd m = matrix_from_json(field(j, "entries"));
        if (m.rows() != n || m.cols() != n) {
            parse_error("stress entries must be n x n");
        }
        StressFile out{StressMatrix<double>(m), 0.0};
        if (j.contains("precision")) {
            out.precision = number(j.at("precision"), "precision");
        }
        return out;
    } catch (const json::exception& e) {
        parse_error(std::string("stress: ") + e.what());
    }
}

json stress_to_json(const StressMatrix<double>& s, double precision) {
    json j;
    j["n"] = s.size();
    j["entries"] = matrix_to_json(s.entries());
    if (precision > 0) {
        j["precision"] = precision;
    }
    return j;
}

std::vector<WeightedEdge<double>> weights_from_json(const json& j) {
    std::vector<WeightedEdge<double>> out;
    for (const auto& e : field(j, "edges")) {
        if (!e.is_array() || e.size() != 3) {
            parse_error("each weight must be a triple [i, j, w]");
        }
        out.push_back({integer(e[0], "edge endpoint") - 1, integer(e[1], "edge endpoint") - 1, number(e[2], "weight")});
    }
    return out;
}

json weights_to_json(const EdgeWeights<double>& w) {
    json edges = json::array();
    for (const auto& [e, v] : w) {
        edges.push_back({e.i + 1, e.j + 1, v});
    }
    return json{{"edges", edges}};
}

ManoeuvreSchedule<double> schedule_from_json(const json& j) {
    std::vector<ManoeuvreSegment<double>> segs;
    try {
        for (const auto& s : field(j, "segments")) {
            ManoeuvreSegment<double> seg;
            seg.k0 = integer(field(s, "k0"), "k0");
            seg.k1 = integer(field(s, "k1"), "k1");
            const auto kind = field(s, "kind").get<std::string>();
            const json params = s.value("params", json::object());
            if (kind == "translation") {
                seg.kind = ManoeuvreKind::Translation;
                seg.params.offset = vector_from_json(field(params, "v"), "translation v");
            } else if (kind == "scaling") {
                seg.kind = ManoeuvreKind::Scaling;
                if (params.contains("diag")) {
                    seg.params.scale = vector_from_json(params.at("diag"), "scaling diag");
                } else {
                    seg.params.scale = Eigen::VectorXd::Constant(1, number(field(params, "c"), "scaling c"));
                }
            } else if (kind == "rotation") {
                seg.kind = ManoeuvreKind::Rotation;
                seg.params.angle = params.contains("degrees")
                                       ? number(params.at("degrees"), "rotation degrees") * std::numbers::pi / 180.0
                                       : number(field(params, "angle"), "rotation angle");
            } else if (kind == "shear") {
                seg.kind = ManoeuvreKind::Shear;
                seg.params.factor = number(field(params, "factor"), "shear factor");
            } else {
                parse_error("unknown manoeuvre kind '" + kind + "'");
            }
            if (params.contains("axes")) {
                const auto& ax = params.at("axes");
                if (!ax.is_array() || ax.size() != 2) {
                    parse_error("axes must be a pair");
                }
                seg.params.axes = {integer(ax[0], "axis"), integer(ax[1], "axis")};
            }
            const auto interp = s.value("interp", std::string("linear"));
            if (interp == "hold") {
                seg.interp = Interpolation::Hold;
            } else if (interp == "linear") {
                seg.interp = Interpolation::Linear;
            } else {
                parse_error("unknown interpolation '" + interp + "'");
            }
            segs.push_back(seg);
        }
    } catch (const json::exception& e) {
        parse_error(std::string("schedule: ") + e.what());
    }
    return ManoeuvreSchedule<double>(std::move(segs));
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (j.is_number()) {
        return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
    }
    if (!j.is_array() || j.empty()) {
        parse_error("matrix must be a number or a non-empty array");
    }
    if (!j.front().is_array()) {
        return vector_from_json(j, "matrix");
    }
    const std::size_t cols = j.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            parse_error("matrix rows must have equal length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], "matrix entry");
        }
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        out.push_back(row);
    }
    return out;
}

json resolve_scenario(const json& scenario, const std::filesystem::path& base_dir) {
    if (!scenario.is_object()) {
        parse_error("scenario must be a JSON object");
    }
    json out = scenario;
    auto load = [&](const json& ref) { return read_json(base_dir / ref.get<std::string>()); };
    if (out.contains("framework") && out["framework"].is_string()) {
        out["framework"] = load(out["framework"]);
    }
    if (out.contains("schedule") && out["schedule"].is_string()) {
        out["schedule"] = load(out["schedule"]);
    }
    if (out.contains("stress")) {
        json& s = out["stress"];
        if (s.is_string() && s.get<std::string>() != "synthesize") {
            s = load(s);
        } else if (s.is_object() && s.contains("file")) {
            s = load(s["file"]);
        } else if (s.is_object() && s.contains("weights_file")) {
            s = load(s["weights_file"]);
        }
    }
    return out;
}

ScenarioSpec scenario_from_json(const json& j) {
    try {
        ScenarioSpec spec;
        auto fw = framework_from_json(field(j, "framework"));
        spec.framework = fw.framework;
        const int n = spec.framework.size();
        const int d = spec.framework.dim();
        if (j.contains("leaders")) {
            std::vector<int> leaders;
            for (const auto& l : j.at("leaders")) {
                leaders.push_back(integer(l, "leader index") - 1);
            }
            spec.partition = LeaderPartition(n, leaders);
        } else if (fw.partition) {
            spec.partition = *fw.partition;
        } else {
            parse_error("scenario needs a leader list");
        }

        const json stress = j.value("stress", json("synthesize"));
        if (stress.is_string() && stress.get<std::string>() == "synthesize") {
            spec.stress = SynthesizeStress{};
        } else if (stress.is_object() && stress.contains("entries")) {
            auto sf = stress_from_json(stress);
            spec.stress = sf.stress;
            spec.certificate.data_precision = sf.precision;
        } else if (stress.is_object() && stress.contains("edges")) {
            spec.stress = assemble_stress(spec.framework.graph(), weights_from_json(stress));
        } else {
            parse_error("stress must be \"synthesize\", a stress matrix, or edge weights");
        }
        if (j.contains("certificate")) {
            const auto& c = j.at("certificate");
            spec.certificate.rank_rel_tol = c.value("rank_rel_tol", spec.certificate.rank_rel_tol);
            spec.certificate.psd_tol = c.value("psd_tol", spec.certificate.psd_tol);
            spec.certificate.data_precision = c.value("data_precision", spec.certificate.data_precision);
        }

        spec.law = law_from_string(j.value("law", std::string("stationary")));
        spec.T = number(field(j, "T"), "T");
        if (j.contains("schedule")) {
            spec.schedule = schedule_from_json(j.at("schedule"));
        }
        spec.initial_followers = points_from_json(field(j, "initial_followers"), d, "initial_followers");
        spec.max_steps = j.value("max_steps", spec.max_steps);
        spec.tol = j.value("tol", spec.tol);
        spec.window = j.value("window", spec.window);
        spec.divergence_threshold = j.value("divergence_threshold", spec.divergence_threshold);
        spec.seed = j.value("seed", spec.seed);
        if (j.contains("linear")) {
            const auto& l = j.at("linear");
            GeneralLinearParams lp;
            lp.A = matrix_from_json(field(l, "A"));
            lp.B = matrix_from_json(field(l, "B"));
            lp.Q = l.contains("Q") ? matrix_from_json(l.at("Q")) : Eigen::MatrixXd::Identity(lp.A.rows(), lp.A.cols());
            lp.epsilon = l.value("epsilon", lp.epsilon);
            spec.linear = lp;
        }
        return spec;
    } catch (const json::exception& e) {
        parse_error(std::string("scenario: ") + e.what());
    }
}

std::string format_roundtrip(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string format6(double v) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6g", v == 0.0 ? 0.0 : v);  // no "-0" in reports
    return std::string(buf.data());
}

void write_trace_csv(std::ostream& os, const RunResult& result) {
    os << "k,agent_id,coord_index,value,delta_norm,converged,diverged\n";
    for (const auto& r : result.trace) {
        const std::string tail = format_roundtrip(r.delta_norm) + "," + (r.converged ? "1" : "0") + "," +
                                 (r.diverged ? "1" : "0") + "\n";
        for (Eigen::Index a = 0; a < r.x.cols(); ++a) {
            for (Eigen::Index c = 0; c < r.x.rows(); ++c) {
                os << r.k << ',' << (a + 1) << ',' << c << ',' << format_roundtrip(r.x(c, a)) << ',' << tail;
            }
        }
    }
}

namespace {

const char* status_name(RunStatus s) {
    switch (s) {
    case RunStatus::Converged:
        return "converged";
    case RunStatus::Diverged:
        return "diverged";
    case RunStatus::BudgetExhausted:
        return "budget_exhausted";
    }
    return "unknown";
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

json run_summary(const RunResult& result) {
    json j;
    const auto& last = result.trace.back();
    j["final_delta"] = last.delta_norm;
    j["steps"] = last.k;
    j["converged_at"] = optional_json(result.converged_at);
    j["status"] = status_name(result.status);
    const auto& f = result.flags;
    j["theorem_flags"] = {
        {"law", to_string(f.law)},
        {"T", f.T},
        {"mu_min", optional_json(f.mu_min)},
        {"theorem1_ok", optional_json(f.theorem1_ok)},
        {"theorem2_ok", optional_json(f.theorem2_ok)},
        {"error_spectral_radius", f.error_spectral_radius},
        {"gain_spectral_radius", optional_json(f.gain_spectral_radius)},
        {"coupling_spectral_radius", optional_json(f.coupling_spectral_radius)},
        {"riccati_residual", optional_json(f.riccati_residual)},
    };
    j["certificate"] = {
        {"rank", result.certificate.rank},
        {"expected_rank", result.certificate.expected_rank},
        {"min_eigenvalue", result.certificate.min_eigenvalue},
        {"psd", result.certificate.psd},
        {"connectivity_ok", result.certificate.connectivity_ok},
        {"pass", result.certificate.pass},
    };
    j["final_positions"] = points_to_json(last.x);
    return j;
}

namespace {

struct Viewport {
    double xmin, xmax, ymin, ymax;
    double size = 600, margin = 30;

    [[nodiscard]] double sx(double x) const { return margin + (x - xmin) / (xmax - xmin) * (size - 2 * margin); }
    [[nodiscard]] double sy(double y) const { return size - margin - (y - ymin) / (ymax - ymin) * (size - 2 * margin); }
};

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_trajectory_svg(std::ostream& os, const RunResult& result, const LeaderPartition& part) {
    require(!result.trace.empty() && result.trace.front().x.rows() == 2, "trajectory plot needs a planar (d = 2) run");
    Viewport vp{1e300, -1e300, 1e300, -1e300};
    auto extend = [&vp](double x, double y) {
        if (std::isfinite(x) && std::isfinite(y)) {
            vp.xmin = std::min(vp.xmin, x);
            vp.xmax = std::max(vp.xmax, x);
            vp.ymin = std::min(vp.ymin, y);
            vp.ymax = std::max(vp.ymax, y);
        }
    };
    for (const auto& r : result.trace) {
        for (Eigen::Index a = 0; a < r.x.cols(); ++a) {
            extend(r.x(0, a), r.x(1, a));
        }
    }
    const auto& targets = result.trace.back().xf_star;
    for (Eigen::Index a = 0; a < targets.cols(); ++a) {
        extend(targets(0, a), targets(1, a));
    }
    const double span = std::max({vp.xmax - vp.xmin, vp.ymax - vp.ymin, 1e-9});
    const double cx = (vp.xmin + vp.xmax) / 2;
    const double cy = (vp.ymin + vp.ymax) / 2;
    vp.xmin = cx - span / 2;
    vp.xmax = cx + span / 2;
    vp.ymin = cy - span / 2;
    vp.ymax = cy + span / 2;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
    os << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
    const auto n = result.trace.front().x.cols();
    for (Eigen::Index a = 0; a < n; ++a) {
        const bool leader = std::find(part.leaders().begin(), part.leaders().end(), a) != part.leaders().end();
        os << "<polyline class=\"agent\" data-agent=\"" << (a + 1) << "\" data-role=\"" << (leader ? "leader" : "follower")
           << "\" fill=\"none\" stroke=\"" << kPalette[static_cast<std::size_t>(a) % kPalette.size()]
           << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& r : result.trace) {
            if (std::isfinite(r.x(0, a)) && std::isfinite(r.x(1, a))) {
                os << format6(vp.sx(r.x(0, a))) << ',' << format6(vp.sy(r.x(1, a))) << ' ';
            }
        }
        os << "\"/>\n";
    }
    for (Eigen::Index f = 0; f < targets.cols(); ++f) {
        os << "<circle class=\"target\" data-agent=\"" << (part.followers()[static_cast<std::size_t>(f)] + 1)
           << "\" cx=\"" << format6(vp.sx(targets(0, f))) << "\" cy=\"" << format6(vp.sy(targets(1, f)))
           << "\" r=\"5\" fill=\"none\" stroke=\"black\"/>\n";
    }
    os << "</svg>\n";
}

void write_delta_svg(std::ostream& os, const RunResult& result) {
    require(!result.trace.empty(), "empty trace");
    constexpr double kFloor = 1e-16;
    std::vector<double> logs;
    for (const auto& r : result.trace) {
        const double v = std::isfinite(r.delta_norm) ? std::max(r.delta_norm, kFloor) : 1e300;
        logs.push_back(std::log10(v));
    }
    const double lo = *std::min_element(logs.begin(), logs.end());
    const double hi = std::max(*std::max_element(logs.begin(), logs.end()), lo + 1);
    const double kmax = std::max(1, result.trace.back().k);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"300\" viewBox=\"0 0 600 300\">\n";
    os << "<rect width=\"600\" height=\"300\" fill=\"white\"/>\n";
    os << "<polyline class=\"delta\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double x = 30 + result.trace[i].k / kmax * 540;
        const double y = 270 - (logs[i] - lo) / (hi - lo) * 240;
        os << format6(x) << ',' << format6(y) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"30\" y=\"20\" font-size=\"12\">log10 ||delta|| from " << format6(lo) << " to " << format6(hi)
       << " over " << result.trace.back().k << " steps</text>\n";
    os << "</svg>\n";
}

}  // namespace affinesim::io
