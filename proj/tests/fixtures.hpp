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
#ifndef AFFINESIM_TESTS_FIXTURES_HPP
#define AFFINESIM_TESTS_FIXTURES_HPP

#include "affinesim/sim.hpp"

#include <random>

namespace fixtures {

using namespace affinesim;

// The five-agent planar formation: leaders 1-3, followers 4-5 (0-based 0-2, 3-4).
inline Points<double> reference_positions() {
    Points<double> p(2, 5);
    p << 1, 0, 0, -1, -2,
         0, 1, -1, 0, 0;
    return p;
}

inline Graph five_agent_graph() {
    return Graph(5, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
}

inline Framework<double> five_agent_framework() {
    return Framework<double>(five_agent_graph(), Configuration<double>(reference_positions()));
}

inline LeaderPartition five_agent_partition() { return LeaderPartition(5, {0, 1, 2}); }

// Stress as printed to three decimals.
inline StressMatrix<double> printed_stress() {
    Eigen::MatrixXd m(5, 5);
    m << 0.292, -0.292, -0.292, 0.292, 0.0,
        -0.292, 0.354, 0.354, -0.542, 0.125,
        -0.292, 0.354, 0.354, -0.542, 0.125,
         0.292, -0.542, -0.542, 1.292, -0.5,
         0.0, 0.125, 0.125, -0.5, 0.25;
    return StressMatrix<double>(m);
}

// Exact weights whose three-decimal rounding reproduces every printed entry:
// 7/24 = 0.2917, 17/48 = 0.3542, 13/24 = 0.5417, 1/8, 1/2 (and 31/24 = 1.2917 on the diagonal).
inline std::vector<WeightedEdge<double>> exact_weights() {
    return {{0, 1, 7.0 / 24}, {0, 2, 7.0 / 24}, {0, 3, -7.0 / 24}, {1, 2, -17.0 / 48}, {1, 3, 13.0 / 24},
            {1, 4, -1.0 / 8}, {2, 3, 13.0 / 24}, {2, 4, -1.0 / 8}, {3, 4, 1.0 / 2}};
}

inline StressMatrix<double> exact_stress() { return assemble_stress(five_agent_graph(), exact_weights()); }

// Explicit Kronecker product; test-only oracle for the matrix-form identities.
inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = normal(rng);
    }
    return m;
}

inline ScenarioSpec reference_scenario(double T = 1.0) {
    ScenarioSpec s;
    s.framework = five_agent_framework();
    s.partition = five_agent_partition();
    s.stress = printed_stress();
    s.certificate.data_precision = 5e-4;
    s.law = Law::Stationary;
    s.T = T;
    s.initial_followers.resize(2, 2);
    s.initial_followers << -4, -3,
                            3, -2;
    s.max_steps = 2000;
    s.tol = 1e-9;
    return s;
}

}  // namespace fixtures

#endif  // AFFINESIM_TESTS_FIXTURES_HPP
