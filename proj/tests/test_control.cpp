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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"

#include <complex>
#include <numbers>

using namespace affinesim;
using doctest::Approx;

namespace {

const LeaderPartition kPart = fixtures::five_agent_partition();

StressBlocks<double> reference_blocks() { return partition_stress(fixtures::printed_stress(), kPart); }

Points<double> reference_leaders() { return select_columns(fixtures::reference_positions(), kPart.leaders()); }

Points<double> reference_initial_followers() {
    Points<double> xf(2, 2);
    xf << -4, -3,
           3, -2;
    return xf;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

SamplingPeriod<double> period(double T) { return SamplingPeriod<double>(T); }

}  // namespace

TEST_CASE("sampling period must be positive and finite") {
    CHECK_THROWS_AS(period(0.0), Error);
    CHECK_THROWS_AS(period(-1.0), Error);
    CHECK_THROWS_AS(period(std::nan("")), Error);
    CHECK(period(0.25).value() == 0.25);
}

TEST_CASE("stationary law: fixed point at the targets for any T") {
    const auto blocks = reference_blocks();
    const auto xl = reference_leaders();
    const auto target = follower_targets(blocks, xl);
    for (double T : {0.1, 0.5, 1.0, 1.3, 1.4, 3.0}) {
        CHECK(max_abs(stationary_leader_step(blocks, period(T), target, xl) - target) < 1e-12);
    }
}

TEST_CASE("stationary law: one step from zero followers") {
    const auto blocks = reference_blocks();
    const auto xl = reference_leaders();
    const auto next = stationary_leader_step(blocks, period(1.0), Points<double>::Zero(2, 2).eval(), xl);
    const Eigen::VectorXd oracle = -fixtures::kron(blocks.fl, Eigen::MatrixXd::Identity(2, 2)) * stack<double>(xl);
    CHECK((stack<double>(next) - oracle).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stationary law matches the stacked Kronecker form") {
    std::mt19937_64 rng(2);
    const auto blocks = reference_blocks();
    const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
    for (double T : {0.3, 1.0, 1.7}) {
        const Points<double> xf = fixtures::random_matrix(rng, 2, 2);
        const Points<double> xl = fixtures::random_matrix(rng, 2, 3);
        const Eigen::VectorXd oracle =
            (Eigen::MatrixXd::Identity(4, 4) - T * fixtures::kron(blocks.ff, I2)) * stack<double>(xf) -
            T * fixtures::kron(blocks.fl, I2) * stack<double>(xl);
        CHECK((stack<double>(stationary_leader_step(blocks, period(T), xf, xl)) - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("stationary disagreement recursion is exact") {
    const auto blocks = reference_blocks();
    const auto xl = reference_leaders();
    const auto target = follower_targets(blocks, xl);
    const double T = 1.0;
    const Eigen::MatrixXd E = fixtures::kron(stationary_error_matrix(blocks, period(T)), Eigen::MatrixXd::Identity(2, 2));
    Points<double> xf = reference_initial_followers();
    Eigen::VectorXd delta = stack<double>(Points<double>(xf - target));
    for (int k = 0; k < 50; ++k) {
        xf = stationary_leader_step(blocks, period(T), xf, xl);
        delta = E * delta;
        CHECK((stack<double>(Points<double>(xf - target)) - delta).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("sampling bound lies between T = 1.3 and T = 1.4") {
    const auto blocks = reference_blocks();
    const double mu = min_eig_neg_ff(blocks);
    CHECK(check_theorem1(period(1.0), mu));
    CHECK(check_theorem1(period(1.3), mu));
    CHECK_FALSE(check_theorem1(period(1.4), mu));
    CHECK_FALSE(check_theorem1(period(2.0), mu));
    CHECK(check_theorem1(period(1e-9), mu));
    CHECK_THROWS_AS((void)check_theorem1(period(1.0), 0.5), Error);

    CHECK(spectral_radius(stationary_error_matrix(blocks, period(1.0))) == Approx(0.951).epsilon(1e-3));
    CHECK(spectral_radius(stationary_error_matrix(blocks, period(1.3))) < 1.0);
    CHECK(spectral_radius(stationary_error_matrix(blocks, period(1.4))) > 1.0);

    const auto xl = reference_leaders();
    const auto target = follower_targets(blocks, xl);
    auto run = [&](double T) {
        Points<double> xf = reference_initial_followers();
        for (int k = 0; k < 500; ++k) {
            xf = stationary_leader_step(blocks, period(T), xf, xl);
        }
        return (xf - target).norm();
    };
    CHECK(run(1.3) < 1e-6);
    CHECK(run(1.4) > 1e9);
}

TEST_CASE("dynamic law: disagreement decays by exactly (1 - T)") {
    const auto blocks = reference_blocks();
    const auto ref = reference_leaders();
    for (double T : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        Points<double> xf = reference_initial_followers();
        double prev = (xf - follower_targets(blocks, ref)).norm();
        for (int k = 0; k < 20; ++k) {
            const Points<double> xl = ref.colwise() + Eigen::Vector2d(0.3 * k, -0.1 * k);
            const Points<double> xl_next = ref.colwise() + Eigen::Vector2d(0.3 * (k + 1), -0.1 * (k + 1));
            xf = dynamic_leader_step(blocks, period(T), xf, xl, xl_next);
            const double now = (xf - follower_targets(blocks, xl_next)).norm();
            if (T == 1.0) {
                CHECK(now < 1e-12);
            } else {
                CHECK(now / prev == Approx(std::abs(1 - T)).epsilon(1e-9));
            }
            prev = now;
        }
    }
    CHECK(check_theorem2(period(1.999)));
    CHECK_FALSE(check_theorem2(period(2.0)));
}

TEST_CASE("dynamic law: stays on target when leaders are still") {
    const auto blocks = reference_blocks();
    const auto xl = reference_leaders();
    const auto target = follower_targets(blocks, xl);
    CHECK(max_abs(dynamic_leader_step(blocks, period(0.7), target, xl, xl) - target) < 1e-12);
}

TEST_CASE("per-agent stationary input") {
    const Graph star(4, {{0, 1}, {0, 2}, {0, 3}});
    const EdgeWeights<double> w{{Edge(0, 1), 1.0}, {Edge(0, 2), 1.0}, {Edge(0, 3), 1.0}};
    const Eigen::VectorXd own = Eigen::Vector2d(1, 1);

    StateMap<double> same{{1, own}, {2, own}, {3, own}};
    CHECK(local_control_input_stationary(star, w, 0, own, same).isZero());

    StateMap<double> offsets{{1, own + Eigen::Vector2d(1, 0)}, {2, own + Eigen::Vector2d(0, 2)}, {3, own + Eigen::Vector2d(-3, 1)}};
    CHECK(local_control_input_stationary(star, w, 0, own, offsets).isApprox(Eigen::VectorXd(Eigen::Vector2d(-2, 3))));

    StateMap<double> missing{{1, own}};
    CHECK_THROWS_AS((void)local_control_input_stationary(star, w, 0, own, missing), Error);
}

TEST_CASE("per-agent stationary input matches the global product for agent 4") {
    const auto om = fixtures::printed_stress();
    const Graph g = fixtures::five_agent_graph();
    const auto w = edge_weights(om, g);
    const auto blocks = partition_stress(om, kPart);
    const auto ref = fixtures::reference_positions();
    const auto xf = reference_initial_followers();
    const auto global = stationary_inputs(blocks, xf, reference_leaders());

    StateMap<double> states;
    for (int j = 0; j < 3; ++j) {
        states[j] = ref.col(j);
    }
    states[3] = xf.col(0);
    states[4] = xf.col(1);
    for (int f = 0; f < 2; ++f) {
        const int i = 3 + f;
        // The printed diagonal differs from the weight sum by its row-sum defect (zero on follower rows).
        const auto u = local_control_input_stationary(g, w, i, states.at(i), states);
        CHECK((u - global.col(f)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("per-agent dynamic input") {
    const Graph edge(2, {{0, 1}});
    const EdgeWeights<double> w{{Edge(0, 1), 1.0}};
    const Eigen::VectorXd x = Eigen::Vector2d(2, -1);
    CHECK(local_control_input_dynamic(edge, w, 0, x, {{1, x}}, {{1, x}}, period(0.5)).isZero());

    const double T = 0.5;
    const Eigen::VectorXd v = Eigen::Vector2d(3, 4);
    const auto u = local_control_input_dynamic(edge, w, 0, x, {{1, x}}, {{1, Eigen::VectorXd(x + T * v)}}, period(T));
    CHECK(u.isApprox(v));

    const Graph tri = Graph::complete(3);
    const EdgeWeights<double> cancel{{Edge(0, 1), 1.0}, {Edge(0, 2), -1.0}, {Edge(1, 2), 1.0}};
    StateMap<double> s{{1, x}, {2, x}};
    CHECK_THROWS_AS((void)local_control_input_dynamic(tri, cancel, 0, x, s, s, period(T)), Error);
}

TEST_CASE("unit circle test examples") {
    CHECK(unit_circle_test(std::complex<double>(0, 0)));
    CHECK(unit_circle_test(std::complex<double>(-1 - 1.0 * -1.49, 0)));
    CHECK_FALSE(unit_circle_test(std::complex<double>(1, 0)));
    CHECK_FALSE(unit_circle_test(std::complex<double>(-1, 0)));
    CHECK_FALSE(unit_circle_test(std::complex<double>(0, 1)));
    CHECK(unit_circle_test(std::complex<double>(0.3, -0.6)));
}

TEST_CASE("bilinear and direct unit circle predicates agree on random samples") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> radius(0.0, 2.0);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    int tested = 0;
    while (tested < 10000) {
        const double r = radius(rng);
        if (std::abs(r - 1.0) < 1e-9) {
            continue;
        }
        const auto a = std::polar(r, angle(rng));
        const auto pred = unit_circle_predicates(a);
        CHECK(pred.bilinear == pred.direct);
        ++tested;
    }
}

TEST_CASE("spectral radius") {
    CHECK(spectral_radius(Eigen::MatrixXd::Identity(3, 3)) == Approx(1.0));
    CHECK(spectral_radius((Eigen::MatrixXd(2, 2) << 0, 1, 0, 0).finished()) == 0.0);
    CHECK(spectral_radius((Eigen::MatrixXd(2, 2) << 0, -2, 2, 0).finished()) == Approx(2.0));
    CHECK_THROWS_AS((void)spectral_radius(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST_CASE("linear_step special cases") {
    std::mt19937_64 rng(8);
    const auto om = fixtures::exact_stress();
    const Eigen::MatrixXd A = fixtures::random_matrix(rng, 3, 3);
    const Eigen::MatrixXd B = fixtures::random_matrix(rng, 3, 2);
    const Eigen::MatrixXd K = fixtures::random_matrix(rng, 2, 3);
    const Eigen::MatrixXd x = fixtures::random_matrix(rng, 3, 5);

    CHECK(max_abs(linear_step<double>(A, B, Eigen::MatrixXd::Zero(2, 3), 0.3, om, x) - A * x) < 1e-14);
    CHECK(max_abs(linear_step<double>(A, B, K, 0.0, om, x) - (A + B * K) * x) < 1e-14);

    // Dense oracle: [(I_n kron A) + ((I_n - eps Omega) kron BK)] on the stacked state.
    const double eps = 0.2;
    const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(5, 5);
    const Eigen::MatrixXd M = fixtures::kron(In, A) + fixtures::kron(In - eps * om.entries(), B * K);
    const Eigen::VectorXd oracle = M * stack<double>(x);
    CHECK((stack<double>(linear_step<double>(A, B, K, eps, om, x)) - oracle).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS((void)linear_step<double>(A, B, K, eps, om, Eigen::MatrixXd::Zero(3, 4)), Error);
    CHECK_THROWS_AS((void)linear_step<double>(A, B, Eigen::MatrixXd::Zero(3, 3), eps, om, x), Error);
}
