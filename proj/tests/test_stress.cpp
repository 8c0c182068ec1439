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

#include <cmath>
#include <random>

using namespace affinesim;
using doctest::Approx;

namespace {

// Roots of the 2x2 characteristic polynomial, negated: eigenvalues of -M.
std::pair<double, double> neg_eigs_2x2(const Eigen::Matrix2d& m) {
    const double tr = m.trace();
    const double det = m.determinant();
    const double disc = std::sqrt(tr * tr - 4 * det);
    return {-(tr + disc) / 2, -(tr - disc) / 2};
}

}  // namespace

TEST_CASE("assemble_stress small cases") {
    const Graph edge(2, {{0, 1}});
    const auto om = assemble_stress<double>(edge, {{0, 1, 1.0}});
    Eigen::Matrix2d expected;
    expected << 1, -1, -1, 1;
    CHECK(om.entries().isApprox(Eigen::MatrixXd(expected)));

    const auto zero = assemble_stress<double>(Graph::complete(4), EdgeWeights<double>{
        {Edge(0, 1), 0.0}, {Edge(0, 2), 0.0}, {Edge(0, 3), 0.0}, {Edge(1, 2), 0.0}, {Edge(1, 3), 0.0}, {Edge(2, 3), 0.0}});
    CHECK(zero.entries().isZero());
    CHECK(verify_equilibrium(zero, fixtures::reference_positions().leftCols(4).eval()) == 0.0);
}

TEST_CASE("assemble_stress rejects malformed weight maps") {
    const Graph g(3, {{0, 1}, {1, 2}});
    CHECK_THROWS_AS((void)assemble_stress<double>(g, {{0, 1, 1.0}}), Error);                           // missing (1,2)
    CHECK_THROWS_AS((void)assemble_stress<double>(g, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}), Error);  // non-edge
    CHECK_THROWS_AS((void)assemble_stress<double>(g, {{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 1.0}}), Error);  // asymmetric
    CHECK_NOTHROW((void)assemble_stress<double>(g, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}}));
}

TEST_CASE("stress matrix rejects asymmetric or non-finite input") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 1) = 1;
    CHECK_THROWS_AS(StressMatrix<double>{m}, Error);
    m(1, 0) = 1;
    CHECK_NOTHROW(StressMatrix<double>{m});
    m(0, 0) = INFINITY;
    CHECK_THROWS_AS(StressMatrix<double>{m}, Error);
    CHECK_THROWS_AS(StressMatrix<double>{Eigen::MatrixXd::Zero(2, 3)}, Error);
}

TEST_CASE("assembled stresses have zero row sums and respect sparsity") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    const Graph g = fixtures::five_agent_graph();
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<WeightedEdge<double>> w;
        for (const auto& e : g.edges()) {
            w.push_back({e.i, e.j, normal(rng)});
        }
        const auto om = assemble_stress(g, w);
        CHECK(om.row_sum_defect() < 1e-12);
        CHECK(om.sparsity_defect(g) == 0.0);
        const auto back = edge_weights(om, g);
        for (const auto& we : w) {
            CHECK(back.at(Edge(we.i, we.j)) == Approx(we.w).epsilon(1e-15));
        }
    }
}

TEST_CASE("exact five-agent weights round to the printed matrix") {
    const auto exact = fixtures::exact_stress();
    const auto printed = fixtures::printed_stress();
    CHECK((exact.entries() - printed.entries()).cwiseAbs().maxCoeff() <= 5e-4 + 1e-12);
    Eigen::MatrixXd rounded = (exact.entries() * 1000).array().round() / 1000;
    CHECK((rounded - printed.entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("equilibrium residual of the printed and exact stresses") {
    const auto p = fixtures::reference_positions();
    CHECK(verify_equilibrium(fixtures::printed_stress(), p) <= 1e-3);
    CHECK(verify_equilibrium(fixtures::exact_stress(), p) <= 1e-12);

    // Follower row check with the printed values.
    const Eigen::Vector2d row4 = 0.292 * p.col(0) - 0.542 * p.col(1) - 0.542 * p.col(2) + 1.292 * p.col(3) - 0.5 * p.col(4);
    CHECK(row4.norm() < 1e-12);
}

TEST_CASE("verify_equilibrium matches an explicit Kronecker product") {
    std::mt19937_64 rng(17);
    const auto om = fixtures::printed_stress();
    const Eigen::MatrixXd big = fixtures::kron(om.entries(), Eigen::MatrixXd::Identity(2, 2));
    for (int trial = 0; trial < 20; ++trial) {
        const Points<double> p = fixtures::random_matrix(rng, 2, 5);
        const Eigen::VectorXd v = big * stack<double>(p);
        CHECK(verify_equilibrium(om, p) == Approx(v.cwiseAbs().maxCoeff()).epsilon(1e-12));
    }

    Points<double> moved = fixtures::reference_positions();
    moved(0, 3) += 0.1;
    const Eigen::VectorXd v = big * stack<double>(moved);
    const double r = verify_equilibrium(fixtures::exact_stress(), moved);
    CHECK(r > 0.0);
    CHECK(r == Approx((fixtures::kron(fixtures::exact_stress().entries(), Eigen::MatrixXd::Identity(2, 2)) *
                       stack<double>(moved)).cwiseAbs().maxCoeff()));
    CHECK(r == Approx(0.1 * fixtures::exact_stress().entries().col(3).cwiseAbs().maxCoeff()));
    CHECK(v.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("partition blocks and reassembly") {
    const auto om = fixtures::printed_stress();
    const auto part = fixtures::five_agent_partition();
    const auto blocks = partition_stress(om, part);
    Eigen::Matrix2d ff;
    ff << 1.292, -0.5, -0.5, 0.25;
    CHECK(blocks.ff.isApprox(Eigen::MatrixXd(ff)));
    CHECK(blocks.ll.rows() == 3);
    CHECK(blocks.lf.cols() == 2);
    CHECK(blocks.fl.isApprox(blocks.lf.transpose()));
    CHECK(reassemble(blocks, part).entries() == om.entries());

    const LeaderPartition shuffled(5, {4, 1, 3});
    CHECK(reassemble(partition_stress(om, shuffled), shuffled).entries() == om.entries());

    const StressMatrix<double> pair(Eigen::MatrixXd((Eigen::Matrix2d() << 1, -1, -1, 1).finished()));
    const auto pb = partition_stress(pair, LeaderPartition(2, {0}));
    CHECK(pb.ff(0, 0) == 1.0);
    CHECK(min_eig_neg_ff(pb) == -1.0);
}

TEST_CASE("follower block eigenvalues against the characteristic polynomial") {
    const auto blocks = partition_stress(fixtures::printed_stress(), fixtures::five_agent_partition());
    const auto [lo, hi] = neg_eigs_2x2(blocks.ff);
    const auto ev = neg_ff_eigenvalues(blocks);
    CHECK(ev(0) == Approx(lo).epsilon(1e-12));
    CHECK(ev(1) == Approx(hi).epsilon(1e-12));
    CHECK(std::abs(ev(0) - (-1.4931)) < 1e-3);
    CHECK(std::abs(ev(1) - (-0.0489)) < 1e-3);
    CHECK(std::abs(min_eig_neg_ff(blocks) - (-1.49)) <= 0.01);
    // trace 1.542, determinant 0.073
    CHECK(blocks.ff.trace() == Approx(1.542));
    CHECK(blocks.ff.determinant() == Approx(0.073));
}

TEST_CASE("follower targets for the reference and transformed leaders") {
    const auto blocks = partition_stress(fixtures::printed_stress(), fixtures::five_agent_partition());
    Points<double> leaders(2, 3);
    leaders << 1, 0, 0,
               0, 1, -1;
    Points<double> expected(2, 2);
    expected << -1, -2,
                 0, 0;
    CHECK((follower_targets(blocks, leaders) - expected).cwiseAbs().maxCoeff() < 1e-12);

    const Points<double> shifted = leaders.array() + 5.0;
    CHECK((follower_targets(blocks, shifted) - (expected.array() + 5.0).matrix()).cwiseAbs().maxCoeff() < 1e-12);

    const Points<double> scaled = 2.0 * leaders;
    CHECK((follower_targets(blocks, scaled) - 2.0 * expected).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS((void)follower_targets(blocks, Points<double>(Points<double>::Zero(2, 2))), Error);
}

TEST_CASE("follower targets refuse a singular follower block") {
    StressBlocks<double> blocks;
    blocks.ll = Eigen::MatrixXd::Zero(1, 1);
    blocks.lf = Eigen::MatrixXd::Zero(1, 2);
    blocks.fl = Eigen::MatrixXd::Zero(2, 1);
    blocks.ff = Eigen::MatrixXd::Ones(2, 2);
    try {
        (void)follower_targets(blocks, Points<double>(Points<double>::Zero(2, 1)));
        FAIL("expected a localizability error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Localizability);
    }
}

TEST_CASE("certificate on exact, zero and negated stresses") {
    const auto fw = fixtures::five_agent_framework();
    const auto exact = check_rigidity_certificate(fixtures::exact_stress(), fw);
    CHECK(exact.rank == 2);
    CHECK(exact.expected_rank == 2);
    CHECK(exact.psd);
    CHECK(exact.connectivity_ok);
    CHECK(exact.pass);

    const StressMatrix<double> zero(Eigen::MatrixXd::Zero(5, 5));
    const auto z = check_rigidity_certificate(zero, fw);
    CHECK(z.rank == 0);
    CHECK_FALSE(z.pass);

    const auto neg = check_rigidity_certificate(-fixtures::exact_stress(), fw);
    CHECK_FALSE(neg.psd);
    CHECK_FALSE(neg.pass);
    CHECK(neg.min_eigenvalue == Approx(-exact.max_abs_eigenvalue));
}

TEST_CASE("certificate on the three-decimal matrix") {
    const auto fw = fixtures::five_agent_framework();
    const auto printed = fixtures::printed_stress();

    // At default tolerances the rounding error shows up as a third non-zero eigenvalue.
    const auto strict = check_rigidity_certificate(printed, fw);
    CHECK(strict.rank == 3);
    CHECK(strict.min_eigenvalue < -1e-4);
    CHECK_FALSE(strict.pass);

    // With the quantization acknowledged the certificate passes, and the bound
    // is tight enough that the negated matrix still fails PSD.
    CertificateOptions quantized;
    quantized.data_precision = 5e-4;
    const auto loose = check_rigidity_certificate(printed, fw, quantized);
    CHECK(loose.rank == 2);
    CHECK(loose.psd);
    CHECK(loose.pass);
    CHECK_FALSE(check_rigidity_certificate(-printed, fw, quantized).psd);
}

TEST_CASE("certificate needs at least d+2 nodes") {
    Points<double> tri(2, 3);
    tri << 0, 1, 0,
           0, 0, 1;
    const Framework<double> fw(Graph::complete(3), Configuration<double>(tri));
    const StressMatrix<double> zero(Eigen::MatrixXd::Zero(3, 3));
    CHECK_THROWS_WITH_AS((void)check_rigidity_certificate(zero, fw), doctest::Contains("n < d+2"), Error);
}

TEST_CASE("any stress annihilates affine images of the reference") {
    std::mt19937_64 rng(23);
    const auto om = fixtures::exact_stress();
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd theta = fixtures::random_matrix(rng, 2, 2, 3.0);
        const Eigen::VectorXd b = fixtures::random_matrix(rng, 2, 1, 10.0);
        const Points<double> img = (theta * fixtures::reference_positions()).colwise() + b;
        CHECK(verify_equilibrium(om, img) <= 1e-9);
    }
}

TEST_CASE("condition number") {
    CHECK(condition_number<double>(Eigen::MatrixXd::Identity(3, 3)) == Approx(1.0));
    CHECK(std::isinf(condition_number<double>(Eigen::MatrixXd::Zero(2, 2))));
    CHECK(condition_number<double>((Eigen::MatrixXd(2, 2) << 4, 0, 0, 1).finished()) == Approx(4.0));
}
