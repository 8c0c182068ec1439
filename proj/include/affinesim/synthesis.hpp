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
#ifndef AFFINESIM_SYNTHESIS_HPP
#define AFFINESIM_SYNTHESIS_HPP

#include "affinesim/stress.hpp"

#include <cstdint>
#include <random>

namespace affinesim {

struct SynthesisOptions {
    std::uint64_t seed = 1;
    int restarts = 32;
    double initial_step = 0.5;
    double min_step = 1e-9;
    int max_sweeps = 2000;
};

template <typename Scalar>
struct SynthesisResult {
    EdgeWeights<Scalar> weights;
    StressMatrix<Scalar> stress;
    RigidityCertificate certificate;
    Scalar objective = 0;  // (d+2)-th smallest eigenvalue of the unit-coefficient stress
    int stress_space_dim = 0;
    int best_restart = -1;
};

/// Equilibrium constraint matrix: column e holds the stacked node residuals
/// produced by a unit weight on edge e, so C * w = vec of sum_j w_ij (p_i - p_j).
template <typename Scalar>
[[nodiscard]] MatrixX<Scalar> equilibrium_constraints(const Framework<Scalar>& fw) {
    const int d = fw.dim();
    const auto& edges = fw.graph().edges();
    const auto& p = fw.config().positions();
    MatrixX<Scalar> c = MatrixX<Scalar>::Zero(static_cast<Eigen::Index>(d) * fw.size(),
                                              static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        const VectorX<Scalar> diff = p.col(e.i) - p.col(e.j);
        const auto col = static_cast<Eigen::Index>(k);
        c.block(static_cast<Eigen::Index>(e.i) * d, col, d, 1) = diff;
        c.block(static_cast<Eigen::Index>(e.j) * d, col, d, 1) = -diff;
    }
    return c;
}

/// Orthonormal basis (columns) for the space of equilibrium stresses.
template <typename Scalar>
[[nodiscard]] MatrixX<Scalar> equilibrium_stress_basis(const Framework<Scalar>& fw) {
    const MatrixX<Scalar> c = equilibrium_constraints(fw);
    const Eigen::Index m = c.cols();
    if (m == 0) {
        return MatrixX<Scalar>(0, 0);
    }
    const Eigen::JacobiSVD<MatrixX<Scalar>> svd(c, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Scalar threshold = Scalar(std::max(c.rows(), c.cols())) * (sv.size() > 0 ? sv(0) : Scalar(0)) * Scalar(1e-10);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold) {
            ++rank;
        }
    }
    return svd.matrixV().rightCols(m - rank);
}

namespace detail {

template <typename Scalar>
StressMatrix<Scalar> stress_from_coefficients(const Graph& g, const MatrixX<Scalar>& basis, const VectorX<Scalar>& coeff) {
    const VectorX<Scalar> w = basis * coeff;
    MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(g.size(), g.size());
    const auto& edges = g.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        const Scalar wij = w(static_cast<Eigen::Index>(k));
        omega(e.i, e.j) -= wij;
        omega(e.j, e.i) -= wij;
        omega(e.i, e.i) += wij;
        omega(e.j, e.j) += wij;
    }
    return StressMatrix<Scalar>(std::move(omega));
}

// (d+2)-th smallest eigenvalue. Positive iff Omega is PSD with rank exactly
// n-d-1, because an affinely spanning configuration pins d+1 zero eigenvalues.
template <typename Scalar>
Scalar certificate_objective(const StressMatrix<Scalar>& omega, int d) {
    const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(omega.entries(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(d + 1);
}

}  // namespace detail

/// Search the equilibrium-stress space for a PSD stress of rank n-d-1.
///
/// Coordinate ascent on unit-norm basis coefficients, maximizing the (d+2)-th
/// smallest eigenvalue, with random restarts. Restart r draws from its own
/// generator seeded by (seed, r); the best objective wins, ties go to the
/// lowest restart index. The result is always re-checked by the certificate.
template <typename Scalar>
[[nodiscard]] SynthesisResult<Scalar> synthesize_stress(const Framework<Scalar>& fw, const SynthesisOptions& opts = {}) {
    const int n = fw.size();
    const int d = fw.dim();
    require(n >= d + 2, "n < d+2: no rank n-d-1 stress certificate is possible (n=" + std::to_string(n) +
                            ", d=" + std::to_string(d) + ")",
            ErrorKind::Certificate);
    require(is_k_connected(fw.graph(), d + 1),
            "graph is not " + std::to_string(d + 1) + "-connected", ErrorKind::Certificate);
    require(affine_span_dimension<Scalar>(fw.config().positions()) == d,
            "configuration does not affinely span R^" + std::to_string(d), ErrorKind::Certificate);

    const MatrixX<Scalar> basis = equilibrium_stress_basis(fw);
    const auto dim = static_cast<int>(basis.cols());
    require(dim > 0, "equilibrium stress space is trivial (only the zero stress)", ErrorKind::Certificate);

    const Graph& g = fw.graph();
    auto objective = [&](const VectorX<Scalar>& c) {
        return detail::certificate_objective(detail::stress_from_coefficients(g, basis, c), d);
    };

    SynthesisResult<Scalar> best;
    best.stress_space_dim = dim;
    best.objective = -std::numeric_limits<Scalar>::infinity();
    VectorX<Scalar> best_coeff;

    if (dim == 1) {
        for (int sign : {1, -1}) {
            const VectorX<Scalar> c = VectorX<Scalar>::Constant(1, Scalar(sign));
            const Scalar f = objective(c);
            if (f > best.objective) {
                best.objective = f;
                best_coeff = c;
                best.best_restart = sign > 0 ? 0 : 1;
            }
        }
    } else {
        for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
            std::mt19937_64 rng(opts.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
            std::normal_distribution<double> normal(0.0, 1.0);
            VectorX<Scalar> c(dim);
            for (int i = 0; i < dim; ++i) {
                c(i) = Scalar(normal(rng));
            }
            c.normalize();
            Scalar f = objective(c);
            Scalar step = Scalar(opts.initial_step);
            for (int sweep = 0; sweep < opts.max_sweeps && step > Scalar(opts.min_step); ++sweep) {
                bool improved = false;
                for (int i = 0; i < dim; ++i) {
                    for (Scalar dir : {Scalar(1), Scalar(-1)}) {
                        VectorX<Scalar> trial = c;
                        trial(i) += dir * step;
                        const Scalar norm = trial.norm();
                        if (norm == Scalar(0)) {
                            continue;
                        }
                        trial /= norm;
                        const Scalar ft = objective(trial);
                        if (ft > f) {
                            c = trial;
                            f = ft;
                            improved = true;
                        }
                    }
                }
                if (!improved) {
                    step /= Scalar(2);
                }
            }
            if (f > best.objective) {
                best.objective = f;
                best_coeff = c;
                best.best_restart = r;
            }
        }
    }

    // Normalize so the largest |w_ij| is 1; positive scaling preserves every certificate property.
    VectorX<Scalar> w = basis * best_coeff;
    const Scalar wmax = w.cwiseAbs().maxCoeff();
    best_coeff /= wmax;
    w /= wmax;
    best.objective /= wmax;

    best.stress = detail::stress_from_coefficients(g, basis, best_coeff);
    const auto& edges = g.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        best.weights[edges[k]] = w(static_cast<Eigen::Index>(k));
    }
    best.certificate = check_rigidity_certificate(best.stress, fw);
    require(best.certificate.pass,
            "stress search failed to certify: best (d+2)-th eigenvalue " +
                std::to_string(static_cast<double>(best.objective)) + ", rank " +
                std::to_string(best.certificate.rank) + "/" + std::to_string(best.certificate.expected_rank),
            ErrorKind::Certificate);
    return best;
}

}  // namespace affinesim

#endif  // AFFINESIM_SYNTHESIS_HPP
