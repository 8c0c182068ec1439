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
#ifndef AFFINESIM_STRESS_HPP
#define AFFINESIM_STRESS_HPP

#include "affinesim/framework.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace affinesim {

template <typename Scalar>
struct WeightedEdge {
    int i = 0;
    int j = 0;
    Scalar w = 0;
};

template <typename Scalar>
using EdgeWeights = std::map<Edge, Scalar>;

/// Symmetric n x n stress matrix.
///
/// Symmetry is enforced on construction. Zero row sums and graph sparsity hold
/// by construction when built through assemble_stress(); matrices read verbatim
/// from rounded sources may carry a small row-sum defect, see row_sum_defect().
template <typename Scalar>
class StressMatrix {
public:
    StressMatrix() = default;

    explicit StressMatrix(MatrixX<Scalar> entries) : entries_(std::move(entries)) {
        require(entries_.rows() == entries_.cols(), "stress matrix must be square");
        require(entries_.allFinite(), "stress matrix has non-finite entries");
        const Scalar scale = std::max<Scalar>(Scalar(1), entries_.cwiseAbs().maxCoeff());
        require((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() <= Scalar(1e-12) * scale,
                "stress matrix must be symmetric");
    }

    [[nodiscard]] int size() const noexcept { return static_cast<int>(entries_.rows()); }
    [[nodiscard]] const MatrixX<Scalar>& entries() const noexcept { return entries_; }
    [[nodiscard]] Scalar operator()(int i, int j) const { return entries_(i, j); }

    [[nodiscard]] Scalar row_sum_defect() const {
        return entries_.size() == 0 ? Scalar(0) : entries_.rowwise().sum().cwiseAbs().maxCoeff();
    }

    /// Largest |Omega_ij| over non-edges i != j.
    [[nodiscard]] Scalar sparsity_defect(const Graph& g) const {
        require(g.size() == size(), "graph size does not match stress");
        Scalar worst = 0;
        for (int a = 0; a < size(); ++a) {
            for (int b = 0; b < size(); ++b) {
                if (a != b && !g.has_edge(a, b)) {
                    worst = std::max(worst, std::abs(entries_(a, b)));
                }
            }
        }
        return worst;
    }

    [[nodiscard]] StressMatrix scaled(Scalar c) const { return StressMatrix(MatrixX<Scalar>(c * entries_)); }
    [[nodiscard]] StressMatrix operator-() const { return scaled(Scalar(-1)); }

private:
    MatrixX<Scalar> entries_;
};

/// Omega partitioned leaders-first into ll / lf / fl / ff blocks.
template <typename Scalar>
struct StressBlocks {
    MatrixX<Scalar> ll;
    MatrixX<Scalar> lf;
    MatrixX<Scalar> fl;
    MatrixX<Scalar> ff;

    [[nodiscard]] int num_leaders() const { return static_cast<int>(ll.rows()); }
    [[nodiscard]] int num_followers() const { return static_cast<int>(ff.rows()); }
};

struct RigidityCertificate {
    int rank = 0;
    int expected_rank = 0;
    double min_eigenvalue = 0;
    double max_abs_eigenvalue = 0;
    bool psd = false;
    bool connectivity_ok = false;
    bool pass = false;
};

struct CertificateOptions {
    double rank_rel_tol = 1e-10;  // sigma_i > max(n, d) * sigma_max * rank_rel_tol
    double psd_tol = 1e-8;        // min eig >= -psd_tol * max(1, sigma_max)
    /// Half-width of the entrywise quantization of the stress (e.g. 5e-4 for
    /// values rounded to 3 decimals). When positive, eigenvalues within the
    /// Weyl bound n * precision are treated as zero for both rank and PSD.
    double data_precision = 0;
};

/// Omega_ii = sum of incident weights, Omega_ij = -w_ij on edges, 0 elsewhere.
template <typename Scalar>
[[nodiscard]] StressMatrix<Scalar> assemble_stress(const Graph& g, const std::vector<WeightedEdge<Scalar>>& weights) {
    EdgeWeights<Scalar> w;
    for (const auto& we : weights) {
        require(g.has_edge(we.i, we.j), "weight supplied for non-edge (" + std::to_string(we.i + 1) + "," +
                                            std::to_string(we.j + 1) + ")");
        require(std::isfinite(static_cast<double>(we.w)), "non-finite edge weight");
        const Edge e(we.i, we.j);
        const auto [it, inserted] = w.emplace(e, we.w);
        require(inserted || it->second == we.w, "asymmetric weights on edge (" + std::to_string(e.i + 1) + "," +
                                                     std::to_string(e.j + 1) + ")");
    }
    for (const auto& e : g.edges()) {
        require(w.count(e) == 1, "missing weight for edge (" + std::to_string(e.i + 1) + "," +
                                     std::to_string(e.j + 1) + ")");
    }
    MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(g.size(), g.size());
    for (const auto& [e, wij] : w) {
        omega(e.i, e.j) -= wij;
        omega(e.j, e.i) -= wij;
        omega(e.i, e.i) += wij;
        omega(e.j, e.j) += wij;
    }
    return StressMatrix<Scalar>(std::move(omega));
}

template <typename Scalar>
[[nodiscard]] StressMatrix<Scalar> assemble_stress(const Graph& g, const EdgeWeights<Scalar>& weights) {
    std::vector<WeightedEdge<Scalar>> list;
    for (const auto& [e, wij] : weights) {
        list.push_back({e.i, e.j, wij});
    }
    return assemble_stress(g, list);
}

/// w_ij = -Omega_ij for every edge of g.
template <typename Scalar>
[[nodiscard]] EdgeWeights<Scalar> edge_weights(const StressMatrix<Scalar>& omega, const Graph& g) {
    require(g.size() == omega.size(), "graph size does not match stress");
    EdgeWeights<Scalar> w;
    for (const auto& e : g.edges()) {
        w[e] = -omega(e.i, e.j);
    }
    return w;
}

/// ||(Omega kron I_d) p||_inf.
template <typename Scalar>
[[nodiscard]] Scalar verify_equilibrium(const StressMatrix<Scalar>& omega, const Points<Scalar>& p) {
    require(omega.size() == p.cols(), "stress size does not match configuration");
    if (p.size() == 0) {
        return Scalar(0);
    }
    return (p * omega.entries().transpose()).cwiseAbs().maxCoeff();
}

template <typename Scalar>
[[nodiscard]] Scalar verify_equilibrium(const StressMatrix<Scalar>& omega, const Configuration<Scalar>& c) {
    return verify_equilibrium(omega, c.positions());
}

template <typename Scalar>
[[nodiscard]] StressBlocks<Scalar> partition_stress(const StressMatrix<Scalar>& omega, const LeaderPartition& part) {
    require(part.size() == omega.size(), "partition size does not match stress");
    const auto& L = part.leaders();
    const auto& F = part.followers();
    const auto& m = omega.entries();
    auto extract = [&m](const std::vector<int>& rows, const std::vector<int>& cols) {
        MatrixX<Scalar> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(rows[r], cols[c]);
            }
        }
        return out;
    };
    return {extract(L, L), extract(L, F), extract(F, L), extract(F, F)};
}

/// Inverse of partition_stress: rebuilds Omega in the original node order.
template <typename Scalar>
[[nodiscard]] StressMatrix<Scalar> reassemble(const StressBlocks<Scalar>& blocks, const LeaderPartition& part) {
    const auto order = part.ordering();
    MatrixX<Scalar> leaders_first(part.size(), part.size());
    leaders_first << blocks.ll, blocks.lf, blocks.fl, blocks.ff;
    MatrixX<Scalar> m(part.size(), part.size());
    for (int r = 0; r < part.size(); ++r) {
        for (int c = 0; c < part.size(); ++c) {
            m(order[static_cast<std::size_t>(r)], order[static_cast<std::size_t>(c)]) = leaders_first(r, c);
        }
    }
    return StressMatrix<Scalar>(std::move(m));
}

/// Universal-rigidity certificate: rank n-d-1, PSD, (d+1)-connected graph.
template <typename Scalar>
[[nodiscard]] RigidityCertificate check_rigidity_certificate(const StressMatrix<Scalar>& omega,
                                                             const Framework<Scalar>& fw,
                                                             const CertificateOptions& opts = {}) {
    const int n = fw.size();
    const int d = fw.dim();
    require(omega.size() == n, "stress size does not match framework");
    require(n >= d + 2, "n < d+2: certificate needs at least d+2 nodes (n=" + std::to_string(n) +
                            ", d=" + std::to_string(d) + ")");

    const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(omega.entries(), Eigen::EigenvaluesOnly);
    const VectorX<Scalar>& ev = es.eigenvalues();  // ascending
    const double sigma_max = static_cast<double>(ev.cwiseAbs().maxCoeff());
    const double quantization = opts.data_precision * n;

    RigidityCertificate cert;
    cert.expected_rank = n - d - 1;
    cert.min_eigenvalue = static_cast<double>(ev(0));
    cert.max_abs_eigenvalue = sigma_max;
    const double rank_threshold = std::max(std::max(n, d) * sigma_max * opts.rank_rel_tol, quantization);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(static_cast<double>(ev(i))) > rank_threshold) {
            ++cert.rank;
        }
    }
    cert.psd = cert.min_eigenvalue >= -std::max(opts.psd_tol * std::max(1.0, sigma_max), quantization);
    cert.connectivity_ok = is_k_connected(fw.graph(), d + 1);
    cert.pass = cert.rank == cert.expected_rank && cert.psd && cert.connectivity_ok;
    return cert;
}

/// Condition number of a square block, infinity when singular.
template <typename Scalar>
[[nodiscard]] Scalar condition_number(const MatrixX<Scalar>& m) {
    if (m.size() == 0) {
        return Scalar(1);
    }
    const Eigen::JacobiSVD<MatrixX<Scalar>> svd(m);
    const auto& sv = svd.singularValues();
    const Scalar smin = sv(sv.size() - 1);
    return smin > Scalar(0) ? sv(0) / smin : std::numeric_limits<Scalar>::infinity();
}

inline constexpr double kMaxFollowerCondition = 1e12;

namespace detail {

template <typename Scalar>
void guard_follower_block(const MatrixX<Scalar>& ff) {
    require(ff.rows() > 0, "no followers in partition", ErrorKind::Localizability);
    const Scalar cond = condition_number(ff);
    require(cond <= Scalar(kMaxFollowerCondition),
            "Omega_ff is singular or ill-conditioned (cond = " + std::to_string(static_cast<double>(cond)) +
                "): leaders or stress do not localize the followers",
            ErrorKind::Localizability);
}

}  // namespace detail

/// p_f* = -(Omega_ff^-1 Omega_fl kron I_d) p_l*, via a pivoted solve.
///
/// `leader_targets` is d x n_l (leaders in partition order); returns d x n_f.
template <typename Scalar>
[[nodiscard]] Points<Scalar> follower_targets(const StressBlocks<Scalar>& blocks, const Points<Scalar>& leader_targets) {
    require(leader_targets.cols() == blocks.num_leaders(), "leader target count does not match partition");
    detail::guard_follower_block(blocks.ff);
    const MatrixX<Scalar> rhs = -(blocks.fl * leader_targets.transpose());
    return blocks.ff.fullPivLu().solve(rhs).transpose();
}

/// Eigenvalues of -Omega_ff in ascending order.
template <typename Scalar>
[[nodiscard]] VectorX<Scalar> neg_ff_eigenvalues(const StressBlocks<Scalar>& blocks) {
    const MatrixX<Scalar> neg = -blocks.ff;
    return Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>>(neg, Eigen::EigenvaluesOnly).eigenvalues();
}

/// mu_min: smallest eigenvalue of -Omega_ff.
template <typename Scalar>
[[nodiscard]] Scalar min_eig_neg_ff(const StressBlocks<Scalar>& blocks) {
    require(blocks.ff.rows() > 0, "empty follower block");
    return neg_ff_eigenvalues(blocks)(0);
}

}  // namespace affinesim

#endif  // AFFINESIM_STRESS_HPP
