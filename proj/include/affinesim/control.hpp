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
#ifndef AFFINESIM_CONTROL_HPP
#define AFFINESIM_CONTROL_HPP

#include "affinesim/stress.hpp"

#include <complex>
#include <map>

namespace affinesim {

/// Sampling period of the zero-order-hold loop.
template <typename Scalar>
class SamplingPeriod {
public:
    explicit SamplingPeriod(Scalar T) : T_(T) {
        require(std::isfinite(static_cast<double>(T)) && T > Scalar(0), "sampling period must be positive and finite");
    }

    [[nodiscard]] Scalar value() const noexcept { return T_; }
    operator Scalar() const noexcept { return T_; }  // NOLINT(google-explicit-constructor)

private:
    Scalar T_;
};

namespace detail {

template <typename Scalar>
void check_follower_dims(const StressBlocks<Scalar>& blocks, const Points<Scalar>& xf, const Points<Scalar>& xl) {
    require(xf.cols() == blocks.num_followers(), "follower state count does not match partition");
    require(xl.cols() == blocks.num_leaders(), "leader state count does not match partition");
    require(xf.rows() == xl.rows(), "leader and follower states have different dimensions");
}

}  // namespace detail

/// Follower inputs u_f = -(Omega_fl kron I) x_l - (Omega_ff kron I) x_f, as d x n_f.
template <typename Scalar>
[[nodiscard]] Points<Scalar> stationary_inputs(const StressBlocks<Scalar>& blocks, const Points<Scalar>& xf,
                                               const Points<Scalar>& xl) {
    detail::check_follower_dims(blocks, xf, xl);
    return -(xl * blocks.fl.transpose() + xf * blocks.ff.transpose());
}

/// x_f[k+1] = [I - T (Omega_ff kron I)] x_f[k] - T (Omega_fl kron I) x_l*[k].
template <typename Scalar>
[[nodiscard]] Points<Scalar> stationary_leader_step(const StressBlocks<Scalar>& blocks, SamplingPeriod<Scalar> T,
                                                    const Points<Scalar>& xf, const Points<Scalar>& xl_star) {
    return xf + T.value() * stationary_inputs(blocks, xf, xl_star);
}

/// Stability condition for the stationary-leader law: T * mu_min > -2.
template <typename Scalar>
[[nodiscard]] bool check_theorem1(SamplingPeriod<Scalar> T, Scalar mu_min) {
    require(mu_min < Scalar(0), "mu_min must be negative; a non-negative value means the follower block is not positive definite",
            ErrorKind::Certificate);
    return T.value() * mu_min > Scalar(-2);
}

/// Stability condition for the dynamic-leader law: T < 2.
template <typename Scalar>
[[nodiscard]] bool check_theorem2(SamplingPeriod<Scalar> T) {
    return T.value() < Scalar(2);
}

/// Solves the follower rows of the dynamic-leader closed loop
/// (Omega_ff kron I) x_f[k+1] = (1-T)[(Omega_ff kron I) x_f[k] + (Omega_fl kron I) x_l[k]]
///                              - (Omega_fl kron I) x_l[k+1].
template <typename Scalar>
[[nodiscard]] Points<Scalar> dynamic_leader_step(const StressBlocks<Scalar>& blocks, SamplingPeriod<Scalar> T,
                                                 const Points<Scalar>& xf, const Points<Scalar>& xl,
                                                 const Points<Scalar>& xl_next) {
    detail::check_follower_dims(blocks, xf, xl);
    require(xl_next.rows() == xl.rows() && xl_next.cols() == xl.cols(), "leader next-state has wrong shape");
    detail::guard_follower_block(blocks.ff);
    const Scalar decay = Scalar(1) - T.value();
    const MatrixX<Scalar> rhs = decay * (blocks.ff * xf.transpose() + blocks.fl * xl.transpose()) -
                                blocks.fl * xl_next.transpose();
    return blocks.ff.fullPivLu().solve(rhs).transpose();
}

template <typename Scalar>
using StateMap = std::map<int, VectorX<Scalar>>;

namespace detail {

template <typename Scalar>
const VectorX<Scalar>& neighbor_state(const StateMap<Scalar>& states, int j) {
    const auto it = states.find(j);
    require(it != states.end(), "missing state for neighbor " + std::to_string(j + 1));
    return it->second;
}

template <typename Scalar>
Scalar weight_of(const EdgeWeights<Scalar>& w, int i, int j) {
    const auto it = w.find(Edge(i, j));
    require(it != w.end(), "missing weight for edge (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    return it->second;
}

}  // namespace detail

/// Per-agent stationary law: u_i = -sum_j w_ij (x_i - x_j).
template <typename Scalar>
[[nodiscard]] VectorX<Scalar> local_control_input_stationary(const Graph& g, const EdgeWeights<Scalar>& w, int i,
                                                             const VectorX<Scalar>& own,
                                                             const StateMap<Scalar>& neighbors) {
    VectorX<Scalar> u = VectorX<Scalar>::Zero(own.size());
    for (int j : g.neighbors(i)) {
        u -= detail::weight_of(w, i, j) * (own - detail::neighbor_state(neighbors, j));
    }
    return u;
}

/// Per-agent dynamic law:
/// u_i = -(1/gamma) sum_j w_ij (x_i[k] - x_j[k] - (x_j[k+1] - x_j[k]) / T), gamma = sum_j w_ij.
template <typename Scalar>
[[nodiscard]] VectorX<Scalar> local_control_input_dynamic(const Graph& g, const EdgeWeights<Scalar>& w, int i,
                                                          const VectorX<Scalar>& own, const StateMap<Scalar>& neighbors,
                                                          const StateMap<Scalar>& neighbors_next,
                                                          SamplingPeriod<Scalar> T) {
    Scalar gamma = 0;
    VectorX<Scalar> acc = VectorX<Scalar>::Zero(own.size());
    for (int j : g.neighbors(i)) {
        const Scalar wij = detail::weight_of(w, i, j);
        const auto& xj = detail::neighbor_state(neighbors, j);
        const auto& xj_next = detail::neighbor_state(neighbors_next, j);
        gamma += wij;
        acc += wij * (own - xj - (xj_next - xj) / T.value());
    }
    require(std::abs(gamma) > Scalar(1e-9), "degenerate normalization: sum of incident weights is zero at agent " +
                                               std::to_string(i + 1));
    return -acc / gamma;
}

struct UnitCirclePredicates {
    bool bilinear = false;  // root of (a+1)t - (a-1) in the open left half plane
    bool direct = false;    // |a| < 1
};

/// Whether the root of s + a = 0 lies strictly inside the unit circle, decided
/// both through the bilinear image s = (t+1)/(t-1) and directly.
template <typename Scalar>
[[nodiscard]] UnitCirclePredicates unit_circle_predicates(std::complex<Scalar> a) {
    UnitCirclePredicates r;
    const std::complex<Scalar> lead = a + Scalar(1);
    // lead == 0 means s = 1, on the circle; the transformed polynomial has no root.
    if (lead != std::complex<Scalar>(0)) {
        const std::complex<Scalar> t = (a - Scalar(1)) / lead;
        r.bilinear = t.real() < Scalar(0);
    }
    r.direct = std::abs(a) < Scalar(1);
    return r;
}

template <typename Scalar>
[[nodiscard]] bool unit_circle_test(std::complex<Scalar> a) {
    return unit_circle_predicates(a).bilinear;
}

/// max |lambda_i(m)|.
template <typename Derived>
[[nodiscard]] typename Derived::RealScalar spectral_radius(const Eigen::MatrixBase<Derived>& m) {
    require(m.rows() == m.cols(), "spectral radius needs a square matrix");
    if (m.size() == 0) {
        return 0;
    }
    const Eigen::EigenSolver<MatrixX<typename Derived::Scalar>> es(m.eval(), false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Disagreement transition of the stationary law: I - T Omega_ff.
template <typename Scalar>
[[nodiscard]] MatrixX<Scalar> stationary_error_matrix(const StressBlocks<Scalar>& blocks, SamplingPeriod<Scalar> T) {
    return MatrixX<Scalar>::Identity(blocks.ff.rows(), blocks.ff.cols()) - T.value() * blocks.ff;
}

/// x[k+1] = [(I_n kron A) + ((I_n - eps Omega) kron BK)] x[k], applied to all n agents.
/// `x` is m x n, one column per agent state.
template <typename Scalar>
[[nodiscard]] MatrixX<Scalar> linear_step(const MatrixX<Scalar>& A, const MatrixX<Scalar>& B, const MatrixX<Scalar>& K,
                                          Scalar epsilon, const StressMatrix<Scalar>& omega, const MatrixX<Scalar>& x) {
    require(A.rows() == A.cols() && B.rows() == A.rows() && K.rows() == B.cols() && K.cols() == A.cols(),
            "plant / gain dimensions are inconsistent");
    require(x.rows() == A.rows() && x.cols() == omega.size(), "state matrix has wrong shape");
    const MatrixX<Scalar> coupling =
        MatrixX<Scalar>::Identity(omega.size(), omega.size()) - epsilon * omega.entries();
    return A * x + (B * K) * x * coupling.transpose();
}

}  // namespace affinesim

#endif  // AFFINESIM_CONTROL_HPP
