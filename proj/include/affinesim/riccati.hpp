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
#ifndef AFFINESIM_RICCATI_HPP
#define AFFINESIM_RICCATI_HPP

#include "affinesim/control.hpp"

#include <complex>

namespace affinesim {

/// x[k+1] = A x[k] + B u[k] with B of full column rank and (A, B) stabilizable.
template <typename Scalar>
class LinearPlant {
public:
    LinearPlant(MatrixX<Scalar> A, MatrixX<Scalar> B) : A_(std::move(A)), B_(std::move(B)) {
        require(A_.rows() == A_.cols() && A_.rows() > 0, "A must be square and non-empty");
        require(B_.rows() == A_.rows() && B_.cols() > 0, "B must have as many rows as A");
        require(A_.allFinite() && B_.allFinite(), "plant matrices have non-finite entries");
        require(numerical_rank(B_) == B_.cols(), "B does not have full column rank");
        require(is_stabilizable(A_, B_), "(A, B) is not stabilizable");
    }

    [[nodiscard]] const MatrixX<Scalar>& A() const noexcept { return A_; }
    [[nodiscard]] const MatrixX<Scalar>& B() const noexcept { return B_; }
    [[nodiscard]] int states() const noexcept { return static_cast<int>(A_.rows()); }
    [[nodiscard]] int inputs() const noexcept { return static_cast<int>(B_.cols()); }

    /// PBH test: rank [A - lambda I, B] = m for every eigenvalue with |lambda| >= 1.
    static bool is_stabilizable(const MatrixX<Scalar>& A, const MatrixX<Scalar>& B) {
        using Complex = std::complex<Scalar>;
        const Eigen::Index m = A.rows();
        const Eigen::EigenSolver<MatrixX<Scalar>> es(A, false);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Complex lambda = es.eigenvalues()(i);
            if (std::abs(lambda) < Scalar(1)) {
                continue;
            }
            Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> pbh(m, m + B.cols());
            pbh << A.template cast<Complex>() - lambda * MatrixX<Complex>::Identity(m, m), B.template cast<Complex>();
            if (numerical_rank(pbh) < m) {
                return false;
            }
        }
        return true;
    }

private:
    MatrixX<Scalar> A_;
    MatrixX<Scalar> B_;
};

template <typename Scalar>
struct RiccatiSolution {
    MatrixX<Scalar> P;
    MatrixX<Scalar> K;
    Scalar residual = 0;
    int iterations = 0;
};

template <typename Scalar>
[[nodiscard]] MatrixX<Scalar> mare_map(const LinearPlant<Scalar>& plant, const MatrixX<Scalar>& Q, const MatrixX<Scalar>& P) {
    const auto& A = plant.A();
    const auto& B = plant.B();
    const MatrixX<Scalar> BtPB = B.transpose() * P * B;
    const Eigen::FullPivLU<MatrixX<Scalar>> lu(BtPB);
    require(lu.isInvertible(), "B^T P B is singular", ErrorKind::Solver);
    const MatrixX<Scalar> BtPA = B.transpose() * P * A;
    MatrixX<Scalar> next = A.transpose() * P * A - BtPA.transpose() * lu.solve(BtPA) + Q;
    return (next + next.transpose()) / Scalar(2);
}

/// ||A^T P A - P - A^T P B (B^T P B)^-1 B^T P A + Q||_inf (max absolute row sum).
template <typename Scalar>
[[nodiscard]] Scalar mare_residual(const LinearPlant<Scalar>& plant, const MatrixX<Scalar>& Q, const MatrixX<Scalar>& P) {
    return (mare_map(plant, Q, P) - P).cwiseAbs().rowwise().sum().maxCoeff();
}

/// K = -(B^T P B)^-1 B^T P A.
template <typename Scalar>
[[nodiscard]] MatrixX<Scalar> mare_gain(const LinearPlant<Scalar>& plant, const MatrixX<Scalar>& P) {
    const auto& B = plant.B();
    return -(B.transpose() * P * B).fullPivLu().solve(B.transpose() * P * plant.A());
}

/// Fixed-point iteration P <- A^T P A - A^T P B (B^T P B)^-1 B^T P A + Q from P = Q.
template <typename Scalar>
[[nodiscard]] RiccatiSolution<Scalar> solve_mare(const LinearPlant<Scalar>& plant, const MatrixX<Scalar>& Q,
                                                 Scalar tol = Scalar(1e-10), int max_iter = 100000) {
    const int m = plant.states();
    require(Q.rows() == m && Q.cols() == m, "Q has wrong dimensions");
    require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= Scalar(1e-12) * std::max<Scalar>(Scalar(1), Q.cwiseAbs().maxCoeff()),
            "Q must be symmetric");
    const Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> qeig(Q, Eigen::EigenvaluesOnly);
    require(qeig.eigenvalues()(0) >= -Scalar(1e-12) * std::max<Scalar>(Scalar(1), qeig.eigenvalues().cwiseAbs().maxCoeff()),
            "Q must be positive semi-definite");

    RiccatiSolution<Scalar> sol;
    sol.P = Q;
    for (int it = 0; it <= max_iter; ++it) {
        const MatrixX<Scalar> next = mare_map(plant, Q, sol.P);
        sol.residual = (next - sol.P).cwiseAbs().rowwise().sum().maxCoeff();
        sol.iterations = it;
        if (!std::isfinite(static_cast<double>(sol.residual))) {
            throw Error(ErrorKind::Solver, "Riccati iteration diverged");
        }
        if (sol.residual <= tol) {
            break;
        }
        if (it == max_iter) {
            throw Error(ErrorKind::Solver, "Riccati iteration did not converge in " + std::to_string(max_iter) +
                                               " iterations (residual " + std::to_string(static_cast<double>(sol.residual)) + ")");
        }
        sol.P = next;
    }
    require(sol.P.llt().info() == Eigen::Success, "Riccati solution is not positive definite", ErrorKind::Solver);
    sol.K = mare_gain(plant, sol.P);
    return sol;
}

}  // namespace affinesim

#endif  // AFFINESIM_RICCATI_HPP
