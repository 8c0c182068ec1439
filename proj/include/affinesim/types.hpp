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
#ifndef AFFINESIM_TYPES_HPP
#define AFFINESIM_TYPES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace affinesim {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Positions of a group of agents, one column per agent (d x m).
///
/// The column-major storage of a d x m matrix is exactly the stacked vector
/// [p_1; p_2; ...; p_m], so `(M kron I_d) * vec(X)` is `vec(X * M^T)` and no
/// Kronecker product is ever formed.
template <typename Scalar>
using Points = MatrixX<Scalar>;

enum class ErrorKind {
    InvalidInput,      // precondition or dimension violation
    Certificate,       // rigidity certificate or stress search failure
    Localizability,    // singular / ill-conditioned follower block
    Solver,            // iterative solver did not converge
    Parse,             // malformed input file
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, const std::string& what, ErrorKind kind = ErrorKind::InvalidInput) {
    if (!condition) {
        throw Error(kind, what);
    }
}

/// Numerical rank: sigma_i counts iff sigma_i > max(rows, cols) * sigma_max * rel_tol.
/// An absolute floor can be supplied for data of known limited precision.
template <typename Derived>
[[nodiscard]] Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& m,
                                          typename Derived::RealScalar rel_tol = 1e-10,
                                          typename Derived::RealScalar abs_floor = 0) {
    using Real = typename Derived::RealScalar;
    if (m.size() == 0) {
        return 0;
    }
    const Eigen::JacobiSVD<MatrixX<typename Derived::Scalar>> svd(m.eval());
    const auto& sv = svd.singularValues();
    const Real threshold =
        std::max<Real>(Real(std::max(m.rows(), m.cols())) * sv(0) * rel_tol, abs_floor);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold) {
            ++rank;
        }
    }
    return rank;
}

/// Stacked vector view of a points matrix.
template <typename Scalar>
[[nodiscard]] VectorX<Scalar> stack(const Points<Scalar>& p) {
    return Eigen::Map<const VectorX<Scalar>>(p.data(), p.size());
}

template <typename Scalar>
[[nodiscard]] Points<Scalar> unstack(const VectorX<Scalar>& v, Eigen::Index d) {
    require(d > 0 && v.size() % d == 0, "stacked vector length is not a multiple of d");
    return Eigen::Map<const Points<Scalar>>(v.data(), d, v.size() / d);
}

}  // namespace affinesim

#endif  // AFFINESIM_TYPES_HPP
