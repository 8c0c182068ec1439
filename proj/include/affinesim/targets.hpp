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
#ifndef AFFINESIM_TARGETS_HPP
#define AFFINESIM_TARGETS_HPP

#include "affinesim/framework.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace affinesim {

/// x -> theta * x + b. Theta need not be invertible.
template <typename Scalar>
struct AffineTransform {
    MatrixX<Scalar> theta;
    VectorX<Scalar> b;

    static AffineTransform identity(int d) { return {MatrixX<Scalar>::Identity(d, d), VectorX<Scalar>::Zero(d)}; }

    [[nodiscard]] int dim() const { return static_cast<int>(b.size()); }

    /// (*this) after `first`: x -> theta (theta1 x + b1) + b.
    [[nodiscard]] AffineTransform after(const AffineTransform& first) const {
        return {theta * first.theta, theta * first.b + b};
    }
};

/// Each column r_i maps to theta * r_i + b.
template <typename Scalar>
[[nodiscard]] Points<Scalar> apply_affine(const AffineTransform<Scalar>& t, const Points<Scalar>& reference) {
    require(t.theta.rows() == t.theta.cols() && t.theta.rows() == t.b.size(), "malformed affine transform");
    require(t.theta.cols() == reference.rows(), "affine transform dimension does not match configuration");
    return (t.theta * reference).colwise() + t.b;
}

template <typename Scalar>
[[nodiscard]] Configuration<Scalar> apply_affine(const AffineTransform<Scalar>& t, const Configuration<Scalar>& reference) {
    return Configuration<Scalar>(apply_affine(t, reference.positions()));
}

enum class ManoeuvreKind { Translation, Scaling, Rotation, Shear };

/// Parameters for one manoeuvre primitive. Only the fields relevant to `kind` are read.
template <typename Scalar>
struct ManoeuvreParams {
    VectorX<Scalar> offset;        // translation
    VectorX<Scalar> scale;         // scaling, per axis (a single entry means uniform)
    Scalar angle = 0;              // rotation, radians
    Scalar factor = 0;             // shear: x[axes.first] += factor * x[axes.second]
    std::pair<int, int> axes{0, 1};  // rotation plane / shear axes, 0-based
};

/// Transform at progress s in [0, 1], interpolated from the identity at s = 0.
template <typename Scalar>
[[nodiscard]] AffineTransform<Scalar> make_transform(ManoeuvreKind kind, const ManoeuvreParams<Scalar>& p, int d, Scalar s) {
    require(d >= 1, "dimension must be positive");
    require(s >= Scalar(0) && s <= Scalar(1), "segment progress must lie in [0, 1]");
    auto t = AffineTransform<Scalar>::identity(d);
    auto check_axes = [&] {
        const auto [a, b] = p.axes;
        require(a >= 0 && a < d && b >= 0 && b < d && a != b,
                "manoeuvre axes (" + std::to_string(a) + "," + std::to_string(b) + ") out of range for d=" +
                    std::to_string(d));
    };
    switch (kind) {
    case ManoeuvreKind::Translation:
        require(p.offset.size() == d, "translation vector has wrong dimension");
        t.b = s * p.offset;
        break;
    case ManoeuvreKind::Scaling: {
        require(p.scale.size() == 1 || p.scale.size() == d, "scaling needs one factor or d factors");
        for (int i = 0; i < d; ++i) {
            const Scalar c = p.scale.size() == 1 ? p.scale(0) : p.scale(i);
            t.theta(i, i) = Scalar(1) + s * (c - Scalar(1));
        }
        break;
    }
    case ManoeuvreKind::Rotation: {
        check_axes();
        const auto [a, b] = p.axes;
        const Scalar phi = s * p.angle;
        t.theta(a, a) = std::cos(phi);
        t.theta(a, b) = -std::sin(phi);
        t.theta(b, a) = std::sin(phi);
        t.theta(b, b) = std::cos(phi);
        break;
    }
    case ManoeuvreKind::Shear:
        check_axes();
        t.theta(p.axes.first, p.axes.second) = s * p.factor;
        break;
    }
    return t;
}

enum class Interpolation { Hold, Linear };

template <typename Scalar>
struct ManoeuvreSegment {
    int k0 = 0;
    int k1 = 0;
    ManoeuvreKind kind = ManoeuvreKind::Translation;
    ManoeuvreParams<Scalar> params;
    Interpolation interp = Interpolation::Linear;

    /// Progress at step k: Hold jumps to 1 at k0, Linear ramps from k0 to k1.
    [[nodiscard]] Scalar progress(int k) const {
        if (k < k0) {
            return Scalar(0);
        }
        if (interp == Interpolation::Hold || k >= k1) {
            return Scalar(1);
        }
        return Scalar(k - k0) / Scalar(k1 - k0);
    }
};

/// Ordered, non-overlapping manoeuvre segments. Each segment acts on top of
/// the composition of all segments before it; after the last segment the final
/// transform is held.
template <typename Scalar>
class ManoeuvreSchedule {
public:
    ManoeuvreSchedule() = default;

    explicit ManoeuvreSchedule(std::vector<ManoeuvreSegment<Scalar>> segments) : segments_(std::move(segments)) {
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            require(segments_[i].k0 >= 0 && segments_[i].k1 >= segments_[i].k0, "segment needs 0 <= k0 <= k1");
            if (i > 0) {
                require(segments_[i].k0 >= segments_[i - 1].k1, "segments must be ordered and non-overlapping");
            }
        }
    }

    [[nodiscard]] const std::vector<ManoeuvreSegment<Scalar>>& segments() const noexcept { return segments_; }
    [[nodiscard]] bool empty() const noexcept { return segments_.empty(); }

    /// Last step at which the transform still changes.
    [[nodiscard]] int final_step() const { return segments_.empty() ? 0 : segments_.back().k1; }

    [[nodiscard]] AffineTransform<Scalar> transform_at(int d, int k) const {
        auto t = AffineTransform<Scalar>::identity(d);
        for (const auto& seg : segments_) {
            const Scalar s = seg.progress(k);
            if (s == Scalar(0)) {
                break;
            }
            t = make_transform(seg.kind, seg.params, d, s).after(t);
        }
        return t;
    }

private:
    std::vector<ManoeuvreSegment<Scalar>> segments_;
};

/// Leader positions (d x n_l, partition order) at steps k and k+1.
template <typename Scalar>
[[nodiscard]] std::pair<Points<Scalar>, Points<Scalar>> leader_waypoints(const ManoeuvreSchedule<Scalar>& schedule,
                                                                         const Configuration<Scalar>& reference,
                                                                         const LeaderPartition& part, int k) {
    require(k >= 0, "step index must be non-negative");
    require(part.size() == reference.size(), "partition size does not match reference");
    const Points<Scalar> ref_leaders = select_columns(reference.positions(), part.leaders());
    const int d = reference.dim();
    return {apply_affine(schedule.transform_at(d, k), ref_leaders),
            apply_affine(schedule.transform_at(d, k + 1), ref_leaders)};
}

}  // namespace affinesim

#endif  // AFFINESIM_TARGETS_HPP
