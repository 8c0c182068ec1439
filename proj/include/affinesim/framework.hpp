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
#ifndef AFFINESIM_FRAMEWORK_HPP
#define AFFINESIM_FRAMEWORK_HPP

#include "affinesim/types.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <utility>
#include <vector>

namespace affinesim {

/// Undirected edge stored with i < j. Node indices are 0-based in the library;
/// file formats use 1-based indices and convert at the boundary.
struct Edge {
    int i = 0;
    int j = 0;

    Edge() = default;
    Edge(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {}

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on nodes {0, ..., n-1}.
class Graph {
public:
    Graph() = default;

    Graph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n), adjacency_(static_cast<std::size_t>(n)) {
        require(n >= 0, "graph node count must be non-negative");
        std::set<Edge> seen;
        for (const auto& [a, b] : edges) {
            require(a >= 0 && a < n && b >= 0 && b < n, "edge endpoint out of range");
            require(a != b, "self-loop on node " + std::to_string(a + 1));
            const Edge e(a, b);
            require(seen.insert(e).second,
                    "duplicate edge (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) + ")");
        }
        edges_.assign(seen.begin(), seen.end());
        for (const auto& e : edges_) {
            adjacency_[static_cast<std::size_t>(e.i)].push_back(e.j);
            adjacency_[static_cast<std::size_t>(e.j)].push_back(e.i);
        }
        for (auto& nbrs : adjacency_) {
            std::sort(nbrs.begin(), nbrs.end());
        }
    }

    static Graph complete(int n) {
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                edges.emplace_back(a, b);
            }
        }
        return Graph(n, edges);
    }

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<int>& neighbors(int v) const { return adjacency_.at(static_cast<std::size_t>(v)); }

    [[nodiscard]] bool has_edge(int a, int b) const {
        if (a == b || a < 0 || b < 0 || a >= n_ || b >= n_) {
            return false;
        }
        const auto& nbrs = neighbors(a);
        return std::binary_search(nbrs.begin(), nbrs.end(), b);
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
};

/// Node positions in R^d, one column per node.
template <typename Scalar>
class Configuration {
public:
    Configuration() = default;

    explicit Configuration(Points<Scalar> positions) : positions_(std::move(positions)) {
        require(positions_.rows() > 0, "configuration dimension must be positive");
        require(positions_.allFinite(), "configuration has non-finite coordinates");
    }

    static Configuration from_points(const std::vector<VectorX<Scalar>>& pts) {
        require(!pts.empty(), "configuration needs at least one point");
        const auto d = pts.front().size();
        Points<Scalar> p(d, static_cast<Eigen::Index>(pts.size()));
        for (std::size_t k = 0; k < pts.size(); ++k) {
            require(pts[k].size() == d, "dimension mismatch among points");
            p.col(static_cast<Eigen::Index>(k)) = pts[k];
        }
        return Configuration(std::move(p));
    }

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(positions_.rows()); }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(positions_.cols()); }
    [[nodiscard]] const Points<Scalar>& positions() const noexcept { return positions_; }
    [[nodiscard]] auto point(int i) const { return positions_.col(i); }
    [[nodiscard]] VectorX<Scalar> stacked() const { return stack(positions_); }

private:
    Points<Scalar> positions_;
};

template <typename Scalar>
class Framework {
public:
    Framework() = default;

    Framework(Graph graph, Configuration<Scalar> config) : graph_(std::move(graph)), config_(std::move(config)) {
        require(graph_.size() == config_.size(), "graph node count does not match configuration size");
    }

    [[nodiscard]] const Graph& graph() const noexcept { return graph_; }
    [[nodiscard]] const Configuration<Scalar>& config() const noexcept { return config_; }
    [[nodiscard]] int size() const noexcept { return graph_.size(); }
    [[nodiscard]] int dim() const noexcept { return config_.dim(); }

private:
    Graph graph_;
    Configuration<Scalar> config_;
};

/// Leaders and followers as 0-based index lists. Block extraction always
/// orders leaders first, matching the leaders-first convention for Omega.
class LeaderPartition {
public:
    LeaderPartition() = default;

    LeaderPartition(int n, std::vector<int> leaders) : n_(n), leaders_(std::move(leaders)) {
        std::vector<bool> is_leader(static_cast<std::size_t>(std::max(n, 0)), false);
        for (int l : leaders_) {
            require(l >= 0 && l < n, "leader index out of range");
            require(!is_leader[static_cast<std::size_t>(l)], "duplicate leader index");
            is_leader[static_cast<std::size_t>(l)] = true;
        }
        for (int v = 0; v < n; ++v) {
            if (!is_leader[static_cast<std::size_t>(v)]) {
                followers_.push_back(v);
            }
        }
    }

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<int>& leaders() const noexcept { return leaders_; }
    [[nodiscard]] const std::vector<int>& followers() const noexcept { return followers_; }
    [[nodiscard]] int num_leaders() const noexcept { return static_cast<int>(leaders_.size()); }
    [[nodiscard]] int num_followers() const noexcept { return static_cast<int>(followers_.size()); }

    /// Leaders followed by followers: position in this list is the block index.
    [[nodiscard]] std::vector<int> ordering() const {
        std::vector<int> order(leaders_);
        order.insert(order.end(), followers_.begin(), followers_.end());
        return order;
    }

private:
    int n_ = 0;
    std::vector<int> leaders_;
    std::vector<int> followers_;
};

/// Gather the columns of `p` listed in `idx`.
template <typename Scalar>
[[nodiscard]] Points<Scalar> select_columns(const Points<Scalar>& p, const std::vector<int>& idx) {
    Points<Scalar> out(p.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = p.col(idx[k]);
    }
    return out;
}

/// Dimension of the affine hull of the columns of `points`.
template <typename Scalar>
[[nodiscard]] int affine_span_dimension(const Points<Scalar>& points) {
    require(points.cols() >= 1, "affine span needs at least one point");
    if (points.cols() == 1) {
        return 0;
    }
    const MatrixX<Scalar> diffs = points.rightCols(points.cols() - 1).colwise() - points.col(0);
    return static_cast<int>(numerical_rank(diffs));
}

template <typename Scalar>
[[nodiscard]] int affine_span_dimension(const std::vector<VectorX<Scalar>>& points) {
    return affine_span_dimension<Scalar>(Configuration<Scalar>::from_points(points).positions());
}

namespace detail {

inline bool connected_without(const Graph& g, const std::vector<bool>& removed) {
    const int n = g.size();
    int start = -1;
    int remaining = 0;
    for (int v = 0; v < n; ++v) {
        if (!removed[static_cast<std::size_t>(v)]) {
            ++remaining;
            if (start < 0) {
                start = v;
            }
        }
    }
    if (remaining <= 1) {
        return true;
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<int> frontier;
    frontier.push(start);
    seen[static_cast<std::size_t>(start)] = true;
    int reached = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : g.neighbors(v)) {
            if (!removed[static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                ++reached;
                frontier.push(w);
            }
        }
    }
    return reached == remaining;
}

}  // namespace detail

/// True iff deleting any set of fewer than k vertices leaves the graph connected.
/// Exhaustive over all vertex subsets of size < k; intended for n up to ~20.
inline bool is_k_connected(const Graph& g, int k) {
    require(k >= 1, "k must be at least 1");
    require(g.size() >= k + 1, "k-connectivity needs n >= k+1 (got n=" + std::to_string(g.size()) +
                                   ", k=" + std::to_string(k) + ")");
    const int n = g.size();
    for (int cut = 0; cut < k; ++cut) {
        std::vector<bool> removed(static_cast<std::size_t>(n), false);
        std::fill(removed.begin(), removed.begin() + cut, true);
        // prev_permutation walks all n-choose-cut selections starting from the lexicographically largest.
        do {
            if (!detail::connected_without(g, removed)) {
                return false;
            }
        } while (std::prev_permutation(removed.begin(), removed.end()));
    }
    return true;
}

struct LeaderReport {
    int num_leaders = 0;
    int required_leaders = 0;
    int span_dimension = 0;
    bool count_ok = false;
    bool span_ok = false;
    bool pass = false;
};

template <typename Scalar>
[[nodiscard]] LeaderReport validate_leader_selection(const Framework<Scalar>& fw, const LeaderPartition& part) {
    require(part.size() == fw.size(), "partition size does not match framework");
    LeaderReport r;
    const int d = fw.dim();
    r.num_leaders = part.num_leaders();
    r.required_leaders = d + 1;
    r.count_ok = r.num_leaders == d + 1;
    r.span_dimension =
        part.num_leaders() > 0 ? affine_span_dimension<Scalar>(select_columns(fw.config().positions(), part.leaders())) : 0;
    r.span_ok = r.span_dimension == d;
    r.pass = r.count_ok && r.span_ok;
    return r;
}

}  // namespace affinesim

#endif  // AFFINESIM_FRAMEWORK_HPP
