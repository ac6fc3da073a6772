/// @file  oracle.hpp
/// @brief Ground-truth distance oracles and truthful statement evaluation.
///
/// Oracles expose a semimetric d on objects 0..n-1 (symmetric, zero
/// diagonal, positive off the diagonal; no triangle inequality required).
/// They are used only for generating statements and for exact baselines,
/// never by the estimators themselves.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "trilens/errors.hpp"
#include "trilens/statements.hpp"

namespace trilens {

class DistanceOracle {
public:
    virtual ~DistanceOracle() = default;
    virtual std::uint32_t size() const = 0;
    virtual double distance(ObjectId i, ObjectId j) const = 0;
};

/// Throws if d is not a semimetric: d(i,i)=0, d(i,j)=d(j,i), d(i,j)>0 for
/// i != j. O(n^2); intended for construction-time validation and tests.
inline void check_semimetric(const DistanceOracle& o) {
    const std::uint32_t n = o.size();
    for (std::uint32_t i = 0; i < n; ++i) {
        if (o.distance(i, i) != 0.0) throw Error("semimetric violated: d(i,i) != 0");
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double dij = o.distance(i, j);
            if (!(dij > 0.0)) throw Error("semimetric violated: d(i,j) <= 0 for i != j");
            if (dij != o.distance(j, i)) throw Error("semimetric violated: asymmetric");
        }
    }
}

/// Dense symmetric matrix oracle. Validates semimetric properties on
/// construction.
class DenseOracle : public DistanceOracle {
public:
    DenseOracle(std::uint32_t n, std::vector<double> matrix) : n_(n), d_(std::move(matrix)) {
        if (d_.size() != static_cast<std::size_t>(n_) * n_) {
            throw SizeMismatch("dense oracle expects an n-by-n matrix");
        }
        check_semimetric(*this);
    }

    std::uint32_t size() const override { return n_; }
    double distance(ObjectId i, ObjectId j) const override {
        return d_[static_cast<std::size_t>(i) * n_ + j];
    }

private:
    std::uint32_t n_;
    std::vector<double> d_;
};

/// Points in R^m with the Euclidean metric, stored row-major.
class PointCloudOracle : public DistanceOracle {
public:
    PointCloudOracle(std::vector<double> coords, std::uint32_t dim)
        : dim_(dim), coords_(std::move(coords)) {
        if (dim_ == 0 || coords_.size() % dim_ != 0) {
            throw SizeMismatch("point cloud size must be a multiple of the dimension");
        }
        n_ = static_cast<std::uint32_t>(coords_.size() / dim_);
    }

    std::uint32_t size() const override { return n_; }
    std::uint32_t dim() const { return dim_; }
    const std::vector<double>& coords() const { return coords_; }
    const double* point(ObjectId i) const { return coords_.data() + static_cast<std::size_t>(i) * dim_; }

    double distance(ObjectId i, ObjectId j) const override {
        const double* a = point(i);
        const double* b = point(j);
        double sum = 0.0;
        for (std::uint32_t k = 0; k < dim_; ++k) {
            const double diff = a[k] - b[k];
            sum += diff * diff;
        }
        return std::sqrt(sum);
    }

private:
    std::uint32_t dim_;
    std::uint32_t n_;
    std::vector<double> coords_;
};

/// Shortest-path distances on an undirected graph with positive edge
/// weights (unit by default). Distances are computed one source at a time
/// and cached; the cache is guarded so concurrent readers are safe.
class ShortestPathOracle : public DistanceOracle {
public:
    /// Edges as (u, v[, weight]) with weight > 0. Throws DisconnectedGraph
    /// naming two unreachable vertices.
    ShortestPathOracle(std::uint32_t n, const std::vector<std::pair<ObjectId, ObjectId>>& edges,
                       const std::vector<double>& weights = {})
        : n_(n), adj_(n), cache_(n) {
        if (!weights.empty() && weights.size() != edges.size()) {
            throw SizeMismatch("edge weight list must match the edge list");
        }
        bool unit = true;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [u, v] = edges[e];
            if (u >= n_ || v >= n_) throw IdOutOfRange("edge endpoint out of range");
            if (u == v) continue;
            const double w = weights.empty() ? 1.0 : weights[e];
            if (!(w > 0.0)) throw Error("edge weights must be positive");
            if (w != 1.0) unit = false;
            adj_[u].push_back({v, w});
            adj_[v].push_back({u, w});
        }
        unit_weights_ = unit;
        if (n_ > 0) {
            const std::vector<double>& from0 = row(0);
            for (std::uint32_t v = 0; v < n_; ++v) {
                if (from0[v] == kUnreachable) {
                    throw DisconnectedGraph("vertices 0 and " + std::to_string(v) +
                                            " are not connected");
                }
            }
        }
    }

    std::uint32_t size() const override { return n_; }

    double distance(ObjectId i, ObjectId j) const override {
        if (i == j) return 0.0;
        return row(i)[j];
    }

private:
    static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

    const std::vector<double>& row(ObjectId source) const {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (!cache_[source].empty()) return cache_[source];
        }
        std::vector<double> dist(n_, kUnreachable);
        dist[source] = 0.0;
        if (unit_weights_) {
            std::vector<ObjectId> frontier{source};
            std::vector<ObjectId> next;
            double level = 0.0;
            while (!frontier.empty()) {
                level += 1.0;
                next.clear();
                for (ObjectId u : frontier) {
                    for (const auto& [v, w] : adj_[u]) {
                        if (dist[v] == kUnreachable) {
                            dist[v] = level;
                            next.push_back(v);
                        }
                    }
                }
                frontier.swap(next);
            }
        } else {
            using Item = std::pair<double, ObjectId>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
            heap.push({0.0, source});
            std::vector<bool> done(n_, false);
            while (!heap.empty()) {
                const auto [d, u] = heap.top();
                heap.pop();
                if (done[u]) continue;
                done[u] = true;
                for (const auto& [v, w] : adj_[u]) {
                    if (d + w < dist[v]) {
                        dist[v] = d + w;
                        heap.push({dist[v], v});
                    }
                }
            }
        }
        std::lock_guard<std::mutex> lock(mutex_);
        if (cache_[source].empty()) cache_[source] = std::move(dist);
        return cache_[source];
    }

    std::uint32_t n_;
    bool unit_weights_ = true;
    std::vector<std::vector<std::pair<ObjectId, double>>> adj_;
    mutable std::mutex mutex_;
    mutable std::vector<std::vector<double>> cache_;
};

/// Convenience builder matching the edge-list CSV interface.
inline std::shared_ptr<ShortestPathOracle> shortest_path_oracle(
    const std::vector<std::pair<ObjectId, ObjectId>>& edges, std::uint32_t n) {
    return std::make_shared<ShortestPathOracle>(n, edges);
}

/// Most central member of {a,b,c}: the one opposite the strictly longest
/// side. When the longest side is tied the unique center does not exist;
/// the smallest id among the candidates is returned and *tie is set.
inline ObjectId true_center(const DistanceOracle& o, ObjectId a, ObjectId b, ObjectId c,
                            bool* tie = nullptr) {
    if (a == b || a == c || b == c) throw DuplicateMember("triple members must be distinct");
    const double ab = o.distance(a, b);
    const double ac = o.distance(a, c);
    const double bc = o.distance(b, c);
    const double longest = std::max(ab, std::max(ac, bc));
    ObjectId best = std::numeric_limits<ObjectId>::max();
    int candidates = 0;
    if (bc == longest) {
        best = std::min(best, a);
        ++candidates;
    }
    if (ac == longest) {
        best = std::min(best, b);
        ++candidates;
    }
    if (ab == longest) {
        best = std::min(best, c);
        ++candidates;
    }
    if (tie) *tie = candidates > 1;
    return best;
}

/// Odd one out of {a,b,c}: the member opposite the strictly shortest side.
/// Tie handling mirrors true_center.
inline ObjectId true_odd_one_out(const DistanceOracle& o, ObjectId a, ObjectId b, ObjectId c,
                                 bool* tie = nullptr) {
    if (a == b || a == c || b == c) throw DuplicateMember("triple members must be distinct");
    const double ab = o.distance(a, b);
    const double ac = o.distance(a, c);
    const double bc = o.distance(b, c);
    const double shortest = std::min(ab, std::min(ac, bc));
    ObjectId best = std::numeric_limits<ObjectId>::max();
    int candidates = 0;
    if (bc == shortest) {
        best = std::min(best, a);
        ++candidates;
    }
    if (ac == shortest) {
        best = std::min(best, b);
        ++candidates;
    }
    if (ab == shortest) {
        best = std::min(best, c);
        ++candidates;
    }
    if (tie) *tie = candidates > 1;
    return best;
}

/// Truthful statement about a triple under the given kind.
inline Statement truthful_statement(const DistanceOracle& o, StatementKind kind, ObjectId a,
                                    ObjectId b, ObjectId c, bool* tie = nullptr) {
    const ObjectId designated = kind == StatementKind::MostCentral
                                    ? true_center(o, a, b, c, tie)
                                    : true_odd_one_out(o, a, b, c, tie);
    ObjectId o1, o2;
    if (designated == a) {
        o1 = b;
        o2 = c;
    } else if (designated == b) {
        o1 = a;
        o2 = c;
    } else {
        o1 = a;
        o2 = b;
    }
    return canonicalize(Statement{kind, designated, o1, o2});
}

}  // namespace trilens
