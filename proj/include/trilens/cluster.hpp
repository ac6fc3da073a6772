/// @file  cluster.hpp
/// @brief Estimated-k-RNG affinity construction and normalized (Shi-Malik)
///        spectral clustering.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "trilens/eigensolve.hpp"
#include "trilens/errors.hpp"
#include "trilens/kmeans.hpp"
#include "trilens/proxgraph.hpp"

namespace trilens {

/// Symmetric non-negative affinity with zero diagonal, entries in [0, 1].
using AffinityMatrix = SquareMatrix;

struct ClusteringResult {
    std::vector<std::uint32_t> assignment;  // object -> cluster in [0, l)
    std::uint32_t l = 0;
};

struct WeightMode {
    bool weighted = false;
    double sigma = 1.0;

    static WeightMode unweighted() { return {false, 1.0}; }
    static WeightMode gaussian(double sigma) { return {true, sigma}; }
};

/// Affinity from pair statistics: a pair passes when its V value
/// (optionally noise-corrected) falls below k/(n-2); passing pairs get
/// weight 1 or exp(-V^2 / sigma^2). V itself stays uncorrected in the
/// weight, matching the estimate the exponent is defined on.
inline AffinityMatrix build_affinity(const PairStats& ps, std::uint32_t k, WeightMode mode,
                                     const double* correction = nullptr) {
    if (k < 1) throw Error("k must be at least 1");
    if (mode.weighted && !(mode.sigma > 0.0)) throw BadSigma("sigma must be positive");
    if (correction) require_correctable(*correction);
    const std::uint32_t n = ps.size();
    const double threshold = n > 2 ? static_cast<double>(k) / static_cast<double>(n - 2)
                                   : std::numeric_limits<double>::infinity();
    AffinityMatrix w(n);
    ps.for_each_observed([&](ObjectId i, ObjectId j, std::uint64_t nn, std::uint64_t dd) {
        const double v = static_cast<double>(nn) / static_cast<double>(dd);
        const double decision = correction ? noise_invert(v, *correction) : v;
        if (decision < threshold) {
            const double weight = mode.weighted ? std::exp(-(v * v) / (mode.sigma * mode.sigma)) : 1.0;
            w.at(i, j) = weight;
            w.at(j, i) = weight;
        }
    });
    return w;
}

/// Affinity from an exact graph (edge weights carried over).
inline AffinityMatrix graph_affinity(const EstimatedGraph& g) {
    AffinityMatrix w(g.size());
    for (const EstimatedGraph::Edge& e : g.edges()) {
        w.at(e.i, e.j) = e.weight;
        w.at(e.j, e.i) = e.weight;
    }
    return w;
}

struct SpectralOptions {
    bool allow_isolated = false;
    /// When set, isolated vertices are attached to the cluster of their
    /// argmin-V counterpart instead of cluster 0.
    const PairStats* attach_by_v = nullptr;
    std::uint32_t kmeans_restarts = 10;
};

/// Shi-Malik normalized spectral clustering: the l generalized
/// eigenvectors of L = Deg - W with smallest eigenvalues w.r.t. Deg
/// (computed through the symmetric normalization Deg^{-1/2} L Deg^{-1/2}
/// with back-transformation), clustered row-wise by seeded k-means.
///
/// Isolated vertices are a hard error unless opts.allow_isolated is set,
/// in which case they are excluded from the spectral step and appended to
/// the cluster of their argmin-V counterpart (cluster 0 without one).
inline ClusteringResult spectral_clustering(const AffinityMatrix& w, std::uint32_t l,
                                            std::uint64_t seed, const SpectralOptions& opts = {}) {
    const std::uint32_t n = w.n;
    if (l < 1) throw Error("cluster count must be at least 1");
    if (l > n) throw Error("cluster count exceeds the number of objects");

    std::vector<double> degree(n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) degree[i] += w.at(i, j);
    }
    std::vector<std::uint32_t> active;
    std::vector<std::uint32_t> isolated;
    for (std::uint32_t i = 0; i < n; ++i) {
        (degree[i] > 0.0 ? active : isolated).push_back(i);
    }
    if (!isolated.empty() && !opts.allow_isolated) {
        std::string ids;
        for (const std::uint32_t v : isolated) {
            if (!ids.empty()) ids += ", ";
            ids += std::to_string(v);
        }
        throw IsolatedVertices("isolated vertices: " + ids + "; raise k or allow_isolated");
    }
    const std::uint32_t m = static_cast<std::uint32_t>(active.size());
    if (m < l) throw Error("fewer non-isolated vertices than clusters");

    ClusteringResult result;
    result.l = l;
    result.assignment.assign(n, 0);

    if (l == 1) {
        return result;
    }

    // L_sym = I - Deg^{-1/2} W Deg^{-1/2} on the active set.
    SquareMatrix lsym(m);
    std::vector<double> inv_sqrt(m);
    for (std::uint32_t a = 0; a < m; ++a) inv_sqrt[a] = 1.0 / std::sqrt(degree[active[a]]);
    for (std::uint32_t a = 0; a < m; ++a) {
        for (std::uint32_t b = 0; b < m; ++b) {
            const double off = -w.at(active[a], active[b]) * inv_sqrt[a] * inv_sqrt[b];
            lsym.at(a, b) = (a == b ? 1.0 + off : off);
        }
    }
    const EigenPairs pairs = smallest_eigenpairs(lsym, l);

    // Back-transform to generalized eigenvectors and cluster the rows.
    std::vector<double> rows(static_cast<std::size_t>(m) * l);
    for (std::uint32_t a = 0; a < m; ++a) {
        for (std::uint32_t c = 0; c < l; ++c) {
            rows[static_cast<std::size_t>(a) * l + c] = pairs.vectors[c][a] * inv_sqrt[a];
        }
    }
    const KMeansResult km = kmeans(rows, m, l, l, seed, opts.kmeans_restarts);
    for (std::uint32_t a = 0; a < m; ++a) result.assignment[active[a]] = km.assignment[a];

    for (const std::uint32_t v : isolated) {
        std::uint32_t attach = 0;
        if (opts.attach_by_v) {
            double best_v = std::numeric_limits<double>::infinity();
            ObjectId best_j = n;
            for (std::uint32_t j = 0; j < n; ++j) {
                if (j == v) continue;
                const double vij = opts.attach_by_v->V(v, j);
                if (vij < best_v) {
                    best_v = vij;
                    best_j = j;
                }
            }
            if (best_j < n && degree[best_j] > 0.0) attach = result.assignment[best_j];
        }
        result.assignment[v] = attach;
    }
    return result;
}

}  // namespace trilens
