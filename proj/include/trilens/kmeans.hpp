/// @file  kmeans.hpp
/// @brief Lloyd k-means with distance-squared-weighted careful seeding.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "trilens/errors.hpp"
#include "trilens/rng.hpp"

namespace trilens {

struct KMeansResult {
    std::vector<std::uint32_t> assignment;
    double inertia = 0.0;
};

namespace detail {

inline double sqdist(const double* a, const double* b, std::uint32_t dim) {
    double s = 0.0;
    for (std::uint32_t k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
    }
    return s;
}

inline KMeansResult kmeans_single(const std::vector<double>& rows, std::uint32_t n,
                                  std::uint32_t dim, std::uint32_t l, SplitMix64& rng) {
    const auto row = [&](std::uint32_t i) { return rows.data() + static_cast<std::size_t>(i) * dim; };

    // Careful seeding: first center uniform, the rest proportional to the
    // squared distance to the nearest chosen center.
    std::vector<double> centers(static_cast<std::size_t>(l) * dim);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    const auto center = [&](std::uint32_t c) { return centers.data() + static_cast<std::size_t>(c) * dim; };
    std::uint32_t first = static_cast<std::uint32_t>(rng.next_below(n));
    std::copy_n(row(first), dim, center(0));
    for (std::uint32_t c = 1; c < l; ++c) {
        double total = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], sqdist(row(i), center(c - 1), dim));
            total += nearest[i];
        }
        std::uint32_t pick = 0;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double cum = 0.0;
            pick = n - 1;
            for (std::uint32_t i = 0; i < n; ++i) {
                cum += nearest[i];
                if (target < cum) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining rows coincide with chosen centers; any choice
            // yields the same inertia.
            pick = static_cast<std::uint32_t>(rng.next_below(n));
        }
        std::copy_n(row(pick), dim, center(c));
    }

    std::vector<std::uint32_t> assignment(n, 0);
    std::vector<double> sums(static_cast<std::size_t>(l) * dim);
    std::vector<std::uint32_t> counts(l);
    double inertia = std::numeric_limits<double>::infinity();
    constexpr int kMaxIter = 300;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double new_inertia = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) {
            std::uint32_t best = 0;
            double best_d = sqdist(row(i), center(0), dim);
            for (std::uint32_t c = 1; c < l; ++c) {
                const double d = sqdist(row(i), center(c), dim);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assignment[i] = best;
            new_inertia += best_d;
        }

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::uint32_t i = 0; i < n; ++i) {
            counts[assignment[i]] += 1;
            double* s = sums.data() + static_cast<std::size_t>(assignment[i]) * dim;
            const double* r = row(i);
            for (std::uint32_t k = 0; k < dim; ++k) s[k] += r[k];
        }
        bool reseeded = false;
        for (std::uint32_t c = 0; c < l; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster at the row farthest from its
                // center (smallest index on ties).
                std::uint32_t far = 0;
                double far_d = -1.0;
                for (std::uint32_t i = 0; i < n; ++i) {
                    const double d = sqdist(row(i), center(assignment[i]), dim);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                std::copy_n(row(far), dim, center(c));
                reseeded = true;
            } else {
                double* s = sums.data() + static_cast<std::size_t>(c) * dim;
                for (std::uint32_t k = 0; k < dim; ++k) center(c)[k] = s[k] / counts[c];
            }
        }

        const double change = inertia - new_inertia;
        const bool converged =
            !reseeded &&
            (new_inertia == 0.0 ||
             (std::isfinite(inertia) && change <= 1e-8 * std::max(inertia, new_inertia)));
        inertia = new_inertia;
        if (converged) break;
    }

    // Final assignment against the converged centers.
    double final_inertia = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t best = 0;
        double best_d = sqdist(row(i), center(0), dim);
        for (std::uint32_t c = 1; c < l; ++c) {
            const double d = sqdist(row(i), center(c), dim);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assignment[i] = best;
        final_inertia += best_d;
    }
    return {std::move(assignment), final_inertia};
}

}  // namespace detail

/// Clusters the rows of an n-by-dim matrix into l groups. Runs `restarts`
/// seeded restarts and keeps the assignment with the lowest inertia
/// (lowest restart index on ties). Deterministic given the seed.
inline KMeansResult kmeans(const std::vector<double>& rows, std::uint32_t n, std::uint32_t dim,
                           std::uint32_t l, std::uint64_t seed, std::uint32_t restarts = 10) {
    if (l == 0 || l > n) throw Error("cluster count must lie in [1, n]");
    if (rows.size() != static_cast<std::size_t>(n) * dim) {
        throw SizeMismatch("row matrix does not match n and dim");
    }
    KMeansResult best;
    for (std::uint32_t r = 0; r < restarts; ++r) {
        SplitMix64 rng(derive_seed(seed, r));
        KMeansResult candidate = detail::kmeans_single(rows, n, dim, l, rng);
        if (r == 0 || candidate.inertia < best.inertia) best = std::move(candidate);
    }
    return best;
}

}  // namespace trilens
