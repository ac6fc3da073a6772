/// @file  metrics.hpp
/// @brief Evaluation metrics: relative medoid error, average Hamming
///        distance between graphs, 0-1 loss and clustering purity.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trilens/cluster.hpp"
#include "trilens/depth.hpp"
#include "trilens/errors.hpp"
#include "trilens/oracle.hpp"
#include "trilens/proxgraph.hpp"

namespace trilens {

struct MetricReport {
    std::string name;
    double value = 0.0;
    std::vector<std::pair<std::string, std::string>> context;
};

/// (D(estimate) - D(true medoid)) / D(true medoid).
inline double relative_error(const DistanceOracle& o, ObjectId estimate) {
    const auto [medoid, best] = true_medoid(o);
    (void)medoid;
    if (best == 0.0) throw DegenerateObjective("true medoid objective is zero");
    double objective = 0.0;
    for (ObjectId j = 0; j < o.size(); ++j) objective += o.distance(estimate, j);
    return (objective - best) / best;
}

/// Average Hamming distance between full adjacency matrices,
/// (1/n) * sum_ij 1{A_ij != B_ij}. Each disagreeing unordered pair counts
/// twice, matching the double sum. Edge weights are ignored; only the
/// adjacency pattern is compared.
inline double hamming_error(const EstimatedGraph& a, const EstimatedGraph& b) {
    if (a.size() != b.size()) throw SizeMismatch("graphs must share the object universe");
    std::size_t disagreements = 0;
    const auto& ea = a.edges();
    const auto& eb = b.edges();
    std::size_t i = 0, j = 0;
    const auto before = [](const EstimatedGraph::Edge& x, const EstimatedGraph::Edge& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    };
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].i == eb[j].i && ea[i].j == eb[j].j) {
            ++i;
            ++j;
        } else if (before(ea[i], eb[j])) {
            ++disagreements;
            ++i;
        } else {
            ++disagreements;
            ++j;
        }
    }
    disagreements += (ea.size() - i) + (eb.size() - j);
    return 2.0 * static_cast<double>(disagreements) / static_cast<double>(a.size());
}

/// Fraction of objects whose predicted label differs from the truth.
/// Both maps must cover exactly the same ids.
inline double zero_one_loss(const std::map<ObjectId, std::int64_t>& predicted,
                            const std::map<ObjectId, std::int64_t>& truth) {
    if (predicted.size() != truth.size()) throw KeyMismatch("prediction and truth differ in size");
    std::size_t wrong = 0;
    auto it = truth.begin();
    for (const auto& [id, label] : predicted) {
        if (it->first != id) throw KeyMismatch("prediction and truth cover different objects");
        wrong += label != it->second;
        ++it;
    }
    if (predicted.empty()) return 0.0;
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

/// (1/n) * sum over clusters of the dominant class count. truth[i] must be
/// a valid class for every clustered object.
inline double purity(const ClusteringResult& clustering, const std::vector<std::int32_t>& truth) {
    const std::size_t n = clustering.assignment.size();
    if (truth.size() != n) throw KeyMismatch("truth labels must cover all clustered objects");
    std::int32_t max_label = -1;
    for (const std::int32_t t : truth) {
        if (t < 0) throw KeyMismatch("every clustered object needs a class label");
        max_label = std::max(max_label, t);
    }
    if (n == 0) return 0.0;
    const std::size_t classes = static_cast<std::size_t>(max_label) + 1;
    std::vector<std::uint64_t> table(static_cast<std::size_t>(clustering.l) * classes, 0);
    for (std::size_t i = 0; i < n; ++i) {
        table[static_cast<std::size_t>(clustering.assignment[i]) * classes +
              static_cast<std::size_t>(truth[i])] += 1;
    }
    std::uint64_t sum = 0;
    for (std::uint32_t k = 0; k < clustering.l; ++k) {
        std::uint64_t best = 0;
        for (std::size_t c = 0; c < classes; ++c) {
            best = std::max(best, table[static_cast<std::size_t>(k) * classes + c]);
        }
        sum += best;
    }
    return static_cast<double>(sum) / static_cast<double>(n);
}

}  // namespace trilens
