/// @file  depth.hpp
/// @brief Lens depth estimation from statements, exact lens depth from an
///        oracle, medoid estimation, outlier ranking, class-conditional
///        depth features, and the odd-one-out frequency baseline.

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "trilens/errors.hpp"
#include "trilens/oracle.hpp"
#include "trilens/sampling.hpp"
#include "trilens/statements.hpp"

namespace trilens {

/// Per-object counters. ld = central_count / appear_count, zero for
/// objects that appear in no statement.
struct DepthTable {
    std::vector<std::uint64_t> central_count;
    std::vector<std::uint64_t> appear_count;
    std::vector<double> ld;

    std::uint32_t size() const { return static_cast<std::uint32_t>(ld.size()); }
};

/// Commutative integer fold over most-central statements. Partitioned
/// accumulators merged in any order equal the one-pass result exactly.
class DepthAccumulator {
public:
    explicit DepthAccumulator(std::uint32_t n) : central_(n, 0), appear_(n, 0) {}

    void add(const Statement& s) {
        central_[s.designated] += 1;
        appear_[s.designated] += 1;
        appear_[s.other1] += 1;
        appear_[s.other2] += 1;
    }

    void merge(const DepthAccumulator& other) {
        for (std::size_t i = 0; i < central_.size(); ++i) {
            central_[i] += other.central_[i];
            appear_[i] += other.appear_[i];
        }
    }

    DepthTable finish() const {
        DepthTable t;
        t.central_count = central_;
        t.appear_count = appear_;
        t.ld.resize(central_.size());
        for (std::size_t i = 0; i < central_.size(); ++i) {
            t.ld[i] = appear_[i] == 0 ? 0.0
                                      : static_cast<double>(central_[i]) /
                                            static_cast<double>(appear_[i]);
        }
        return t;
    }

private:
    std::vector<std::uint64_t> central_;
    std::vector<std::uint64_t> appear_;
};

/// Estimated lens depth of every object from most-central statements.
inline DepthTable estimate_lens_depth(const StatementCollection& c) {
    require_kind(c, StatementKind::MostCentral);
    DepthAccumulator acc(c.n);
    for (const Statement& s : c.items) acc.add(s);
    return acc.finish();
}

/// Exact per-object lens membership counts from a distance oracle.
struct ExactDepthTable {
    std::vector<std::uint64_t> lens_pair_count;
    std::vector<double> normalized;  // lens_pair_count / C(n-1, 2)
};

/// lens_pair_count(t) = number of unordered pairs {i,j} with i,j != t and
/// max(d(t,i), d(t,j)) < d(i,j).
inline ExactDepthTable exact_lens_depth(const DistanceOracle& o) {
    const std::uint32_t n = o.size();
    ExactDepthTable t;
    t.lens_pair_count.assign(n, 0);
    t.normalized.assign(n, 0.0);
    const std::uint64_t denom = n >= 1 ? binomial2(n - 1) : 0;
    for (ObjectId i = 0; i < n; ++i) {
        for (ObjectId j = i + 1; j < n; ++j) {
            const double dij = o.distance(i, j);
            for (ObjectId k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (std::max(o.distance(k, i), o.distance(k, j)) < dij) {
                    t.lens_pair_count[k] += 1;
                }
            }
        }
    }
    if (denom > 0) {
        for (ObjectId k = 0; k < n; ++k) {
            t.normalized[k] =
                static_cast<double>(t.lens_pair_count[k]) / static_cast<double>(denom);
        }
    }
    return t;
}

/// Object with maximal ld, ties to the smallest id.
inline ObjectId argmax_depth(const DepthTable& t) {
    ObjectId best = 0;
    for (ObjectId i = 1; i < t.size(); ++i) {
        if (t.ld[i] > t.ld[best]) best = i;
    }
    return best;
}

/// Medoid estimate from most-central statements (maximal estimated ld).
inline ObjectId estimate_medoid(const StatementCollection& c) {
    if (c.items.empty()) throw EmptyCollection("medoid estimation needs at least one statement");
    return argmax_depth(estimate_lens_depth(c));
}

/// Exact medoid: minimizes D(O) = sum_i d(O, O_i). Returns the medoid and
/// its objective, ties to the smallest id.
inline std::pair<ObjectId, double> true_medoid(const DistanceOracle& o) {
    const std::uint32_t n = o.size();
    ObjectId best = 0;
    double best_objective = 0.0;
    for (ObjectId i = 0; i < n; ++i) {
        double objective = 0.0;
        for (ObjectId j = 0; j < n; ++j) objective += o.distance(i, j);
        if (i == 0 || objective < best_objective) {
            best = i;
            best_objective = objective;
        }
    }
    return {best, best_objective};
}

/// Objects sorted ascending by estimated ld (ties to the smallest id),
/// truncated to report_count. Never-mentioned objects rank first.
inline std::vector<std::pair<ObjectId, double>> rank_outliers(const StatementCollection& c,
                                                              std::size_t report_count) {
    const DepthTable t = estimate_lens_depth(c);
    std::vector<ObjectId> order(t.size());
    for (ObjectId i = 0; i < t.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](ObjectId a, ObjectId b) {
        if (t.ld[a] != t.ld[b]) return t.ld[a] < t.ld[b];
        return a < b;
    });
    std::vector<std::pair<ObjectId, double>> out;
    const std::size_t take = std::min<std::size_t>(report_count, order.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.emplace_back(order[i], t.ld[order[i]]);
    return out;
}

/// Position of the largest gap between consecutive sorted ld values; a
/// suggested cutoff for how many leading entries to treat as outliers.
inline std::size_t largest_gap_cutoff(const std::vector<std::pair<ObjectId, double>>& ranked) {
    std::size_t cut = 0;
    double best_gap = -1.0;
    for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
        const double gap = ranked[i + 1].second - ranked[i].second;
        if (gap > best_gap) {
            best_gap = gap;
            cut = i + 1;
        }
    }
    return cut;
}

/// Per-object odd-one-out frequencies (the crowd-median score).
struct CrowdMedianTable {
    std::vector<std::uint64_t> outlier_count;
    std::vector<std::uint64_t> appear_count;
    std::vector<double> frequency;  // outlier_count / appear_count, 0 when unseen

    std::uint32_t size() const { return static_cast<std::uint32_t>(frequency.size()); }
};

inline CrowdMedianTable crowdmedian_scores(const StatementCollection& c) {
    require_kind(c, StatementKind::OddOneOut);
    CrowdMedianTable t;
    t.outlier_count.assign(c.n, 0);
    t.appear_count.assign(c.n, 0);
    t.frequency.assign(c.n, 0.0);
    for (const Statement& s : c.items) {
        t.outlier_count[s.designated] += 1;
        t.appear_count[s.designated] += 1;
        t.appear_count[s.other1] += 1;
        t.appear_count[s.other2] += 1;
    }
    for (ObjectId i = 0; i < c.n; ++i) {
        if (t.appear_count[i] > 0) {
            t.frequency[i] = static_cast<double>(t.outlier_count[i]) /
                             static_cast<double>(t.appear_count[i]);
        }
    }
    return t;
}

/// Baseline medoid estimate: object with minimal outlier frequency,
/// ties to the smallest id.
inline ObjectId crowdmedian_medoid(const CrowdMedianTable& t) {
    ObjectId best = 0;
    for (ObjectId i = 1; i < t.size(); ++i) {
        if (t.frequency[i] < t.frequency[best]) best = i;
    }
    return best;
}

/// Baseline outlier candidates: objects sorted descending by frequency
/// (ties to the smallest id), truncated to report_count.
inline std::vector<std::pair<ObjectId, double>> crowdmedian_outliers(const CrowdMedianTable& t,
                                                                     std::size_t report_count) {
    std::vector<ObjectId> order(t.size());
    for (ObjectId i = 0; i < t.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](ObjectId a, ObjectId b) {
        if (t.frequency[a] != t.frequency[b]) return t.frequency[a] > t.frequency[b];
        return a < b;
    });
    std::vector<std::pair<ObjectId, double>> out;
    const std::size_t take = std::min<std::size_t>(report_count, order.size());
    for (std::size_t i = 0; i < take; ++i) out.emplace_back(order[i], t.frequency[order[i]]);
    return out;
}

/// Row-major feature matrix: one row per object, one column per class.
struct FeatureMatrix {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<double> values;

    double at(std::uint32_t r, std::uint32_t c) const {
        return values[static_cast<std::size_t>(r) * cols + c];
    }
    const double* row(std::uint32_t r) const {
        return values.data() + static_cast<std::size_t>(r) * cols;
    }
};

/// Class-conditional lens depth: entry (O, i) counts only statements whose
/// other two members are both labeled with class i, with O designated, over
/// statements whose other two members are both labeled class i. Labels use
/// -1 for unlabeled objects; class values must lie in [0, num_classes).
inline FeatureMatrix class_conditional_depth(const StatementCollection& c,
                                             const std::vector<std::int32_t>& labels,
                                             std::uint32_t num_classes) {
    require_kind(c, StatementKind::MostCentral);
    if (labels.size() != c.n) throw SizeMismatch("label vector must cover all objects");
    for (const std::int32_t label : labels) {
        if (label < -1 || label >= static_cast<std::int32_t>(num_classes)) {
            throw UnknownLabel("class label " + std::to_string(label) + " outside [0, " +
                               std::to_string(num_classes) + ")");
        }
    }
    std::vector<std::uint64_t> numer(static_cast<std::size_t>(c.n) * num_classes, 0);
    std::vector<std::uint64_t> denom(static_cast<std::size_t>(c.n) * num_classes, 0);
    const auto bump = [&](ObjectId obj, ObjectId peer1, ObjectId peer2, bool central) {
        const std::int32_t l1 = labels[peer1];
        if (l1 < 0 || l1 != labels[peer2]) return;  // mixed or unlabeled pairs never count
        const std::size_t cell = static_cast<std::size_t>(obj) * num_classes +
                                 static_cast<std::uint32_t>(l1);
        denom[cell] += 1;
        if (central) numer[cell] += 1;
    };
    for (const Statement& s : c.items) {
        bump(s.designated, s.other1, s.other2, true);
        bump(s.other1, s.designated, s.other2, false);
        bump(s.other2, s.designated, s.other1, false);
    }
    FeatureMatrix f;
    f.rows = c.n;
    f.cols = num_classes;
    f.values.assign(numer.size(), 0.0);
    for (std::size_t i = 0; i < numer.size(); ++i) {
        if (denom[i] > 0) {
            f.values[i] = static_cast<double>(numer[i]) / static_cast<double>(denom[i]);
        }
    }
    return f;
}

}  // namespace trilens
