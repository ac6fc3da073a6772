/// @file  classify.hpp
/// @brief K-class classification from statements: the depth-feature
///        pipeline with a built-in nearest-neighbor classifier, and the
///        instance-based RNG-vote rule with leave-one-out k selection.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "trilens/depth.hpp"
#include "trilens/errors.hpp"
#include "trilens/rng.hpp"
#include "trilens/statements.hpp"

namespace trilens {

/// Objects split into labeled (class in [0, K)) and unlabeled (-1).
struct LabeledDataset {
    std::uint32_t n = 0;
    std::uint32_t num_classes = 0;
    std::vector<std::int32_t> labels;  // size n, -1 = unlabeled

    LabeledDataset() = default;
    LabeledDataset(std::vector<std::int32_t> label_vector, std::uint32_t classes)
        : n(static_cast<std::uint32_t>(label_vector.size())),
          num_classes(classes),
          labels(std::move(label_vector)) {
        std::vector<bool> seen(num_classes, false);
        for (const std::int32_t l : labels) {
            if (l < -1 || l >= static_cast<std::int32_t>(num_classes)) {
                throw UnknownLabel("class label " + std::to_string(l) + " outside [0, " +
                                   std::to_string(num_classes) + ")");
            }
            if (l >= 0) seen[static_cast<std::uint32_t>(l)] = true;
        }
        for (std::uint32_t c = 0; c < num_classes; ++c) {
            if (!seen[c]) throw EmptyClass("class " + std::to_string(c) + " has no labeled object");
        }
    }

    std::vector<ObjectId> labeled_ids() const {
        std::vector<ObjectId> out;
        for (ObjectId i = 0; i < n; ++i) {
            if (labels[i] >= 0) out.push_back(i);
        }
        return out;
    }

    std::vector<ObjectId> unlabeled_ids() const {
        std::vector<ObjectId> out;
        for (ObjectId i = 0; i < n; ++i) {
            if (labels[i] < 0) out.push_back(i);
        }
        return out;
    }
};

struct ClassifierConfig {
    enum class Variant { FeatureKnn, RngVote };
    Variant variant = Variant::FeatureKnn;
    std::vector<std::uint32_t> k_grid = {1, 3, 5, 7, 11, 15, 23};
    std::uint32_t cv_folds = 10;        // FeatureKnn
    std::uint32_t loocv_repeats = 20;   // RngVote
    std::uint64_t seed = 0;
};

/// Default neighborhood grid for the RNG-vote rule, clipped to |L|-1.
inline std::vector<std::uint32_t> default_rng_vote_grid(std::size_t labeled_count) {
    std::vector<std::uint32_t> grid;
    for (const std::uint32_t k : {1u, 2u, 3u, 5u, 7u, 15u, 25u, 45u, 70u}) {
        if (labeled_count >= 2 && k <= labeled_count - 1) grid.push_back(k);
    }
    if (grid.empty()) grid.push_back(1);
    return grid;
}

namespace detail {

/// Euclidean k-NN vote over training rows; neighbor order is (distance,
/// index) and class ties go to the smallest class index.
inline std::uint32_t knn_predict(const std::vector<const double*>& train_rows,
                                 const std::vector<std::uint32_t>& train_labels,
                                 std::uint32_t num_classes, std::uint32_t dim, const double* query,
                                 std::uint32_t k) {
    const std::size_t m = train_rows.size();
    std::vector<std::pair<double, std::size_t>> order(m);
    for (std::size_t i = 0; i < m; ++i) {
        double d = 0.0;
        for (std::uint32_t c = 0; c < dim; ++c) {
            const double diff = train_rows[i][c] - query[c];
            d += diff * diff;
        }
        order[i] = {d, i};
    }
    const std::size_t take = std::min<std::size_t>(k, m);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end());
    std::vector<std::uint32_t> votes(num_classes, 0);
    for (std::size_t i = 0; i < take; ++i) votes[train_labels[order[i].second]] += 1;
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < num_classes; ++c) {
        if (votes[c] > votes[best]) best = c;
    }
    return best;
}

}  // namespace detail

/// Depth-feature classification: class-conditional lens depth features in
/// [0,1]^K for all objects (no rescaling), a k-NN classifier on the
/// labeled rows with k chosen by cv_folds-fold cross-validation over the
/// grid, and a prediction for every unlabeled object. Returns (id, class)
/// pairs sorted by id.
inline std::vector<std::pair<ObjectId, std::uint32_t>> classify_feature(
    const StatementCollection& c, const LabeledDataset& ds, const ClassifierConfig& cfg) {
    if (ds.n != c.n) throw SizeMismatch("dataset and statements disagree on n");
    if (cfg.k_grid.empty()) throw Error("k grid must be nonempty");
    std::vector<std::uint32_t> grid = cfg.k_grid;  // ascending, so loss ties keep the smallest k
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const FeatureMatrix features = class_conditional_depth(c, ds.labels, ds.num_classes);
    const std::vector<ObjectId> labeled = ds.labeled_ids();

    // Pick k by cross-validation on the labeled rows.
    std::vector<ObjectId> shuffled = labeled;
    SplitMix64 rng(derive_seed(cfg.seed, 0x5e1ec7));
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);
    }
    const std::uint32_t folds =
        std::max<std::uint32_t>(2, std::min<std::uint32_t>(cfg.cv_folds,
                                                           static_cast<std::uint32_t>(shuffled.size())));
    std::uint32_t best_k = grid.front();
    double best_loss = std::numeric_limits<double>::infinity();
    for (const std::uint32_t k : grid) {
        std::size_t wrong = 0;
        for (std::uint32_t f = 0; f < folds; ++f) {
            std::vector<const double*> train_rows;
            std::vector<std::uint32_t> train_labels;
            std::vector<ObjectId> validation;
            for (std::size_t i = 0; i < shuffled.size(); ++i) {
                if (i % folds == f) {
                    validation.push_back(shuffled[i]);
                } else {
                    train_rows.push_back(features.row(shuffled[i]));
                    train_labels.push_back(static_cast<std::uint32_t>(ds.labels[shuffled[i]]));
                }
            }
            if (train_rows.empty()) continue;
            for (const ObjectId v : validation) {
                const std::uint32_t pred = detail::knn_predict(
                    train_rows, train_labels, ds.num_classes, features.cols, features.row(v), k);
                wrong += pred != static_cast<std::uint32_t>(ds.labels[v]);
            }
        }
        const double loss = static_cast<double>(wrong) / static_cast<double>(shuffled.size());
        if (loss < best_loss) {
            best_loss = loss;
            best_k = k;
        }
    }

    std::vector<const double*> train_rows;
    std::vector<std::uint32_t> train_labels;
    for (const ObjectId i : labeled) {
        train_rows.push_back(features.row(i));
        train_labels.push_back(static_cast<std::uint32_t>(ds.labels[i]));
    }
    std::vector<std::pair<ObjectId, std::uint32_t>> out;
    for (const ObjectId u : ds.unlabeled_ids()) {
        out.emplace_back(u, detail::knn_predict(train_rows, train_labels, ds.num_classes,
                                                features.cols, features.row(u), best_k));
    }
    return out;
}

/// Pair statistics restricted to (unlabeled, labeled) pairs, counting only
/// statements whose third member is labeled. Built once per dataset so
/// multiple k values can be evaluated cheaply.
class RngVoteModel {
public:
    RngVoteModel(const StatementCollection& c, const LabeledDataset& ds) : ds_(&ds) {
        require_kind(c, StatementKind::MostCentral);
        if (ds.n != c.n) throw SizeMismatch("dataset and statements disagree on n");
        u_index_.assign(ds.n, kNone);
        l_index_.assign(ds.n, kNone);
        for (const ObjectId u : ds.unlabeled_ids()) {
            u_index_[u] = static_cast<std::uint32_t>(unlabeled_.size());
            unlabeled_.push_back(u);
        }
        for (const ObjectId l : ds.labeled_ids()) {
            l_index_[l] = static_cast<std::uint32_t>(labeled_.size());
            labeled_.push_back(l);
        }
        numer_.assign(unlabeled_.size() * labeled_.size(), 0);
        denom_.assign(unlabeled_.size() * labeled_.size(), 0);
        for (const Statement& s : c.items) {
            tally(s.other1, s.other2, s.designated, true);
            tally(s.designated, s.other1, s.other2, false);
            tally(s.designated, s.other2, s.other1, false);
        }
    }

    const std::vector<ObjectId>& unlabeled() const { return unlabeled_; }
    const std::vector<ObjectId>& labeled() const { return labeled_; }

    /// V for an (unlabeled, labeled) pair; +inf for unseen pairs and for
    /// arguments outside U x L.
    double V(ObjectId u, ObjectId l) const {
        if (u >= u_index_.size() || l >= l_index_.size() || u_index_[u] == kNone ||
            l_index_[l] == kNone) {
            return std::numeric_limits<double>::infinity();
        }
        const std::size_t cell = index(u, l);
        if (denom_[cell] == 0) return std::numeric_limits<double>::infinity();
        return static_cast<double>(numer_[cell]) / static_cast<double>(denom_[cell]);
    }

    /// Majority vote of labeled objects with V(u, l) < k/(|L|-1), random
    /// ties from the caller's stream. Falls back to the label of the
    /// argmin-V object, then to the global majority class.
    std::uint32_t predict(ObjectId u, std::uint32_t k, SplitMix64& rng) const {
        const double threshold =
            labeled_.size() > 1
                ? static_cast<double>(k) / static_cast<double>(labeled_.size() - 1)
                : std::numeric_limits<double>::infinity();
        std::vector<std::uint32_t> votes(ds_->num_classes, 0);
        bool any = false;
        double best_v = std::numeric_limits<double>::infinity();
        ObjectId best_l = kNoneId;
        for (const ObjectId l : labeled_) {
            const double v = V(u, l);
            if (v < best_v) {
                best_v = v;
                best_l = l;
            }
            if (v < threshold) {
                votes[static_cast<std::uint32_t>(ds_->labels[l])] += 1;
                any = true;
            }
        }
        if (any) {
            std::uint32_t top = 0;
            for (std::uint32_t c = 1; c < ds_->num_classes; ++c) {
                if (votes[c] > votes[top]) top = c;
            }
            std::vector<std::uint32_t> tied;
            for (std::uint32_t c = 0; c < ds_->num_classes; ++c) {
                if (votes[c] == votes[top]) tied.push_back(c);
            }
            if (tied.size() == 1) return tied.front();
            return tied[rng.next_below(tied.size())];
        }
        if (best_l != kNoneId && std::isfinite(best_v)) {
            return static_cast<std::uint32_t>(ds_->labels[best_l]);
        }
        // No statement links u to any labeled object at all.
        std::vector<std::uint32_t> class_sizes(ds_->num_classes, 0);
        for (const ObjectId l : labeled_) {
            class_sizes[static_cast<std::uint32_t>(ds_->labels[l])] += 1;
        }
        std::uint32_t majority = 0;
        for (std::uint32_t c = 1; c < ds_->num_classes; ++c) {
            if (class_sizes[c] > class_sizes[majority]) majority = c;
        }
        return majority;
    }

private:
    static constexpr std::uint32_t kNone = 0xFFFFFFFFu;
    static constexpr ObjectId kNoneId = 0xFFFFFFFFu;

    std::size_t index(ObjectId u, ObjectId l) const {
        return static_cast<std::size_t>(u_index_[u]) * labeled_.size() + l_index_[l];
    }

    void tally(ObjectId a, ObjectId b, ObjectId third, bool central) {
        if (l_index_[third] == kNone) return;  // the third member must be labeled
        const auto bump = [&](ObjectId u, ObjectId l) {
            if (u_index_[u] == kNone || l_index_[l] == kNone) return;
            const std::size_t cell = index(u, l);
            denom_[cell] += 1;
            if (central) numer_[cell] += 1;
        };
        bump(a, b);
        bump(b, a);
    }

    const LabeledDataset* ds_;
    std::vector<ObjectId> unlabeled_;
    std::vector<ObjectId> labeled_;
    std::vector<std::uint32_t> u_index_;
    std::vector<std::uint32_t> l_index_;
    std::vector<std::uint64_t> numer_;
    std::vector<std::uint64_t> denom_;
};

/// Instance-based classification through the estimated k-RNG neighborhood.
/// Tie-break randomness is split per object as derive_seed(seed, id) so
/// predictions do not depend on evaluation order. Returns (id, class)
/// pairs sorted by id.
inline std::vector<std::pair<ObjectId, std::uint32_t>> classify_rng_vote(
    const StatementCollection& c, const LabeledDataset& ds, std::uint32_t k,
    std::uint64_t seed = 0) {
    if (k < 1) throw Error("k must be at least 1");
    const RngVoteModel model(c, ds);
    std::vector<std::pair<ObjectId, std::uint32_t>> out;
    for (const ObjectId u : model.unlabeled()) {
        SplitMix64 rng(derive_seed(seed, u));
        out.emplace_back(u, model.predict(u, k, rng));
    }
    return out;
}

/// Non-exhaustive leave-one-out selection of k: each repeat removes one
/// uniformly chosen labeled object and predicts it with the rule trained
/// on the rest; the k with the lowest mean 0-1 loss wins, ties to the
/// smallest k.
inline std::uint32_t select_k_loocv(const StatementCollection& c, const LabeledDataset& ds,
                                    const std::vector<std::uint32_t>& k_grid,
                                    std::uint32_t repeats = 20, std::uint64_t seed = 0) {
    if (k_grid.empty()) throw Error("k grid must be nonempty");
    const std::vector<ObjectId> labeled = ds.labeled_ids();
    if (labeled.size() < 2) throw Error("leave-one-out selection needs at least two labels");
    std::vector<std::uint32_t> grid = k_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    SplitMix64 chooser(derive_seed(seed, 0x10c0));
    std::vector<std::size_t> wrong(grid.size(), 0);
    for (std::uint32_t rep = 0; rep < repeats; ++rep) {
        const ObjectId held_out = labeled[chooser.next_below(labeled.size())];
        LabeledDataset reduced;
        reduced.n = ds.n;
        reduced.num_classes = ds.num_classes;
        reduced.labels = ds.labels;
        reduced.labels[held_out] = -1;
        const RngVoteModel model(c, reduced);
        const std::uint32_t truth = static_cast<std::uint32_t>(ds.labels[held_out]);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            SplitMix64 rng(derive_seed(derive_seed(seed, rep), held_out));
            wrong[g] += model.predict(held_out, grid[g], rng) != truth;
        }
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        if (wrong[g] < wrong[best]) best = g;
    }
    return grid[best];
}

}  // namespace trilens
