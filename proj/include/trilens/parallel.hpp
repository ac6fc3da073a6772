/// @file  parallel.hpp
/// @brief Deterministic partitioned folds over statement slices.
///
/// Counting estimators are commutative integer folds, so splitting a
/// collection into contiguous worker slices and merging the per-worker
/// accumulators in worker order is bit-identical to a sequential pass for
/// every worker count.

#pragma once

#include <cstddef>
#include <thread>
#include <vector>

#include "trilens/depth.hpp"
#include "trilens/proxgraph.hpp"
#include "trilens/statements.hpp"

namespace trilens {

/// Folds `items` into Acc using `workers` threads. Acc needs add(item)
/// and merge(const Acc&); `make()` builds an empty accumulator.
template <typename Acc, typename Make>
Acc parallel_fold(const std::vector<Statement>& items, std::size_t workers, Make&& make) {
    if (workers < 1) workers = 1;
    if (workers == 1 || items.size() < 2 * workers) {
        Acc acc = make();
        for (const Statement& s : items) acc.add(s);
        return acc;
    }
    std::vector<Acc> partial;
    partial.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) partial.push_back(make());
    const std::size_t base = items.size() / workers;
    const std::size_t extra = items.size() % workers;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    std::size_t pos = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        threads.emplace_back([&partial, &items, w, pos, len] {
            Acc& acc = partial[w];
            for (std::size_t i = pos; i < pos + len; ++i) acc.add(items[i]);
        });
        pos += len;
    }
    for (std::thread& t : threads) t.join();
    Acc result = std::move(partial.front());
    for (std::size_t w = 1; w < workers; ++w) result.merge(partial[w]);
    return result;
}

inline DepthTable estimate_lens_depth(const StatementCollection& c, std::size_t workers) {
    require_kind(c, StatementKind::MostCentral);
    const std::uint32_t n = c.n;
    return parallel_fold<DepthAccumulator>(c.items, workers,
                                           [n] { return DepthAccumulator(n); })
        .finish();
}

inline PairStats accumulate_pair_stats(const StatementCollection& c, std::size_t workers,
                                       std::uint32_t dense_threshold) {
    require_kind(c, StatementKind::MostCentral);
    const std::uint32_t n = c.n;
    return parallel_fold<PairStats>(c.items, workers,
                                    [n, dense_threshold] { return PairStats(n, dense_threshold); });
}

}  // namespace trilens
