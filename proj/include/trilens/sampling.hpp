/// @file  sampling.hpp
/// @brief Noisy statement sampling from a distance oracle.

#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "trilens/errors.hpp"
#include "trilens/oracle.hpp"
#include "trilens/rng.hpp"
#include "trilens/statements.hpp"

namespace trilens {

/// Per-statement corruption: with probability errorprob the designated
/// member is replaced by one of the two others, each with probability 1/2.
struct NoiseModel {
    double errorprob = 0.0;
    std::uint64_t seed = 0;
};

enum class SamplingMode : std::uint8_t { WithoutReplacement, WithReplacement };

/// Counters surfaced by generation: how many sampled triples had tied
/// longest/shortest sides (resolved deterministically to the smallest id).
struct SampleReport {
    std::size_t tie_count = 0;
};

inline std::uint64_t binomial2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

inline std::uint64_t binomial3(std::uint64_t n) {
    if (n < 3) return 0;
    const unsigned __int128 p = static_cast<unsigned __int128>(n) * (n - 1) * (n - 2) / 6;
    if (p > static_cast<unsigned __int128>(UINT64_MAX)) throw TooLarge("C(n,3) exceeds 64 bits");
    return static_cast<std::uint64_t>(p);
}

namespace detail {

/// Decodes rank r in [0, C(n,3)) to a triple a < b < c via the
/// combinatorial number system (colexicographic order).
inline void unrank_triple(std::uint64_t r, std::uint32_t n, ObjectId& a, ObjectId& b, ObjectId& c) {
    std::uint32_t lo = 2, hi = n;  // largest x with C(x,3) <= r, searched in [2, n)
    while (hi - lo > 1) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        if (binomial3(mid) <= r) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    c = lo;
    r -= binomial3(lo);
    lo = 1;
    hi = c;
    while (hi - lo > 1) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        if (binomial2(mid) <= r) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    b = lo;
    r -= binomial2(lo);
    a = static_cast<ObjectId>(r);
}

// Above this many triples the without-replacement sampler switches from a
// partial Fisher-Yates shuffle to sparse rejection, keeping memory O(count).
inline constexpr std::uint64_t kShuffleLimit = 1ULL << 22;

}  // namespace detail

/// Applies the noise model to one truthful statement, consuming one
/// uniform draw always and a second one only when the statement flips.
inline Statement apply_noise(const Statement& s, double errorprob, SplitMix64& rng) {
    const double u = rng.next_double();
    if (u >= errorprob) return s;
    const bool take_first = rng.next_double() < 0.5;
    const ObjectId designated = take_first ? s.other1 : s.other2;
    const ObjectId displaced = take_first ? s.other2 : s.other1;
    return canonicalize(Statement{s.kind, designated, s.designated, displaced});
}

inline Statement apply_noise(const Statement& s, const NoiseModel& nm, SplitMix64& rng) {
    return apply_noise(s, nm.errorprob, rng);
}

/// One truthful statement per unordered triple, triples in lexicographic
/// order. Throws TooLarge above the cap.
inline StatementCollection all_statements(const DistanceOracle& o, StatementKind kind,
                                          std::uint64_t cap = 100000000ULL,
                                          SampleReport* report = nullptr) {
    const std::uint32_t n = o.size();
    const std::uint64_t total = binomial3(n);
    if (total > cap) {
        throw TooLarge("C(n,3) = " + std::to_string(total) + " exceeds the cap of " +
                       std::to_string(cap));
    }
    StatementCollection out;
    out.n = n;
    out.items.reserve(total);
    bool tie = false;
    std::size_t ties = 0;
    for (ObjectId i = 0; i + 2 < n; ++i) {
        for (ObjectId j = i + 1; j + 1 < n; ++j) {
            for (ObjectId k = j + 1; k < n; ++k) {
                out.items.push_back(truthful_statement(o, kind, i, j, k, &tie));
                ties += tie;
            }
        }
    }
    if (report) report->tie_count = ties;
    return out;
}

/// Draws `count` triples uniformly (without replacement: pairwise
/// distinct), evaluates the truthful statement for each and passes it
/// through the noise model. Deterministic given nm.seed.
inline StatementCollection sample_statements(const DistanceOracle& o, std::uint64_t count,
                                             SamplingMode mode, const NoiseModel& nm,
                                             StatementKind kind, SampleReport* report = nullptr) {
    const std::uint32_t n = o.size();
    const std::uint64_t total = binomial3(n);
    if (count > 0 && (total == 0 || (mode == SamplingMode::WithoutReplacement && count > total))) {
        throw CountExceedsTriples("requested " + std::to_string(count) +
                                  " triples but only " + std::to_string(total) +
                                  " distinct ones exist");
    }
    SplitMix64 rng(nm.seed);
    std::vector<std::uint64_t> ranks;
    ranks.reserve(count);
    if (mode == SamplingMode::WithReplacement) {
        for (std::uint64_t i = 0; i < count; ++i) ranks.push_back(rng.next_below(total));
    } else if (total <= detail::kShuffleLimit) {
        std::vector<std::uint64_t> pool(total);
        for (std::uint64_t i = 0; i < total; ++i) pool[i] = i;
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t j = i + rng.next_below(total - i);
            std::swap(pool[i], pool[j]);
            ranks.push_back(pool[i]);
        }
    } else {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(static_cast<std::size_t>(count) * 2);
        while (ranks.size() < count) {
            const std::uint64_t r = rng.next_below(total);
            if (seen.insert(r).second) ranks.push_back(r);
        }
    }

    StatementCollection out;
    out.n = n;
    out.items.reserve(count);
    bool tie = false;
    std::size_t ties = 0;
    for (const std::uint64_t r : ranks) {
        ObjectId a, b, c;
        detail::unrank_triple(r, n, a, b, c);
        Statement s = truthful_statement(o, kind, a, b, c, &tie);
        ties += tie;
        out.items.push_back(apply_noise(s, nm, rng));
    }
    if (report) report->tie_count = ties;
    return out;
}

}  // namespace trilens
