#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "trilens/cluster.hpp"
#include "trilens/metrics.hpp"
#include "trilens/proxgraph.hpp"
#include "trilens/rng.hpp"

using namespace trilens;

namespace {

/// Test-only eigenvalue oracle: cyclic Jacobi rotations until the
/// off-diagonal mass vanishes. Slow but independent of the QL path.
std::vector<double> jacobi_eigenvalues(SquareMatrix a) {
    const std::uint32_t n = a.n;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::uint32_t p = 0; p < n; ++p) {
            for (std::uint32_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        }
        if (off < 1e-24) break;
        for (std::uint32_t p = 0; p < n; ++p) {
            for (std::uint32_t q = p + 1; q < n; ++q) {
                if (a.at(p, q) == 0.0) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * a.at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::uint32_t k = 0; k < n; ++k) {
                    const double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (std::uint32_t k = 0; k < n; ++k) {
                    const double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> d(n);
    for (std::uint32_t i = 0; i < n; ++i) d[i] = a.at(i, i);
    std::sort(d.begin(), d.end());
    return d;
}

SquareMatrix random_symmetric(std::uint32_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    SquareMatrix s(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i; j < n; ++j) {
            const double v = rng.next_gaussian();
            s.at(i, j) = v;
            s.at(j, i) = v;
        }
    }
    return s;
}

}  // namespace

TEST_CASE("smallest_eigenpairs on simple spectra", "[cluster][eigen]") {
    SquareMatrix eye(4);
    for (std::uint32_t i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
    const EigenPairs pe = smallest_eigenpairs(eye, 3);
    for (const double v : pe.values) CHECK(v == Catch::Approx(1.0));

    SquareMatrix diag(3);
    diag.at(0, 0) = 1.0;
    diag.at(1, 1) = 2.0;
    diag.at(2, 2) = 3.0;
    const EigenPairs pd = smallest_eigenpairs(diag, 2);
    CHECK(pd.values[0] == Catch::Approx(1.0));
    CHECK(pd.values[1] == Catch::Approx(2.0));
    CHECK(std::abs(pd.vectors[0][0]) == Catch::Approx(1.0));
    CHECK(std::abs(pd.vectors[1][1]) == Catch::Approx(1.0));

    SquareMatrix bad(2);
    bad.at(0, 1) = 0.5;
    bad.at(1, 0) = 0.25;
    CHECK_THROWS_AS(smallest_eigenpairs(bad, 1), std::invalid_argument);
    CHECK_THROWS_AS(smallest_eigenpairs(diag, 4), std::invalid_argument);
}

TEST_CASE("eigensolver matches the Jacobi oracle on random matrices", "[cluster][eigen]") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const SquareMatrix s = random_symmetric(20, 1000 + seed);
        const EigenPairs pairs = smallest_eigenpairs(s, 20, 1e-8);
        const std::vector<double> oracle = jacobi_eigenvalues(s);
        const double norm = matrix_inf_norm(s);
        REQUIRE(pairs.values.size() == 20);
        for (std::uint32_t k = 0; k < 20; ++k) {
            CHECK(pairs.values[k] == Catch::Approx(oracle[k]).margin(1e-9 * norm));
            if (k > 0) CHECK(pairs.values[k] >= pairs.values[k - 1]);
        }
        // Orthonormality to 1e-8 and the residual bound.
        for (std::uint32_t a = 0; a < 20; ++a) {
            for (std::uint32_t b = a; b < 20; ++b) {
                double dot = 0.0;
                for (std::uint32_t r = 0; r < 20; ++r) dot += pairs.vectors[a][r] * pairs.vectors[b][r];
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
            }
            double residual = 0.0;
            for (std::uint32_t i = 0; i < 20; ++i) {
                double si = 0.0;
                for (std::uint32_t j = 0; j < 20; ++j) si += s.at(i, j) * pairs.vectors[a][j];
                const double rr = si - pairs.values[a] * pairs.vectors[a][i];
                residual += rr * rr;
            }
            CHECK(std::sqrt(residual) <= 1e-8 * norm);
        }
    }
}

TEST_CASE("kmeans handles degenerate and exact cases", "[cluster][kmeans]") {
    // l = n: every row its own cluster, inertia zero.
    std::vector<double> rows{0, 0, 1, 0, 2, 0, 3, 0};
    const KMeansResult own = kmeans(rows, 4, 2, 4, 5);
    CHECK(own.inertia == 0.0);
    std::set<std::uint32_t> distinct(own.assignment.begin(), own.assignment.end());
    CHECK(distinct.size() == 4);

    // Two duplicated point masses split exactly.
    std::vector<double> masses{0, 0, 0, 0, 0, 0, 9, 9, 9, 9, 9, 9};
    const KMeansResult split = kmeans(masses, 6, 2, 2, 11);
    CHECK(split.inertia == 0.0);
    CHECK(split.assignment[0] == split.assignment[1]);
    CHECK(split.assignment[1] == split.assignment[2]);
    CHECK(split.assignment[3] == split.assignment[4]);
    CHECK(split.assignment[4] == split.assignment[5]);
    CHECK(split.assignment[0] != split.assignment[3]);

    const KMeansResult again = kmeans(masses, 6, 2, 2, 11);
    CHECK(again.assignment == split.assignment);

    CHECK_THROWS_AS(kmeans(rows, 4, 2, 5, 1), Error);
}

TEST_CASE("affinity construction follows the threshold rule", "[cluster]") {
    StatementCollection c;
    c.n = 5;
    // V(1,2) = 1 (third central), V(0,1) = V(0,2) = 0.
    c.items = {canonicalize({StatementKind::MostCentral, 0, 1, 2})};
    const PairStats ps = accumulate_pair_stats(c);
    const AffinityMatrix unw = build_affinity(ps, 2, WeightMode::unweighted());
    // threshold = 2/3: pairs with V=0 pass at weight 1, V=1 fails.
    CHECK(unw.at(0, 1) == 1.0);
    CHECK(unw.at(0, 2) == 1.0);
    CHECK(unw.at(1, 2) == 0.0);
    CHECK(unw.at(0, 0) == 0.0);

    const AffinityMatrix w = build_affinity(ps, 2, WeightMode::gaussian(0.5));
    CHECK(w.at(0, 1) == 1.0);  // V = 0 passes with weight exp(0) = 1
    CHECK(w.at(1, 2) == 0.0);

    // Identical zero pattern between the modes.
    for (ObjectId i = 0; i < 5; ++i) {
        for (ObjectId j = 0; j < 5; ++j) {
            CHECK((unw.at(i, j) == 0.0) == (w.at(i, j) == 0.0));
            CHECK(unw.at(i, j) == unw.at(j, i));
        }
    }

    StatementCollection none;
    none.n = 4;
    const AffinityMatrix zero = build_affinity(accumulate_pair_stats(none), 3,
                                               WeightMode::unweighted());
    for (double v : zero.values) CHECK(v == 0.0);

    CHECK_THROWS_AS(build_affinity(ps, 2, WeightMode::gaussian(0.0)), BadSigma);
}

TEST_CASE("two disjoint complete blocks are recovered exactly", "[cluster]") {
    const std::uint32_t n = 12;
    AffinityMatrix w(n);
    for (ObjectId i = 0; i < n; ++i) {
        for (ObjectId j = 0; j < n; ++j) {
            if (i != j && (i < 5) == (j < 5)) w.at(i, j) = 1.0;
        }
    }
    const ClusteringResult r = spectral_clustering(w, 2, 7);
    for (ObjectId i = 1; i < 5; ++i) CHECK(r.assignment[i] == r.assignment[0]);
    for (ObjectId i = 6; i < n; ++i) CHECK(r.assignment[i] == r.assignment[5]);
    CHECK(r.assignment[0] != r.assignment[5]);

    const ClusteringResult one = spectral_clustering(w, 1, 7);
    for (const std::uint32_t a : one.assignment) CHECK(a == 0);
}

TEST_CASE("three blocks never merge when asking for three clusters", "[cluster]") {
    const std::uint32_t n = 15;
    AffinityMatrix w(n);
    const auto block = [](ObjectId v) { return v / 5; };
    for (ObjectId i = 0; i < n; ++i) {
        for (ObjectId j = 0; j < n; ++j) {
            if (i != j && block(i) == block(j)) w.at(i, j) = 1.0;
        }
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ClusteringResult r = spectral_clustering(w, 3, seed);
        std::set<std::uint32_t> per_block[3];
        for (ObjectId v = 0; v < n; ++v) per_block[block(v)].insert(r.assignment[v]);
        std::set<std::uint32_t> all;
        for (int b = 0; b < 3; ++b) {
            CHECK(per_block[b].size() == 1);
            all.insert(*per_block[b].begin());
        }
        CHECK(all.size() == 3);
    }
}

TEST_CASE("isolated vertices are rejected or attached", "[cluster]") {
    AffinityMatrix w(5);
    w.at(0, 1) = w.at(1, 0) = 1.0;
    w.at(2, 3) = w.at(3, 2) = 1.0;
    try {
        spectral_clustering(w, 2, 1);
        FAIL("expected IsolatedVertices");
    } catch (const IsolatedVertices& e) {
        CHECK(std::string(e.what()).find("4") != std::string::npos);
    }

    SpectralOptions opts;
    opts.allow_isolated = true;
    const ClusteringResult r = spectral_clustering(w, 2, 1, opts);
    CHECK(r.assignment[4] == 0);  // no V information: cluster 0
    CHECK(r.assignment[0] == r.assignment[1]);
    CHECK(r.assignment[2] == r.assignment[3]);
    CHECK(r.assignment[0] != r.assignment[2]);

    // With pair statistics, the isolated vertex follows its argmin-V peer.
    StatementCollection c;
    c.n = 5;
    c.items = {canonicalize({StatementKind::MostCentral, 2, 3, 4})};  // V(3,4) finite
    const PairStats ps = accumulate_pair_stats(c);
    SpectralOptions attach;
    attach.allow_isolated = true;
    attach.attach_by_v = &ps;
    const ClusteringResult ra = spectral_clustering(w, 2, 1, attach);
    CHECK(ra.assignment[4] == ra.assignment[3]);
}

TEST_CASE("purity bounds hold for spectral results", "[cluster]") {
    SplitMix64 rng(15);
    const std::uint32_t n = 20;
    AffinityMatrix w(n);
    for (ObjectId i = 0; i < n; ++i) {
        for (ObjectId j = i + 1; j < n; ++j) {
            const double v = rng.next_double() < 0.4 ? rng.next_double() : 0.0;
            w.at(i, j) = v;
            w.at(j, i) = v;
        }
    }
    std::vector<std::int32_t> truth(n);
    for (ObjectId i = 0; i < n; ++i) truth[i] = static_cast<std::int32_t>(i % 3);
    SpectralOptions opts;
    opts.allow_isolated = true;
    for (const std::uint32_t l : {1u, 2u, 4u}) {
        const ClusteringResult r = spectral_clustering(w, l, 3, opts);
        const double p = purity(r, truth);
        CHECK(p >= static_cast<double>(l) / n);
        CHECK(p <= 1.0);
    }
}
