#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "trilens/datasets.hpp"
#include "trilens/oracle.hpp"
#include "trilens/sampling.hpp"

using namespace trilens;

namespace {

DenseOracle triangle_oracle(double ab, double ac, double bc) {
    // ids: A=0, B=1, C=2
    return DenseOracle(3, {0, ab, ac, ab, 0, bc, ac, bc, 0});
}

PointCloudOracle gaussian_cloud(std::uint32_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> coords;
    for (std::uint32_t i = 0; i < 2 * n; ++i) coords.push_back(rng.next_gaussian());
    return PointCloudOracle(std::move(coords), 2);
}

}  // namespace

TEST_CASE("true_center picks the member opposite the longest side", "[oracle]") {
    PointCloudOracle line({0, 1, 3}, 1);
    bool tie = true;
    CHECK(true_center(line, 0, 1, 2, &tie) == 1);
    CHECK_FALSE(tie);

    const DenseOracle equilateral = triangle_oracle(1, 1, 1);
    CHECK(true_center(equilateral, 0, 1, 2, &tie) == 0);
    CHECK(tie);

    // d(A,B)=1, d(A,C)=2, d(B,C)=3, hence A is the most central.
    const DenseOracle fig = triangle_oracle(1, 2, 3);
    CHECK(true_center(fig, 0, 1, 2, &tie) == 0);
    CHECK_FALSE(tie);

    CHECK_THROWS_AS(true_center(fig, 0, 0, 2), DuplicateMember);
}

TEST_CASE("true_odd_one_out picks the member opposite the shortest side", "[oracle]") {
    PointCloudOracle line({0, 1, 3}, 1);
    bool tie = true;
    CHECK(true_odd_one_out(line, 0, 1, 2, &tie) == 2);
    CHECK_FALSE(tie);

    const DenseOracle equilateral = triangle_oracle(1, 1, 1);
    CHECK(true_odd_one_out(equilateral, 0, 1, 2, &tie) == 0);
    CHECK(tie);

    const DenseOracle fig = triangle_oracle(1, 2, 3);  // shortest side AB, outlier C
    CHECK(true_odd_one_out(fig, 0, 1, 2, &tie) == 2);
    CHECK_FALSE(tie);
}

TEST_CASE("apply_noise follows the Bernoulli law", "[oracle][noise]") {
    const Statement truth{StatementKind::MostCentral, 5, 2, 9};

    SplitMix64 clean(123);
    for (int i = 0; i < 200; ++i) CHECK(apply_noise(truth, 0.0, clean) == truth);

    SplitMix64 always(321);
    for (int i = 0; i < 200; ++i) {
        const Statement s = apply_noise(truth, 1.0, always);
        CHECK(s.designated != truth.designated);
        CHECK((s.designated == 2 || s.designated == 9));
    }

    SplitMix64 rng(2026);
    const std::size_t trials = 1000000;
    std::size_t kept = 0, low = 0, high = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const Statement s = apply_noise(truth, 0.3, rng);
        if (s.designated == 5) {
            ++kept;
        } else if (s.designated == 2) {
            ++low;
        } else {
            ++high;
        }
    }
    const double kept_frac = static_cast<double>(kept) / trials;
    const double low_frac = static_cast<double>(low) / trials;
    const double high_frac = static_cast<double>(high) / trials;
    CHECK(std::abs(kept_frac - 0.7) < 0.002);
    CHECK(std::abs(low_frac - 0.15) < 0.002);
    CHECK(std::abs(high_frac - 0.15) < 0.002);

    // Chi-square against (0.7, 0.15, 0.15); 2 dof, p > 0.001 means < 13.816.
    const double expected[3] = {0.7 * trials, 0.15 * trials, 0.15 * trials};
    const double observed[3] = {static_cast<double>(kept), static_cast<double>(low),
                                static_cast<double>(high)};
    double chi2 = 0.0;
    for (int b = 0; b < 3; ++b) {
        const double diff = observed[b] - expected[b];
        chi2 += diff * diff / expected[b];
    }
    CHECK(chi2 < 13.816);
}

TEST_CASE("all_statements enumerates every triple once", "[oracle]") {
    PointCloudOracle three({0, 1, 3}, 1);
    CHECK(all_statements(three, StatementKind::MostCentral).size() == 1);

    CHECK(binomial3(60) == 34220);
    CHECK(binomial3(100) == 161700);

    const PointCloudOracle cloud = gaussian_cloud(60, 9);
    const StatementCollection all = all_statements(cloud, StatementKind::MostCentral);
    CHECK(all.size() == 34220);
    std::set<std::tuple<ObjectId, ObjectId, ObjectId>> triples;
    for (const Statement& s : all.items) triples.insert(statement_triple(s));
    CHECK(triples.size() == all.size());

    CHECK_THROWS_AS(all_statements(cloud, StatementKind::MostCentral, 1000), TooLarge);
}

TEST_CASE("sampled truthful statements re-evaluate to the true center", "[oracle]") {
    const PointCloudOracle cloud = gaussian_cloud(20, 11);
    const NoiseModel clean{0.0, 77};
    const StatementCollection sample =
        sample_statements(cloud, 300, SamplingMode::WithoutReplacement, clean,
                          StatementKind::MostCentral);
    REQUIRE(sample.size() == 300);
    std::set<std::tuple<ObjectId, ObjectId, ObjectId>> triples;
    for (const Statement& s : sample.items) {
        const auto [a, b, c] = statement_triple(s);
        CHECK(true_center(cloud, a, b, c) == s.designated);
        triples.insert({a, b, c});
    }
    CHECK(triples.size() == sample.size());  // without replacement: pairwise distinct
}

TEST_CASE("exhaustive sampling without noise equals enumeration", "[oracle]") {
    const PointCloudOracle cloud = gaussian_cloud(12, 5);
    const std::uint64_t total = binomial3(12);
    const StatementCollection sample = sample_statements(
        cloud, total, SamplingMode::WithoutReplacement, NoiseModel{0.0, 3}, StatementKind::MostCentral);
    StatementCollection all = all_statements(cloud, StatementKind::MostCentral);
    auto sorted = sample.items;
    const auto by_triple = [](const Statement& x, const Statement& y) {
        return statement_triple(x) < statement_triple(y);
    };
    std::sort(sorted.begin(), sorted.end(), by_triple);
    CHECK(sorted == all.items);

    CHECK_THROWS_AS(sample_statements(cloud, total + 1, SamplingMode::WithoutReplacement,
                                      NoiseModel{0.0, 3}, StatementKind::MostCentral),
                    CountExceedsTriples);
    CHECK(sample_statements(cloud, 0, SamplingMode::WithoutReplacement, NoiseModel{0.0, 3},
                            StatementKind::MostCentral)
              .empty());
}

TEST_CASE("sampling is deterministic given the seed", "[oracle]") {
    const PointCloudOracle cloud = gaussian_cloud(6, 1);
    const NoiseModel nm{0.2, 42};
    const auto a = sample_statements(cloud, 10, SamplingMode::WithoutReplacement, nm,
                                     StatementKind::MostCentral);
    const auto b = sample_statements(cloud, 10, SamplingMode::WithoutReplacement, nm,
                                     StatementKind::MostCentral);
    CHECK(a.items == b.items);

    const auto c = sample_statements(cloud, 500, SamplingMode::WithReplacement, nm,
                                     StatementKind::MostCentral);
    const auto d = sample_statements(cloud, 500, SamplingMode::WithReplacement, nm,
                                     StatementKind::MostCentral);
    CHECK(c.items == d.items);
}

TEST_CASE("sparse rejection sampling handles large triple spaces", "[oracle]") {
    // C(300,3) = 4455100 exceeds the shuffle limit, so distinct ranks come
    // from the rejection sampler.
    const PointCloudOracle cloud = gaussian_cloud(300, 77);
    REQUIRE(binomial3(300) > 4194304);
    const NoiseModel nm{0.0, 13};
    const StatementCollection a = sample_statements(cloud, 2000, SamplingMode::WithoutReplacement,
                                                    nm, StatementKind::MostCentral);
    REQUIRE(a.size() == 2000);
    std::set<std::tuple<ObjectId, ObjectId, ObjectId>> triples;
    for (const Statement& s : a.items) {
        const auto t = statement_triple(s);
        CHECK(std::get<2>(t) < 300);
        CHECK(true_center(cloud, std::get<0>(t), std::get<1>(t), std::get<2>(t)) == s.designated);
        triples.insert(t);
    }
    CHECK(triples.size() == 2000);
    const StatementCollection b = sample_statements(cloud, 2000, SamplingMode::WithoutReplacement,
                                                    nm, StatementKind::MostCentral);
    CHECK(a.items == b.items);
}

TEST_CASE("triple unranking is a bijection", "[oracle]") {
    const std::uint32_t n = 10;
    std::set<std::tuple<ObjectId, ObjectId, ObjectId>> seen;
    for (std::uint64_t r = 0; r < binomial3(n); ++r) {
        ObjectId a, b, c;
        detail::unrank_triple(r, n, a, b, c);
        CHECK(a < b);
        CHECK(b < c);
        CHECK(c < n);
        seen.insert({a, b, c});
    }
    CHECK(seen.size() == binomial3(n));
}

TEST_CASE("shortest_path_oracle computes hop distances", "[oracle]") {
    const auto path = shortest_path_oracle({{0, 1}, {1, 2}}, 3);
    CHECK(path->distance(0, 2) == 2.0);
    CHECK(path->distance(0, 1) == 1.0);
    check_semimetric(*path);

    const auto triangle = shortest_path_oracle({{0, 1}, {1, 2}, {0, 2}}, 3);
    for (ObjectId i = 0; i < 3; ++i) {
        for (ObjectId j = i + 1; j < 3; ++j) CHECK(triangle->distance(i, j) == 1.0);
    }

    CHECK_THROWS_AS(shortest_path_oracle({{0, 1}, {2, 3}}, 4), DisconnectedGraph);
}

TEST_CASE("weighted shortest paths use Dijkstra", "[oracle]") {
    const ShortestPathOracle o(3, {{0, 1}, {1, 2}, {0, 2}}, {1.0, 1.0, 5.0});
    CHECK(o.distance(0, 2) == 2.0);  // through vertex 1
}

TEST_CASE("shortest-path cache is safe under concurrent readers", "[oracle]") {
    // Ring of 64 vertices: d(i,j) = min(|i-j|, 64-|i-j|).
    const std::uint32_t n = 64;
    std::vector<std::pair<ObjectId, ObjectId>> edges;
    for (ObjectId v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
    const ShortestPathOracle o(n, edges);
    std::vector<std::thread> readers;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t) {
        readers.emplace_back([&, t] {
            SplitMix64 rng(static_cast<std::uint64_t>(t));
            for (int q = 0; q < 4000; ++q) {
                const ObjectId i = static_cast<ObjectId>(rng.next_below(n));
                const ObjectId j = static_cast<ObjectId>(rng.next_below(n));
                const std::uint32_t diff = i > j ? i - j : j - i;
                const double expected = std::min(diff, n - diff);
                if (o.distance(i, j) != expected) mismatches.fetch_add(1);
            }
        });
    }
    for (std::thread& t : readers) t.join();
    CHECK(mismatches.load() == 0);
}

TEST_CASE("gaussian mixture generation is reproducible and validated", "[oracle][datasets]") {
    const GaussianComponent single{1.0, {0.0, 0.0}, {1, 0, 0, 1}};
    const GeneratedDataset small = gen_gaussian_mixture({single}, 4, 9);
    CHECK(small.oracle->size() == 4);
    CHECK(small.labels == std::vector<std::int32_t>{0, 0, 0, 0});
    check_semimetric(*small.oracle);

    const GaussianComponent c0{0.6, {-3.0, 0.0}, {1, 0, 0, 1}};
    const GaussianComponent c1{0.4, {3.0, 0.0}, {1, 1, 1, 2}};
    const GeneratedDataset big = gen_gaussian_mixture({c0, c1}, 100000, 4);
    std::size_t zeros = 0;
    for (const std::int32_t l : big.labels) zeros += l == 0;
    CHECK(std::abs(static_cast<double>(zeros) / 100000.0 - 0.6) < 0.005);

    const GaussianComponent bad{1.0, {0.0, 0.0}, {1, 2, 2, 1}};  // eigenvalue -1
    CHECK_THROWS_AS(gen_gaussian_mixture({bad}, 10, 1), BadCovariance);
    const GaussianComponent asym{1.0, {0.0, 0.0}, {1, 0.5, 0.2, 1}};
    CHECK_THROWS_AS(gen_gaussian_mixture({asym}, 10, 1), BadCovariance);
}

TEST_CASE("two moons alternate and stay inside their annuli", "[oracle][datasets]") {
    const GeneratedDataset pair = gen_two_moons(2, 1.0, 0.2, 0.5, 3);
    CHECK(pair.labels == std::vector<std::int32_t>{0, 1});

    const GeneratedDataset moons = gen_two_moons(200, 1.0, 0.2, 0.5, 3);
    for (std::size_t i = 0; i < 200; ++i) {
        const double* p = moons.oracle->point(static_cast<ObjectId>(i));
        double cx = 0.0, cy = 0.0;
        if (moons.labels[i] == 1) {
            cx = 1.0;
            cy = -0.5;
        }
        const double r = std::hypot(p[0] - cx, p[1] - cy);
        CHECK(r >= 0.8 - 1e-12);
        CHECK(r <= 1.2 + 1e-12);
        if (moons.labels[i] == 0) {
            CHECK(p[1] >= cy - 1e-12);
        } else {
            CHECK(p[1] <= cy + 1e-12);
        }
    }

    const GeneratedDataset again = gen_two_moons(200, 1.0, 0.2, 0.5, 3);
    CHECK(again.oracle->coords() == moons.oracle->coords());
}
