#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "trilens/io.hpp"
#include "trilens/metrics.hpp"

using namespace trilens;

TEST_CASE("relative_error against the true medoid objective", "[metrics]") {
    const PointCloudOracle line({0, 1, 3, 7}, 1);
    CHECK(relative_error(line, 1) == 0.0);
    CHECK(relative_error(line, 3) == Catch::Approx(8.0 / 9.0));
    CHECK(relative_error(line, 2) == 0.0);  // same objective as the medoid

    const PointCloudOracle single({5.0}, 1);
    CHECK_THROWS_AS(relative_error(single, 0), DegenerateObjective);
}

TEST_CASE("hamming_error counts both matrix cells per disagreeing pair", "[metrics]") {
    EstimatedGraph a(4, false), b(4, false);
    a.add_edge(0, 1);
    a.add_edge(2, 3);
    a.sort_edges();
    b.add_edge(0, 1);
    b.add_edge(2, 3);
    b.sort_edges();
    CHECK(hamming_error(a, b) == 0.0);

    const EstimatedGraph empty(4, false);
    CHECK(hamming_error(a, empty) == Catch::Approx(2.0 * 2.0 / 4.0));

    EstimatedGraph complete(4, false);
    for (ObjectId i = 0; i < 4; ++i) {
        for (ObjectId j = i + 1; j < 4; ++j) complete.add_edge(i, j);
    }
    complete.sort_edges();
    CHECK(hamming_error(complete, empty) == Catch::Approx(3.0));  // 2*6/4

    const EstimatedGraph other(5, false);
    CHECK_THROWS_AS(hamming_error(a, other), SizeMismatch);
}

TEST_CASE("zero_one_loss fraction and key checks", "[metrics]") {
    const std::map<ObjectId, std::int64_t> truth{{0, 1}, {1, 0}, {2, 1}, {3, 0}};
    CHECK(zero_one_loss(truth, truth) == 0.0);
    std::map<ObjectId, std::int64_t> wrong = truth;
    for (auto& [id, l] : wrong) l = 1 - l;
    CHECK(zero_one_loss(wrong, truth) == 1.0);
    std::map<ObjectId, std::int64_t> quarter = truth;
    quarter[2] = 0;
    CHECK(zero_one_loss(quarter, truth) == 0.25);

    const std::map<ObjectId, std::int64_t> shifted{{0, 1}, {1, 0}, {2, 1}, {4, 0}};
    CHECK_THROWS_AS(zero_one_loss(shifted, truth), KeyMismatch);
    const std::map<ObjectId, std::int64_t> fewer{{0, 1}};
    CHECK_THROWS_AS(zero_one_loss(fewer, truth), KeyMismatch);
}

TEST_CASE("purity of clusterings", "[metrics]") {
    ClusteringResult exact;
    exact.l = 2;
    exact.assignment = {0, 0, 0, 1, 1, 1};
    const std::vector<std::int32_t> truth{1, 1, 1, 0, 0, 0};
    CHECK(purity(exact, truth) == 1.0);

    ClusteringResult merged;
    merged.l = 1;
    merged.assignment.assign(10, 0);
    std::vector<std::int32_t> classes(10, 0);
    for (int i = 6; i < 10; ++i) classes[i] = 1;
    CHECK(purity(merged, classes) == Catch::Approx(0.6));

    ClusteringResult singletons;
    singletons.l = 10;
    singletons.assignment.resize(10);
    for (std::uint32_t i = 0; i < 10; ++i) singletons.assignment[i] = i;
    CHECK(purity(singletons, classes) == 1.0);

    // Invariant under cluster relabeling.
    ClusteringResult relabeled = exact;
    for (std::uint32_t& a : relabeled.assignment) a = 1 - a;
    CHECK(purity(relabeled, truth) == purity(exact, truth));

    ClusteringResult bad = exact;
    bad.assignment.pop_back();
    CHECK_THROWS_AS(purity(bad, truth), KeyMismatch);
}

TEST_CASE("format_double round-trips", "[io]") {
    SplitMix64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        double v = rng.next_gaussian() * std::pow(10.0, static_cast<double>(rng.next_below(13)) - 6.0);
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("io round trips for points, labels and graphs", "[io]") {
    SplitMix64 rng(4);
    std::vector<double> coords;
    for (int i = 0; i < 30; ++i) coords.push_back(rng.next_gaussian());
    const PointCloudOracle cloud(std::move(coords), 3);
    std::ostringstream po;
    write_points(cloud, po);
    std::istringstream pi(po.str());
    const auto cloud2 = read_points(pi);
    CHECK(cloud2->dim() == 3);
    CHECK(cloud2->coords() == cloud.coords());

    const std::map<ObjectId, std::int64_t> labels{{0, 2}, {3, 1}, {7, 0}};
    std::ostringstream lo;
    write_label_map(labels, lo);
    std::istringstream li(lo.str());
    CHECK(read_label_map(li) == labels);
    const std::vector<std::int32_t> vec = label_vector(labels, 8);
    CHECK(vec[0] == 2);
    CHECK(vec[1] == -1);
    CHECK(vec[7] == 0);

    EstimatedGraph g(6, false);
    g.add_edge(0, 3);
    g.add_edge(1, 2);
    g.sort_edges();
    std::ostringstream go;
    write_graph(g, go);
    std::istringstream gi(go.str());
    const EstimatedGraph g2 = read_graph(gi, 6);
    CHECK(g2.edges().size() == 2);
    CHECK(g2.has_edge(0, 3));
    CHECK(g2.has_edge(1, 2));

    std::istringstream bad("1,2\n9,0\n");
    CHECK_THROWS_AS(read_graph(bad, 6), IdOutOfRange);
}

TEST_CASE("dense matrix reader validates shape and semimetric", "[io]") {
    std::istringstream ok("0,1,2\n1,0,3\n2,3,0\n");
    const auto dense = read_dense_matrix(ok);
    CHECK(dense->size() == 3);
    CHECK(dense->distance(0, 2) == 2.0);

    std::istringstream ragged("0,1\n1,0,2\n");
    CHECK_THROWS_AS(read_dense_matrix(ragged), ParseError);
    std::istringstream asym("0,1,2\n1,0,3\n2,4,0\n");
    CHECK_THROWS_AS(read_dense_matrix(asym), Error);
}
