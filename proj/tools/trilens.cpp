// Command-line surface: statement generation, medoid/outlier/graph/
// classification/clustering runs, metric evaluation and the experiment
// sweep harness. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <atomic>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "trilens/trilens.hpp"

namespace {

using namespace trilens;

// ---------------------------------------------------------------------
// Small IO helpers

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open input file: " + path);
    return in;
}

/// Writes through a callback either to stdout ("-" or empty) or to a file.
template <typename F>
void with_output(const std::string& path, F&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
    } else {
        std::ofstream out(path);
        if (!out) throw Error("cannot open output file: " + path);
        write(out);
    }
}

/// Optional sidecar map translating external string ids to dense indices.
/// Lines: `name,index`.
std::map<std::string, std::string> read_name_map(const std::string& path) {
    std::ifstream in = open_input(path);
    std::map<std::string, std::string> map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::size_t comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw ParseError("name map line " + std::to_string(line_no) + ": expected `name,index`");
        }
        map[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return map;
}

StatementCollection load_statements(const std::string& path, std::uint32_t n,
                                    const std::string& name_map_path) {
    std::ifstream in = open_input(path);
    if (name_map_path.empty()) return parse_statements(in, n);
    const auto names = read_name_map(name_map_path);
    std::ostringstream translated;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') {
            translated << line << '\n';
            continue;
        }
        std::vector<std::string> fields(1);
        for (char ch : line) {
            if (ch == ',') {
                fields.emplace_back();
            } else {
                fields.back().push_back(ch);
            }
        }
        for (std::size_t f = 1; f < fields.size(); ++f) {
            const auto it = names.find(fields[f]);
            if (it != names.end()) fields[f] = it->second;
        }
        for (std::size_t f = 0; f < fields.size(); ++f) {
            if (f) translated << ',';
            translated << fields[f];
        }
        translated << '\n';
    }
    std::istringstream is(translated.str());
    return parse_statements(is, n);
}

std::vector<std::uint32_t> parse_uint_list(const std::string& csv, const char* what) {
    std::vector<std::uint32_t> out;
    std::istringstream is(csv);
    std::string token;
    while (std::getline(is, token, ',')) {
        try {
            out.push_back(static_cast<std::uint32_t>(std::stoul(token)));
        } catch (const std::exception&) {
            throw Error(std::string("bad ") + what + " entry: " + token);
        }
    }
    if (out.empty()) throw Error(std::string(what) + " list is empty");
    return out;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::istringstream is(csv);
    std::string token;
    while (std::getline(is, token, ',')) {
        try {
            out.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw Error(std::string("bad ") + what + " entry: " + token);
        }
    }
    if (out.empty()) throw Error(std::string(what) + " list is empty");
    return out;
}

// ---------------------------------------------------------------------
// Dataset construction shared by `generate` and `sweep`

struct DatasetOptions {
    std::string kind = "gaussian";  // gaussian|mixture|twoclass|moons|line|gaussian-outliers
    std::uint32_t n = 100;
    std::uint32_t dim = 2;
    std::uint32_t outliers = 3;
    double ring_radius = 10.0;
    double moon_radius = 1.0;
    double moon_width = 0.2;
    double moon_offset = 0.5;
    std::string weights;  // mixture overrides: "0.6,0.4"
    std::string means;    // "x,y;x,y"
    std::string covs;     // "a,b,c,d;a,b,c,d" row-major per component
};

std::vector<GaussianComponent> mixture_components(const DatasetOptions& o) {
    if (o.weights.empty()) {
        // The two-component benchmark mixture.
        return {GaussianComponent{0.6, {-3.0, 0.0}, {1, 0, 0, 1}},
                GaussianComponent{0.4, {3.0, 0.0}, {1, 1, 1, 2}}};
    }
    const std::vector<double> weights = parse_double_list(o.weights, "weights");
    std::vector<GaussianComponent> components;
    std::istringstream ms(o.means), cs(o.covs);
    std::string mean_token, cov_token;
    for (const double w : weights) {
        if (!std::getline(ms, mean_token, ';') || !std::getline(cs, cov_token, ';')) {
            throw Error("means/covs must provide one `;`-separated group per weight");
        }
        GaussianComponent c;
        c.weight = w;
        c.mean = parse_double_list(mean_token, "means");
        c.covariance = parse_double_list(cov_token, "covs");
        components.push_back(std::move(c));
    }
    return components;
}

GeneratedDataset make_dataset(const DatasetOptions& o, std::uint64_t seed) {
    if (o.kind == "gaussian") {
        std::vector<double> cov(static_cast<std::size_t>(o.dim) * o.dim, 0.0);
        for (std::uint32_t i = 0; i < o.dim; ++i) cov[i * o.dim + i] = 1.0;
        return gen_gaussian_mixture({GaussianComponent{1.0, std::vector<double>(o.dim, 0.0), cov}},
                                    o.n, seed);
    }
    if (o.kind == "mixture") {
        return gen_gaussian_mixture(mixture_components(o), o.n, seed);
    }
    if (o.kind == "twoclass") {
        // Two equally probable spherical classes at -(3,0) and +(3,0).
        return gen_gaussian_mixture({GaussianComponent{0.5, {-3.0, 0.0}, {1, 0, 0, 1}},
                                     GaussianComponent{0.5, {3.0, 0.0}, {1, 0, 0, 1}}},
                                    o.n, seed);
    }
    if (o.kind == "moons") {
        return gen_two_moons(o.n, o.moon_radius, o.moon_width, o.moon_offset, seed);
    }
    if (o.kind == "gaussian-outliers") {
        return gen_gaussian_with_outliers(o.n, o.outliers, o.ring_radius, seed);
    }
    if (o.kind == "line") {
        GeneratedDataset d;
        d.oracle = std::make_shared<PointCloudOracle>(std::vector<double>{0, 1, 3, 7}, 1);
        d.labels = {0, 0, 0, 0};
        return d;
    }
    throw Error("unknown dataset kind: " + o.kind);
}

void add_dataset_options(CLI::App* cmd, DatasetOptions& opts) {
    cmd->add_option("--dataset", opts.kind,
                    "gaussian|mixture|twoclass|moons|line|gaussian-outliers")
        ->capture_default_str();
    cmd->add_option("--n", opts.n, "number of objects")->capture_default_str();
    cmd->add_option("--dim", opts.dim, "dimension for gaussian")->capture_default_str();
    cmd->add_option("--outliers", opts.outliers, "planted outliers")->capture_default_str();
    cmd->add_option("--ring-radius", opts.ring_radius, "outlier ring radius")->capture_default_str();
    cmd->add_option("--radius", opts.moon_radius, "moon radius")->capture_default_str();
    cmd->add_option("--width", opts.moon_width, "moon radial jitter half-width")
        ->capture_default_str();
    cmd->add_option("--offset", opts.moon_offset, "moon vertical offset")->capture_default_str();
    cmd->add_option("--weights", opts.weights, "mixture weights, comma separated");
    cmd->add_option("--means", opts.means, "mixture means, `;` between components");
    cmd->add_option("--covs", opts.covs, "mixture covariances, `;` between components");
}

/// Oracle source for subcommands that accept external data.
struct OracleInput {
    std::string points, matrix, edges;
    std::uint32_t n = 0;

    bool given() const { return !points.empty() || !matrix.empty() || !edges.empty(); }

    std::shared_ptr<DistanceOracle> load() const {
        if (!points.empty()) {
            std::ifstream in = open_input(points);
            return read_points(in);
        }
        if (!matrix.empty()) {
            std::ifstream in = open_input(matrix);
            return read_dense_matrix(in);
        }
        if (!edges.empty()) {
            std::ifstream in = open_input(edges);
            std::uint32_t max_id = 0;
            const auto edge_list = read_edges(in, &max_id);
            const std::uint32_t size = n > 0 ? n : max_id + 1;
            return std::make_shared<ShortestPathOracle>(size, edge_list);
        }
        throw Error("no oracle input given (--points/--matrix/--edges)");
    }
};

void add_oracle_options(CLI::App* cmd, OracleInput& in) {
    cmd->add_option("--points", in.points, "point cloud CSV");
    cmd->add_option("--matrix", in.matrix, "dense distance matrix CSV");
    cmd->add_option("--edges", in.edges, "edge list CSV (shortest-path oracle)");
    cmd->add_option("--oracle-n", in.n, "vertex count for --edges (default max id + 1)");
}

// ---------------------------------------------------------------------
// Subcommand state

struct GenerateArgs {
    DatasetOptions dataset;
    OracleInput input;
    std::uint64_t seed = 0;
    std::string points_out, labels_out, statements_out;
    std::uint64_t count = 0;
    double errorprob = 0.0;
    std::string kind = "C";
    std::string mode = "without";
    bool exhaustive = false;
};

struct StatementsArgs {
    std::string statements;
    std::string name_map;
    std::uint32_t n = 0;
    std::size_t parallel = 1;
    std::uint32_t dense_threshold = 20000;
    bool reduce = false;
};

StatementCollection load_statements(const StatementsArgs& a) {
    StatementCollection c = load_statements(a.statements, a.n, a.name_map);
    if (a.reduce) c = reduce_collection(c);
    return c;
}

struct MedoidArgs {
    StatementsArgs in;
    bool odd_one_out = false;
    std::string table_out;
};

struct OutliersArgs {
    StatementsArgs in;
    bool odd_one_out = false;
    std::uint32_t top = 10;
    bool gap = false;
    std::string out;
};

struct RngArgs {
    StatementsArgs in;
    OracleInput oracle;
    std::uint32_t k = 1;
    double errorprob = 0.0;
    bool correct = false;
    bool weighted = false;
    double sigma = 1.0;
    bool tree = false;
    bool stats = false;
    std::string out;
};

struct ClassifyArgs {
    StatementsArgs in;
    std::string labels;
    std::string method = "feature";
    std::uint32_t classes = 0;
    std::uint32_t k = 0;
    std::string k_grid;
    std::uint32_t folds = 10;
    std::uint32_t repeats = 20;
    std::uint64_t seed = 0;
    std::string out, features_out;
};

struct ClusterArgs {
    StatementsArgs in;
    std::uint32_t k = 5;
    std::uint32_t clusters = 2;
    bool weighted = false;
    double sigma = 1.0;
    double errorprob = 0.0;
    bool correct = false;
    bool allow_isolated = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string affinity_out;
};

struct EvalArgs {
    std::string metric;
    OracleInput oracle;
    std::uint32_t estimate = 0;
    std::string graph_a, graph_b;
    std::uint32_t n = 0;
    std::string pred, truth, clusters;
};

struct SweepArgs {
    std::string task = "medoid";
    DatasetOptions dataset;
    std::string counts = "1000";
    std::string errorprobs = "0";
    std::uint32_t reps = 100;
    std::uint64_t seed = 0;
    std::size_t parallel = 1;
    std::uint32_t k = 7;
    bool correct = false;
    std::uint32_t clusters = 2;
    bool weighted = false;
    double sigma = 1.0;
    std::uint32_t labeled = 0;
    std::string method = "feature";
    std::string out;
};

// ---------------------------------------------------------------------
// Subcommand implementations

int run_generate(const GenerateArgs& a) {
    std::shared_ptr<DistanceOracle> oracle;
    std::vector<std::int32_t> labels;
    if (a.input.given()) {
        oracle = a.input.load();
    } else {
        const GeneratedDataset d = make_dataset(a.dataset, derive_seed(a.seed, 1));
        oracle = d.oracle;
        labels = d.labels;
        if (!a.points_out.empty()) {
            with_output(a.points_out, [&](std::ostream& out) {
                write_points(dynamic_cast<const PointCloudOracle&>(*oracle), out);
            });
        }
        if (!a.labels_out.empty()) {
            with_output(a.labels_out, [&](std::ostream& out) {
                for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
            });
        }
    }
    if (!a.statements_out.empty()) {
        const StatementKind kind =
            a.kind == "O" ? StatementKind::OddOneOut : StatementKind::MostCentral;
        SampleReport report;
        StatementCollection statements;
        if (a.exhaustive) {
            statements = all_statements(*oracle, kind, 100000000ULL, &report);
        } else {
            const SamplingMode mode = a.mode == "with" ? SamplingMode::WithReplacement
                                                       : SamplingMode::WithoutReplacement;
            statements = sample_statements(*oracle, a.count, mode,
                                           NoiseModel{a.errorprob, derive_seed(a.seed, 2)}, kind,
                                           &report);
        }
        with_output(a.statements_out, [&](std::ostream& out) { write_statements(statements, out); });
        std::cerr << "statements=" << statements.size() << " ties=" << report.tie_count << '\n';
    }
    return 0;
}

int run_medoid(const MedoidArgs& a) {
    const StatementCollection c = load_statements(a.in);
    if (c.empty()) throw EmptyCollection("medoid estimation needs at least one statement");
    if (a.odd_one_out) {
        std::cout << crowdmedian_medoid(crowdmedian_scores(c)) << '\n';
        return 0;
    }
    const DepthTable t = estimate_lens_depth(c, a.in.parallel);
    if (!a.table_out.empty()) {
        with_output(a.table_out, [&](std::ostream& out) { write_depth_table(t, out); });
    }
    std::cout << argmax_depth(t) << '\n';
    return 0;
}

int run_outliers(const OutliersArgs& a) {
    const StatementCollection c = load_statements(a.in);
    std::vector<std::pair<ObjectId, double>> ranked;
    if (a.odd_one_out) {
        // Baseline ordering: high odd-one-out frequency first.
        const CrowdMedianTable t = crowdmedian_scores(c);
        ranked = crowdmedian_outliers(t, t.size());
    } else {
        const DepthTable t = estimate_lens_depth(c, a.in.parallel);
        ranked.reserve(t.size());
        for (ObjectId i = 0; i < t.size(); ++i) ranked.emplace_back(i, t.ld[i]);
        std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
            return x.second != y.second ? x.second < y.second : x.first < y.first;
        });
    }
    with_output(a.out, [&](std::ostream& out) {
        if (a.gap) {
            std::size_t cut = largest_gap_cutoff(ranked);
            if (a.odd_one_out) {  // descending scores: largest drop instead
                double best = -1.0;
                cut = 0;
                for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
                    const double drop = ranked[i].second - ranked[i + 1].second;
                    if (drop > best) {
                        best = drop;
                        cut = i + 1;
                    }
                }
            }
            out << "# gap_cutoff=" << cut << '\n';
        }
        const std::size_t take = std::min<std::size_t>(a.top, ranked.size());
        for (std::size_t i = 0; i < take; ++i) {
            out << ranked[i].first << ',' << format_double(ranked[i].second) << '\n';
        }
    });
    return 0;
}

int run_rng(const RngArgs& a) {
    EstimatedGraph g;
    std::uint32_t n = a.in.n;
    if (a.oracle.given()) {
        const auto oracle = a.oracle.load();
        n = oracle->size();
        if (a.tree) {
            g = mst(*oracle);
        } else if (a.weighted) {
            g = exact_weighted_krng(*oracle, a.k, a.sigma);
        } else {
            g = exact_krng(*oracle, a.k);
        }
    } else {
        if (a.in.statements.empty()) {
            throw Error("rng needs either --statements or an oracle input");
        }
        if (a.in.n == 0) throw Error("--n is required with --statements");
        const StatementCollection c = load_statements(a.in);
        const PairStats ps = accumulate_pair_stats(c, a.in.parallel, a.in.dense_threshold);
        const double errorprob = a.errorprob;
        g = estimate_krng(ps, a.k, a.correct ? &errorprob : nullptr);
    }
    with_output(a.out, [&](std::ostream& out) { write_graph(g, out); });
    if (a.stats) {
        const GraphDiagnostics d = graph_diagnostics(g);
        std::cout << "edge_count=" << d.edge_count << '\n'
                  << "mean_degree=" << format_double(d.mean_degree) << '\n'
                  << "component_count=" << d.component_count << '\n'
                  << "isolated_count=" << d.isolated_count << '\n';
        if (a.correct) {
            std::cout << "effective_k=" << format_double(effective_k(a.k, a.errorprob, n)) << '\n';
        }
    }
    return 0;
}

LabeledDataset load_labeled(const std::string& path, std::uint32_t n, std::uint32_t classes) {
    std::ifstream in = open_input(path);
    const auto map = read_label_map(in);
    std::uint32_t k = classes;
    if (k == 0) {
        std::int64_t top = -1;
        for (const auto& [id, label] : map) top = std::max(top, label);
        if (top < 0) throw EmptyClass("label file holds no labels");
        k = static_cast<std::uint32_t>(top) + 1;
    }
    return LabeledDataset(label_vector(map, n), k);
}

int run_classify(const ClassifyArgs& a) {
    const StatementCollection c = load_statements(a.in);
    const LabeledDataset ds = load_labeled(a.labels, a.in.n, a.classes);
    std::vector<std::pair<ObjectId, std::uint32_t>> pred;
    if (a.method == "feature") {
        ClassifierConfig cfg;
        cfg.variant = ClassifierConfig::Variant::FeatureKnn;
        if (!a.k_grid.empty()) cfg.k_grid = parse_uint_list(a.k_grid, "k-grid");
        cfg.cv_folds = a.folds;
        cfg.seed = a.seed;
        pred = classify_feature(c, ds, cfg);
        if (!a.features_out.empty()) {
            const FeatureMatrix f = class_conditional_depth(c, ds.labels, ds.num_classes);
            with_output(a.features_out, [&](std::ostream& out) {
                for (std::uint32_t r = 0; r < f.rows; ++r) {
                    out << r;
                    for (std::uint32_t col = 0; col < f.cols; ++col) {
                        out << ',' << format_double(f.at(r, col));
                    }
                    out << '\n';
                }
            });
        }
    } else if (a.method == "rng-vote") {
        std::uint32_t k = a.k;
        if (k == 0) {
            const std::vector<std::uint32_t> grid =
                a.k_grid.empty() ? default_rng_vote_grid(ds.labeled_ids().size())
                                 : parse_uint_list(a.k_grid, "k-grid");
            k = select_k_loocv(c, ds, grid, a.repeats, a.seed);
            std::cerr << "selected_k=" << k << '\n';
        }
        pred = classify_rng_vote(c, ds, k, a.seed);
    } else {
        throw Error("unknown method: " + a.method);
    }
    with_output(a.out, [&](std::ostream& out) {
        for (const auto& [id, cls] : pred) out << id << ',' << cls << '\n';
    });
    return 0;
}

int run_cluster(const ClusterArgs& a) {
    const StatementCollection c = load_statements(a.in);
    const PairStats ps = accumulate_pair_stats(c, a.in.parallel, a.in.dense_threshold);
    const WeightMode mode = a.weighted ? WeightMode::gaussian(a.sigma) : WeightMode::unweighted();
    const double errorprob = a.errorprob;
    const AffinityMatrix w = build_affinity(ps, a.k, mode, a.correct ? &errorprob : nullptr);
    if (!a.affinity_out.empty()) {
        with_output(a.affinity_out, [&](std::ostream& out) {
            for (ObjectId i = 0; i < w.n; ++i) {
                for (ObjectId j = i + 1; j < w.n; ++j) {
                    if (w.at(i, j) != 0.0) {
                        out << i << ',' << j << ',' << format_double(w.at(i, j)) << '\n';
                    }
                }
            }
        });
    }
    SpectralOptions opts;
    opts.allow_isolated = a.allow_isolated;
    opts.attach_by_v = &ps;
    const ClusteringResult r = spectral_clustering(w, a.clusters, a.seed, opts);
    with_output(a.out, [&](std::ostream& out) { write_clustering(r, out); });
    return 0;
}

int run_eval(const EvalArgs& a) {
    MetricReport report;
    if (a.metric == "relative-error") {
        const auto oracle = a.oracle.load();
        report.name = "relative_error";
        report.value = relative_error(*oracle, a.estimate);
        report.context.emplace_back("estimate", std::to_string(a.estimate));
    } else if (a.metric == "hamming") {
        if (a.n == 0) throw Error("--n is required for hamming");
        std::ifstream fa = open_input(a.graph_a);
        std::ifstream fb = open_input(a.graph_b);
        report.name = "hamming_error";
        report.value = hamming_error(read_graph(fa, a.n), read_graph(fb, a.n));
    } else if (a.metric == "zero-one") {
        std::ifstream fp = open_input(a.pred);
        std::ifstream ft = open_input(a.truth);
        report.name = "zero_one_loss";
        report.value = zero_one_loss(read_label_map(fp), read_label_map(ft));
    } else if (a.metric == "purity") {
        std::ifstream fc = open_input(a.clusters);
        std::ifstream ft = open_input(a.truth);
        const auto assignment_map = read_label_map(fc);
        const auto truth_map = read_label_map(ft);
        ClusteringResult r;
        std::uint32_t top = 0;
        for (const auto& [id, cluster] : assignment_map) top = std::max(top, static_cast<std::uint32_t>(id));
        r.assignment.assign(top + 1, 0);
        for (const auto& [id, cluster] : assignment_map) {
            r.assignment[id] = static_cast<std::uint32_t>(cluster);
            r.l = std::max(r.l, static_cast<std::uint32_t>(cluster) + 1);
        }
        std::vector<std::int32_t> truth(top + 1, -1);
        for (const auto& [id, cls] : truth_map) {
            if (id <= top) truth[id] = static_cast<std::int32_t>(cls);
        }
        report.name = "purity";
        report.value = purity(r, truth);
    } else {
        throw Error("unknown metric: " + a.metric);
    }
    std::cout << report.name << ',' << format_double(report.value);
    for (const auto& [key, value] : report.context) std::cout << ',' << key << '=' << value;
    std::cout << '\n';
    return 0;
}

// One sweep repetition; returns the metric value for its cell.
double sweep_rep(const SweepArgs& a, std::uint64_t count, double errorprob,
                 std::uint64_t rep_seed) {
    const std::uint64_t data_seed = derive_seed(rep_seed, 1);
    const std::uint64_t sample_seed = derive_seed(rep_seed, 2);
    const std::uint64_t algo_seed = derive_seed(rep_seed, 3);
    const GeneratedDataset d = make_dataset(a.dataset, data_seed);
    const DistanceOracle& oracle = *d.oracle;
    const std::uint64_t total = binomial3(oracle.size());
    const SamplingMode mode =
        count > total ? SamplingMode::WithReplacement : SamplingMode::WithoutReplacement;

    if (a.task == "medoid" || a.task == "crowdmedian") {
        const StatementKind kind =
            a.task == "medoid" ? StatementKind::MostCentral : StatementKind::OddOneOut;
        const StatementCollection s =
            sample_statements(oracle, count, mode, NoiseModel{errorprob, sample_seed}, kind);
        const ObjectId estimate = a.task == "medoid"
                                      ? estimate_medoid(s)
                                      : crowdmedian_medoid(crowdmedian_scores(s));
        return relative_error(oracle, estimate);
    }
    if (a.task == "outlier") {
        const StatementCollection s = sample_statements(
            oracle, count, mode, NoiseModel{errorprob, sample_seed}, StatementKind::MostCentral);
        std::size_t planted = 0;
        for (const std::int32_t l : d.labels) planted += l == 1;
        const auto ranked = rank_outliers(s, planted);
        std::size_t hit = 0;
        for (const auto& [id, ld] : ranked) hit += d.labels[id] == 1;
        return planted == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(planted);
    }
    if (a.task == "rng") {
        const StatementCollection s = sample_statements(
            oracle, count, mode, NoiseModel{errorprob, sample_seed}, StatementKind::MostCentral);
        const PairStats ps = accumulate_pair_stats(s);
        const EstimatedGraph estimate = estimate_krng(ps, a.k, a.correct ? &errorprob : nullptr);
        return hamming_error(exact_krng(oracle, a.k), estimate);
    }
    if (a.task == "classify") {
        const StatementCollection s = sample_statements(
            oracle, count, mode, NoiseModel{errorprob, sample_seed}, StatementKind::MostCentral);
        const std::uint32_t labeled =
            a.labeled > 0 ? a.labeled : oracle.size() - oracle.size() / 4;
        std::vector<std::int32_t> labels = d.labels;
        std::map<ObjectId, std::int64_t> truth;
        for (std::uint32_t i = labeled; i < oracle.size(); ++i) {
            truth[i] = labels[i];
            labels[i] = -1;
        }
        std::uint32_t classes = 0;
        for (const std::int32_t l : d.labels) classes = std::max(classes, static_cast<std::uint32_t>(l) + 1);
        const LabeledDataset ds(std::move(labels), classes);
        std::vector<std::pair<ObjectId, std::uint32_t>> pred;
        if (a.method == "rng-vote") {
            pred = classify_rng_vote(s, ds, a.k, algo_seed);
        } else {
            ClassifierConfig cfg;
            cfg.seed = algo_seed;
            pred = classify_feature(s, ds, cfg);
        }
        std::map<ObjectId, std::int64_t> pred_map;
        for (const auto& [id, cls] : pred) pred_map[id] = cls;
        return zero_one_loss(pred_map, truth);
    }
    if (a.task == "cluster") {
        const StatementCollection s = sample_statements(
            oracle, count, mode, NoiseModel{errorprob, sample_seed}, StatementKind::MostCentral);
        const PairStats ps = accumulate_pair_stats(s);
        const WeightMode wm = a.weighted ? WeightMode::gaussian(a.sigma) : WeightMode::unweighted();
        const AffinityMatrix w = build_affinity(ps, a.k, wm, a.correct ? &errorprob : nullptr);
        SpectralOptions opts;
        opts.allow_isolated = true;
        opts.attach_by_v = &ps;
        const ClusteringResult r = spectral_clustering(w, a.clusters, algo_seed, opts);
        return purity(r, d.labels);
    }
    throw Error("unknown sweep task: " + a.task);
}

int run_sweep(const SweepArgs& a) {
    const std::vector<std::uint32_t> counts = parse_uint_list(a.counts, "counts");
    const std::vector<double> errorprobs = parse_double_list(a.errorprobs, "errorprobs");
    if (a.reps < 1) throw Error("reps must be at least 1");

    struct Cell {
        std::uint64_t count;
        double errorprob;
        std::vector<double> values;
    };
    std::vector<Cell> cells;
    for (const std::uint32_t count : counts) {
        for (const double e : errorprobs) {
            cells.push_back({count, e, std::vector<double>(a.reps, 0.0)});
        }
    }

    // Tasks are (cell, rep) pairs with seeds derived from the flat index,
    // so any worker count reproduces the same numbers.
    struct Task {
        std::size_t cell;
        std::uint32_t rep;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::uint32_t r = 0; r < a.reps; ++r) tasks.push_back({c, r});
    }
    std::size_t workers = std::max<std::size_t>(1, a.parallel);
    workers = std::min(workers, tasks.size());
    std::mutex failure_mutex;
    std::exception_ptr failure;
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task task = tasks[t];
            Cell& cell = cells[task.cell];
            const std::uint64_t rep_seed =
                derive_seed(a.seed, task.cell * a.reps + task.rep);
            try {
                cell.values[task.rep] = sweep_rep(a, cell.count, cell.errorprob, rep_seed);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    with_output(a.out, [&](std::ostream& out) {
        out << "# task,dataset,count,errorprob,reps,mean,min,max\n";
        for (const Cell& cell : cells) {
            double sum = 0.0, lo = cell.values[0], hi = cell.values[0];
            for (const double v : cell.values) {
                sum += v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            out << a.task << ',' << a.dataset.kind << ',' << cell.count << ','
                << format_double(cell.errorprob) << ',' << a.reps << ','
                << format_double(sum / static_cast<double>(a.reps)) << ',' << format_double(lo)
                << ',' << format_double(hi) << '\n';
        }
    });
    return 0;
}

void add_statement_options(CLI::App* cmd, StatementsArgs& a, bool required = true) {
    auto* statements = cmd->add_option("--statements", a.statements, "statement CSV file");
    auto* n = cmd->add_option("--n", a.n, "universe size");
    if (required) {
        statements->required();
        n->required();
    }
    cmd->add_option("--name-map", a.name_map, "sidecar `name,index` translation file");
    cmd->add_option("--parallel", a.parallel, "worker count")
        ->envname("TRILENS_PARALLEL")
        ->capture_default_str();
    cmd->add_option("--dense-threshold", a.dense_threshold,
                    "largest n stored as a dense pair table")
        ->capture_default_str();
    cmd->add_flag("--reduce", a.reduce,
                  "collapse repeated triples to their modal statement first");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lens-depth and k-RNG analysis from most-central-of-three statements"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file (flags override)");

    GenerateArgs generate_args;
    auto* generate = app.add_subcommand("generate", "synthesize datasets and statement samples");
    add_dataset_options(generate, generate_args.dataset);
    add_oracle_options(generate, generate_args.input);
    generate->add_option("--seed", generate_args.seed, "random seed")->required();
    generate->add_option("--points-out", generate_args.points_out, "write generated points CSV");
    generate->add_option("--labels-out", generate_args.labels_out, "write source labels CSV");
    generate->add_option("--statements-out", generate_args.statements_out,
                         "write sampled statements CSV");
    generate->add_option("--count", generate_args.count, "number of statements to sample");
    generate->add_option("--errorprob", generate_args.errorprob, "statement corruption probability")
        ->capture_default_str();
    generate->add_option("--kind", generate_args.kind, "statement kind: C or O")
        ->capture_default_str();
    generate->add_option("--mode", generate_args.mode, "sampling: without|with replacement")
        ->capture_default_str();
    generate->add_flag("--exhaustive", generate_args.exhaustive,
                       "emit one truthful statement per triple");

    MedoidArgs medoid_args;
    auto* medoid = app.add_subcommand("medoid", "estimate a medoid from statements");
    add_statement_options(medoid, medoid_args.in);
    medoid->add_flag("--odd-one-out", medoid_args.odd_one_out,
                     "input holds odd-one-out statements; use the frequency baseline");
    medoid->add_option("--table-out", medoid_args.table_out, "write the full depth table CSV");

    OutliersArgs outliers_args;
    auto* outliers = app.add_subcommand("outliers", "rank objects by estimated lens depth");
    add_statement_options(outliers, outliers_args.in);
    outliers->add_flag("--odd-one-out", outliers_args.odd_one_out,
                       "input holds odd-one-out statements; rank by frequency instead");
    outliers->add_option("--top", outliers_args.top, "entries to report")->capture_default_str();
    outliers->add_flag("--gap", outliers_args.gap, "report the largest-gap cutoff");
    outliers->add_option("--out", outliers_args.out, "output file (default stdout)");

    RngArgs rng_args;
    auto* rng = app.add_subcommand("rng",
                                   "estimate the k-relative neighborhood graph from statements, "
                                   "or build the exact graph from an oracle input");
    add_statement_options(rng, rng_args.in, /*required=*/false);
    add_oracle_options(rng, rng_args.oracle);
    rng->add_option("--k", rng_args.k, "neighborhood parameter")->capture_default_str();
    rng->add_option("--errorprob", rng_args.errorprob, "known statement error probability")
        ->capture_default_str();
    rng->add_flag("--correct", rng_args.correct, "apply the noise-bias correction");
    rng->add_flag("--weighted", rng_args.weighted, "Gaussian edge weights (exact graphs)");
    rng->add_option("--sigma", rng_args.sigma, "weight scale")->capture_default_str();
    rng->add_flag("--mst", rng_args.tree, "emit the minimum spanning tree of the oracle");
    rng->add_flag("--stats", rng_args.stats, "print key=value diagnostics to stdout");
    rng->add_option("--out", rng_args.out, "edge list output (default stdout)");

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "predict labels for unlabeled objects");
    add_statement_options(classify, classify_args.in);
    classify->add_option("--labels", classify_args.labels, "labeled-object CSV `id,class`")
        ->required();
    classify->add_option("--method", classify_args.method, "feature|rng-vote")
        ->capture_default_str();
    classify->add_option("--classes", classify_args.classes, "class count (default: max label + 1)");
    classify->add_option("--k", classify_args.k,
                         "neighborhood parameter for rng-vote (0 = select by LOOCV)");
    classify->add_option("--k-grid", classify_args.k_grid, "comma-separated candidate k values");
    classify->add_option("--folds", classify_args.folds, "cross-validation folds")
        ->capture_default_str();
    classify->add_option("--repeats", classify_args.repeats, "LOOCV repeats")
        ->capture_default_str();
    classify->add_option("--seed", classify_args.seed, "random seed")->required();
    classify->add_option("--out", classify_args.out, "prediction CSV (default stdout)");
    classify->add_option("--features-out", classify_args.features_out,
                         "write the depth feature matrix CSV");

    ClusterArgs cluster_args;
    auto* cluster = app.add_subcommand("cluster", "spectral clustering on the estimated graph");
    add_statement_options(cluster, cluster_args.in);
    cluster->add_option("--k", cluster_args.k, "neighborhood parameter")->capture_default_str();
    cluster->add_option("--clusters", cluster_args.clusters, "number of clusters")
        ->capture_default_str();
    cluster->add_flag("--weighted", cluster_args.weighted, "Gaussian edge weights");
    cluster->add_option("--sigma", cluster_args.sigma, "weight scale")->capture_default_str();
    cluster->add_option("--errorprob", cluster_args.errorprob, "known statement error probability")
        ->capture_default_str();
    cluster->add_flag("--correct", cluster_args.correct, "apply the noise-bias correction");
    cluster->add_flag("--allow-isolated", cluster_args.allow_isolated,
                      "attach isolated vertices instead of failing");
    cluster->add_option("--seed", cluster_args.seed, "random seed")->required();
    cluster->add_option("--out", cluster_args.out, "clustering CSV (default stdout)");
    cluster->add_option("--affinity-out", cluster_args.affinity_out,
                        "write the affinity as a weighted edge list CSV");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "compute a metric report row");
    eval->add_option("--metric", eval_args.metric, "relative-error|hamming|zero-one|purity")
        ->required();
    add_oracle_options(eval, eval_args.oracle);
    eval->add_option("--estimate", eval_args.estimate, "medoid estimate id");
    eval->add_option("--graph-a", eval_args.graph_a, "first edge list");
    eval->add_option("--graph-b", eval_args.graph_b, "second edge list");
    eval->add_option("--n", eval_args.n, "object count for graph metrics");
    eval->add_option("--pred", eval_args.pred, "prediction CSV");
    eval->add_option("--truth", eval_args.truth, "ground truth CSV");
    eval->add_option("--clusters", eval_args.clusters, "clustering CSV");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "repeated experiments over a parameter grid");
    sweep->add_option("--task", sweep_args.task,
                      "medoid|crowdmedian|outlier|rng|classify|cluster")
        ->capture_default_str();
    add_dataset_options(sweep, sweep_args.dataset);
    sweep->add_option("--counts", sweep_args.counts, "statement-count grid, comma separated")
        ->capture_default_str();
    sweep->add_option("--errorprobs", sweep_args.errorprobs, "errorprob grid, comma separated")
        ->capture_default_str();
    sweep->add_option("--reps", sweep_args.reps, "repetitions per cell")->capture_default_str();
    sweep->add_option("--seed", sweep_args.seed, "random seed")->required();
    sweep->add_option("--parallel", sweep_args.parallel, "worker count")
        ->envname("TRILENS_PARALLEL")
        ->capture_default_str();
    sweep->add_option("--k", sweep_args.k, "neighborhood parameter")->capture_default_str();
    sweep->add_flag("--correct", sweep_args.correct, "apply the noise-bias correction");
    sweep->add_option("--clusters", sweep_args.clusters, "cluster count")->capture_default_str();
    sweep->add_flag("--weighted", sweep_args.weighted, "Gaussian edge weights");
    sweep->add_option("--sigma", sweep_args.sigma, "weight scale")->capture_default_str();
    sweep->add_option("--labeled", sweep_args.labeled, "labeled objects for classify (default 3n/4)");
    sweep->add_option("--method", sweep_args.method, "classifier: feature|rng-vote")
        ->capture_default_str();
    sweep->add_option("--out", sweep_args.out, "sweep CSV (default stdout)");

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return run_generate(generate_args);
        if (medoid->parsed()) return run_medoid(medoid_args);
        if (outliers->parsed()) return run_outliers(outliers_args);
        if (rng->parsed()) return run_rng(rng_args);
        if (classify->parsed()) return run_classify(classify_args);
        if (cluster->parsed()) return run_cluster(cluster_args);
        if (eval->parsed()) return run_eval(eval_args);
        if (sweep->parsed()) return run_sweep(sweep_args);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const NoConvergence& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
