/// @file  io.hpp
/// @brief CSV readers and writers for the file formats the CLI speaks:
///        point clouds, dense matrices, edge lists, label maps, depth
///        tables, graphs, predictions and clusterings.

#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "trilens/cluster.hpp"
#include "trilens/depth.hpp"
#include "trilens/errors.hpp"
#include "trilens/oracle.hpp"
#include "trilens/proxgraph.hpp"
#include "trilens/statements.hpp"

namespace trilens {

/// Shortest round-trip decimal form of a double; keeps CSV outputs
/// byte-stable across worker counts.
inline std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    double parsed = 0.0;
    for (int precision = 1; precision <= 16; ++precision) {
        char candidate[40];
        std::snprintf(candidate, sizeof(candidate), "%.*g", precision, v);
        std::sscanf(candidate, "%lf", &parsed);
        if (parsed == v) return candidate;
    }
    return buffer;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    for (char ch : line) {
        if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back().push_back(ch);
        }
    }
    return fields;
}

inline double parse_double(const std::string& token, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + token + "'");
    }
}

inline std::int64_t parse_int(const std::string& token, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + token + "'");
    }
}

template <typename F>
void for_each_csv_line(std::istream& in, F&& f) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        f(split_csv_line(line), line_no);
    }
}

}  // namespace detail

/// Point cloud rows `x1,...,xm`. All rows must share one dimension.
inline std::shared_ptr<PointCloudOracle> read_points(std::istream& in) {
    std::vector<double> coords;
    std::size_t dim = 0;
    detail::for_each_csv_line(in, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        if (dim == 0) {
            dim = fields.size();
        } else if (fields.size() != dim) {
            throw ParseError("line " + std::to_string(line_no) + ": inconsistent dimension");
        }
        for (const std::string& token : fields) coords.push_back(detail::parse_double(token, line_no));
    });
    if (coords.empty()) throw ParseError("point file holds no rows");
    return std::make_shared<PointCloudOracle>(std::move(coords), static_cast<std::uint32_t>(dim));
}

inline void write_points(const PointCloudOracle& o, std::ostream& out) {
    for (ObjectId i = 0; i < o.size(); ++i) {
        const double* p = o.point(i);
        for (std::uint32_t k = 0; k < o.dim(); ++k) {
            if (k) out << ',';
            out << format_double(p[k]);
        }
        out << '\n';
    }
}

/// Dense matrix: one CSV row per object.
inline std::shared_ptr<DenseOracle> read_dense_matrix(std::istream& in) {
    std::vector<double> values;
    std::size_t n = 0;
    detail::for_each_csv_line(in, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        if (n == 0) {
            n = fields.size();
        } else if (fields.size() != n) {
            throw ParseError("line " + std::to_string(line_no) + ": ragged matrix row");
        }
        for (const std::string& token : fields) values.push_back(detail::parse_double(token, line_no));
    });
    if (values.size() != n * n) throw ParseError("matrix is not square");
    return std::make_shared<DenseOracle>(static_cast<std::uint32_t>(n), std::move(values));
}

/// Edge list rows `u,v`. n defaults to max id + 1 when not given.
inline std::vector<std::pair<ObjectId, ObjectId>> read_edges(std::istream& in,
                                                             std::uint32_t* max_id = nullptr) {
    std::vector<std::pair<ObjectId, ObjectId>> edges;
    std::uint32_t top = 0;
    detail::for_each_csv_line(in, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        if (fields.size() != 2) {
            throw ParseError("line " + std::to_string(line_no) + ": expected `u,v`");
        }
        const std::int64_t u = detail::parse_int(fields[0], line_no);
        const std::int64_t v = detail::parse_int(fields[1], line_no);
        if (u < 0 || v < 0) throw ParseError("line " + std::to_string(line_no) + ": negative id");
        edges.emplace_back(static_cast<ObjectId>(u), static_cast<ObjectId>(v));
        top = std::max<std::uint32_t>(top, static_cast<std::uint32_t>(std::max(u, v)));
    });
    if (max_id) *max_id = top;
    return edges;
}

/// Label map rows `id,class_index`.
inline std::map<ObjectId, std::int64_t> read_label_map(std::istream& in) {
    std::map<ObjectId, std::int64_t> labels;
    detail::for_each_csv_line(in, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        if (fields.size() != 2) {
            throw ParseError("line " + std::to_string(line_no) + ": expected `id,class`");
        }
        const std::int64_t id = detail::parse_int(fields[0], line_no);
        if (id < 0) throw ParseError("line " + std::to_string(line_no) + ": negative id");
        labels[static_cast<ObjectId>(id)] = detail::parse_int(fields[1], line_no);
    });
    return labels;
}

inline void write_label_map(const std::map<ObjectId, std::int64_t>& labels, std::ostream& out) {
    for (const auto& [id, label] : labels) out << id << ',' << label << '\n';
}

/// Label vector for objects 0..n-1; missing ids become -1.
inline std::vector<std::int32_t> label_vector(const std::map<ObjectId, std::int64_t>& labels,
                                              std::uint32_t n) {
    std::vector<std::int32_t> out(n, -1);
    for (const auto& [id, label] : labels) {
        if (id >= n) throw IdOutOfRange("label id " + std::to_string(id) + " not below n");
        out[id] = static_cast<std::int32_t>(label);
    }
    return out;
}

/// Depth table export: `id,central_count,appear_count,ld`.
inline void write_depth_table(const DepthTable& t, std::ostream& out) {
    for (ObjectId i = 0; i < t.size(); ++i) {
        out << i << ',' << t.central_count[i] << ',' << t.appear_count[i] << ','
            << format_double(t.ld[i]) << '\n';
    }
}

/// Graph export: `i,j[,weight]` per edge.
inline void write_graph(const EstimatedGraph& g, std::ostream& out) {
    for (const EstimatedGraph::Edge& e : g.edges()) {
        out << e.i << ',' << e.j;
        if (g.weighted()) out << ',' << format_double(e.weight);
        out << '\n';
    }
}

inline EstimatedGraph read_graph(std::istream& in, std::uint32_t n) {
    EstimatedGraph g(n, false);
    detail::for_each_csv_line(in, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        if (fields.size() != 2 && fields.size() != 3) {
            throw ParseError("line " + std::to_string(line_no) + ": expected `i,j[,weight]`");
        }
        const std::int64_t i = detail::parse_int(fields[0], line_no);
        const std::int64_t j = detail::parse_int(fields[1], line_no);
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw IdOutOfRange("line " + std::to_string(line_no) + ": endpoint outside [0, n)");
        }
        g.add_edge(static_cast<ObjectId>(i), static_cast<ObjectId>(j));
    });
    g.sort_edges();
    return g;
}

/// Clustering export: `id,cluster`.
inline void write_clustering(const ClusteringResult& r, std::ostream& out) {
    for (std::size_t i = 0; i < r.assignment.size(); ++i) out << i << ',' << r.assignment[i] << '\n';
}

}  // namespace trilens
