/// @file  statements.hpp
/// @brief Ordinal triple statements: data model, CSV serialization,
///        reduction and partitioning.
///
/// A statement designates one member of a triple of objects, either as the
/// most central member ("C") or as the odd one out ("O"). Collections keep
/// multiset semantics: repeats and mutually contradicting statements are
/// ordinary data and are never rejected at parse time.

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "trilens/errors.hpp"

namespace trilens {

/// Dense object identifier in [0, n).
using ObjectId = std::uint32_t;

enum class StatementKind : std::uint8_t { MostCentral, OddOneOut };

/// One ordinal statement about a triple. Canonical form keeps
/// other1 < other2; the three members are pairwise distinct.
struct Statement {
    StatementKind kind;
    ObjectId designated;
    ObjectId other1;
    ObjectId other2;

    friend bool operator==(const Statement&, const Statement&) = default;
};

/// Returns s with other1 < other2. Throws DuplicateMember if any two
/// members coincide. Idempotent.
inline Statement canonicalize(Statement s) {
    if (s.other1 > s.other2) std::swap(s.other1, s.other2);
    if (s.designated == s.other1 || s.designated == s.other2 || s.other1 == s.other2) {
        throw DuplicateMember("statement members must be pairwise distinct");
    }
    return s;
}

/// The unordered triple of a statement, sorted ascending.
inline std::tuple<ObjectId, ObjectId, ObjectId> statement_triple(const Statement& s) {
    ObjectId a = s.designated, b = s.other1, c = s.other2;
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return {a, b, c};
}

/// An ordered multiset of statements over objects 0..n-1.
/// Immutable by convention once built; safe for concurrent reads.
struct StatementCollection {
    std::uint32_t n = 0;
    std::vector<Statement> items;

    std::size_t size() const { return items.size(); }
    bool empty() const { return items.empty(); }

    void push_back(Statement s) {
        s = canonicalize(s);
        if (s.other2 >= n) {
            throw IdOutOfRange("object id " + std::to_string(s.other2) +
                               " out of range for universe size " + std::to_string(n));
        }
        if (s.designated >= n) {
            throw IdOutOfRange("object id " + std::to_string(s.designated) +
                               " out of range for universe size " + std::to_string(n));
        }
        items.push_back(s);
    }
};

/// Throws WrongKind unless every statement in c has the given kind.
inline void require_kind(const StatementCollection& c, StatementKind kind) {
    for (const Statement& s : c.items) {
        if (s.kind != kind) {
            throw WrongKind(kind == StatementKind::MostCentral
                                ? "operation requires most-central statements"
                                : "operation requires odd-one-out statements");
        }
    }
}

namespace detail {

inline ObjectId parse_object_id(const std::string& token, std::uint32_t n, std::size_t line_no) {
    if (token.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty id field");
    std::uint64_t value = 0;
    for (char ch : token) {
        if (ch < '0' || ch > '9') {
            throw ParseError("line " + std::to_string(line_no) + ": bad id '" + token + "'");
        }
        value = value * 10 + static_cast<std::uint64_t>(ch - '0');
        if (value > 0xFFFFFFFFULL) {
            throw ParseError("line " + std::to_string(line_no) + ": id '" + token + "' too large");
        }
    }
    if (value >= n) {
        throw IdOutOfRange("line " + std::to_string(line_no) + ": id " + token +
                           " not below universe size " + std::to_string(n));
    }
    return static_cast<ObjectId>(value);
}

}  // namespace detail

/// Parses the statement CSV format: one `KIND,designated,other1,other2`
/// line per statement, KIND in {C,O}, `#` starts a comment line, no
/// header. Statements come out canonicalized, order preserved.
inline StatementCollection parse_statements(std::istream& in, std::uint32_t n) {
    StatementCollection out;
    out.n = n;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::string fields[4];
        std::size_t field = 0;
        for (char ch : line) {
            if (ch == ',') {
                if (++field > 3) throw ParseError("line " + std::to_string(line_no) + ": too many fields");
            } else {
                fields[field].push_back(ch);
            }
        }
        if (field != 3) throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields");

        StatementKind kind;
        if (fields[0] == "C") {
            kind = StatementKind::MostCentral;
        } else if (fields[0] == "O") {
            kind = StatementKind::OddOneOut;
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": kind must be C or O, got '" +
                             fields[0] + "'");
        }
        Statement s{kind, detail::parse_object_id(fields[1], n, line_no),
                    detail::parse_object_id(fields[2], n, line_no),
                    detail::parse_object_id(fields[3], n, line_no)};
        try {
            out.items.push_back(canonicalize(s));
        } catch (const DuplicateMember&) {
            throw ParseError("line " + std::to_string(line_no) + ": duplicate member in triple");
        }
    }
    return out;
}

/// Inverse of parse_statements; parse(write(c)) reproduces c element-wise.
inline void write_statements(const StatementCollection& c, std::ostream& out) {
    for (const Statement& s : c.items) {
        out << (s.kind == StatementKind::MostCentral ? 'C' : 'O') << ',' << s.designated << ','
            << s.other1 << ',' << s.other2 << '\n';
    }
    if (!out) throw Error("statement write failed");
}

/// Collapses every group of statements about one triple into a single
/// statement whose designated member is the modal one (ties to the
/// smallest id). Output is sorted by triple. All inputs must share one
/// kind; throws MixedKinds otherwise.
inline StatementCollection reduce_collection(const StatementCollection& c) {
    StatementCollection out;
    out.n = c.n;
    if (c.items.empty()) return out;
    const StatementKind kind = c.items.front().kind;
    for (const Statement& s : c.items) {
        if (s.kind != kind) throw MixedKinds("cannot reduce a collection with mixed statement kinds");
    }

    // triple -> designated -> multiplicity
    std::map<std::tuple<ObjectId, ObjectId, ObjectId>, std::map<ObjectId, std::size_t>> groups;
    for (const Statement& s : c.items) groups[statement_triple(s)][s.designated]++;

    for (const auto& [triple, votes] : groups) {
        ObjectId best = 0;
        std::size_t best_count = 0;
        for (const auto& [id, count] : votes) {  // ascending id, so ties keep the smallest
            if (count > best_count) {
                best = id;
                best_count = count;
            }
        }
        const auto [a, b, cc] = triple;
        ObjectId o1 = a, o2 = b;
        if (best == a) {
            o1 = b;
            o2 = cc;
        } else if (best == b) {
            o1 = a;
            o2 = cc;
        }
        out.items.push_back(Statement{kind, best, o1, o2});
    }
    return out;
}

/// Splits c into `parts` contiguous slices whose sizes differ by at most
/// one; concatenating them restores c.
inline std::vector<StatementCollection> partition(const StatementCollection& c, std::size_t parts) {
    if (parts < 1) throw Error("partition requires parts >= 1");
    std::vector<StatementCollection> out(parts);
    const std::size_t total = c.items.size();
    const std::size_t base = total / parts;
    const std::size_t extra = total % parts;
    std::size_t pos = 0;
    for (std::size_t p = 0; p < parts; ++p) {
        const std::size_t len = base + (p < extra ? 1 : 0);
        out[p].n = c.n;
        out[p].items.assign(c.items.begin() + static_cast<std::ptrdiff_t>(pos),
                            c.items.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return out;
}

}  // namespace trilens
