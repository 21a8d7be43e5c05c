#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ramsey/error.hpp"
#include "ramsey/graph.hpp"
#include "ramsey/graph6.hpp"
#include "ramsey/parallel.hpp"

namespace ramsey {

/// A lower-bound claim R(p,q) > n backed by a concrete graph.
struct WitnessClaim {
    CliqueParams params;
    int n = 0;
    ColoredGraph graph;
    bool verified = false;
    /// Sorted vertices of a blue p-clique or red q-clique when refuted.
    std::vector<int> violating;
    EdgeColor violatingColor = EdgeColor::Blue;

    std::string summary() const {
        std::string s = "R(" + std::to_string(params.blueBound) + "," + std::to_string(params.redBound) + ") > " +
                        std::to_string(n);
        if (verified) return s + ": verified";
        s += ": refuted by ";
        s += violatingColor == EdgeColor::Blue ? "blue" : "red";
        s += " clique {";
        for (std::size_t i = 0; i < violating.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(violating[i]);
        }
        return s + "}";
    }
};

namespace detail {

/// Lexicographically first k-subset of `within` whose edges all lie in
/// rows (vertices added in increasing order; a branch dies at the first
/// vertex not adjacent to the ones chosen so far).
inline std::optional<VertexSet> firstClique(const std::array<VertexSet, 32>& rows, VertexSet candidates, int k,
                                            VertexSet chosen = 0) {
    if (k == 0) return chosen;
    while (candidates != 0) {
        if (popcount(candidates) < k) return std::nullopt;
        const int v = lowestVertex(candidates);
        candidates &= candidates - 1;
        if (auto found = firstClique(rows, candidates & rows[v], k - 1, chosen | bitOf(v))) return found;
    }
    return std::nullopt;
}

inline std::vector<int> verticesOf(VertexSet s) {
    std::vector<int> out;
    forEachVertex(s, [&](int v) { out.push_back(v); });
    return out;
}

}  // namespace detail

/// Checks that g has no blue p-clique and no red q-clique. Blue cliques are
/// searched first; the search is split over the lowest subset vertex.
inline WitnessClaim verifyWitness(const ColoredGraph& g, const CliqueParams& params, int workers = 1) {
    params.validate();
    if (!g.isConcrete()) throw StateError("witness graph has gray edges");
    const auto adj = Adjacency::of(g);
    WitnessClaim claim{params, g.order(), g, false, {}, EdgeColor::Blue};
    for (EdgeColor color : {EdgeColor::Blue, EdgeColor::Red}) {
        const int k = color == EdgeColor::Blue ? params.blueBound : params.redBound;
        const auto& rows = adj.rows(color);
        std::vector<std::optional<VertexSet>> found(static_cast<std::size_t>(adj.n));
        parallelFor(
            static_cast<std::size_t>(adj.n), workers,
            [&](int, std::size_t v) {
                const VertexSet later = adj.all() & ~firstVertices(static_cast<int>(v) + 1);
                found[v] = k == 1 ? std::optional<VertexSet>(bitOf(static_cast<int>(v)))
                                  : detail::firstClique(rows, later & rows[v], k - 1, bitOf(static_cast<int>(v)));
            },
            1);
        for (const auto& f : found) {
            if (f) {
                claim.violating = detail::verticesOf(*f);
                claim.violatingColor = color;
                return claim;
            }
        }
    }
    claim.verified = true;
    return claim;
}

enum class WitnessFormat { EdgeList, Graph6 };

/// Edge list: one "a b" pair per line (blue edges; every other pair is
/// red), '#' comments. Vertex count from `n`, else from a "n <count>" line,
/// else the largest vertex + 1.
inline ColoredGraph parseEdgeList(std::istream& in, std::optional<int> n = std::nullopt) {
    std::vector<std::pair<int, int>> edges;
    std::vector<std::size_t> edgeLines;
    std::optional<int> declared = n;
    int maxVertex = -1;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream fields(line.substr(start));
        if (line[start] == 'n') {
            std::string tag;
            int count = -1;
            std::string extra;
            fields >> tag >> count;
            if (tag != "n" || count < 1 || (fields >> extra)) throw ParseError("malformed vertex-count line", lineNo, start);
            if (!n) declared = count;
            continue;
        }
        long a = -1, b = -1;
        std::string extra;
        if (!(fields >> a >> b) || (fields >> extra)) throw ParseError("expected two vertex numbers", lineNo, start);
        if (a < 0 || b < 0 || a >= kMaxVertices || b >= kMaxVertices)
            throw ParseError("vertex number out of range", lineNo, start);
        if (a == b) throw ParseError("self-loop on vertex " + std::to_string(a), lineNo, start);
        edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        edgeLines.push_back(lineNo);
        maxVertex = std::max<int>(maxVertex, static_cast<int>(std::max(a, b)));
    }
    const int order = declared ? *declared : maxVertex + 1;
    if (order < 1) throw ParseError("cannot determine the vertex count of an empty edge list", lineNo, 0);
    if (order > kMaxVertices) throw ParseError("more than 31 vertices", lineNo, 0);
    ColoredGraph g = ColoredGraph::complete(order, EdgeColor::Red);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [a, b] = edges[i];
        if (a >= order || b >= order)
            throw ParseError("vertex beyond the declared count " + std::to_string(order), edgeLines[i], 0);
        if (g.color(a, b) == EdgeColor::Blue)
            throw ParseError("duplicate edge " + std::to_string(a) + " " + std::to_string(b), edgeLines[i], 0);
        g.setColor(a, b, EdgeColor::Blue);
    }
    return g;
}

inline ColoredGraph ingestWitnessFile(const std::filesystem::path& path, WitnessFormat format,
                                      std::optional<int> n = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open " + path.string());
    if (format == WitnessFormat::EdgeList) return parseEdgeList(in, n);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto g = fromGraph6(line, lineNo);
        if (n && g.order() != *n)
            throw ParseError("graph has " + std::to_string(g.order()) + " vertices, expected " + std::to_string(*n),
                             lineNo, 0);
        return g;
    }
    throw ParseError("no graph6 line found", lineNo + 1, 0);
}

}  // namespace ramsey
