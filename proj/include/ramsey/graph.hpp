#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ramsey/bitmask.hpp"
#include "ramsey/error.hpp"

namespace ramsey {

enum class EdgeColor : std::uint8_t { Blue, Red, Gray };

inline constexpr int kMaxVertices = 31;
inline constexpr int kMaxSlots = kMaxVertices * (kMaxVertices - 1) / 2;

using EdgeMask = BitMask<8>;
static_assert(EdgeMask::kBits >= kMaxSlots);

inline char colorChar(EdgeColor c) {
    switch (c) {
        case EdgeColor::Blue: return 'B';
        case EdgeColor::Red: return 'R';
        case EdgeColor::Gray: return 'G';
    }
    return '?';
}

inline std::optional<EdgeColor> colorFromChar(char ch) {
    switch (ch) {
        case 'B': return EdgeColor::Blue;
        case 'R': return EdgeColor::Red;
        case 'G': return EdgeColor::Gray;
        default: return std::nullopt;
    }
}

inline constexpr int slotCount(int n) { return n * (n - 1) / 2; }

/// Slot of the unordered edge {a,b}: lower triangle, column-major.
inline constexpr int slotIndex(int a, int b) {
    if (a > b) std::swap(a, b);
    return b * (b - 1) / 2 + a;
}

struct EdgeSlot {
    int a = 0;
    int b = 1;
    int slot = 0;

    static EdgeSlot of(int a, int b) {
        if (a > b) std::swap(a, b);
        return {a, b, slotIndex(a, b)};
    }
    static EdgeSlot fromSlot(int slot) {
        int b = 1;
        while (slotCount(b + 1) <= slot) ++b;
        return {slot - slotCount(b), b, slot};
    }
};

/// Forbidden monochromatic clique sizes: no blue `blueBound`-clique and no
/// red `redBound`-clique.
struct CliqueParams {
    int blueBound = 3;
    int redBound = 3;

    CliqueParams swapped() const { return {redBound, blueBound}; }
    void validate() const {
        if (blueBound < 1 || redBound < 1) throw ArgumentError("clique bounds must be >= 1");
    }
    friend bool operator==(const CliqueParams&, const CliqueParams&) = default;
};

/// Complete graph on n <= 31 vertices with blue, red or gray edges.
/// An edge set in neither mask is gray.
class ColoredGraph {
public:
    ColoredGraph() = default;

    /// All-gray graph on n vertices.
    explicit ColoredGraph(int n) : n_(n) {
        if (n < 0 || n > kMaxVertices) throw ArgumentError("vertex count must be in [0, 31]");
    }

    static ColoredGraph complete(int n, EdgeColor c) {
        ColoredGraph g(n);
        if (c == EdgeColor::Gray) return g;
        for (int s = 0; s < slotCount(n); ++s) (c == EdgeColor::Blue ? g.blue_ : g.red_).set(s);
        return g;
    }

    /// Builds a graph from raw masks; throws if the masks overlap or
    /// reach beyond the slot range.
    static ColoredGraph fromMasks(int n, const EdgeMask& blue, const EdgeMask& red) {
        ColoredGraph g(n);
        if (!(blue & red).none()) throw ArgumentError("an edge slot is both blue and red");
        const auto hb = blue.highest(), hr = red.highest();
        const auto limit = static_cast<std::size_t>(slotCount(n));
        if ((hb != EdgeMask::kBits && hb >= limit) || (hr != EdgeMask::kBits && hr >= limit))
            throw ArgumentError("mask bit beyond slot count");
        g.blue_ = blue;
        g.red_ = red;
        return g;
    }

    int order() const { return n_; }
    int slots() const { return slotCount(n_); }
    const EdgeMask& blueMask() const { return blue_; }
    const EdgeMask& redMask() const { return red_; }

    EdgeColor color(int a, int b) const {
        checkPair(a, b);
        return slotColor(slotIndex(a, b));
    }
    EdgeColor slotColor(int s) const {
        if (blue_.test(static_cast<std::size_t>(s))) return EdgeColor::Blue;
        if (red_.test(static_cast<std::size_t>(s))) return EdgeColor::Red;
        return EdgeColor::Gray;
    }

    void setColor(int a, int b, EdgeColor c) {
        checkPair(a, b);
        setSlotColor(slotIndex(a, b), c);
    }
    void setSlotColor(int s, EdgeColor c) {
        const auto i = static_cast<std::size_t>(s);
        blue_.assign(i, c == EdgeColor::Blue);
        red_.assign(i, c == EdgeColor::Red);
    }

    int grayCount() const { return slots() - static_cast<int>(blue_.count() + red_.count()); }
    bool isConcrete() const { return grayCount() == 0; }

    std::vector<int> graySlots() const {
        std::vector<int> out;
        for (int s = 0; s < slots(); ++s)
            if (slotColor(s) == EdgeColor::Gray) out.push_back(s);
        return out;
    }

    VertexSet neighbors(int v, EdgeColor c) const {
        VertexSet out = 0;
        for (int u = 0; u < n_; ++u)
            if (u != v && slotColor(slotIndex(u, v)) == c) out |= bitOf(u);
        return out;
    }

    /// Exchanges blue and red.
    ColoredGraph colorSwapped() const {
        ColoredGraph g = *this;
        std::swap(g.blue_, g.red_);
        return g;
    }

    /// Relabels vertex v as perm[v].
    ColoredGraph permuted(std::span<const int> perm) const {
        if (static_cast<int>(perm.size()) != n_) throw ArgumentError("permutation size mismatch");
        ColoredGraph g(n_);
        for (int b = 1; b < n_; ++b)
            for (int a = 0; a < b; ++a) g.setSlotColor(slotIndex(perm[a], perm[b]), slotColor(slotIndex(a, b)));
        return g;
    }

    /// Induced subgraph on the listed vertices, renumbered in list order.
    ColoredGraph induced(std::span<const int> vertices) const {
        ColoredGraph g(static_cast<int>(vertices.size()));
        for (int j = 1; j < g.order(); ++j)
            for (int i = 0; i < j; ++i) g.setSlotColor(slotIndex(i, j), color(vertices[i], vertices[j]));
        return g;
    }

    std::string edgeString() const {
        std::string s(static_cast<std::size_t>(slots()), 'G');
        for (int i = 0; i < slots(); ++i) s[static_cast<std::size_t>(i)] = colorChar(slotColor(i));
        return s;
    }

    friend bool operator==(const ColoredGraph&, const ColoredGraph&) = default;

    /// Orders by vertex count, then lexicographically by edge string with
    /// B < R < G.
    friend std::strong_ordering operator<=>(const ColoredGraph& x, const ColoredGraph& y) {
        if (x.n_ != y.n_) return x.n_ <=> y.n_;
        const auto diff = (x.blue_ ^ y.blue_) | (x.red_ ^ y.red_);
        const auto s = diff.lowest();
        if (s == EdgeMask::kBits) return std::strong_ordering::equal;
        const int sx = static_cast<int>(x.slotColor(static_cast<int>(s)));
        const int sy = static_cast<int>(y.slotColor(static_cast<int>(s)));
        return sx <=> sy;
    }

    std::size_t hash() const { return blue_.hash() * 31 ^ red_.hash() ^ static_cast<std::size_t>(n_); }

private:
    void checkPair(int a, int b) const {
        if (a == b) throw ArgumentError("edge endpoints must differ");
        if (a < 0 || b < 0 || a >= n_ || b >= n_) throw ArgumentError("vertex out of range");
    }

    int n_ = 0;
    EdgeMask blue_;
    EdgeMask red_;
};

struct ColoredGraphHash {
    std::size_t operator()(const ColoredGraph& g) const { return g.hash(); }
};

/// Row-wise adjacency: blue[v] and red[v] are the blue and red neighbor
/// sets of v. Used by the search-heavy code paths.
struct Adjacency {
    int n = 0;
    std::array<VertexSet, 32> blue{};
    std::array<VertexSet, 32> red{};

    static Adjacency of(const ColoredGraph& g) {
        Adjacency adj;
        adj.n = g.order();
        const auto& bm = g.blueMask();
        const auto& rm = g.redMask();
        int s = 0;
        for (int b = 1; b < adj.n; ++b) {
            for (int a = 0; a < b; ++a, ++s) {
                if (bm.test(static_cast<std::size_t>(s))) {
                    adj.blue[a] |= bitOf(b);
                    adj.blue[b] |= bitOf(a);
                } else if (rm.test(static_cast<std::size_t>(s))) {
                    adj.red[a] |= bitOf(b);
                    adj.red[b] |= bitOf(a);
                }
            }
        }
        return adj;
    }

    ColoredGraph toGraph() const {
        EdgeMask bm, rm;
        int s = 0;
        for (int b = 1; b < n; ++b) {
            for (int a = 0; a < b; ++a, ++s) {
                if (blue[b] & bitOf(a)) bm.set(static_cast<std::size_t>(s));
                else if (red[b] & bitOf(a)) rm.set(static_cast<std::size_t>(s));
            }
        }
        return ColoredGraph::fromMasks(n, bm, rm);
    }

    const std::array<VertexSet, 32>& rows(EdgeColor c) const { return c == EdgeColor::Blue ? blue : red; }
    VertexSet all() const { return firstVertices(n); }
    VertexSet gray(int v) const { return all() & ~bitOf(v) & ~blue[v] & ~red[v]; }
};

namespace detail {

inline bool cliqueIn(const std::array<VertexSet, 32>& rows, VertexSet candidates, int need) {
    if (need <= 0) return true;
    if (popcount(candidates) < need) return false;
    if (need == 1) return candidates != 0;
    while (candidates != 0) {
        const int v = lowestVertex(candidates);
        candidates &= candidates - 1;
        if (cliqueIn(rows, candidates & rows[v], need - 1)) return true;
        if (popcount(candidates) < need) return false;
    }
    return false;
}

inline bool findCliqueIn(const std::array<VertexSet, 32>& rows, VertexSet candidates, int need, VertexSet& chosen) {
    if (need == 0) return true;
    while (popcount(candidates) >= need) {
        const int v = lowestVertex(candidates);
        candidates &= candidates - 1;
        chosen |= bitOf(v);
        if (findCliqueIn(rows, candidates & rows[v], need - 1, chosen)) return true;
        chosen &= ~bitOf(v);
    }
    return false;
}

inline std::uint64_t countCliquesIn(const std::array<VertexSet, 32>& rows, VertexSet candidates, int need) {
    if (need == 0) return 1;
    if (need == 1) return static_cast<std::uint64_t>(popcount(candidates));
    std::uint64_t total = 0;
    while (popcount(candidates) >= need) {
        const int v = lowestVertex(candidates);
        candidates &= candidates - 1;
        total += countCliquesIn(rows, candidates & rows[v], need - 1);
    }
    return total;
}

inline void checkCliqueArgs(EdgeColor color, int k) {
    if (color == EdgeColor::Gray) throw ArgumentError("clique color must be Blue or Red");
    if (k <= 0) throw ArgumentError("clique size must be >= 1");
}

}  // namespace detail

/// True iff some k vertices of `within` are pairwise joined in `color`.
inline bool hasMonoClique(const Adjacency& adj, EdgeColor color, int k, VertexSet within) {
    detail::checkCliqueArgs(color, k);
    return detail::cliqueIn(adj.rows(color), within, k);
}

inline bool hasMonoClique(const ColoredGraph& g, EdgeColor color, int k) {
    const auto adj = Adjacency::of(g);
    return hasMonoClique(adj, color, k, adj.all());
}

/// First monochromatic k-clique in lexicographic vertex order, if any.
inline std::optional<VertexSet> findMonoClique(const Adjacency& adj, EdgeColor color, int k) {
    detail::checkCliqueArgs(color, k);
    VertexSet chosen = 0;
    if (detail::findCliqueIn(adj.rows(color), adj.all(), k, chosen)) return chosen;
    return std::nullopt;
}

/// Number of k-subsets whose internal edges all have `color`. Every vertex
/// is a 1-clique of both colors; gray edges never count.
inline std::uint64_t countMonoCliques(const Adjacency& adj, EdgeColor color, int k) {
    detail::checkCliqueArgs(color, k);
    return detail::countCliquesIn(adj.rows(color), adj.all(), k);
}

inline std::uint64_t countMonoCliques(const ColoredGraph& g, EdgeColor color, int k) {
    return countMonoCliques(Adjacency::of(g), color, k);
}

inline bool satisfiesRamseyProperty(const Adjacency& adj, const CliqueParams& params) {
    return !hasMonoClique(adj, EdgeColor::Blue, params.blueBound, adj.all()) &&
           !hasMonoClique(adj, EdgeColor::Red, params.redBound, adj.all());
}

inline bool satisfiesRamseyProperty(const ColoredGraph& g, const CliqueParams& params) {
    params.validate();
    if (!g.isConcrete()) throw StateError("Ramsey property is undefined on a graph with gray edges");
    return satisfiesRamseyProperty(Adjacency::of(g), params);
}

// ---------------------------------------------------------------------------
// Colored-graph text format: "<n> <slot colors>", one graph per line.

inline std::string writeGraph(const ColoredGraph& g) {
    return std::to_string(g.order()) + " " + g.edgeString();
}

inline ColoredGraph parseGraph(std::string_view text, std::size_t lineNo = 1) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
    std::size_t pos = 0;
    int n = 0;
    bool digits = false;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        n = n * 10 + (text[pos] - '0');
        if (n > kMaxVertices) throw ParseError("vertex count exceeds 31", lineNo, pos);
        digits = true;
        ++pos;
    }
    if (!digits) throw ParseError("expected decimal vertex count", lineNo, pos);
    if (n < 1) throw ParseError("vertex count must be at least 1", lineNo, 0);
    if (pos >= text.size() || text[pos] != ' ') throw ParseError("expected a single space after vertex count", lineNo, pos);
    ++pos;
    const auto body = text.substr(pos);
    if (body.size() != static_cast<std::size_t>(slotCount(n)))
        throw ParseError("length mismatch: expected " + std::to_string(slotCount(n)) + " edge characters, got " +
                             std::to_string(body.size()),
                         lineNo, pos);
    ColoredGraph g(n);
    for (std::size_t i = 0; i < body.size(); ++i) {
        auto c = colorFromChar(body[i]);
        if (!c) throw ParseError(std::string("invalid edge color '") + body[i] + "'", lineNo, pos + i);
        g.setSlotColor(static_cast<int>(i), *c);
    }
    return g;
}

/// Reads every non-empty, non-comment line as a graph.
inline std::vector<ColoredGraph> readGraphList(std::istream& in) {
    std::vector<ColoredGraph> out;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.push_back(parseGraph(line, lineNo));
    }
    return out;
}

inline void writeGraphList(std::ostream& out, std::span<const ColoredGraph> graphs) {
    for (const auto& g : graphs) out << writeGraph(g) << '\n';
}

}  // namespace ramsey

template <>
struct std::hash<ramsey::ColoredGraph> {
    std::size_t operator()(const ramsey::ColoredGraph& g) const { return g.hash(); }
};
