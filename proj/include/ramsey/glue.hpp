#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ramsey/canon.hpp"
#include "ramsey/cnf.hpp"
#include "ramsey/graph.hpp"

namespace ramsey {

// ---------------------------------------------------------------------------
// Simplicity heuristics

inline constexpr int kMaxCliqueIndex = 5;

/// Blue and red k-clique counts for k = 1..5 (index 0 unused), over
/// colored edges only.
struct CliqueCounts {
    std::array<std::uint64_t, kMaxCliqueIndex + 1> blue{};
    std::array<std::uint64_t, kMaxCliqueIndex + 1> red{};

    static CliqueCounts of(const ColoredGraph& g) {
        const auto adj = Adjacency::of(g);
        CliqueCounts c;
        for (int k = 1; k <= kMaxCliqueIndex; ++k) {
            c.blue[k] = countMonoCliques(adj, EdgeColor::Blue, k);
            c.red[k] = countMonoCliques(adj, EdgeColor::Red, k);
        }
        return c;
    }
};

/// Average clique counts per graph over a class.
struct CliqueAverages {
    std::array<double, kMaxCliqueIndex + 1> bBar{};
    std::array<double, kMaxCliqueIndex + 1> rBar{};
    std::size_t classSize = 0;

    static CliqueAverages of(std::span<const ColoredGraph> graphs) {
        CliqueAverages avg;
        avg.classSize = graphs.size();
        std::array<std::uint64_t, kMaxCliqueIndex + 1> bSum{}, rSum{};
        for (const auto& g : graphs) {
            const auto c = CliqueCounts::of(g);
            for (int k = 1; k <= kMaxCliqueIndex; ++k) {
                bSum[k] += c.blue[k];
                rSum[k] += c.red[k];
            }
        }
        if (graphs.empty()) return avg;
        for (int k = 1; k <= kMaxCliqueIndex; ++k) {
            avg.bBar[k] = static_cast<double>(bSum[k]) / static_cast<double>(graphs.size());
            avg.rBar[k] = static_cast<double>(rSum[k]) / static_cast<double>(graphs.size());
        }
        return avg;
    }
};

/// Which side of a gluing problem a generalization occupies: Left holds the
/// vertices 0..d-1 (the neighbor side), Right the rest.
enum class Side { Left, Right };

/// The five transverse configurations: blue 1+3, blue 2+2, red 2+3, red 3+2
/// and red 4+1 vertices, each weighted by 2^-(transverse edges).
template <typename L, typename R>
double simplicityTerms(const L& b, const L& r, const R& bp, const R& rp) {
    return static_cast<double>(b[1]) * static_cast<double>(bp[3]) / 8.0 +
           static_cast<double>(b[2]) * static_cast<double>(bp[2]) / 16.0 +
           static_cast<double>(r[2]) * static_cast<double>(rp[3]) / 64.0 +
           static_cast<double>(r[3]) * static_cast<double>(rp[2]) / 64.0 +
           static_cast<double>(r[4]) * static_cast<double>(rp[1]) / 16.0;
}

inline double simplicityPair(const CliqueCounts& left, const CliqueCounts& right) {
    return simplicityTerms(left.blue, left.red, right.blue, right.red);
}

inline double simplicityPair(const ColoredGraph& gStar, const ColoredGraph& hStar) {
    return simplicityPair(CliqueCounts::of(gStar), CliqueCounts::of(hStar));
}

/// Simplicity of gluing g with an average member of the counterpart class.
inline double simplicityOneSided(const CliqueCounts& g, const CliqueAverages& counterpart, Side side) {
    if (side == Side::Left) return simplicityTerms(g.blue, g.red, counterpart.bBar, counterpart.rBar);
    return simplicityTerms(counterpart.bBar, counterpart.rBar, g.blue, g.red);
}

inline double simplicityOneSided(const ColoredGraph& g, const CliqueAverages& counterpart, Side side) {
    return simplicityOneSided(CliqueCounts::of(g), counterpart, side);
}

/// Sum over clauses of 2^-|c|.
inline double simplicityCnf(const Cnf& cnf) {
    double total = 0.0;
    for (const auto& clause : cnf.clauses) total += std::ldexp(1.0, -static_cast<int>(clause.size()));
    return total;
}

// ---------------------------------------------------------------------------
// Gluing problems

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// gStar occupies vertices 0..d-1 and hStar vertices d..n-1 of the combined
/// graph; edges between the two parts are transverse.
struct GlueProblem {
    ColoredGraph gStar;
    ColoredGraph hStar;
    CliqueParams params{4, 5};

    int order() const { return gStar.order() + hStar.order(); }

    /// Stable content hash of both canonical representations and params.
    std::string id() const {
        const std::string text = std::to_string(params.blueBound) + "," + std::to_string(params.redBound) + "|" +
                                 writeGraph(canonicalize(gStar).canon) + "|" + writeGraph(canonicalize(hStar).canon);
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
        return buf;
    }

    /// Combined partial coloring; transverse edges are gray.
    ColoredGraph combined() const {
        const int d = gStar.order();
        ColoredGraph g(order());
        for (int b = 1; b < d; ++b)
            for (int a = 0; a < b; ++a) g.setColor(a, b, gStar.color(a, b));
        for (int b = 1; b < hStar.order(); ++b)
            for (int a = 0; a < b; ++a) g.setColor(d + a, d + b, hStar.color(a, b));
        return g;
    }
};

namespace detail {

template <typename F>
void forEachSubset(int n, int size, F&& f) {
    std::vector<int> subset(static_cast<std::size_t>(size));
    auto rec = [&](auto&& self, int start, int depth) -> void {
        if (depth == size) {
            f(subset);
            return;
        }
        for (int v = start; v <= n - (size - depth); ++v) {
            subset[static_cast<std::size_t>(depth)] = v;
            self(self, v + 1, depth + 1);
        }
    };
    if (size >= 0 && size <= n) rec(rec, 0, 0);
}

}  // namespace detail

/// Clique clauses over all vertices (no blue p-subset, no red q-subset)
/// followed by unit clauses fixing every colored edge of both sides.
inline Cnf encodeGlue(const GlueProblem& problem) {
    problem.params.validate();
    const int n = problem.order();
    if (n > kMaxVertices) throw ArgumentError("gluing problem exceeds 31 vertices");
    Cnf cnf;
    cnf.varCount = slotCount(n);
    auto cliqueClauses = [&](int size, int sign) {
        detail::forEachSubset(n, size, [&](const std::vector<int>& s) {
            Clause c;
            c.reserve(static_cast<std::size_t>(size * (size - 1) / 2));
            for (int j = 1; j < size; ++j)
                for (int i = 0; i < j; ++i) c.push_back(sign * edgeVariable(s[i], s[j]));
            if (!c.empty()) cnf.clauses.push_back(std::move(c));
        });
    };
    cliqueClauses(problem.params.blueBound, -1);
    cliqueClauses(problem.params.redBound, 1);
    const auto g = problem.combined();
    for (int s = 0; s < g.slots(); ++s) {
        const auto c = g.slotColor(s);
        if (c == EdgeColor::Blue) cnf.clauses.push_back({s + 1});
        else if (c == EdgeColor::Red) cnf.clauses.push_back({-(s + 1)});
    }
    return cnf;
}

struct Conflict {
    std::size_t clause = 0;  // index of a falsified clause in the input
};

struct Propagated {
    Cnf cnf;                     // remaining clauses, false literals removed
    std::vector<Literal> fixed;  // forced literals, sorted by variable
};

using PropagationResult = std::variant<Propagated, Conflict>;

/// Unit propagation to fixpoint.
inline PropagationResult unitPropagate(const Cnf& cnf) {
    std::vector<signed char> value(static_cast<std::size_t>(cnf.varCount) + 1, 0);
    auto litValue = [&](Literal l) -> int {
        const int v = value[static_cast<std::size_t>(std::abs(l))];
        return l > 0 ? v : -v;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
            const auto& clause = cnf.clauses[i];
            int unassigned = 0;
            Literal last = 0;
            bool satisfied = false;
            for (Literal l : clause) {
                const int v = litValue(l);
                if (v > 0) {
                    satisfied = true;
                    break;
                }
                if (v == 0) {
                    ++unassigned;
                    last = l;
                }
            }
            if (satisfied) continue;
            if (unassigned == 0) return Conflict{i};
            if (unassigned == 1) {
                value[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
                changed = true;
            }
        }
    }
    Propagated out;
    out.cnf.varCount = cnf.varCount;
    for (const auto& clause : cnf.clauses) {
        Clause reduced;
        bool satisfied = false;
        for (Literal l : clause) {
            const int v = litValue(l);
            if (v > 0) {
                satisfied = true;
                break;
            }
            if (v == 0) reduced.push_back(l);
        }
        if (!satisfied) out.cnf.clauses.push_back(std::move(reduced));
    }
    for (int v = 1; v <= cnf.varCount; ++v)
        if (value[static_cast<std::size_t>(v)] != 0) out.fixed.push_back(value[static_cast<std::size_t>(v)] > 0 ? v : -v);
    return out;
}

/// Colored graph read off a full assignment (model[v] for v = 1..varCount).
inline ColoredGraph decodeModel(int n, const std::vector<bool>& model) {
    ColoredGraph g(n);
    for (int s = 0; s < g.slots(); ++s)
        g.setSlotColor(s, model[static_cast<std::size_t>(s + 1)] ? EdgeColor::Blue : EdgeColor::Red);
    return g;
}

}  // namespace ramsey
