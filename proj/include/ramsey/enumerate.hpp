#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "ramsey/canon.hpp"
#include "ramsey/graph.hpp"
#include "ramsey/parallel.hpp"

namespace ramsey {

/// All R(p,q,k)-graphs up to isomorphism, as sorted canonical forms.
struct GraphClassSet {
    CliqueParams params;
    int k = 0;
    std::vector<ColoredGraph> graphs;

    std::size_t size() const { return graphs.size(); }
    bool empty() const { return graphs.empty(); }
    bool contains(const ColoredGraph& canon) const {
        return std::binary_search(graphs.begin(), graphs.end(), canon);
    }
};

/// The class at k = 1: the single vertex, unless a bound of 1 forbids it.
inline GraphClassSet singleVertexClass(const CliqueParams& params) {
    params.validate();
    GraphClassSet set{params, 1, {}};
    if (params.blueBound >= 2 && params.redBound >= 2) set.graphs.push_back(ColoredGraph(1));
    return set;
}

struct ExtensionOptions {
    int workers = 1;
    /// Spill worker-local dedup sets to sorted run files once they exceed
    /// spillThreshold entries.
    bool spill = false;
    std::size_t spillThreshold = 4'000'000;
    std::filesystem::path spillDir;
};

namespace detail {

/// Lexicographic edge-string order on packed blue masks of concrete graphs:
/// at the first differing slot the graph with a blue edge is smaller.
template <std::size_t W>
struct PackedLess {
    bool operator()(const BitMask<W>& x, const BitMask<W>& y) const {
        for (std::size_t i = 0; i < W; ++i) {
            const std::uint64_t d = x.words()[i] ^ y.words()[i];
            if (d != 0) return (x.words()[i] & d & (~d + 1)) != 0;
        }
        return false;
    }
};

template <std::size_t W>
ColoredGraph unpackConcrete(int n, const BitMask<W>& blue) {
    ColoredGraph g = ColoredGraph::complete(n, EdgeColor::Red);
    for (std::size_t w = 0; w < W; ++w) {
        std::uint64_t bits = blue.words()[w];
        while (bits != 0) {
            const int s = static_cast<int>(w * 64) + std::countr_zero(bits);
            bits &= bits - 1;
            g.setSlotColor(s, EdgeColor::Blue);
        }
    }
    return g;
}

/// Depth-first enumeration of all blue/red colorings of the edges joining a
/// new vertex to `adj`, pruned as soon as the new vertex lies in a blue
/// p-clique or red q-clique. Calls emit(blueNeighbors) for each survivor.
template <typename Emit>
void forEachValidExtension(const Adjacency& adj, const CliqueParams& params, Emit&& emit) {
    const int k = adj.n;
    const int needBlue = params.blueBound - 2;
    const int needRed = params.redBound - 2;
    auto recurse = [&](auto&& self, int u, VertexSet blueSet, VertexSet redSet) -> void {
        if (u == k) {
            emit(blueSet);
            return;
        }
        if (!detail::cliqueIn(adj.blue, blueSet & adj.blue[u], needBlue))
            self(self, u + 1, blueSet | bitOf(u), redSet);
        if (!detail::cliqueIn(adj.red, redSet & adj.red[u], needRed))
            self(self, u + 1, blueSet, redSet | bitOf(u));
    };
    if (params.blueBound < 2 || params.redBound < 2) return;
    recurse(recurse, 0, 0, 0);
}

inline Adjacency withNewVertex(const Adjacency& adj, VertexSet blueNeighbors) {
    Adjacency out = adj;
    const int k = adj.n;
    out.n = k + 1;
    const VertexSet redNeighbors = adj.all() & ~blueNeighbors;
    out.blue[k] = blueNeighbors;
    out.red[k] = redNeighbors;
    forEachVertex(blueNeighbors, [&](int u) { out.blue[u] |= bitOf(k); });
    forEachVertex(redNeighbors, [&](int u) { out.red[u] |= bitOf(k); });
    return out;
}

template <std::size_t W>
void writeRun(const std::filesystem::path& file, const std::vector<BitMask<W>>& keys) {
    std::ofstream out(file, std::ios::binary);
    for (const auto& key : keys) out.write(reinterpret_cast<const char*>(key.words().data()), sizeof(std::uint64_t) * W);
    if (!out) throw ResourceError("failed to write spill file " + file.string());
}

/// k-way merge of sorted run files plus in-memory sorted vectors, with
/// duplicates removed.
template <std::size_t W>
std::vector<BitMask<W>> mergeRuns(const std::vector<std::filesystem::path>& runs,
                                  std::vector<std::vector<BitMask<W>>> memory) {
    struct Source {
        std::ifstream file;
        const std::vector<BitMask<W>>* vec = nullptr;
        std::size_t pos = 0;
        BitMask<W> current;
        bool next() {
            if (vec != nullptr) {
                if (pos >= vec->size()) return false;
                current = (*vec)[pos++];
                return true;
            }
            return static_cast<bool>(
                file.read(reinterpret_cast<char*>(current.words().data()), sizeof(std::uint64_t) * W));
        }
    };
    std::vector<Source> sources(runs.size() + memory.size());
    for (std::size_t i = 0; i < runs.size(); ++i) sources[i].file.open(runs[i], std::ios::binary);
    for (std::size_t i = 0; i < memory.size(); ++i) sources[runs.size() + i].vec = &memory[i];
    PackedLess<W> less;
    auto greater = [&](std::size_t a, std::size_t b) { return less(sources[b].current, sources[a].current); };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(greater)> heap(greater);
    for (std::size_t i = 0; i < sources.size(); ++i)
        if (sources[i].next()) heap.push(i);
    std::vector<BitMask<W>> out;
    while (!heap.empty()) {
        const std::size_t i = heap.top();
        heap.pop();
        if (out.empty() || !(out.back() == sources[i].current)) out.push_back(sources[i].current);
        if (sources[i].next()) heap.push(i);
    }
    return out;
}

template <std::size_t W>
GraphClassSet extendPacked(const GraphClassSet& base, const ExtensionOptions& options) {
    const int k = base.k;
    const int workers = std::max(1, options.workers);
    using Key = BitMask<W>;
    std::vector<std::unordered_set<Key, BitMaskHash<W>>> local(static_cast<std::size_t>(workers));
    std::vector<Canonizer> canonizers(static_cast<std::size_t>(workers));
    std::vector<std::vector<std::filesystem::path>> runs(static_cast<std::size_t>(workers));

    auto flush = [&](int worker) {
        auto& set = local[static_cast<std::size_t>(worker)];
        std::vector<Key> keys(set.begin(), set.end());
        set.clear();
        std::sort(keys.begin(), keys.end(), PackedLess<W>{});
        auto& mine = runs[static_cast<std::size_t>(worker)];
        const auto file = options.spillDir / ("spill_k" + std::to_string(k + 1) + "_w" + std::to_string(worker) + "_" +
                                              std::to_string(mine.size()) + ".bin");
        writeRun(file, keys);
        mine.push_back(file);
    };

    parallelFor(
        base.graphs.size(), workers,
        [&](int worker, std::size_t index) {
            const auto adj = Adjacency::of(base.graphs[index]);
            auto& canonizer = canonizers[static_cast<std::size_t>(worker)];
            auto& set = local[static_cast<std::size_t>(worker)];
            forEachValidExtension(adj, base.params, [&](VertexSet blueNeighbors) {
                const auto extended = withNewVertex(adj, blueNeighbors);
                canonizer.run(extended);
                set.insert(canonizer.canonicalBlueSlots<W>());
            });
            if (options.spill && set.size() >= options.spillThreshold) flush(worker);
        },
        16);

    std::vector<Key> merged;
    bool anyRuns = false;
    for (const auto& r : runs) anyRuns = anyRuns || !r.empty();
    if (anyRuns) {
        std::vector<std::filesystem::path> all;
        for (const auto& r : runs) all.insert(all.end(), r.begin(), r.end());
        std::vector<std::vector<Key>> memory;
        for (auto& set : local) {
            std::vector<Key> keys(set.begin(), set.end());
            std::sort(keys.begin(), keys.end(), PackedLess<W>{});
            memory.push_back(std::move(keys));
            set.clear();
        }
        merged = mergeRuns<W>(all, std::move(memory));
        for (const auto& f : all) std::filesystem::remove(f);
    } else {
        std::size_t total = 0;
        for (const auto& set : local) total += set.size();
        merged.reserve(total);
        for (auto& set : local) {
            merged.insert(merged.end(), set.begin(), set.end());
            set = {};
        }
        std::sort(merged.begin(), merged.end(), PackedLess<W>{});
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    }

    GraphClassSet out{base.params, k + 1, {}};
    out.graphs.reserve(merged.size());
    for (const auto& key : merged) out.graphs.push_back(unpackConcrete(k + 1, key));
    return out;
}

}  // namespace detail

/// All R(p,q,k+1)-graphs up to isomorphism, obtained by coloring the k new
/// edges of every base graph, keeping the colorings that satisfy the
/// Ramsey property, canonicalizing and deduplicating. Only cliques through
/// the new vertex are checked since base graphs already satisfy the
/// property.
inline GraphClassSet extendByOneVertex(const GraphClassSet& base, const ExtensionOptions& options = {}) {
    const int n = base.k + 1;
    if (n > kMaxVertices) throw ArgumentError("cannot extend beyond 31 vertices");
    if (options.spill && options.spillDir.empty()) throw ArgumentError("spill requires a spill directory");
    if (n <= 11) return detail::extendPacked<1>(base, options);
    if (n <= 20) return detail::extendPacked<3>(base, options);
    return detail::extendPacked<8>(base, options);
}

struct EnumerationOptions {
    ExtensionOptions extension;
    /// Abort once a level would have more graphs than this (0 = no limit).
    std::size_t maxClassSize = 0;
    /// Called after each completed level, e.g. to persist it.
    std::function<void(const GraphClassSet&)> onLevel;
    /// Supplies an already computed level, if any (for resuming).
    std::function<std::optional<GraphClassSet>(int k)> loadLevel;
};

struct EnumerationResult {
    std::vector<GraphClassSet> levels;  // levels[i] has k = i + 1
    bool complete = true;
    std::string abortReason;

    std::vector<std::size_t> sizes;  // survives levels being dropped

    std::vector<std::size_t> counts() const { return sizes; }
};

/// Classes R(p,q,1), ..., R(p,q,kMax). Stops early (complete = true) once a
/// level is empty, recording that empty level. With keepAll = false only
/// the last two levels are retained in memory.
inline EnumerationResult enumerateClass(const CliqueParams& params, int kMax, const EnumerationOptions& options = {},
                                        bool keepAll = true) {
    params.validate();
    if (kMax < 1) throw ArgumentError("kMax must be >= 1");
    EnumerationResult result;
    auto finishLevel = [&](GraphClassSet level) {
        if (options.onLevel) options.onLevel(level);
        result.sizes.push_back(level.size());
        if (!keepAll && result.levels.size() >= 2) result.levels[result.levels.size() - 2].graphs = {};
        result.levels.push_back(std::move(level));
    };
    std::optional<GraphClassSet> first;
    if (options.loadLevel) first = options.loadLevel(1);
    finishLevel(first ? std::move(*first) : singleVertexClass(params));
    for (int k = 2; k <= kMax; ++k) {
        const auto& prev = result.levels.back();
        if (prev.empty()) break;
        std::optional<GraphClassSet> loaded;
        if (options.loadLevel) loaded = options.loadLevel(k);
        GraphClassSet next = loaded ? std::move(*loaded) : extendByOneVertex(prev, options.extension);
        if (options.maxClassSize != 0 && next.size() > options.maxClassSize) {
            result.complete = false;
            result.abortReason = "class R(" + std::to_string(params.blueBound) + "," +
                                 std::to_string(params.redBound) + "," + std::to_string(k) + ") has " +
                                 std::to_string(next.size()) + " graphs, above the configured limit";
            break;
        }
        finishLevel(std::move(next));
    }
    return result;
}

struct RamseyNumberResult {
    std::optional<int> value;  // empty when the cap was reached
    GraphClassSet witnessClass;  // nonempty class at value - 1
};

/// Least k <= kCap with an empty class R(p,q,k).
inline RamseyNumberResult ramseyNumberByEnumeration(int p, int q, int kCap, const EnumerationOptions& options = {}) {
    if (p < 2 || q < 2) throw ArgumentError("ramseyNumberByEnumeration requires p, q >= 2");
    auto run = enumerateClass({p, q}, kCap, options, false);
    RamseyNumberResult out;
    if (!run.levels.empty() && run.levels.back().empty()) {
        out.value = run.levels.back().k;
        if (run.levels.size() >= 2) out.witnessClass = run.levels[run.levels.size() - 2];
    } else if (!run.levels.empty()) {
        out.witnessClass = run.levels.back();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Persistence: one sorted colored-graph file per k plus a counts summary.

inline std::filesystem::path classFile(const std::filesystem::path& dir, int k) {
    return dir / ("k" + std::to_string(k) + ".txt");
}

inline void writeClassFile(const std::filesystem::path& dir, const GraphClassSet& set) {
    std::filesystem::create_directories(dir);
    const auto target = classFile(dir, set.k);
    const auto tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << "# class " << set.params.blueBound << ' ' << set.params.redBound << ' ' << set.k << ' '
            << set.size() << '\n';
        writeGraphList(out, set.graphs);
        if (!out) throw ResourceError("failed to write " + tmp);
    }
    std::filesystem::rename(tmp, target);
}

/// Reads k<k>.txt from dir, if present. The header's params must match.
inline std::optional<GraphClassSet> readClassFile(const std::filesystem::path& dir, const CliqueParams& params, int k) {
    const auto file = classFile(dir, k);
    std::ifstream in(file);
    if (!in) return std::nullopt;
    std::string header;
    std::getline(in, header);
    int p = 0, q = 0, kk = 0;
    std::size_t count = 0;
    if (std::sscanf(header.c_str(), "# class %d %d %d %zu", &p, &q, &kk, &count) != 4)
        throw ParseError("missing class header in " + file.string(), 1, 0);
    if (p != params.blueBound || q != params.redBound || kk != k)
        throw ArgumentError("class file " + file.string() + " holds different parameters");
    GraphClassSet set{params, k, readGraphList(in)};
    if (set.size() != count) throw ParseError("class file " + file.string() + " is truncated", 1, 0);
    return set;
}

inline void writeCountsFile(const std::filesystem::path& dir, const CliqueParams& params,
                            const std::vector<std::size_t>& counts) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "counts.txt");
    out << "# p q k count\n";
    for (std::size_t i = 0; i < counts.size(); ++i)
        out << params.blueBound << ' ' << params.redBound << ' ' << i + 1 << ' ' << counts[i] << '\n';
}

/// enumerateClass with every level persisted under dir and existing level
/// files reused.
inline EnumerationResult enumerateToDirectory(const CliqueParams& params, int kMax, const std::filesystem::path& dir,
                                              EnumerationOptions options = {}, bool keepAll = false) {
    options.onLevel = [&dir, prev = options.onLevel](const GraphClassSet& level) {
        if (!std::filesystem::exists(classFile(dir, level.k))) writeClassFile(dir, level);
        if (prev) prev(level);
    };
    options.loadLevel = [&dir, &params](int k) { return readClassFile(dir, params, k); };
    if (options.extension.spill && options.extension.spillDir.empty()) options.extension.spillDir = dir;
    auto result = enumerateClass(params, kMax, options, keepAll);
    writeCountsFile(dir, params, result.counts());
    return result;
}

/// Loads a persisted class, enumerating and persisting it first if needed.
inline GraphClassSet loadOrEnumerate(const CliqueParams& params, int k, const std::filesystem::path& dir,
                                     const EnumerationOptions& options = {}) {
    if (auto set = readClassFile(dir, params, k)) return *set;
    auto run = enumerateToDirectory(params, k, dir, options, false);
    if (static_cast<int>(run.levels.size()) >= k) return run.levels[static_cast<std::size_t>(k - 1)];
    return GraphClassSet{params, k, {}};
}

}  // namespace ramsey
