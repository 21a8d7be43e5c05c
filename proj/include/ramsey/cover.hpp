#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ramsey/canon.hpp"
#include "ramsey/enumerate.hpp"
#include "ramsey/error.hpp"
#include "ramsey/glue.hpp"
#include "ramsey/graph.hpp"
#include "ramsey/parallel.hpp"

namespace ramsey {

inline constexpr int kMaxInstantiationGray = 20;

/// A partially colored graph standing for every coloring of its gray edges.
struct Generalization {
    ColoredGraph rep;

    int grayCount() const { return rep.grayCount(); }
    friend bool operator==(const Generalization&, const Generalization&) = default;
};

using CanonSet = std::unordered_set<ColoredGraph, ColoredGraphHash>;

/// Canonical forms with a memo table; one instance per thread.
class CanonCache {
public:
    explicit CanonCache(std::size_t capacity = 1u << 20) : capacity_(capacity) {}

    const ColoredGraph& canon(const ColoredGraph& g) {
        if (auto it = memo_.find(g); it != memo_.end()) return it->second;
        if (memo_.size() >= capacity_) memo_.clear();
        canonizer_.run(Adjacency::of(g));
        return memo_.emplace(g, canonizer_.canonicalGraph()).first->second;
    }

private:
    std::size_t capacity_;
    Canonizer canonizer_;
    std::unordered_map<ColoredGraph, ColoredGraph, ColoredGraphHash> memo_;
};

/// All 2^grayCount labeled colorings of the gray edges.
inline std::vector<ColoredGraph> concreteInstantiations(const ColoredGraph& rep) {
    const auto gray = rep.graySlots();
    if (static_cast<int>(gray.size()) > kMaxInstantiationGray)
        throw ResourceError("generalization has " + std::to_string(gray.size()) + " gray edges, above the limit of " +
                            std::to_string(kMaxInstantiationGray));
    std::vector<ColoredGraph> out;
    out.reserve(std::size_t{1} << gray.size());
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << gray.size()); ++bits) {
        ColoredGraph g = rep;
        for (std::size_t i = 0; i < gray.size(); ++i)
            g.setSlotColor(gray[i], ((bits >> i) & 1u) ? EdgeColor::Red : EdgeColor::Blue);
        out.push_back(std::move(g));
    }
    return out;
}

/// Distinct canonical forms of the instantiations, sorted.
inline std::vector<ColoredGraph> instantiations(const Generalization& g, CanonCache* cache = nullptr) {
    CanonCache local(1u << 12);
    CanonCache& c = cache ? *cache : local;
    std::vector<ColoredGraph> out;
    for (const auto& concrete : concreteInstantiations(g.rep)) out.push_back(c.canon(concrete));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

enum class EdgeSelection { Random, Fastest };
enum class GenSelection { GreedyCover, Mixed };

struct StrategyConfig {
    EdgeSelection edgeSelection = EdgeSelection::Random;
    GenSelection genSelection = GenSelection::GreedyCover;
    double mixedC = 1.0;
    std::size_t sampleSize = 0;  // 0 = every uncovered graph
    int maxGray = 4;
    /// Which side of the gluing the covered class sits on (for simplicity).
    Side side = Side::Left;
    /// Novelty threshold ceil(2^(n-3)) with n the gray count before adding
    /// the new gray edge; false uses the count after.
    bool thresholdBeforeAdd = true;
    std::uint64_t seed = 1;
    int workers = 1;

    bool needsCounterpart() const {
        return edgeSelection == EdgeSelection::Fastest || genSelection == GenSelection::Mixed;
    }

    void validate() const {
        if (genSelection == GenSelection::Mixed && !(mixedC > 0.0))
            throw ArgumentError("mixed selection needs c > 0");
        if (maxGray < 0 || maxGray > kMaxInstantiationGray)
            throw ArgumentError("maxGray must lie in [0, " + std::to_string(kMaxInstantiationGray) + "]");
    }

    /// Single-token description, e.g. "fastest/mixed-0.5/sample-all/left".
    std::string describe() const {
        std::ostringstream out;
        out << (edgeSelection == EdgeSelection::Fastest ? "fastest" : "random") << '/';
        if (genSelection == GenSelection::Mixed) out << "mixed-" << mixedC;
        else out << "greedy";
        out << "/sample-";
        if (sampleSize == 0) out << "all";
        else out << sampleSize;
        out << '/' << (side == Side::Left ? "left" : "right");
        if (!thresholdBeforeAdd) out << "/after";
        return out.str();
    }

    /// Inverse of describe(); seed, maxGray and workers are not part of it.
    static StrategyConfig parse(const std::string& text) {
        StrategyConfig cfg;
        std::vector<std::string> parts;
        std::stringstream in(text);
        for (std::string part; std::getline(in, part, '/');) parts.push_back(part);
        if (parts.size() < 4) throw ArgumentError("malformed strategy '" + text + "'");
        if (parts[0] == "fastest") cfg.edgeSelection = EdgeSelection::Fastest;
        else if (parts[0] != "random") throw ArgumentError("unknown edge selection '" + parts[0] + "'");
        if (parts[1].rfind("mixed-", 0) == 0) {
            cfg.genSelection = GenSelection::Mixed;
            cfg.mixedC = std::stod(parts[1].substr(6));
        } else if (parts[1] != "greedy") {
            throw ArgumentError("unknown generalization selection '" + parts[1] + "'");
        }
        if (parts[2].rfind("sample-", 0) != 0) throw ArgumentError("malformed sample size in '" + text + "'");
        const auto sample = parts[2].substr(7);
        cfg.sampleSize = sample == "all" ? 0 : static_cast<std::size_t>(std::stoull(sample));
        if (parts[3] == "right") cfg.side = Side::Right;
        else if (parts[3] != "left") throw ArgumentError("unknown side '" + parts[3] + "'");
        if (parts.size() > 4) {
            if (parts[4] != "after") throw ArgumentError("unknown strategy suffix '" + parts[4] + "'");
            cfg.thresholdBeforeAdd = false;
        }
        return cfg;
    }
};

struct Cover {
    CliqueParams params;
    int k = 0;
    std::vector<Generalization> gens;
    int maxGray = 0;
    std::uint64_t seed = 0;
    std::string strategy = "singleton";

    std::size_t size() const { return gens.size(); }
};

/// Cover made of one 0-gray generalization per class member.
inline Cover singletonCover(const GraphClassSet& cls) {
    Cover cover{cls.params, cls.k, {}, 0, 0, "singleton"};
    for (const auto& g : cls.graphs) cover.gens.push_back({g});
    return cover;
}

inline std::uint64_t noveltyThreshold(int gray) {
    return gray <= 3 ? 1 : std::uint64_t{1} << (gray - 3);
}

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// A generalization under construction with its labeled instantiations
/// and their canonical forms.
struct Growing {
    ColoredGraph rep;
    std::vector<ColoredGraph> concrete;
    CanonSet canon;
};

}  // namespace detail

/// Grows a generalization from a concrete seed by graying one edge at a
/// time. An edge qualifies when every new instantiation has the Ramsey
/// property for params and lies in classCanon, and at least ceil(2^(n-3))
/// of them are uncovered and not yet covered by the current generalization. Random selection takes the first qualifying
/// edge in shuffled order; Fastest takes the qualifying edge whose successor
/// has the highest one-sided simplicity (ties: lowest slot).
inline Generalization growGeneralization(const ColoredGraph& seed, const CliqueParams& params, const CanonSet& classCanon,
                                         const CanonSet& uncovered, const StrategyConfig& cfg,
                                         const CliqueAverages* counterpart, std::mt19937_64& rng,
                                         CanonCache& cache) {
    if (!seed.isConcrete()) throw ArgumentError("seed must be concrete");
    if (cfg.needsCounterpart() && counterpart == nullptr)
        throw ArgumentError("this strategy needs counterpart clique averages");
    detail::Growing cur{seed, {seed}, {}};
    cur.canon.insert(cache.canon(seed));

    std::vector<int> order;
    std::vector<ColoredGraph> flipped;
    while (cur.rep.grayCount() < cfg.maxGray) {
        order.clear();
        for (int s = 0; s < cur.rep.slots(); ++s)
            if (cur.rep.slotColor(s) != EdgeColor::Gray) order.push_back(s);
        if (cfg.edgeSelection == EdgeSelection::Random) {
            std::shuffle(order.begin(), order.end(), rng);
        } else {
            std::vector<std::pair<double, int>> scored;
            for (int s : order) {
                ColoredGraph next = cur.rep;
                next.setSlotColor(s, EdgeColor::Gray);
                scored.emplace_back(-simplicityOneSided(next, *counterpart, cfg.side), s);
            }
            std::sort(scored.begin(), scored.end());
            for (std::size_t i = 0; i < scored.size(); ++i) order[i] = scored[i].second;
        }
        const int n = cur.rep.grayCount();
        const std::uint64_t need = noveltyThreshold(cfg.thresholdBeforeAdd ? n : n + 1);
        bool grew = false;
        for (int s : order) {
            flipped.clear();
            bool inClass = true;
            for (const auto& g : cur.concrete) {
                ColoredGraph f = g;
                f.setSlotColor(s, g.slotColor(s) == EdgeColor::Blue ? EdgeColor::Red : EdgeColor::Blue);
                if (!satisfiesRamseyProperty(f, params)) {
                    inClass = false;
                    break;
                }
                flipped.push_back(std::move(f));
            }
            if (!inClass) continue;
            std::uint64_t novel = 0;
            CanonSet added;
            for (const auto& f : flipped) {
                const ColoredGraph& c = cache.canon(f);
                if (!classCanon.contains(c)) {
                    inClass = false;
                    break;
                }
                if (!cur.canon.contains(c) && added.insert(c).second && uncovered.contains(c)) ++novel;
            }
            if (!inClass || novel < need) continue;
            cur.rep.setSlotColor(s, EdgeColor::Gray);
            for (auto& f : flipped) cur.concrete.push_back(std::move(f));
            for (auto& c : added) cur.canon.insert(c);
            grew = true;
            break;
        }
        if (!grew) break;
    }
    return {cur.rep};
}

struct BuildStats {
    std::vector<std::size_t> newlyCovered;  // per iteration
    std::size_t candidatesGrown = 0;
};

/// Exact cover of a class by iteratively growing generalizations from
/// sampled uncovered seeds and keeping the best one per iteration
/// (GreedyCover: most uncovered members; Mixed: simplicity^c * that count;
/// ties: least canonical representation).
inline Cover buildCover(const GraphClassSet& cls, const StrategyConfig& cfg, const CliqueAverages* counterpart = nullptr,
                        BuildStats* stats = nullptr) {
    cfg.validate();
    if (cls.empty()) throw ArgumentError("cannot cover an empty class");
    if (cfg.needsCounterpart() && counterpart == nullptr)
        throw ArgumentError("this strategy needs counterpart clique averages");
    Cover cover{cls.params, cls.k, {}, cfg.maxGray, cfg.seed, cfg.describe()};
    const CanonSet classCanon(cls.graphs.begin(), cls.graphs.end());
    CanonSet uncovered = classCanon;
    std::vector<ColoredGraph> uncoveredList = cls.graphs;  // sorted
    const int workers = std::max(1, cfg.workers);
    std::vector<CanonCache> caches(static_cast<std::size_t>(workers));
    std::mt19937_64 sampler(detail::splitmix(cfg.seed));

    struct Candidate {
        ColoredGraph canonRep;
        std::vector<ColoredGraph> inst;
        std::size_t covers = 0;
        double score = 0.0;
    };

    for (std::uint64_t iteration = 0; !uncovered.empty(); ++iteration) {
        std::vector<ColoredGraph> seeds;
        if (cfg.sampleSize == 0 || cfg.sampleSize >= uncoveredList.size()) {
            seeds = uncoveredList;
        } else {
            std::sample(uncoveredList.begin(), uncoveredList.end(), std::back_inserter(seeds), cfg.sampleSize, sampler);
        }
        std::vector<Candidate> candidates(seeds.size());
        parallelFor(
            seeds.size(), workers,
            [&](int worker, std::size_t i) {
                auto& cache = caches[static_cast<std::size_t>(worker)];
                std::mt19937_64 rng(detail::splitmix(cfg.seed ^ detail::splitmix(iteration * 0x100000001ull + i)));
                const auto gen = growGeneralization(seeds[i], cls.params, classCanon, uncovered, cfg, counterpart, rng, cache);
                Candidate c;
                c.canonRep = canonicalize(gen.rep).canon;
                c.inst = instantiations(gen, &cache);
                for (const auto& g : c.inst) c.covers += uncovered.contains(g) ? 1 : 0;
                c.score = static_cast<double>(c.covers);
                if (cfg.genSelection == GenSelection::Mixed)
                    c.score *= std::pow(simplicityOneSided(gen.rep, *counterpart, cfg.side), cfg.mixedC);
                candidates[i] = std::move(c);
            },
            1);
        if (stats) stats->candidatesGrown += candidates.size();
        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            const auto& a = candidates[i];
            const auto& b = candidates[best];
            if (a.score > b.score || (a.score == b.score && a.canonRep < b.canonRep)) best = i;
        }
        auto& chosen = candidates[best];
        std::size_t removed = 0;
        for (const auto& g : chosen.inst) removed += uncovered.erase(g);
        if (removed == 0) throw StateError("cover construction made no progress");
        if (stats) stats->newlyCovered.push_back(removed);
        uncoveredList.erase(std::remove_if(uncoveredList.begin(), uncoveredList.end(),
                                           [&](const ColoredGraph& g) { return !uncovered.contains(g); }),
                            uncoveredList.end());
        cover.gens.push_back({chosen.canonRep});
    }
    return cover;
}

struct ExactnessReport {
    bool exact = false;
    std::vector<ColoredGraph> missing;  // in the class, not covered
    std::vector<ColoredGraph> extra;    // covered, not in the class
};

inline ExactnessReport verifyCoverExact(const Cover& cover, const GraphClassSet& cls, int workers = 1) {
    if (cover.params.blueBound != cls.params.blueBound || cover.params.redBound != cls.params.redBound ||
        cover.k != cls.k)
        throw ArgumentError("cover and class have different parameters");
    std::vector<std::vector<ColoredGraph>> parts(cover.gens.size());
    std::vector<CanonCache> caches(static_cast<std::size_t>(std::max(1, workers)), CanonCache(1u << 16));
    parallelFor(
        cover.gens.size(), workers,
        [&](int worker, std::size_t i) { parts[i] = instantiations(cover.gens[i], &caches[static_cast<std::size_t>(worker)]); },
        1);
    std::vector<ColoredGraph> covered;
    for (auto& p : parts) covered.insert(covered.end(), p.begin(), p.end());
    std::sort(covered.begin(), covered.end());
    covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
    ExactnessReport report;
    std::set_difference(cls.graphs.begin(), cls.graphs.end(), covered.begin(), covered.end(),
                        std::back_inserter(report.missing));
    std::set_difference(covered.begin(), covered.end(), cls.graphs.begin(), cls.graphs.end(),
                        std::back_inserter(report.extra));
    report.exact = report.missing.empty() && report.extra.empty();
    return report;
}

struct ExtensionReport {
    bool ok = false;
    std::optional<ColoredGraph> counterexample;  // concrete graph at k + 1
    std::size_t checked = 0;
};

/// Every coloring of a coverK generalization's gray edges plus the edges to
/// a new vertex that keeps the property must be covered by coverK1.
inline ExtensionReport verifyExtension(const Cover& coverK, const Cover& coverK1, int workers = 1) {
    if (coverK.params.blueBound != coverK1.params.blueBound || coverK.params.redBound != coverK1.params.redBound)
        throw ArgumentError("covers have different parameters");
    if (coverK1.k != coverK.k + 1) throw ArgumentError("covers must be at consecutive k");
    CanonSet target;
    {
        CanonCache cache(1u << 16);
        for (const auto& g : coverK1.gens)
            for (auto& c : instantiations(g, &cache)) target.insert(std::move(c));
    }
    const auto params = coverK.params;
    const int w = std::max(1, workers);
    std::vector<Canonizer> canonizers(static_cast<std::size_t>(w));
    std::vector<std::optional<ColoredGraph>> failures(coverK.gens.size());
    std::vector<std::size_t> counts(coverK.gens.size(), 0);
    parallelFor(
        coverK.gens.size(), w,
        [&](int worker, std::size_t i) {
            auto& canonizer = canonizers[static_cast<std::size_t>(worker)];
            for (const auto& g : concreteInstantiations(coverK.gens[i].rep)) {
                const auto adj = Adjacency::of(g);
                if (!satisfiesRamseyProperty(adj, params)) continue;
                bool failed = false;
                detail::forEachValidExtension(adj, params, [&](VertexSet blue) {
                    if (failed) return;
                    const auto ext = detail::withNewVertex(adj, blue);
                    ++counts[i];
                    canonizer.run(ext);
                    if (!target.contains(canonizer.canonicalGraph())) {
                        failures[i] = ext.toGraph();
                        failed = true;
                    }
                });
                if (failed) return;
            }
        },
        1);
    ExtensionReport report;
    for (auto c : counts) report.checked += c;
    for (auto& f : failures) {
        if (f) {
            report.counterexample = std::move(f);
            return report;
        }
    }
    report.ok = true;
    return report;
}

// ---------------------------------------------------------------------------
// Cover files: "# cover p q k maxGray seed strategy" then one graph per line.

inline void writeCover(std::ostream& out, const Cover& cover) {
    out << "# cover " << cover.params.blueBound << ' ' << cover.params.redBound << ' ' << cover.k << ' '
        << cover.maxGray << ' ' << cover.seed << ' ' << cover.strategy << '\n';
    for (const auto& g : cover.gens) out << writeGraph(g.rep) << '\n';
}

inline void writeCoverFile(const std::filesystem::path& file, const Cover& cover) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp);
        writeCover(out, cover);
        if (!out) throw ResourceError("failed to write " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

inline Cover readCover(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty cover file", 1, 0);
    std::istringstream h(header);
    std::string hash, word;
    Cover cover;
    h >> hash >> word >> cover.params.blueBound >> cover.params.redBound >> cover.k >> cover.maxGray >> cover.seed >>
        cover.strategy;
    if (!h || hash != "#" || word != "cover") throw ParseError("malformed cover header", 1, 0);
    cover.params.validate();
    std::string line;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto g = parseGraph(line, lineNo);
        if (g.order() != cover.k) throw ParseError("generalization has the wrong vertex count", lineNo, 0);
        cover.gens.push_back({std::move(g)});
    }
    return cover;
}

inline Cover readCoverFile(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ResourceError("cannot open " + file.string());
    return readCover(in);
}

}  // namespace ramsey
