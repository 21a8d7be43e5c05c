#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <climits>
#include <vector>

#include "ramsey/graph.hpp"

namespace ramsey {

/// Canonical representative of an isomorphism class plus the relabeling
/// that produces it: canon == input.permuted(witness).
struct CanonicalForm {
    ColoredGraph canon;
    std::vector<int> witness;
};

namespace detail {

/// Ordered partition of the vertex set into cells (bit masks).
struct Partition {
    std::array<VertexSet, 32> cells{};
    int count = 0;
};

/// Lower-triangular rows of a relabeled graph: row i holds the colors of
/// edges {j,i} for j < i.
struct LabeledRows {
    std::array<VertexSet, 32> blue{};
    std::array<VertexSet, 32> red{};
};

/// -1, 0, 1 comparison of two labeled graphs in slot order with B < R < G.
inline int compareRows(const LabeledRows& x, const LabeledRows& y, int n) {
    for (int i = 1; i < n; ++i) {
        const VertexSet diff = (x.blue[i] ^ y.blue[i]) | (x.red[i] ^ y.red[i]);
        if (diff == 0) continue;
        const VertexSet bit = diff & (~diff + 1);
        const int cx = (x.blue[i] & bit) ? 0 : (x.red[i] & bit) ? 1 : 2;
        const int cy = (y.blue[i] & bit) ? 0 : (y.red[i] & bit) ? 1 : 2;
        return cx < cy ? -1 : 1;
    }
    return 0;
}

}  // namespace detail

/// Reusable canonical labeler. Refines the unit partition to an equitable
/// one using (blue, red) neighbor counts, then backtracks over
/// individualizations and keeps the leaf whose relabeled edge string is
/// least. Automorphisms found between equal leaves prune the search.
class Canonizer {
public:
    /// Canonical labeling of adj. order()[i] is the input vertex placed at
    /// canonical position i.
    void run(const Adjacency& adj) {
        g_ = &adj;
        n_ = adj.n;
        haveBest_ = false;
        leaves_ = 0;
        autos_.clear();
        detail::Partition root;
        if (n_ > 0) {
            root.cells[0] = adj.all();
            root.count = 1;
        }
        std::array<VertexSet, 64> queue{};
        queue[0] = adj.all();
        int qlen = n_ > 0 ? 1 : 0;
        refine(root, queue, qlen);
        path_.clear();
        search(root, 0);
    }

    const std::array<int, 32>& order() const { return bestOrder_; }
    int order(int position) const { return bestOrder_[position]; }

    /// Canonical relabeling as row adjacency.
    Adjacency canonicalAdjacency() const {
        Adjacency out;
        out.n = n_;
        for (int i = 0; i < n_; ++i) {
            out.blue[i] |= best_.blue[i];
            out.red[i] |= best_.red[i];
            forEachVertex(best_.blue[i], [&](int j) { out.blue[j] |= bitOf(i); });
            forEachVertex(best_.red[i], [&](int j) { out.red[j] |= bitOf(i); });
        }
        return out;
    }

    /// Canonical blue slot mask, packed into Words 64-bit words.
    template <std::size_t Words>
    BitMask<Words> canonicalBlueSlots() const {
        BitMask<Words> m;
        for (int i = 1; i < n_; ++i) {
            const int base = slotCount(i);
            forEachVertex(best_.blue[i], [&](int j) { m.set(static_cast<std::size_t>(base + j)); });
        }
        return m;
    }

    ColoredGraph canonicalGraph() const { return canonicalAdjacency().toGraph(); }

    std::vector<int> witness() const {
        std::vector<int> w(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) w[static_cast<std::size_t>(bestOrder_[i])] = i;
        return w;
    }

    /// Statistics of the last run.
    long leaves() const { return leaves_; }
    std::size_t automorphismsFound() const { return autos_.size(); }

private:
    static constexpr int kNoJump = INT_MAX;
    static constexpr std::size_t kMaxStoredAutos = 64;

    void refine(detail::Partition& p, std::array<VertexSet, 64>& queue, int qlen) const {
        const auto& blue = g_->blue;
        const auto& red = g_->red;
        int qhead = 0;
        while (qhead < qlen && p.count < n_) {
            const VertexSet w = queue[qhead++];
            for (int ci = 0; ci < p.count; ++ci) {
                const VertexSet c = p.cells[ci];
                if ((c & (c - 1)) == 0) continue;
                std::array<std::pair<int, int>, 32> keyed;
                int m = 0;
                bool uniform = true;
                int firstKey = -1;
                forEachVertex(c, [&](int v) {
                    const int key = (popcount(blue[v] & w) << 6) | popcount(red[v] & w);
                    if (firstKey < 0) firstKey = key;
                    else if (key != firstKey) uniform = false;
                    keyed[m++] = {key, v};
                });
                if (uniform) continue;
                std::sort(keyed.begin(), keyed.begin() + m);
                std::array<VertexSet, 32> frags{};
                int fcount = 0;
                for (int i = 0; i < m; ++i) {
                    if (i == 0 || keyed[i].first != keyed[i - 1].first) ++fcount;
                    frags[fcount - 1] |= bitOf(keyed[i].second);
                }
                for (int k = p.count - 1; k > ci; --k) p.cells[k + fcount - 1] = p.cells[k];
                for (int k = 0; k < fcount; ++k) p.cells[ci + k] = frags[k];
                p.count += fcount - 1;

                int inQueue = -1;
                for (int k = qhead; k < qlen; ++k)
                    if (queue[k] == c) {
                        inQueue = k;
                        break;
                    }
                int start = 0;
                if (inQueue >= 0) {
                    queue[inQueue] = frags[0];
                    start = 1;
                }
                for (int k = start; k < fcount; ++k) {
                    if (qlen == static_cast<int>(queue.size())) {
                        // Compact consumed entries; total pending never exceeds 2n.
                        std::copy(queue.begin() + qhead, queue.begin() + qlen, queue.begin());
                        qlen -= qhead;
                        qhead = 0;
                    }
                    queue[qlen++] = frags[k];
                }
                ci += fcount - 1;
            }
        }
    }

    void leafRows(const detail::Partition& p, detail::LabeledRows& rows, std::array<int, 32>& order) const {
        std::array<int, 32> pos{};
        for (int i = 0; i < n_; ++i) {
            order[i] = lowestVertex(p.cells[i]);
            pos[order[i]] = i;
        }
        for (int i = 0; i < n_; ++i) {
            const int v = order[i];
            VertexSet b = 0, r = 0;
            forEachVertex(g_->blue[v], [&](int u) {
                if (pos[u] < i) b |= bitOf(pos[u]);
            });
            forEachVertex(g_->red[v], [&](int u) {
                if (pos[u] < i) r |= bitOf(pos[u]);
            });
            rows.blue[i] = b;
            rows.red[i] = r;
        }
    }

    /// Records the automorphism mapping the leaf `from` onto the leaf `to`
    /// and returns the depth to resume at.
    int recordAutomorphism(const std::array<int, 32>& fromOrder, const std::vector<int>& fromPath,
                           const std::array<int, 32>& toOrder) {
        std::array<int, 32> gamma{};
        for (int i = 0; i < n_; ++i) gamma[fromOrder[i]] = toOrder[i];
        if (autos_.size() < kMaxStoredAutos) autos_.push_back(gamma);
        int common = 0;
        while (common < static_cast<int>(path_.size()) && common < static_cast<int>(fromPath.size()) &&
               path_[common] == fromPath[common])
            ++common;
        return common;
    }

    int processLeaf(const detail::Partition& p) {
        ++leaves_;
        detail::LabeledRows rows;
        std::array<int, 32> order{};
        leafRows(p, rows, order);
        if (!haveBest_) {
            haveBest_ = true;
            best_ = first_ = rows;
            bestOrder_ = firstOrder_ = order;
            bestPath_ = firstPath_ = path_;
            return kNoJump;
        }
        if (detail::compareRows(rows, first_, n_) == 0) return recordAutomorphism(firstOrder_, firstPath_, order);
        const int cmp = detail::compareRows(rows, best_, n_);
        if (cmp == 0) return recordAutomorphism(bestOrder_, bestPath_, order);
        if (cmp < 0) {
            best_ = rows;
            bestOrder_ = order;
            bestPath_ = path_;
        }
        return kNoJump;
    }

    /// Orbits of the group generated by stored automorphisms that fix the
    /// current path pointwise; orbit[v] is a representative.
    void pathStabilizerOrbits(std::array<int, 32>& orbit) const {
        for (int v = 0; v < n_; ++v) orbit[v] = v;
        auto find = [&](int v) {
            while (orbit[v] != v) v = orbit[v] = orbit[orbit[v]];
            return v;
        };
        for (const auto& gamma : autos_) {
            bool fixes = true;
            for (int v : path_)
                if (gamma[v] != v) {
                    fixes = false;
                    break;
                }
            if (!fixes) continue;
            for (int v = 0; v < n_; ++v) {
                const int a = find(v), b = find(gamma[v]);
                if (a != b) orbit[std::max(a, b)] = std::min(a, b);
            }
        }
        for (int v = 0; v < n_; ++v) orbit[v] = find(v);
    }

    int search(const detail::Partition& p, int depth) {
        if (p.count == n_) return processLeaf(p);

        int target = -1, targetSize = INT_MAX;
        for (int ci = 0; ci < p.count; ++ci) {
            const int s = popcount(p.cells[ci]);
            if (s > 1 && s < targetSize) {
                target = ci;
                targetSize = s;
            }
        }
        const VertexSet cell = p.cells[target];
        VertexSet explored = 0;
        std::size_t autosSeen = autos_.size();
        std::array<int, 32> orbit{};
        pathStabilizerOrbits(orbit);

        VertexSet remaining = cell;
        while (remaining != 0) {
            const int v = lowestVertex(remaining);
            remaining &= remaining - 1;
            if (autos_.size() != autosSeen) {
                pathStabilizerOrbits(orbit);
                autosSeen = autos_.size();
            }
            bool equivalent = false;
            forEachVertex(explored, [&](int u) {
                if (orbit[u] == orbit[v]) equivalent = true;
            });
            if (equivalent) continue;
            explored |= bitOf(v);

            detail::Partition child = p;
            for (int k = child.count - 1; k > target; --k) child.cells[k + 1] = child.cells[k];
            child.cells[target] = bitOf(v);
            child.cells[target + 1] = cell & ~bitOf(v);
            ++child.count;
            std::array<VertexSet, 64> queue{};
            queue[0] = bitOf(v);
            refine(child, queue, 1);

            path_.push_back(v);
            const int jump = search(child, depth + 1);
            path_.pop_back();
            if (jump < depth) return jump;
        }
        return kNoJump;
    }

    const Adjacency* g_ = nullptr;
    int n_ = 0;
    bool haveBest_ = false;
    long leaves_ = 0;
    detail::LabeledRows best_, first_;
    std::array<int, 32> bestOrder_{}, firstOrder_{};
    std::vector<int> path_, bestPath_, firstPath_;
    std::vector<std::array<int, 32>> autos_;
};

inline CanonicalForm canonicalize(const ColoredGraph& g) {
    if (g.order() < 1) throw ArgumentError("canonicalize requires at least one vertex");
    const auto adj = Adjacency::of(g);
    Canonizer c;
    c.run(adj);
    CanonicalForm form{c.canonicalGraph(), c.witness()};
#ifndef NDEBUG
    assert(g.permuted(form.witness) == form.canon);
#endif
    return form;
}

inline bool isIsomorphic(const ColoredGraph& g1, const ColoredGraph& g2) {
    if (g1.order() != g2.order()) return false;
    if (g1.order() == 0) return true;
    if (g1.blueMask().count() != g2.blueMask().count() || g1.redMask().count() != g2.redMask().count())
        return false;
    return canonicalize(g1).canon == canonicalize(g2).canon;
}

}  // namespace ramsey
