#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ramsey/error.hpp"
#include "ramsey/graph.hpp"

namespace ramsey {

enum class Justification { BaseCase, ColorSwap, RamseySum, ParityRefutation };

inline const char* justificationName(Justification j) {
    switch (j) {
        case Justification::BaseCase: return "base case";
        case Justification::ColorSwap: return "color swap";
        case Justification::RamseySum: return "Ramsey sum";
        case Justification::ParityRefutation: return "parity refutation";
    }
    return "?";
}

/// The claim that R(p,q,n) is empty, with the derivation that proves it.
struct BoundFact {
    int p = 0, q = 0, n = 0;
    Justification how = Justification::BaseCase;
    std::vector<std::shared_ptr<const BoundFact>> parents;

    std::string claim() const {
        return "R°(" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(n) + ")";
    }
};

using FactPtr = std::shared_ptr<const BoundFact>;

/// R°(2,m,m) or R°(m,2,m): a graph on m vertices without a blue edge is
/// all red, hence a red m-clique (and symmetrically).
inline FactPtr baseCase(int p, int q) {
    if (p < 2 || q < 2 || (p != 2 && q != 2)) throw ArgumentError("base case needs p = 2 or q = 2");
    return std::make_shared<const BoundFact>(BoundFact{p, q, p == 2 ? q : p, Justification::BaseCase, {}});
}

inline FactPtr colorSwap(const FactPtr& f) {
    return std::make_shared<const BoundFact>(BoundFact{f->q, f->p, f->n, Justification::ColorSwap, {f}});
}

/// R°(r+1,s,m+1) and R°(r,s+1,n+1) give R°(r+1,s+1,m+n+2).
inline FactPtr ramseySum(const FactPtr& f1, const FactPtr& f2) {
    if (f1->p != f2->p + 1 || f2->q != f1->q + 1)
        throw ArgumentError("ramseySum: " + f1->claim() + " and " + f2->claim() + " do not align");
    return std::make_shared<const BoundFact>(
        BoundFact{f1->p, f2->q, f1->n + f2->n, Justification::RamseySum, {f1, f2}});
}

/// Blue degrees possible for a vertex of a graph in R(r,s,n), given that
/// R(r-1,s,a) and R(r,s-1,b) are empty.
struct DegreeWindow {
    int dMin = 0;
    int dMax = -1;
    bool evenOnly = false;
    std::vector<int> candidates;
};

namespace detail {

inline void checkParents(int r, int s, const BoundFact& neighbor, const BoundFact& antineighbor) {
    if (neighbor.p != r - 1 || neighbor.q != s)
        throw ArgumentError("neighbor bound must be R°(" + std::to_string(r - 1) + "," + std::to_string(s) + ",a)");
    if (antineighbor.p != r || antineighbor.q != s - 1)
        throw ArgumentError("antineighbor bound must be R°(" + std::to_string(r) + "," + std::to_string(s - 1) + ",b)");
}

}  // namespace detail

/// The blue neighborhood lies in R(r-1,s,d), so d <= a-1; the red one in
/// R(r,s-1,n-1-d), so d >= n-b. With n odd some vertex has even degree.
inline DegreeWindow degreeWindow(int r, int s, int n, const BoundFact& neighbor, const BoundFact& antineighbor) {
    detail::checkParents(r, s, neighbor, antineighbor);
    DegreeWindow w;
    w.dMin = std::max(0, n - antineighbor.n);
    w.dMax = std::min(n - 1, neighbor.n - 1);
    w.evenOnly = n % 2 == 1;
    for (int d = w.dMin; d <= w.dMax; ++d)
        if (!w.evenOnly || d % 2 == 0) w.candidates.push_back(d);
    return w;
}

/// R°(r,s,n) when every vertex is forced to the same odd degree and n is
/// odd: the degree sum would be odd.
inline std::optional<FactPtr> parityRefute(int r, int s, int n, const FactPtr& neighbor, const FactPtr& antineighbor) {
    const auto w = degreeWindow(r, s, n, *neighbor, *antineighbor);
    if (w.dMin != w.dMax || w.dMin % 2 == 0 || n % 2 == 0) return std::nullopt;
    return std::make_shared<const BoundFact>(
        BoundFact{r, s, n, Justification::ParityRefutation, {neighbor, antineighbor}});
}

/// Sum of blue degrees; always even.
inline bool sumOfDegreesIsEven(const ColoredGraph& g) {
    if (!g.isConcrete()) throw StateError("sumOfDegreesIsEven requires a graph without gray edges");
    long sum = 0;
    for (int v = 0; v < g.order(); ++v) sum += popcount(g.neighbors(v, EdgeColor::Blue));
    return sum % 2 == 0;
}

/// Smallest n the lemmas above establish R°(p,q,n) for: base cases, color
/// swap for p > q, Ramsey sums, then parity refutations while they apply.
class BoundDeriver {
public:
    FactPtr derive(int p, int q) {
        if (p < 2 || q < 2) throw ArgumentError("bounds need p, q >= 2");
        const auto key = std::make_pair(p, q);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        FactPtr fact;
        if (p == 2 || q == 2) {
            fact = baseCase(p, q);
        } else if (p > q) {
            fact = colorSwap(derive(q, p));
        } else {
            fact = ramseySum(derive(p, q - 1), derive(p - 1, q));
            const auto neighbor = derive(p - 1, q);
            const auto antineighbor = derive(p, q - 1);
            while (auto refuted = parityRefute(p, q, fact->n - 1, neighbor, antineighbor)) fact = *refuted;
        }
        memo_[key] = fact;
        return fact;
    }

private:
    std::map<std::pair<int, int>, FactPtr> memo_;
};

/// Every fact in the tree, parents before children, without repeats.
inline std::vector<FactPtr> derivationOrder(const FactPtr& root) {
    std::vector<FactPtr> out;
    auto visit = [&](auto&& self, const FactPtr& f) -> void {
        for (const auto& seen : out)
            if (seen.get() == f.get()) return;
        for (const auto& parent : f->parents) self(self, parent);
        out.push_back(f);
    };
    visit(visit, root);
    return out;
}

inline std::string describe(const BoundFact& f) {
    std::string line = f.claim() + "  by " + justificationName(f.how);
    if (!f.parents.empty()) {
        line += " of ";
        for (std::size_t i = 0; i < f.parents.size(); ++i) {
            if (i) line += ", ";
            line += f.parents[i]->claim();
        }
    }
    return line;
}

struct TargetAnalysis {
    int p = 0, q = 0, n = 0;
    FactPtr neighbor;
    FactPtr antineighbor;
    DegreeWindow window;
    std::optional<FactPtr> refutation;
};

/// Degree split for a hypothetical graph in R(p,q,n): both neighborhood
/// bounds derived, the window computed, and a parity refutation if any.
inline TargetAnalysis analyzeTarget(int p, int q, int n) {
    if (p < 3 || q < 3 || n < 1) throw ArgumentError("target needs p, q >= 3 and n >= 1");
    BoundDeriver deriver;
    TargetAnalysis t{p, q, n, deriver.derive(p - 1, q), deriver.derive(p, q - 1), {}, std::nullopt};
    t.window = degreeWindow(p, q, n, *t.neighbor, *t.antineighbor);
    t.refutation = parityRefute(p, q, n, t.neighbor, t.antineighbor);
    return t;
}

inline std::string formatAnalysis(const TargetAnalysis& t) {
    std::string out;
    std::vector<FactPtr> printed;
    for (const auto& root : {t.neighbor, t.antineighbor}) {
        for (const auto& f : derivationOrder(root)) {
            bool dup = false;
            for (const auto& s : printed) dup = dup || s.get() == f.get();
            if (dup) continue;
            printed.push_back(f);
            out += describe(*f) + "\n";
        }
    }
    const auto& w = t.window;
    out += "target R(" + std::to_string(t.p) + "," + std::to_string(t.q) + "," + std::to_string(t.n) + "): degree in [" +
           std::to_string(w.dMin) + ", " + std::to_string(w.dMax) + "]" + (w.evenOnly ? ", even" : "") + "\n";
    if (t.refutation) out += describe(**t.refutation) + "\n";
    out += "candidates {";
    for (std::size_t i = 0; i < w.candidates.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(w.candidates[i]);
    }
    out += "}\n";
    return out;
}

}  // namespace ramsey
