#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "ramsey/enumerate.hpp"
#include "ramsey/glue.hpp"
#include "ramsey/sat.hpp"

using namespace ramsey;

namespace {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

}  // namespace

TEST(Glue, CliqueCountsMatchOracle) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 40; ++t) {
        const auto g = oracle::randomGraph(rng, 1 + static_cast<int>(rng() % 9), 0.25);
        const auto c = CliqueCounts::of(g);
        for (int k = 1; k <= kMaxCliqueIndex; ++k) {
            EXPECT_EQ(c.blue[k], oracle::countCliques(g, EdgeColor::Blue, k));
            EXPECT_EQ(c.red[k], oracle::countCliques(g, EdgeColor::Red, k));
        }
    }
}

TEST(Glue, SimplicityOfGrayGraphs) {
    // All gray: only 1-cliques exist, so only the r4*r'1 and b1*b'3 terms can
    // be nonzero, and r4 = 0 on the left.
    const ColoredGraph gray(6);
    const auto c = CliqueCounts::of(gray);
    EXPECT_EQ(c.blue[1], 6u);
    EXPECT_EQ(c.red[1], 6u);
    EXPECT_EQ(c.blue[2] + c.red[2] + c.red[3] + c.red[4], 0u);
    const auto h = ColoredGraph::complete(4, EdgeColor::Blue);
    EXPECT_DOUBLE_EQ(simplicityPair(gray, h), 6.0 * 4.0 / 8.0);
    EXPECT_DOUBLE_EQ(simplicityCnf(Cnf{2, {{1}, {1, 2}, {-1, -2, 2}}}), 0.5 + 0.25 + 0.125);
}

TEST(Glue, SimplicityFormulaByHand) {
    // Left: blue triangle plus an isolated red-joined vertex; right: red K3.
    ColoredGraph g = ColoredGraph::complete(4, EdgeColor::Red);
    g.setColor(0, 1, EdgeColor::Blue);
    g.setColor(0, 2, EdgeColor::Blue);
    g.setColor(1, 2, EdgeColor::Blue);
    const auto h = ColoredGraph::complete(3, EdgeColor::Red);
    // b1=4, b2=3 | b'3=0, b'2=0 ; r2=3, r3=0, r4=0 | r'3=1, r'2=3, r'1=3
    EXPECT_DOUBLE_EQ(simplicityPair(g, h), 3.0 * 1.0 / 64.0);
}

// Averaging is linear, so the one-sided score against class averages equals
// the mean of the pair scores over the class.
TEST(GlueProperty, OneSidedIsMeanOfPairs) {
    const auto run = enumerateClass({3, 4}, 8, {}, true);
    std::mt19937_64 rng(42);
    for (int t = 0; t < 20; ++t) {
        const auto& cls = run.levels[static_cast<std::size_t>(4 + t % 4)];
        const auto avg = CliqueAverages::of(cls.graphs);
        const auto g = oracle::randomGraph(rng, 3 + static_cast<int>(rng() % 6), 0.3);
        for (Side side : {Side::Left, Side::Right}) {
            double mean = 0.0;
            for (const auto& h : cls.graphs) mean += side == Side::Left ? simplicityPair(g, h) : simplicityPair(h, g);
            mean /= static_cast<double>(cls.size());
            const double one = simplicityOneSided(g, avg, side);
            EXPECT_LE(std::abs(one - mean), 1e-9 * std::max(1.0, std::abs(mean)));
        }
    }
}

TEST(Glue, EncodingShape) {
    const GlueProblem p{ColoredGraph::complete(3, EdgeColor::Red), ColoredGraph(4), {3, 4}};
    const auto cnf = encodeGlue(p);
    EXPECT_EQ(cnf.varCount, 21);
    EXPECT_EQ(cnf.clauses.size(), binomial(7, 3) + binomial(7, 4) + 3);
    for (std::size_t i = 0; i < binomial(7, 3); ++i) {
        EXPECT_EQ(cnf.clauses[i].size(), 3u);
        for (Literal l : cnf.clauses[i]) EXPECT_LT(l, 0);
    }
    EXPECT_EQ(cnf.clauses.back(), (Clause{-edgeVariable(1, 2)}));
    EXPECT_EQ(cnf.clauses[0], (Clause{-edgeVariable(0, 1), -edgeVariable(0, 2), -edgeVariable(1, 2)}));
}

TEST(Glue, PropagationFindsConflicts) {
    const GlueProblem p{ColoredGraph::complete(3, EdgeColor::Blue), ColoredGraph::complete(2, EdgeColor::Red), {3, 3}};
    EXPECT_TRUE(std::holds_alternative<Conflict>(unitPropagate(encodeGlue(p))));
    const auto r = unitPropagate(Cnf{3, {{1}, {-1, 2}, {-2, 3, -1}, {3, -3}}});
    ASSERT_TRUE(std::holds_alternative<Propagated>(r));
    const auto& prop = std::get<Propagated>(r);
    EXPECT_EQ(prop.fixed, (std::vector<Literal>{1, 2, 3}));
    EXPECT_TRUE(prop.cnf.clauses.empty());
}

TEST(Glue, IdsAreContentHashes) {
    std::mt19937_64 rng(43);
    const auto g = oracle::randomGraph(rng, 5, 0.2), h = oracle::randomGraph(rng, 6, 0.2);
    const GlueProblem p{g, h, {4, 5}};
    const GlueProblem relabeled{oracle::randomPermutation(g, rng), oracle::randomPermutation(h, rng), {4, 5}};
    EXPECT_EQ(p.id(), relabeled.id());
    EXPECT_EQ(p.id().size(), 16u);
    EXPECT_NE(p.id(), (GlueProblem{h, g, {4, 5}}.id()));
    EXPECT_NE(p.id(), (GlueProblem{g, h, {3, 5}}.id()));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

// Model set of the CNF against brute force over the free edges: every
// coloring of gray and transverse edges that avoids blue 3- and red
// 3-cliques, and nothing else.
TEST(GlueOracle, ModelSetMatchesColorings) {
    std::mt19937_64 rng(44);
    int satCount = 0;
    for (int t = 0; t < 20; ++t) {
        GlueProblem problem;
        do {
            const int d = 2 + static_cast<int>(rng() % 3);
            const int e = 2 + static_cast<int>(rng() % 3);
            problem = {oracle::randomGraph(rng, d, 0.3), oracle::randomGraph(rng, e, 0.3), {3, 3}};
        } while (problem.combined().graySlots().size() > 20);
        const auto cnf = encodeGlue(problem);
        const auto combined = problem.combined();
        const auto free = combined.graySlots();

        std::set<std::vector<bool>> fromColorings, fromCnf;
        for (std::uint32_t bits = 0; bits < (1u << free.size()); ++bits) {
            ColoredGraph g = combined;
            for (std::size_t i = 0; i < free.size(); ++i)
                g.setSlotColor(free[i], (bits >> i & 1) ? EdgeColor::Blue : EdgeColor::Red);
            std::vector<bool> assignment(static_cast<std::size_t>(cnf.varCount) + 1, false);
            for (int s = 0; s < g.slots(); ++s) assignment[static_cast<std::size_t>(s + 1)] = g.slotColor(s) == EdgeColor::Blue;
            if (oracle::ramseyProperty(g, 3, 3)) fromColorings.insert(assignment);
            if (verifyModel(cnf, assignment)) fromCnf.insert(assignment);
        }
        // Assignments disagreeing with a colored edge violate its unit clause.
        std::size_t units = 0;
        for (const auto& c : cnf.clauses) units += c.size() == 1;
        EXPECT_EQ(units, static_cast<std::size_t>(combined.slots()) - free.size());
        EXPECT_EQ(fromCnf, fromColorings);

        const auto verdict = solveEmbedded(cnf, {}, EmbeddedAlgorithm::Dpll);
        EXPECT_EQ(verdict.status == SatStatus::Sat, !fromColorings.empty());
        if (verdict.status == SatStatus::Sat) {
            ++satCount;
            EXPECT_TRUE(fromColorings.contains(verdict.model));
            EXPECT_TRUE(satisfiesRamseyProperty(decodeModel(problem.order(), verdict.model), {3, 3}));
        }
    }
    EXPECT_GT(satCount, 0);
}

TEST(GlueProperty, PropagationPreservesModels) {
    std::mt19937_64 rng(45);
    for (int t = 0; t < 30; ++t) {
        const GlueProblem problem{oracle::randomGraph(rng, 3, 0.3), oracle::randomGraph(rng, 3, 0.3), {3, 4}};
        const auto cnf = encodeGlue(problem);
        const auto r = unitPropagate(cnf);
        const auto all = oracle::models(cnf);
        if (std::holds_alternative<Conflict>(r)) {
            EXPECT_TRUE(all.empty());
            continue;
        }
        const auto& prop = std::get<Propagated>(r);
        std::set<std::uint32_t> rebuilt;
        for (std::uint32_t a : oracle::models(prop.cnf)) {
            bool agrees = true;
            for (Literal l : prop.fixed) agrees = agrees && ((a >> (std::abs(l) - 1) & 1) == (l > 0 ? 1u : 0u));
            if (agrees) rebuilt.insert(a);
        }
        EXPECT_EQ(rebuilt, std::set<std::uint32_t>(all.begin(), all.end()));
    }
}
