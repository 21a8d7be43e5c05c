#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ramsey/bounds.hpp"
#include "ramsey/enumerate.hpp"

using namespace ramsey;

TEST(Bounds, BaseCasesAndSwap) {
    EXPECT_EQ(baseCase(2, 5)->n, 5);
    EXPECT_EQ(baseCase(4, 2)->n, 4);
    EXPECT_THROW(baseCase(3, 3), ArgumentError);
    const auto s = colorSwap(baseCase(2, 4));
    EXPECT_EQ(s->p, 4);
    EXPECT_EQ(s->q, 2);
    EXPECT_EQ(s->claim(), "R°(4,2,4)");
}

TEST(Bounds, RamseySumAlignment) {
    const auto f = ramseySum(baseCase(3, 2), baseCase(2, 3));
    EXPECT_EQ(f->claim(), "R°(3,3,6)");
    EXPECT_THROW(ramseySum(baseCase(2, 3), baseCase(3, 2)), ArgumentError);
}

TEST(Bounds, DerivationChainForFourFive) {
    BoundDeriver d;
    EXPECT_EQ(d.derive(3, 3)->n, 6);
    const auto r34 = d.derive(3, 4);
    EXPECT_EQ(r34->n, 9);
    EXPECT_EQ(r34->how, Justification::ParityRefutation);
    EXPECT_EQ(d.derive(3, 5)->n, 14);
    EXPECT_EQ(d.derive(4, 4)->n, 18);
    EXPECT_EQ(d.derive(4, 3)->how, Justification::ColorSwap);

    const auto t = analyzeTarget(4, 5, 25);
    EXPECT_EQ(t.window.dMin, 7);
    EXPECT_EQ(t.window.dMax, 13);
    EXPECT_TRUE(t.window.evenOnly);
    EXPECT_EQ(t.window.candidates, (std::vector<int>{8, 10, 12}));
    EXPECT_FALSE(t.refutation.has_value());
    const auto text = formatAnalysis(t);
    EXPECT_NE(text.find("R°(3,5,14)"), std::string::npos);
    EXPECT_NE(text.find("R°(4,4,18)"), std::string::npos);
    EXPECT_NE(text.find("R°(3,4,9)  by parity refutation"), std::string::npos);
    EXPECT_NE(text.find("candidates {8,10,12}"), std::string::npos);
}

TEST(Bounds, DegreeWindowChecksParents) {
    const auto a = baseCase(2, 3), b = baseCase(3, 2);
    const auto w = degreeWindow(3, 3, 5, *a, *b);
    EXPECT_EQ(w.dMin, 2);
    EXPECT_EQ(w.dMax, 2);
    EXPECT_EQ(w.candidates, (std::vector<int>{2}));
    EXPECT_THROW(degreeWindow(3, 3, 5, *b, *a), ArgumentError);
    EXPECT_FALSE(parityRefute(3, 3, 5, a, b).has_value());
}

// Every derived fact R°(p,q,n) must agree with enumeration: the class at
// n is empty, and the first empty level is never above n.
TEST(BoundsOracle, FactsAgreeWithEnumeration) {
    BoundDeriver d;
    for (const auto& [p, q] : std::vector<std::pair<int, int>>{{2, 4}, {3, 3}, {3, 4}, {4, 3}, {3, 5}}) {
        const auto fact = d.derive(p, q);
        const auto run = enumerateClass({p, q}, fact->n);
        ASSERT_EQ(run.counts().back(), 0u) << fact->claim();
        for (const auto& f : derivationOrder(fact)) {
            const auto sub = enumerateClass({f->p, f->q}, f->n);
            EXPECT_EQ(sub.counts().back(), 0u) << f->claim();
        }
    }
}

TEST(BoundsProperty, DegreeWindowHoldsOnClassMembers) {
    // Every vertex of an R(3,5,k) graph has blue degree inside the window
    // for k, derived from R°(2,5,5) and R°(3,4,9).
    BoundDeriver d;
    const auto neighbor = d.derive(2, 5), antineighbor = d.derive(3, 4);
    const auto run = enumerateClass({3, 5}, 13);
    for (const auto& level : run.levels) {
        const auto w = degreeWindow(3, 5, level.k, *neighbor, *antineighbor);
        for (const auto& g : level.graphs)
            for (int v = 0; v < g.order(); ++v) {
                const int deg = popcount(g.neighbors(v, EdgeColor::Blue));
                ASSERT_GE(deg, w.dMin);
                ASSERT_LE(deg, w.dMax);
            }
    }
}

TEST(BoundsProperty, DegreeSumIsEven) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 100; ++t) EXPECT_TRUE(sumOfDegreesIsEven(oracle::randomGraph(rng, 1 + static_cast<int>(rng() % 20))));
    EXPECT_THROW(sumOfDegreesIsEven(ColoredGraph(3)), StateError);
}
