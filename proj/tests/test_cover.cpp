#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "ramsey/cover.hpp"
#include "ramsey/enumerate.hpp"

using namespace ramsey;

namespace {

const EnumerationResult& classes35() {
    static const auto run = enumerateClass({3, 5}, 10);
    return run;
}

const EnumerationResult& classes44() {
    static const auto run = enumerateClass({4, 4}, 8);
    return run;
}

StrategyConfig strategy(EdgeSelection e, GenSelection g, std::uint64_t seed, int maxGray = 4) {
    StrategyConfig s;
    s.edgeSelection = e;
    s.genSelection = g;
    s.mixedC = 0.5;
    s.seed = seed;
    s.maxGray = maxGray;
    return s;
}

}  // namespace

// Triangle class for (3,4): BBR, BRR, RRR. One generalization with two gray
// edges and a red one covers it; its four labeled colorings give three
// isomorphism classes.
TEST(Cover, TriangleExample) {
    const auto cls = enumerateClass({3, 4}, 3).levels[2];
    ASSERT_EQ(cls.size(), 3u);
    auto cfg = strategy(EdgeSelection::Random, GenSelection::GreedyCover, 1, 3);
    const auto cover = buildCover(cls, cfg);
    ASSERT_EQ(cover.size(), 1u);
    const auto& rep = cover.gens[0].rep;
    EXPECT_EQ(rep.grayCount(), 2);
    EXPECT_EQ(rep.blueMask().count(), 0u);
    EXPECT_EQ(rep.redMask().count(), 1u);
    EXPECT_EQ(concreteInstantiations(rep).size(), 4u);
    EXPECT_EQ(instantiations(cover.gens[0]), cls.graphs);
    EXPECT_TRUE(verifyCoverExact(cover, cls).exact);
}

TEST(Cover, NoveltyThreshold) {
    EXPECT_EQ(noveltyThreshold(0), 1u);
    EXPECT_EQ(noveltyThreshold(3), 1u);
    EXPECT_EQ(noveltyThreshold(4), 2u);
    EXPECT_EQ(noveltyThreshold(6), 8u);
}

TEST(Cover, InstantiationLimit) {
    EXPECT_THROW(concreteInstantiations(ColoredGraph(8)), ResourceError);
    EXPECT_EQ(concreteInstantiations(ColoredGraph(6)).size(), std::size_t{1} << 15);
}

TEST(Cover, StrategyDescribeParse) {
    auto s = strategy(EdgeSelection::Fastest, GenSelection::Mixed, 3);
    s.sampleSize = 40;
    s.side = Side::Right;
    s.thresholdBeforeAdd = false;
    const auto back = StrategyConfig::parse(s.describe());
    EXPECT_EQ(back.describe(), s.describe());
    EXPECT_EQ(StrategyConfig::parse("random/greedy/sample-all/left").describe(), "random/greedy/sample-all/left");
    EXPECT_THROW(StrategyConfig::parse("quick/greedy/sample-all/left"), ArgumentError);
    s.maxGray = 21;
    EXPECT_THROW(s.validate(), ArgumentError);
    const auto cls = classes35().levels[5];
    EXPECT_THROW(buildCover(cls, strategy(EdgeSelection::Fastest, GenSelection::GreedyCover, 1)), ArgumentError);
}

// Covered set computed independently: every labeled coloring reduced by the
// all-permutations minimum, compared with the class reduced the same way.
TEST(CoverOracle, ExactnessMatchesBruteForce) {
    for (int k = 4; k <= 7; ++k) {
        const auto& cls = classes35().levels[static_cast<std::size_t>(k - 1)];
        const auto cover = buildCover(cls, strategy(EdgeSelection::Random, GenSelection::GreedyCover, 7));
        std::set<std::string> covered, expected;
        for (const auto& gen : cover.gens)
            for (const auto& g : concreteInstantiations(gen.rep)) {
                ASSERT_TRUE(oracle::ramseyProperty(g, 3, 5));
                covered.insert(oracle::minimalString(g));
            }
        for (const auto& g : cls.graphs) expected.insert(oracle::minimalString(g));
        EXPECT_EQ(covered, expected) << "k=" << k;
    }
}

TEST(CoverProperty, BuiltCoversAreExact) {
    const auto averages44 = CliqueAverages::of(classes44().levels[7].graphs);
    for (const auto* run : {&classes35(), &classes44()}) {
        for (const auto& cls : run->levels) {
            if (cls.k < 5) continue;
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                for (const auto& cfg : {strategy(EdgeSelection::Random, GenSelection::GreedyCover, seed),
                                        strategy(EdgeSelection::Fastest, GenSelection::Mixed, seed, 5)}) {
                    const auto cover = buildCover(cls, cfg, &averages44);
                    const auto rep = verifyCoverExact(cover, cls);
                    ASSERT_TRUE(rep.exact) << cls.k << " " << cfg.describe() << " seed " << seed;
                    EXPECT_LE(cover.size(), cls.size());
                    for (const auto& gen : cover.gens) EXPECT_LE(gen.grayCount(), cfg.maxGray);
                }
            }
        }
    }
}

TEST(CoverProperty, DeterministicAcrossWorkers) {
    const auto& cls = classes35().levels[8];
    auto cfg = strategy(EdgeSelection::Random, GenSelection::GreedyCover, 5);
    const auto one = buildCover(cls, cfg);
    cfg.workers = 3;
    const auto three = buildCover(cls, cfg);
    EXPECT_EQ(one.gens, three.gens);
    cfg.sampleSize = 10;
    EXPECT_TRUE(verifyCoverExact(buildCover(cls, cfg), cls).exact);
}

TEST(Cover, VerifyDetectsMissingAndExtra) {
    const auto& cls = classes35().levels[7];
    auto cover = buildCover(cls, strategy(EdgeSelection::Random, GenSelection::GreedyCover, 1));
    ASSERT_GT(cover.size(), 1u);
    auto dropped = cover;
    dropped.gens.pop_back();
    const auto missing = verifyCoverExact(dropped, cls);
    EXPECT_FALSE(missing.exact);
    EXPECT_FALSE(missing.missing.empty());
    EXPECT_TRUE(missing.extra.empty());

    auto widened = cover;
    widened.gens.push_back({ColoredGraph::complete(8, EdgeColor::Red)});
    const auto extra = verifyCoverExact(widened, cls);
    EXPECT_FALSE(extra.exact);
    EXPECT_EQ(extra.extra.size(), 1u);

    auto wrongK = cover;
    wrongK.k = 9;
    EXPECT_THROW(verifyCoverExact(wrongK, cls), ArgumentError);
    EXPECT_TRUE(verifyCoverExact(singletonCover(cls), cls).exact);
}

TEST(Cover, ExtensionCheck) {
    std::vector<Cover> covers;
    for (int k = 5; k <= 8; ++k)
        covers.push_back(buildCover(classes35().levels[static_cast<std::size_t>(k - 1)],
                                    strategy(EdgeSelection::Random, GenSelection::GreedyCover, 2)));
    for (std::size_t i = 0; i + 1 < covers.size(); ++i) {
        const auto rep = verifyExtension(covers[i], covers[i + 1]);
        EXPECT_TRUE(rep.ok) << "k=" << covers[i].k;
        EXPECT_GT(rep.checked, 0u);
    }
    auto broken = covers[1];
    broken.gens.erase(broken.gens.begin());
    const auto rep = verifyExtension(covers[0], broken);
    EXPECT_FALSE(rep.ok);
    ASSERT_TRUE(rep.counterexample.has_value());
    EXPECT_TRUE(satisfiesRamseyProperty(*rep.counterexample, {3, 5}));
}

TEST(Cover, FileRoundTrip) {
    const auto& cls = classes35().levels[6];
    const auto averages44 = CliqueAverages::of(classes44().levels[7].graphs);
    const auto cover = buildCover(cls, strategy(EdgeSelection::Random, GenSelection::Mixed, 9), &averages44);
    std::stringstream buf;
    writeCover(buf, cover);
    EXPECT_EQ(buf.str().rfind("# cover 3 5 7 4 9 random/mixed-0.5/sample-all/left\n", 0), 0u);
    const auto back = readCover(buf);
    EXPECT_EQ(back.gens, cover.gens);
    EXPECT_EQ(back.k, 7);
    EXPECT_EQ(back.maxGray, 4);
    EXPECT_EQ(back.seed, 9u);
    EXPECT_EQ(back.strategy, cover.strategy);
    std::istringstream bad("# cover 3 5\n7 RRRRRRRRRRRRRRRRRRRRR\n");
    EXPECT_THROW(readCover(bad), ParseError);
    std::istringstream wrongOrder("# cover 3 5 8 4 1 singleton\n7 RRRRRRRRRRRRRRRRRRRRR\n");
    EXPECT_THROW(readCover(wrongOrder), ParseError);
}
