#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ramsey/enumerate.hpp"
#include "ramsey/graph6.hpp"
#include "ramsey/witness.hpp"

using namespace ramsey;
namespace fs = std::filesystem;

namespace {

ColoredGraph blueCycle(int n) {
    ColoredGraph g = ColoredGraph::complete(n, EdgeColor::Red);
    for (int i = 0; i < n; ++i) g.setColor(i, (i + 1) % n, EdgeColor::Blue);
    return g;
}

}  // namespace

TEST(Witness, FiveCycle) {
    const auto claim = verifyWitness(blueCycle(5), {3, 3});
    EXPECT_TRUE(claim.verified);
    EXPECT_EQ(claim.summary(), "R(3,3) > 5: verified");
}

TEST(Witness, RefutationIsLexicographicallyFirst) {
    ColoredGraph g = ColoredGraph::complete(6, EdgeColor::Red);
    g.setColor(1, 3, EdgeColor::Blue);
    g.setColor(1, 4, EdgeColor::Blue);
    g.setColor(3, 4, EdgeColor::Blue);
    const auto claim = verifyWitness(g, {3, 3}, 2);
    EXPECT_FALSE(claim.verified);
    EXPECT_EQ(claim.violatingColor, EdgeColor::Blue);
    EXPECT_EQ(claim.violating, (std::vector<int>{1, 3, 4}));
    const auto red = verifyWitness(g, {4, 3});
    EXPECT_EQ(red.violatingColor, EdgeColor::Red);
    EXPECT_EQ(red.violating, (std::vector<int>{0, 1, 2}));
}

TEST(Witness, AllRedFromEmptyEdgeList) {
    std::istringstream empty("");
    const auto g = parseEdgeList(empty, 24);
    EXPECT_EQ(g.order(), 24);
    const auto claim = verifyWitness(g, {4, 5});
    EXPECT_FALSE(claim.verified);
    EXPECT_EQ(claim.violatingColor, EdgeColor::Red);
    EXPECT_EQ(claim.violating, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Witness, EdgeListParsing) {
    std::istringstream in("# c5\nn 5\n0 1\n1 2\n2 3\n3 4\n4 0\n");
    EXPECT_EQ(parseEdgeList(in), blueCycle(5));
    auto bad = [](const std::string& text, std::optional<int> n = std::nullopt) {
        std::istringstream s(text);
        return parseEdgeList(s, n);
    };
    EXPECT_THROW(bad("1 1\n"), ParseError);
    EXPECT_THROW(bad("0 1\n1 0\n"), ParseError);
    EXPECT_THROW(bad("0 7\n", 5), ParseError);
    EXPECT_THROW(bad(""), ParseError);
    EXPECT_THROW(bad("0 1 2\n"), ParseError);
    EXPECT_THROW(bad("0 40\n"), ParseError);
    EXPECT_EQ(bad("0 3\n").order(), 4);
}

TEST(WitnessOracle, AgreesWithCliqueSearch) {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 200; ++t) {
        const auto g = oracle::randomGraph(rng, 2 + static_cast<int>(rng() % 9));
        for (const CliqueParams params : {CliqueParams{3, 3}, CliqueParams{3, 4}, CliqueParams{4, 4}}) {
            const auto claim = verifyWitness(g, params, 1 + t % 3);
            ASSERT_EQ(claim.verified, oracle::ramseyProperty(g, params.blueBound, params.redBound));
            if (!claim.verified) {
                const int k = claim.violatingColor == EdgeColor::Blue ? params.blueBound : params.redBound;
                ASSERT_EQ(static_cast<int>(claim.violating.size()), k);
                for (std::size_t i = 0; i < claim.violating.size(); ++i)
                    for (std::size_t j = i + 1; j < claim.violating.size(); ++j)
                        ASSERT_EQ(g.color(claim.violating[i], claim.violating[j]), claim.violatingColor);
            }
        }
    }
    EXPECT_THROW(verifyWitness(ColoredGraph(4), {3, 3}), StateError);
}

TEST(Witness, EnumeratedGraphsVerify) {
    const auto run = enumerateClass({3, 4}, 8);
    for (const auto& g : run.levels.back().graphs) EXPECT_TRUE(verifyWitness(g, {3, 4}).verified);
}

// Circulant on 24 vertices, blue at cyclic distances 1, 2, 4, 8, 9.
TEST(Witness, BundledTwentyFourVertexWitness) {
    const auto g = ingestWitnessFile(RAMSEY_TEST_DATA "/r45-24.g6", WitnessFormat::Graph6, 24);
    ColoredGraph circulant = ColoredGraph::complete(24, EdgeColor::Red);
    for (int a = 0; a < 24; ++a)
        for (int b = a + 1; b < 24; ++b)
            for (int d : {1, 2, 4, 8, 9})
                if (std::min(b - a, 24 - (b - a)) == d) circulant.setColor(a, b, EdgeColor::Blue);
    EXPECT_EQ(g, circulant);
    const auto claim = verifyWitness(g, {4, 5});
    EXPECT_TRUE(claim.verified);
    EXPECT_EQ(claim.summary(), "R(4,5) > 24: verified");
    EXPECT_FALSE(verifyWitness(g, {4, 4}).verified);
}

TEST(Witness, FileIngest) {
    const auto dir = fs::temp_directory_path() / ("ramsey_witness_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ofstream(dir / "c5.g6") << toGraph6(blueCycle(5)) << '\n';
    std::ofstream(dir / "c5.txt") << "0 1\n1 2\n2 3\n3 4\n0 4\n";
    EXPECT_EQ(ingestWitnessFile(dir / "c5.g6", WitnessFormat::Graph6), blueCycle(5));
    EXPECT_EQ(ingestWitnessFile(dir / "c5.txt", WitnessFormat::EdgeList), blueCycle(5));
    EXPECT_THROW(ingestWitnessFile(dir / "c5.g6", WitnessFormat::Graph6, 6), ParseError);
    EXPECT_THROW(ingestWitnessFile(dir / "missing", WitnessFormat::Graph6), ResourceError);
    fs::remove_all(dir);
}
