#include <gtest/gtest.h>

#include <unistd.h>

#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ramsey/pipeline.hpp"
#include "ramsey/witness.hpp"

using namespace ramsey;
namespace fs = std::filesystem;

namespace {

fs::path freshDir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ramsey_pipe_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig toyConfig(const fs::path& root, int p, int q, int n, std::vector<int> degrees) {
    PipelineConfig cfg;
    cfg.p = p;
    cfg.q = q;
    cfg.n = n;
    cfg.degrees = std::move(degrees);
    cfg.outputRoot = root;
    return cfg;
}

double spearmanNoTies(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = x.size();
    auto rank = [n](const std::vector<double>& v) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t below = 0;
            for (std::size_t j = 0; j < n; ++j) below += v[j] < v[i];
            r[i] = static_cast<double>(below + 1);
        }
        return r;
    };
    const auto rx = rank(x), ry = rank(y);
    double d2 = 0;
    for (std::size_t i = 0; i < n; ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double m = static_cast<double>(n);
    return 1.0 - 6.0 * d2 / (m * (m * m - 1.0));
}

}  // namespace

TEST(Config, ParseAndFormat) {
    std::istringstream text(
        "# campaign\n"
        "target = 4,5,25\n"
        "degrees=8,10\n"
        "cover.a.max_gray=4\n"
        "cover.a.edge_sel=fastest\n"
        "cover.a.gen_sel=mixed\n"
        "cover.a.mixed_c=0.5\n"
        "d10.cover.a.max_gray=6\n"
        "cover.b.sample=30\n"
        "solver=dpll\n"
        "solver.time_limit=2.5\n"
        "workers=3\n"
        "seed=99\n");
    PipelineConfig cfg;
    applyConfigText(cfg, text);
    EXPECT_EQ(cfg.degrees, (std::vector<int>{8, 10}));
    EXPECT_EQ(cfg.covers.a.edgeSelection, EdgeSelection::Fastest);
    EXPECT_EQ(cfg.coversFor(8).a.maxGray, 4);
    EXPECT_EQ(cfg.coversFor(10).a.maxGray, 6);
    EXPECT_EQ(cfg.coversFor(10).b.sampleSize, 30u);
    EXPECT_EQ(cfg.coversFor(10).b.side, Side::Right);
    EXPECT_EQ(cfg.solver, SolverChoice::EmbeddedDpll);
    EXPECT_DOUBLE_EQ(cfg.limits.seconds, 2.5);
    EXPECT_EQ(cfg.workers, 3);
    EXPECT_EQ(cfg.seed, 99u);

    PipelineConfig again;
    std::istringstream formatted(formatConfig(cfg));
    applyConfigText(again, formatted);
    EXPECT_EQ(formatConfig(again), formatConfig(cfg));
}

TEST(Config, Errors) {
    PipelineConfig cfg;
    EXPECT_THROW(applyConfigKey(cfg, "colour", "blue"), ArgumentError);
    EXPECT_THROW(applyConfigKey(cfg, "workers", "many"), ArgumentError);
    EXPECT_THROW(applyConfigKey(cfg, "target", "4,5"), ArgumentError);
    EXPECT_THROW(applyConfigKey(cfg, "cover.c.max_gray", "1"), ArgumentError);
    std::istringstream text("seed=1\nnonsense\n");
    try {
        applyConfigText(cfg, text);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Config, EnvironmentOverrides) {
    PipelineConfig cfg;
    ::setenv("RAMSEY_OUT", "/tmp/elsewhere", 1);
    ::setenv("RAMSEY_WORKERS", "5", 1);
    applyEnvironment(cfg);
    ::unsetenv("RAMSEY_OUT");
    ::unsetenv("RAMSEY_WORKERS");
    EXPECT_EQ(cfg.outputRoot, fs::path("/tmp/elsewhere"));
    EXPECT_EQ(cfg.workers, 5);
}

TEST(JobStore, CorruptLinesAreSkipped) {
    const auto dir = freshDir("store");
    {
        JobStore store(dir);
        store.append({"aa", 8, 1, "d8:a0:b0", "unsat", 1.5, "embedded:learning", "t", 0.1, 10, false});
        store.append({"bb", 8, 1, "d8:a0:b1", "limit", 3.0, "embedded:learning", "t", 0.2, 20, false});
    }
    std::ofstream(dir / "records.jsonl", std::ios::app) << "{\"problemId\": \"cc\", broken\n";
    {
        JobStore store(dir);
        store.append({"bb", 8, 2, "d8:a0:b1", "unsat", 4.0, "embedded:learning", "t", 0.2, 30, false});
    }
    const auto contents = JobStore::load(dir);
    EXPECT_EQ(contents.jobs.size(), 3u);
    EXPECT_EQ(contents.corruptLines, 1u);
    const auto latest = contents.latest();
    EXPECT_EQ(latest.at("bb").verdict, "unsat");
    EXPECT_EQ(latest.at("bb").attempt, 2);
    fs::remove_all(dir);
}

TEST(Report, EmptyAndMixedStores) {
    const auto dir = freshDir("report");
    const auto empty = report(dir);
    EXPECT_TRUE(empty.rows.empty());
    EXPECT_EQ(formatReportText(empty), "0 problems, 0 Unsat, 0 Sat\n");

    JobStore store(dir);
    for (int i = 0; i < 4; ++i) store.append({"u" + std::to_string(i), 8, 1, "", "unsat", 1.0 + i, "x", "", 0, 0, false});
    store.append({"s0", 10, 1, "", "sat", 2.0, "x", "", 0, 0, false});
    store.append({"p0", 10, 1, "", "limit", 6.0, "x", "", 0, 0, true});
    store.appendDegree({8, 179, 2, 26, 2, "a", "b"});
    const auto rep = report(dir);
    ASSERT_EQ(rep.rows.size(), 2u);
    const auto& d8 = rep.rows[0];
    EXPECT_EQ(d8.degree, 8);
    EXPECT_EQ(d8.problems, 4u);
    EXPECT_EQ(d8.unsat, 4u);
    EXPECT_DOUBLE_EQ(d8.total, 10.0);
    EXPECT_DOUBLE_EQ(d8.p50, 2.5);
    EXPECT_DOUBLE_EQ(d8.max, 4.0);
    EXPECT_EQ(d8.baseline, 358u);
    EXPECT_DOUBLE_EQ(d8.reduction, 358.0 / 52.0);
    EXPECT_EQ(rep.rows[1].sat, 1u);
    EXPECT_EQ(rep.rows[1].pending, 1u);
    EXPECT_EQ(rep.rows[1].unverified, 1u);
    EXPECT_EQ(formatReportText(rep).substr(0, 27), "6 problems, 4 Unsat, 1 Sat\n");
    const auto csv = formatReportCsv(rep);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "degree,problems,unsat,sat,pending,errors,unverified_unsat,baseline_problems,reduction_factor,"
              "time_total_s,time_p50_s,time_p90_s,time_max_s");
    fs::remove_all(dir);
}

TEST(Spearman, MatchesRankFormula) {
    std::mt19937_64 rng(71);
    std::normal_distribution<double> normal;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(20), y(20);
        for (int i = 0; i < 20; ++i) {
            x[i] = normal(rng);
            y[i] = 0.5 * x[i] + normal(rng);
        }
        EXPECT_NEAR(spearman(x, y), spearmanNoTies(x, y), 1e-12);
    }
    EXPECT_DOUBLE_EQ(spearman({1, 2, 3}, {10, 20, 30}), 1.0);
    EXPECT_DOUBLE_EQ(spearman({1, 2, 3}, {3, 2, 1}), -1.0);
    EXPECT_TRUE(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
    EXPECT_THROW(spearman({1}, {1, 2}), ArgumentError);
}

TEST(Pipeline, SplittingVertex) {
    const auto glued = ColoredGraph::complete(5, EdgeColor::Red);
    const auto g = withSplittingVertex(glued, 2);
    EXPECT_EQ(g.order(), 6);
    EXPECT_EQ(g.color(0, 5), EdgeColor::Blue);
    EXPECT_EQ(g.color(1, 5), EdgeColor::Blue);
    EXPECT_EQ(g.color(2, 5), EdgeColor::Red);
}

// R(3,6) = 18: every gluing for both candidate degrees is Unsat.
TEST(Pipeline, EstablishesToyBoundAndResumes) {
    const auto root = freshDir("r36");
    auto cfg = toyConfig(root, 3, 6, 18, {4, 5});
    cfg.covers.a.maxGray = 0;
    const auto first = runPipeline(cfg);
    EXPECT_TRUE(first.established());
    EXPECT_EQ(first.conclusion(), "R°(3,6,18) established modulo solver trust");
    ASSERT_EQ(first.degrees.size(), 2u);
    EXPECT_EQ(first.degrees[1].problems, first.degrees[1].unsat);
    EXPECT_TRUE(fs::exists(root / "resolved.conf"));
    EXPECT_TRUE(fs::exists(root / "d5" / "cover-b.txt"));

    const auto recordsBefore = JobStore::load(cfg.storeDir()).jobs.size();
    const auto second = runPipeline(cfg);
    EXPECT_EQ(JobStore::load(cfg.storeDir()).jobs.size(), recordsBefore);
    EXPECT_EQ(second.conclusion(), first.conclusion());
    for (std::size_t i = 0; i < second.degrees.size(); ++i) {
        EXPECT_EQ(second.degrees[i].reused, second.degrees[i].problems);
        EXPECT_EQ(second.degrees[i].unsat, first.degrees[i].unsat);
    }
    const auto rep = report(cfg.storeDir());
    std::size_t unsat = 0;
    for (const auto& r : rep.rows) unsat += r.unsat;
    EXPECT_EQ(unsat, first.degrees[0].problems + first.degrees[1].problems);
    fs::remove_all(root);
}

// R(3,4,8) is nonempty: gluings are satisfiable and the decoded graphs are
// genuine R(3,4,8) members.
TEST(Pipeline, SurfacesSatisfiableGluings) {
    const auto root = freshDir("r34");
    auto cfg = toyConfig(root, 3, 4, 8, {2, 3});
    cfg.solver = SolverChoice::EmbeddedDpll;
    const auto rep = runPipeline(cfg);
    EXPECT_FALSE(rep.established());
    std::size_t sat = 0;
    for (const auto& d : rep.degrees) {
        EXPECT_FALSE(d.established());
        sat += d.sat;
        for (const auto& g : d.satGraphs) {
            EXPECT_EQ(g.order(), 8);
            EXPECT_TRUE(verifyWitness(g, {3, 4}).verified);
            EXPECT_EQ(std::popcount(g.neighbors(7, EdgeColor::Blue)), d.degree);
        }
    }
    EXPECT_GT(sat, 0u);
    fs::remove_all(root);
}

TEST(Pipeline, LimitsLeaveJobsPendingAndResumeFinishes) {
    const auto root = freshDir("limit");
    auto cfg = toyConfig(root, 3, 6, 18, {5});
    cfg.covers.a.maxGray = 0;
    cfg.covers.b.maxGray = 0;
    cfg.limits.conflicts = 1;
    const auto limited = runPipeline(cfg);
    ASSERT_EQ(limited.degrees.size(), 1u);
    EXPECT_GT(limited.degrees[0].pending, 0u);
    EXPECT_FALSE(limited.degrees[0].established());
    cfg.limits.conflicts = 0;
    const auto resumed = runPipeline(cfg);
    EXPECT_TRUE(resumed.degrees[0].established());
    EXPECT_EQ(resumed.degrees[0].reused + limited.degrees[0].pending, resumed.degrees[0].problems);
    const auto latest = JobStore::load(cfg.storeDir()).latest();
    bool retried = false;
    for (const auto& [id, job] : latest) retried = retried || job.attempt == 2;
    EXPECT_TRUE(retried);
    fs::remove_all(root);
}

TEST(Pipeline, ExternalSolverThroughCli) {
    const auto root = freshDir("ext");
    auto cfg = toyConfig(root, 3, 6, 18, {4, 5});
    cfg.solver = SolverChoice::External;
    cfg.solverName = "cli";
    cfg.solverCommand = std::string(RAMSEY_CLI_PATH) + " solve --cnf {input}";
    cfg.doubleCheck = true;
    const auto rep = runPipeline(cfg);
    EXPECT_TRUE(rep.established());
    std::size_t external = 0;
    for (const auto& [id, job] : JobStore::load(cfg.storeDir()).latest()) {
        EXPECT_TRUE(job.solver == "external:cli" || job.solver == "propagation") << job.solver;
        external += job.solver == "external:cli";
        EXPECT_FALSE(job.unverified);
    }
    EXPECT_GT(external, 0u);
    // CNF temp files live under the output root and are removed after use.
    EXPECT_TRUE(fs::is_empty(root / "cnf"));
    fs::remove_all(root);
}

TEST(Pipeline, RejectsNonCandidateDegrees) {
    const auto root = freshDir("bad");
    EXPECT_THROW(runPipeline(toyConfig(root, 3, 6, 18, {6})), ArgumentError);
    auto ext = toyConfig(root, 3, 6, 18, {4});
    ext.solver = SolverChoice::External;
    EXPECT_THROW(runPipeline(ext), ArgumentError);
    fs::remove_all(root);
}

TEST(ParamSearch, RowsAndCorrelation) {
    const auto root = freshDir("search");
    auto cfg = toyConfig(root, 3, 6, 18, {5});
    CoverPair singletons = cfg.covers;
    singletons.a.maxGray = 0;
    singletons.b.maxGray = 0;
    CoverPair built = singletons;
    built.b.maxGray = 3;
    const auto countOnly = parameterSearch(cfg, 5, {singletons}, 0);
    ASSERT_EQ(countOnly.size(), 1u);
    EXPECT_EQ(countOnly[0].problems, 12u);
    EXPECT_EQ(countOnly[0].sampled, 0u);

    const auto rows = parameterSearch(cfg, 5, {singletons, built}, 40);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].sampled, 12u);
    EXPECT_LE(rows[1].problems, rows[0].problems);
    EXPECT_NEAR(rows[0].estimatedTotalSeconds, rows[0].meanSolveSeconds * 12.0, 1e-12);
    EXPECT_EQ(rows[0].simplicity.size(), 12u);
    const auto table = formatSearchTable(rows);
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
    fs::remove_all(root);
}
