#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ramsey/bounds.hpp"
#include "ramsey/cover.hpp"
#include "ramsey/enumerate.hpp"
#include "ramsey/glue.hpp"
#include "ramsey/pipeline.hpp"
#include "ramsey/sat.hpp"
#include "ramsey/witness.hpp"

namespace fs = std::filesystem;
using namespace ramsey;

namespace {

int envWorkers() {
    if (const char* w = std::getenv("RAMSEY_WORKERS"); w && *w) return std::max(1, std::atoi(w));
    return 1;
}

fs::path envOutputRoot(const fs::path& fallback) {
    if (const char* out = std::getenv("RAMSEY_OUT"); out && *out) return out;
    return fallback;
}

std::vector<ColoredGraph> readGraphFile(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ResourceError("cannot open " + file.string());
    return readGraphList(in);
}

/// Class from a file written by `enumerate` (k<k>.txt); params from its header.
GraphClassSet readClassPath(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ResourceError("cannot open " + file.string());
    std::string header;
    std::getline(in, header);
    int p = 0, q = 0, k = 0;
    std::size_t count = 0;
    if (std::sscanf(header.c_str(), "# class %d %d %d %zu", &p, &q, &k, &count) != 4)
        throw ParseError("missing class header in " + file.string(), 1, 0);
    GraphClassSet set{{p, q}, k, readGraphList(in)};
    if (set.size() != count) throw ParseError(file.string() + " is truncated", 1, 0);
    return set;
}

struct CoverFlags {
    std::string classDir;
    int p = 3, q = 5, k = 8;
    int maxGray = 4;
    std::string edgeSel = "random", genSel = "greedy", sample = "all", side = "left", threshold = "before";
    double mixedC = 1.0;
    std::uint64_t seed = 1;
    std::string counterpart;
};

StrategyConfig strategyFrom(const CoverFlags& f, int workers) {
    StrategyConfig s;
    detail::applyStrategyKey(s, "max_gray", std::to_string(f.maxGray));
    detail::applyStrategyKey(s, "edge_sel", f.edgeSel);
    detail::applyStrategyKey(s, "gen_sel", f.genSel);
    detail::applyStrategyKey(s, "mixed_c", std::to_string(f.mixedC));
    detail::applyStrategyKey(s, "sample", f.sample);
    detail::applyStrategyKey(s, "threshold", f.threshold);
    if (f.side == "right") s.side = Side::Right;
    else if (f.side != "left") throw ArgumentError("--side must be left or right");
    s.seed = f.seed;
    s.workers = workers;
    s.validate();
    return s;
}

void printDegree(const DegreeReport& d) {
    std::cout << "d=" << d.degree << ": class " << d.classA << " x " << d.classB << ", cover " << d.coverA << " x "
              << d.coverB << ", " << d.problems << " problems, " << d.unsat << " Unsat, " << d.sat << " Sat, "
              << d.pending << " pending";
    if (!d.failure.empty()) std::cout << ", FAILED: " << d.failure;
    std::cout << '\n';
    for (const auto& g : d.satGraphs) std::cout << "  counterexample " << writeGraph(g) << '\n';
}

PipelineConfig loadConfig(const std::string& file, const std::vector<std::string>& sets) {
    PipelineConfig cfg;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw ResourceError("cannot open " + file);
        applyConfigText(cfg, in);
    }
    applyEnvironment(cfg);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + kv + "'");
        applyConfigKey(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ramsey graph enumeration, covers, gluing and SAT campaigns"};
    app.require_subcommand(1);
    const int defaultWorkers = envWorkers();

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "Enumerate R(p,q,k) classes up to isomorphism");
    int eP = 3, eQ = 5, eK = 13, eWorkers = defaultWorkers;
    std::string eOut;
    bool eSpill = false;
    std::size_t eMax = 0;
    enumerate->add_option("--p", eP, "Forbidden blue clique size")->required();
    enumerate->add_option("--q", eQ, "Forbidden red clique size")->required();
    enumerate->add_option("--kmax", eK, "Largest vertex count")->required();
    enumerate->add_option("--out", eOut, "Directory for k<k>.txt and counts.txt");
    enumerate->add_option("--workers", eWorkers);
    enumerate->add_option("--max-class-size", eMax, "Stop when a level grows past this (0 = no limit)");
    enumerate->add_flag("--spill", eSpill, "Spill dedup sets to disk");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Derive upper-bound facts and the degree window");
    std::string bTarget = "4,5,25";
    bounds->add_option("--target", bTarget, "p,q,n")->required();

    // cover
    auto* cover = app.add_subcommand("cover", "Build and check exact covers");
    cover->require_subcommand(1);
    CoverFlags cf;
    std::string cOut, cCover, cCoverNext;
    int cWorkers = defaultWorkers;
    auto* coverBuild = cover->add_subcommand("build", "Build a cover of a class");
    coverBuild->add_option("--class-dir", cf.classDir)->required();
    coverBuild->add_option("--p", cf.p);
    coverBuild->add_option("--q", cf.q);
    coverBuild->add_option("--k", cf.k)->required();
    coverBuild->add_option("--max-gray", cf.maxGray);
    coverBuild->add_option("--edge-sel", cf.edgeSel, "random|fastest");
    coverBuild->add_option("--gen-sel", cf.genSel, "greedy|mixed");
    coverBuild->add_option("--mixed-c", cf.mixedC);
    coverBuild->add_option("--sample", cf.sample, "Number of seeds per round, or all");
    coverBuild->add_option("--seed", cf.seed);
    coverBuild->add_option("--side", cf.side, "left|right: side of the gluing this class sits on");
    coverBuild->add_option("--threshold", cf.threshold, "before|after");
    coverBuild->add_option("--counterpart", cf.counterpart, "Class file of the opposite side (for fastest/mixed)");
    coverBuild->add_option("--out", cOut, "Cover file")->required();
    coverBuild->add_option("--workers", cWorkers);
    auto* coverVerify = cover->add_subcommand("verify", "Check that a cover is exact for its class");
    coverVerify->add_option("--cover", cCover)->required();
    coverVerify->add_option("--class-dir", cf.classDir)->required();
    coverVerify->add_option("--workers", cWorkers);
    auto* coverExtend = cover->add_subcommand("extend-check", "Check one-vertex extensions of a k cover against a k+1 cover");
    coverExtend->add_option("--cover", cCover, "Cover at k")->required();
    coverExtend->add_option("--next", cCoverNext, "Cover at k+1")->required();
    coverExtend->add_option("--workers", cWorkers);

    // glue
    auto* glue = app.add_subcommand("glue", "Encode and score gluing problems");
    glue->require_subcommand(1);
    std::string gA, gB, gOut, gClassA, gClassB;
    int gP = 4, gQ = 5;
    bool gPropagate = false;
    auto* glueEncode = glue->add_subcommand("encode", "Write one DIMACS file per cover pair");
    glueEncode->add_option("--cover-a", gA)->required();
    glueEncode->add_option("--cover-b", gB)->required();
    glueEncode->add_option("--out", gOut)->required();
    glueEncode->add_option("--p", gP);
    glueEncode->add_option("--q", gQ);
    glueEncode->add_flag("--propagate", gPropagate, "Unit-propagate before writing");
    auto* glueScore = glue->add_subcommand("score", "Print simplicity scores");
    glueScore->add_option("--cover-a", gA)->required();
    glueScore->add_option("--cover-b", gB)->required();
    glueScore->add_option("--class-a", gClassA, "Class file of side A: print one-sided scores of cover B");
    glueScore->add_option("--class-b", gClassB, "Class file of side B: print one-sided scores of cover A");

    // solve
    auto* solve = app.add_subcommand("solve", "Solve a DIMACS CNF");
    std::string sCnf, sSolver = "embedded", sCommand;
    bool sDoubleCheck = false, sPropagate = false;
    double sTime = 0;
    std::uint64_t sConflicts = 0;
    solve->add_option("--cnf", sCnf)->required();
    solve->add_option("--solver", sSolver, "embedded|dpll|external");
    solve->add_option("--command", sCommand, "External solver command with {input}");
    solve->add_flag("--double-check", sDoubleCheck, "Re-check external Unsat with the embedded solver");
    solve->add_flag("--propagate", sPropagate, "Unit-propagate before the embedded solver");
    solve->add_option("--time-limit", sTime, "Seconds (0 = none)");
    solve->add_option("--conflict-limit", sConflicts, "Conflicts (0 = none)");

    // witness
    auto* witness = app.add_subcommand("witness", "Lower-bound witnesses");
    witness->require_subcommand(1);
    auto* witnessVerify = witness->add_subcommand("verify", "Check that a graph has the Ramsey property");
    std::string wFile, wFormat = "edge-list";
    int wP = 4, wQ = 5, wWorkers = defaultWorkers;
    std::optional<int> wN;
    witnessVerify->add_option("--file", wFile)->required();
    witnessVerify->add_option("--format", wFormat, "edge-list|graph6");
    witnessVerify->add_option("--p", wP);
    witnessVerify->add_option("--q", wQ);
    witnessVerify->add_option("--n", wN, "Expected vertex count");
    witnessVerify->add_option("--workers", wWorkers);

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Run a gluing campaign");
    std::string pConfig, pOut;
    std::vector<std::string> pSets;
    std::optional<int> pWorkers;
    pipeline->add_option("--config", pConfig, "key=value config file");
    pipeline->add_option("--set", pSets, "Override a config key (key=value)");
    pipeline->add_option("--out", pOut, "Output root");
    pipeline->add_option("--workers", pWorkers);

    // param-search
    auto* search = app.add_subcommand("param-search", "Estimate campaign cost for cover strategies");
    std::vector<std::string> psGrid;
    int psDegree = 8;
    std::size_t psSamples = 200;
    std::string psCsv;
    search->add_option("--config", pConfig);
    search->add_option("--set", pSets);
    search->add_option("--out", pOut);
    search->add_option("--workers", pWorkers);
    search->add_option("--degree", psDegree);
    search->add_option("--samples", psSamples);
    search->add_option("--grid", psGrid,
                       "Grid point: comma-separated cover keys, e.g. a.max_gray=4,b.max_gray=0 (repeatable)");
    search->add_option("--csv", psCsv, "Write the table as CSV");

    // report
    auto* reportCmd = app.add_subcommand("report", "Summarize a job store");
    std::string rStore, rCsv;
    reportCmd->add_option("--store", rStore, "Job store directory (default <output root>/jobs)");
    reportCmd->add_option("--csv", rCsv, "Write per-degree CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*enumerate) {
            EnumerationOptions options;
            options.extension.workers = eWorkers;
            options.extension.spill = eSpill;
            options.maxClassSize = eMax;
            const CliqueParams params{eP, eQ};
            const auto result = eOut.empty() ? enumerateClass(params, eK, options, false)
                                             : enumerateToDirectory(params, eK, eOut, options, false);
            const auto counts = result.counts();
            for (std::size_t i = 0; i < counts.size(); ++i) std::cout << "k=" << i + 1 << " " << counts[i] << '\n';
            std::cout << "counts [";
            for (std::size_t i = 0; i < counts.size(); ++i) std::cout << (i ? "," : "") << counts[i];
            std::cout << "]\n";
            if (!result.complete) {
                std::cerr << "stopped: " << result.abortReason << '\n';
                return 1;
            }
            return 0;
        }
        if (*bounds) {
            const auto v = detail::parseIntList(bTarget);
            if (v.size() != 3) throw ArgumentError("--target expects p,q,n");
            std::cout << formatAnalysis(analyzeTarget(v[0], v[1], v[2]));
            return 0;
        }
        if (*coverBuild) {
            const auto cls = loadOrEnumerate({cf.p, cf.q}, cf.k, cf.classDir);
            const auto strategy = strategyFrom(cf, cWorkers);
            std::optional<CliqueAverages> averages;
            if (strategy.needsCounterpart()) {
                if (cf.counterpart.empty()) throw ArgumentError("fastest/mixed selection needs --counterpart");
                averages = CliqueAverages::of(readClassPath(cf.counterpart).graphs);
            }
            BuildStats stats;
            const Cover built = strategy.maxGray == 0 ? singletonCover(cls)
                                                      : buildCover(cls, strategy, averages ? &*averages : nullptr, &stats);
            writeCoverFile(cOut, built);
            std::cout << "class " << cls.size() << ", cover " << built.size() << " (" << built.strategy << ")\n";
            return 0;
        }
        if (*coverVerify) {
            const auto c = readCoverFile(cCover);
            const auto cls = loadOrEnumerate(c.params, c.k, cf.classDir);
            const auto rep = verifyCoverExact(c, cls, cWorkers);
            std::cout << (rep.exact ? "exact" : "NOT exact") << ": " << c.size() << " generalizations, class "
                      << cls.size() << ", missing " << rep.missing.size() << ", extra " << rep.extra.size() << '\n';
            for (const auto& g : rep.missing) std::cout << "  missing " << writeGraph(g) << '\n';
            for (const auto& g : rep.extra) std::cout << "  extra " << writeGraph(g) << '\n';
            return rep.exact ? 0 : 2;
        }
        if (*coverExtend) {
            const auto rep = verifyExtension(readCoverFile(cCover), readCoverFile(cCoverNext), cWorkers);
            std::cout << (rep.ok ? "ok" : "FAILED") << ": " << rep.checked << " extensions checked\n";
            if (rep.counterexample) std::cout << "  not covered " << writeGraph(*rep.counterexample) << '\n';
            return rep.ok ? 0 : 2;
        }
        if (*glueEncode) {
            const auto a = readCoverFile(gA), b = readCoverFile(gB);
            PipelineConfig cfg;
            cfg.p = gP;
            cfg.q = gQ;
            fs::create_directories(gOut);
            std::ofstream index(fs::path(gOut) / "index.tsv");
            index << "# id\tcover_a\tcover_b\tvars\tclauses\n";
            const auto problems = gluingProblems(cfg, a, b);
            for (std::size_t i = 0; i < problems.size(); ++i) {
                const auto& problem = problems[i];
                Cnf cnf = encodeGlue(problem);
                if (gPropagate) {
                    const auto r = unitPropagate(cnf);
                    if (std::holds_alternative<Conflict>(r)) cnf = Cnf{cnf.varCount, {Clause{}}};
                    else cnf = std::get<Propagated>(r).cnf;
                }
                const auto id = problem.id();
                std::ofstream f(fs::path(gOut) / (id + ".cnf"));
                f << toDimacs(cnf);
                index << id << '\t' << i / b.size() << '\t' << i % b.size() << '\t' << cnf.varCount << '\t'
                      << cnf.clauses.size() << '\n';
            }
            std::cout << problems.size() << " problems written to " << gOut << '\n';
            return 0;
        }
        if (*glueScore) {
            const auto a = readCoverFile(gA), b = readCoverFile(gB);
            std::cout << std::setprecision(10);
            if (!gClassA.empty() || !gClassB.empty()) {
                if (!gClassB.empty()) {
                    const auto avg = CliqueAverages::of(readClassPath(gClassB).graphs);
                    for (std::size_t i = 0; i < a.size(); ++i)
                        std::cout << "a " << i << ' ' << simplicityOneSided(a.gens[i].rep, avg, Side::Left) << '\n';
                }
                if (!gClassA.empty()) {
                    const auto avg = CliqueAverages::of(readClassPath(gClassA).graphs);
                    for (std::size_t j = 0; j < b.size(); ++j)
                        std::cout << "b " << j << ' ' << simplicityOneSided(b.gens[j].rep, avg, Side::Right) << '\n';
                }
                return 0;
            }
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = 0; j < b.size(); ++j)
                    std::cout << i << ' ' << j << ' ' << simplicityPair(a.gens[i].rep, b.gens[j].rep) << '\n';
            return 0;
        }
        if (*solve) {
            SolveLimits limits{sTime, sConflicts};
            SatVerdict verdict;
            if (sSolver == "external") {
                if (sCommand.empty()) throw ArgumentError("--solver external needs --command");
                ExternalSolverOptions opts;
                opts.commandTemplate = sCommand;
                opts.doubleCheck = sDoubleCheck;
                opts.doubleCheckLimits = limits;
                verdict = solveExternal(sCnf, opts);
            } else {
                std::ifstream in(sCnf);
                if (!in) throw ResourceError("cannot open " + sCnf);
                const Cnf cnf = fromDimacs(in);
                const auto algorithm = sSolver == "dpll" ? EmbeddedAlgorithm::Dpll : EmbeddedAlgorithm::Learning;
                if (sSolver != "dpll" && sSolver != "embedded") throw ArgumentError("--solver must be embedded, dpll or external");
                if (sPropagate) {
                    const auto r = unitPropagate(cnf);
                    if (std::holds_alternative<Conflict>(r)) {
                        verdict.status = SatStatus::Unsat;
                        verdict.solver = "propagation";
                    } else {
                        const auto& reduced = std::get<Propagated>(r);
                        verdict = solveEmbedded(reduced.cnf, limits, algorithm);
                        if (verdict.status == SatStatus::Sat) {
                            for (Literal l : reduced.fixed) verdict.model[static_cast<std::size_t>(std::abs(l))] = l > 0;
                            if (!verifyModel(cnf, verdict.model)) throw StateError("model fails the input formula");
                        }
                    }
                } else {
                    verdict = solveEmbedded(cnf, limits, algorithm);
                }
            }
            std::cout << "c solver " << verdict.solver << " elapsed " << verdict.elapsed << " s conflicts "
                      << verdict.stats.conflicts << (verdict.unverifiedUnsat ? " unverified-unsat" : "") << '\n';
            std::cout << competitionOutput(verdict);
            switch (verdict.status) {
                case SatStatus::Sat: return 10;
                case SatStatus::Unsat: return 20;
                case SatStatus::LimitExceeded: return 0;
            }
            return 0;
        }
        if (*witnessVerify) {
            WitnessFormat format;
            if (wFormat == "edge-list") format = WitnessFormat::EdgeList;
            else if (wFormat == "graph6") format = WitnessFormat::Graph6;
            else throw ArgumentError("--format must be edge-list or graph6");
            if (!fs::exists(wFile)) {
                std::cerr << "no such file: " << wFile << "\n"
                          << "supply a witness as a blue edge list or a graph6 line; an R(4,5,24) example\n"
                          << "ships in the source tree as tests/data/r45-24.g6\n";
                return 1;
            }
            const auto g = ingestWitnessFile(wFile, format, wN);
            const auto claim = verifyWitness(g, {wP, wQ}, wWorkers);
            std::cout << claim.summary() << '\n';
            return claim.verified ? 0 : 2;
        }
        if (*pipeline) {
            auto cfg = loadConfig(pConfig, pSets);
            if (!pOut.empty()) cfg.outputRoot = pOut;
            if (pWorkers) cfg.workers = std::max(1, *pWorkers);
            const auto rep = runPipeline(cfg, &std::cerr);
            for (const auto& d : rep.degrees) printDegree(d);
            std::cout << rep.conclusion() << '\n';
            for (const auto& d : rep.degrees)
                if (!d.established()) return 3;
            return 0;
        }
        if (*search) {
            auto cfg = loadConfig(pConfig, pSets);
            if (!pOut.empty()) cfg.outputRoot = pOut;
            if (pWorkers) cfg.workers = std::max(1, *pWorkers);
            std::vector<CoverPair> grid;
            if (psGrid.empty()) psGrid = {"a.max_gray=0,b.max_gray=0", "a.max_gray=4,b.max_gray=0"};
            for (const auto& point : psGrid) {
                CoverPair pair = cfg.coversFor(psDegree);
                std::stringstream in(point);
                for (std::string kv; std::getline(in, kv, ',');) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos) throw ArgumentError("grid entries are key=value: '" + kv + "'");
                    detail::applyCoverKey(pair, kv.substr(0, eq), kv.substr(eq + 1));
                }
                grid.push_back(pair);
            }
            const auto rows = parameterSearch(cfg, psDegree, grid, psSamples, &std::cerr);
            const auto table = formatSearchTable(rows);
            std::cout << table;
            if (!psCsv.empty()) {
                std::ofstream out(psCsv);
                out << table;
            }
            return 0;
        }
        if (*reportCmd) {
            const fs::path store = rStore.empty() ? envOutputRoot("ramsey-out") / "jobs" : fs::path(rStore);
            const auto rep = report(store);
            for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << formatReportText(rep);
            if (!rCsv.empty()) {
                std::ofstream out(rCsv);
                out << formatReportCsv(rep);
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
