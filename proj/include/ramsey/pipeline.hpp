#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ramsey/bounds.hpp"
#include "ramsey/cover.hpp"
#include "ramsey/enumerate.hpp"
#include "ramsey/glue.hpp"
#include "ramsey/sat.hpp"

namespace ramsey {

enum class SolverChoice { Embedded, EmbeddedDpll, External };

inline const char* solverChoiceName(SolverChoice s) {
    switch (s) {
        case SolverChoice::Embedded: return "embedded";
        case SolverChoice::EmbeddedDpll: return "dpll";
        case SolverChoice::External: return "external";
    }
    return "?";
}

struct CoverPair {
    StrategyConfig a;  // neighbor side, class R(p-1,q,d)
    StrategyConfig b;  // antineighbor side, class R(p,q-1,n-1-d)
};

struct PipelineConfig {
    int p = 4, q = 5, n = 25;
    std::vector<int> degrees{8};
    CoverPair covers;
    std::map<int, CoverPair> perDegree;
    SolverChoice solver = SolverChoice::Embedded;
    std::string solverName = "external";
    std::string solverCommand;
    bool doubleCheck = false;
    SolveLimits limits;
    int workers = 1;
    int maxProcesses = 1;
    std::size_t maxClassSize = 0;
    std::size_t maxMemoryMb = 0;  // 0 = no cap; applied per external solver process
    std::filesystem::path outputRoot = "ramsey-out";
    std::filesystem::path classDir;  // empty: <outputRoot>/classes
    std::uint64_t seed = 1;

    PipelineConfig() { covers.b.side = Side::Right; }

    CoverPair coversFor(int d) const {
        auto it = perDegree.find(d);
        return it == perDegree.end() ? covers : it->second;
    }
    std::filesystem::path classRoot() const { return classDir.empty() ? outputRoot / "classes" : classDir; }
    std::filesystem::path storeDir() const { return outputRoot / "jobs"; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<int> parseIntList(const std::string& value) {
    std::vector<int> out;
    std::stringstream in(value);
    for (std::string part; std::getline(in, part, ',');) {
        part = trim(part);
        if (part.empty()) continue;
        std::size_t used = 0;
        const int v = std::stoi(part, &used);
        if (used != part.size()) throw ArgumentError("not an integer: '" + part + "'");
        out.push_back(v);
    }
    return out;
}

inline bool parseBool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ArgumentError("not a boolean: '" + value + "'");
}

inline void applyStrategyKey(StrategyConfig& s, const std::string& key, const std::string& value) {
    if (key == "max_gray") s.maxGray = std::stoi(value);
    else if (key == "edge_sel") {
        if (value == "random") s.edgeSelection = EdgeSelection::Random;
        else if (value == "fastest") s.edgeSelection = EdgeSelection::Fastest;
        else throw ArgumentError("edge_sel must be random or fastest");
    } else if (key == "gen_sel") {
        if (value == "greedy") s.genSelection = GenSelection::GreedyCover;
        else if (value == "mixed") s.genSelection = GenSelection::Mixed;
        else throw ArgumentError("gen_sel must be greedy or mixed");
    } else if (key == "mixed_c") s.mixedC = std::stod(value);
    else if (key == "sample") s.sampleSize = value == "all" ? 0 : static_cast<std::size_t>(std::stoull(value));
    else if (key == "threshold") {
        if (value == "before") s.thresholdBeforeAdd = true;
        else if (value == "after") s.thresholdBeforeAdd = false;
        else throw ArgumentError("threshold must be before or after");
    } else throw ArgumentError("unknown cover key '" + key + "'");
}

inline void applyCoverKey(CoverPair& pair, const std::string& key, const std::string& value) {
    // key is "a.<field>" or "b.<field>"
    if (key.size() < 3 || key[1] != '.' || (key[0] != 'a' && key[0] != 'b'))
        throw ArgumentError("cover keys look like cover.a.max_gray");
    applyStrategyKey(key[0] == 'a' ? pair.a : pair.b, key.substr(2), value);
}

}  // namespace detail

/// Applies one key=value setting. Per-degree cover settings use the prefix
/// d<degree>., e.g. d8.cover.a.max_gray=4.
inline void applyConfigKey(PipelineConfig& cfg, const std::string& rawKey, const std::string& rawValue) {
    const std::string key = detail::trim(rawKey), value = detail::trim(rawValue);
    try {
        if (key == "target") {
            const auto v = detail::parseIntList(value);
            if (v.size() != 3) throw ArgumentError("target needs p,q,n");
            cfg.p = v[0];
            cfg.q = v[1];
            cfg.n = v[2];
        } else if (key == "degrees") {
            cfg.degrees = detail::parseIntList(value);
        } else if (key.rfind("cover.", 0) == 0) {
            detail::applyCoverKey(cfg.covers, key.substr(6), value);
            for (auto& [d, pair] : cfg.perDegree) detail::applyCoverKey(pair, key.substr(6), value);
        } else if (key.size() > 1 && key[0] == 'd' && key.find(".cover.") != std::string::npos) {
            const auto dot = key.find('.');
            const int d = std::stoi(key.substr(1, dot - 1));
            auto [it, fresh] = cfg.perDegree.try_emplace(d, cfg.covers);
            detail::applyCoverKey(it->second, key.substr(dot + 7), value);
        } else if (key == "solver") {
            if (value == "embedded") cfg.solver = SolverChoice::Embedded;
            else if (value == "dpll") cfg.solver = SolverChoice::EmbeddedDpll;
            else if (value == "external") cfg.solver = SolverChoice::External;
            else throw ArgumentError("solver must be embedded, dpll or external");
        } else if (key == "solver.command") cfg.solverCommand = value;
        else if (key == "solver.name") cfg.solverName = value;
        else if (key == "solver.double_check") cfg.doubleCheck = detail::parseBool(value);
        else if (key == "solver.time_limit") cfg.limits.seconds = std::stod(value);
        else if (key == "solver.conflict_limit") cfg.limits.conflicts = std::stoull(value);
        else if (key == "workers") cfg.workers = std::max(1, std::stoi(value));
        else if (key == "max_processes") cfg.maxProcesses = std::max(1, std::stoi(value));
        else if (key == "max_class_size") cfg.maxClassSize = std::stoull(value);
        else if (key == "max_memory_mb") cfg.maxMemoryMb = std::stoull(value);
        else if (key == "output_root") cfg.outputRoot = value;
        else if (key == "class_dir") cfg.classDir = value;
        else if (key == "seed") cfg.seed = std::stoull(value);
        else throw ArgumentError("unknown config key '" + key + "'");
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ArgumentError*>(&e)) throw;
        throw ArgumentError("bad value for " + key + ": '" + value + "'");
    }
}

/// Flat key=value text; '#' starts a comment line.
inline void applyConfigText(PipelineConfig& cfg, std::istream& in) {
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", lineNo, 0);
        try {
            applyConfigKey(cfg, t.substr(0, eq), t.substr(eq + 1));
        } catch (const ArgumentError& e) {
            throw ParseError(e.what(), lineNo, eq);
        }
    }
}

/// RAMSEY_OUT and RAMSEY_WORKERS override the output root and worker count.
inline void applyEnvironment(PipelineConfig& cfg) {
    if (const char* out = std::getenv("RAMSEY_OUT"); out && *out) cfg.outputRoot = out;
    if (const char* w = std::getenv("RAMSEY_WORKERS"); w && *w) applyConfigKey(cfg, "workers", w);
}

inline std::string formatConfig(const PipelineConfig& cfg) {
    std::ostringstream out;
    auto strategy = [&](const std::string& prefix, const StrategyConfig& s) {
        out << prefix << "max_gray=" << s.maxGray << '\n';
        out << prefix << "edge_sel=" << (s.edgeSelection == EdgeSelection::Fastest ? "fastest" : "random") << '\n';
        out << prefix << "gen_sel=" << (s.genSelection == GenSelection::Mixed ? "mixed" : "greedy") << '\n';
        out << prefix << "mixed_c=" << s.mixedC << '\n';
        out << prefix << "sample=";
        if (s.sampleSize == 0) out << "all";
        else out << s.sampleSize;
        out << '\n' << prefix << "threshold=" << (s.thresholdBeforeAdd ? "before" : "after") << '\n';
    };
    out << "target=" << cfg.p << ',' << cfg.q << ',' << cfg.n << '\n';
    out << "degrees=";
    for (std::size_t i = 0; i < cfg.degrees.size(); ++i) out << (i ? "," : "") << cfg.degrees[i];
    out << '\n';
    strategy("cover.a.", cfg.covers.a);
    strategy("cover.b.", cfg.covers.b);
    for (const auto& [d, pair] : cfg.perDegree) {
        strategy("d" + std::to_string(d) + ".cover.a.", pair.a);
        strategy("d" + std::to_string(d) + ".cover.b.", pair.b);
    }
    out << "solver=" << solverChoiceName(cfg.solver) << '\n';
    if (!cfg.solverCommand.empty()) out << "solver.command=" << cfg.solverCommand << '\n';
    out << "solver.name=" << cfg.solverName << '\n';
    out << "solver.double_check=" << (cfg.doubleCheck ? "true" : "false") << '\n';
    out << "solver.time_limit=" << cfg.limits.seconds << '\n';
    out << "solver.conflict_limit=" << cfg.limits.conflicts << '\n';
    out << "workers=" << cfg.workers << '\n';
    out << "max_processes=" << cfg.maxProcesses << '\n';
    out << "max_class_size=" << cfg.maxClassSize << '\n';
    out << "max_memory_mb=" << cfg.maxMemoryMb << '\n';
    out << "output_root=" << cfg.outputRoot.string() << '\n';
    if (!cfg.classDir.empty()) out << "class_dir=" << cfg.classDir.string() << '\n';
    out << "seed=" << cfg.seed << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Job store: <dir>/records.jsonl (one JSON object per line, append-only) and
// <dir>/degrees.jsonl (one line per campaign degree run).

struct JobRecord {
    std::string problemId;
    int degree = 0;
    int attempt = 1;
    std::string label;
    std::string verdict;  // sat | unsat | limit | error
    double elapsed = 0.0;
    std::string solver;
    std::string timestamp;
    double simplicity = 0.0;
    std::uint64_t conflicts = 0;
    bool unverified = false;
};

inline std::string utcTimestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json toJson(const JobRecord& r) {
    return {{"problemId", r.problemId}, {"degree", r.degree},   {"attempt", r.attempt}, {"label", r.label},
            {"verdict", r.verdict},     {"elapsed", r.elapsed}, {"solver", r.solver},
            {"timestamp", r.timestamp}, {"simplicity", r.simplicity}, {"conflicts", r.conflicts},
            {"unverified", r.unverified}};
}

inline JobRecord jobFromJson(const nlohmann::json& j) {
    JobRecord r;
    r.problemId = j.at("problemId").get<std::string>();
    r.degree = j.at("degree").get<int>();
    r.attempt = j.value("attempt", 1);
    r.label = j.value("label", "");
    r.verdict = j.at("verdict").get<std::string>();
    r.elapsed = j.at("elapsed").get<double>();
    r.solver = j.value("solver", "");
    r.timestamp = j.value("timestamp", "");
    r.simplicity = j.value("simplicity", 0.0);
    r.conflicts = j.value("conflicts", std::uint64_t{0});
    r.unverified = j.value("unverified", false);
    return r;
}

struct DegreeRecord {
    int degree = 0;
    std::size_t classA = 0, classB = 0, coverA = 0, coverB = 0;
    std::string strategyA, strategyB;
};

struct StoreContents {
    std::vector<JobRecord> jobs;  // in file order
    std::vector<DegreeRecord> degrees;
    std::size_t corruptLines = 0;
    std::vector<std::string> warnings;

    /// Last record per problem id.
    std::unordered_map<std::string, JobRecord> latest() const {
        std::unordered_map<std::string, JobRecord> out;
        for (const auto& j : jobs) out[j.problemId] = j;
        return out;
    }
};

class JobStore {
public:
    explicit JobStore(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path recordsFile() const { return dir_ / "records.jsonl"; }
    std::filesystem::path degreesFile() const { return dir_ / "degrees.jsonl"; }

    void append(const JobRecord& r) {
        std::lock_guard lock(mutex_);
        appendLine(recordsFile(), toJson(r).dump());
    }

    void appendDegree(const DegreeRecord& d) {
        std::lock_guard lock(mutex_);
        appendLine(degreesFile(), nlohmann::json{{"degree", d.degree},
                                                 {"classA", d.classA},
                                                 {"classB", d.classB},
                                                 {"coverA", d.coverA},
                                                 {"coverB", d.coverB},
                                                 {"strategyA", d.strategyA},
                                                 {"strategyB", d.strategyB}}
                                      .dump());
    }

    /// Reads both files; unparseable lines are skipped and counted.
    static StoreContents load(const std::filesystem::path& dir) {
        StoreContents out;
        auto readLines = [&](const std::filesystem::path& file, auto&& onRecord) {
            std::ifstream in(file);
            if (!in) return;
            std::string line;
            std::size_t lineNo = 0;
            while (std::getline(in, line)) {
                ++lineNo;
                if (detail::trim(line).empty()) continue;
                try {
                    onRecord(nlohmann::json::parse(line));
                } catch (const std::exception&) {
                    ++out.corruptLines;
                    out.warnings.push_back(file.filename().string() + ":" + std::to_string(lineNo) +
                                           ": skipped corrupt record");
                }
            }
        };
        readLines(dir / "records.jsonl", [&](const nlohmann::json& j) { out.jobs.push_back(jobFromJson(j)); });
        readLines(dir / "degrees.jsonl", [&](const nlohmann::json& j) {
            DegreeRecord d;
            d.degree = j.at("degree").get<int>();
            d.classA = j.at("classA").get<std::size_t>();
            d.classB = j.at("classB").get<std::size_t>();
            d.coverA = j.at("coverA").get<std::size_t>();
            d.coverB = j.at("coverB").get<std::size_t>();
            d.strategyA = j.value("strategyA", "");
            d.strategyB = j.value("strategyB", "");
            out.degrees.push_back(d);
        });
        return out;
    }

private:
    static void appendLine(const std::filesystem::path& file, const std::string& line) {
        std::ofstream out(file, std::ios::app);
        out << line << '\n';
        out.flush();
        if (!out) throw ResourceError("failed to append to " + file.string());
    }

    std::filesystem::path dir_;
    std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Solving one gluing problem.

struct ProblemOutcome {
    SatVerdict verdict;
    std::optional<ColoredGraph> counterexample;  // full n-vertex graph when Sat
};

/// Adds the splitting vertex back: blue to the neighbor side, red to the
/// rest.
inline ColoredGraph withSplittingVertex(const ColoredGraph& glued, int d) {
    const int m = glued.order();
    ColoredGraph g(m + 1);
    for (int b = 1; b < m; ++b)
        for (int a = 0; a < b; ++a) g.setColor(a, b, glued.color(a, b));
    for (int u = 0; u < m; ++u) g.setColor(u, m, u < d ? EdgeColor::Blue : EdgeColor::Red);
    return g;
}

inline ProblemOutcome solveProblem(const GlueProblem& problem, const PipelineConfig& cfg,
                                   const std::filesystem::path& cnfDir) {
    ProblemOutcome out;
    const Cnf cnf = encodeGlue(problem);
    const auto propagated = unitPropagate(cnf);
    if (std::holds_alternative<Conflict>(propagated)) {
        out.verdict.status = SatStatus::Unsat;
        out.verdict.solver = "propagation";
        return out;
    }
    const auto& reduced = std::get<Propagated>(propagated);
    if (cfg.solver == SolverChoice::External) {
        std::filesystem::create_directories(cnfDir);
        const auto file = cnfDir / (problem.id() + ".cnf");
        {
            std::ofstream f(file);
            f << toDimacs(cnf);
            if (!f) throw ResourceError("failed to write " + file.string());
        }
        ExternalSolverOptions opts;
        opts.name = cfg.solverName;
        opts.commandTemplate = cfg.maxMemoryMb == 0 ? cfg.solverCommand
                                                    : "ulimit -v " + std::to_string(cfg.maxMemoryMb * 1024) + "; " +
                                                          cfg.solverCommand;
        opts.doubleCheck = cfg.doubleCheck;
        opts.doubleCheckLimits = cfg.limits;
        out.verdict = solveExternal(file, opts);
        std::filesystem::remove(file);
    } else {
        const auto algorithm =
            cfg.solver == SolverChoice::EmbeddedDpll ? EmbeddedAlgorithm::Dpll : EmbeddedAlgorithm::Learning;
        out.verdict = solveEmbedded(reduced.cnf, cfg.limits, algorithm);
        if (out.verdict.status == SatStatus::Sat) {
            for (Literal l : reduced.fixed) out.verdict.model[static_cast<std::size_t>(std::abs(l))] = l > 0;
            if (!verifyModel(cnf, out.verdict.model)) throw StateError("model fails the full gluing formula");
        }
    }
    if (out.verdict.status == SatStatus::Sat)
        out.counterexample = withSplittingVertex(decodeModel(problem.order(), out.verdict.model), problem.gStar.order());
    return out;
}

// ---------------------------------------------------------------------------
// Campaigns.

struct DegreeReport {
    int degree = 0;
    std::size_t classA = 0, classB = 0, coverA = 0, coverB = 0;
    std::size_t problems = 0, unsat = 0, sat = 0, pending = 0, reused = 0;
    bool coversExact = false;
    std::string failure;
    std::vector<ColoredGraph> satGraphs;
    double solveSeconds = 0.0;

    bool established() const { return failure.empty() && coversExact && sat == 0 && pending == 0; }
};

struct CampaignReport {
    int p = 0, q = 0, n = 0;
    std::vector<DegreeReport> degrees;
    std::vector<int> candidates;

    bool established() const {
        if (degrees.empty()) return false;
        for (int d : candidates) {
            bool found = false;
            for (const auto& r : degrees) found = found || (r.degree == d && r.established());
            if (!found) return false;
        }
        return true;
    }

    std::string conclusion() const {
        const std::string claim =
            "R°(" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(n) + ")";
        if (established()) return claim + " established modulo solver trust";
        return claim + " not established";
    }
};

struct DegreeInputs {
    GraphClassSet classA, classB;
    Cover coverA, coverB;
};

inline DegreeInputs prepareDegree(const PipelineConfig& cfg, int d) {
    EnumerationOptions enumOptions;
    enumOptions.extension.workers = cfg.workers;
    enumOptions.maxClassSize = cfg.maxClassSize;
    const CliqueParams paramsA{cfg.p - 1, cfg.q}, paramsB{cfg.p, cfg.q - 1};
    const int kB = cfg.n - 1 - d;
    auto dirFor = [&](const CliqueParams& pr) {
        return cfg.classRoot() / ("r" + std::to_string(pr.blueBound) + std::to_string(pr.redBound));
    };
    DegreeInputs in;
    in.classA = loadOrEnumerate(paramsA, d, dirFor(paramsA), enumOptions);
    in.classB = loadOrEnumerate(paramsB, kB, dirFor(paramsB), enumOptions);
    if (in.classA.empty() || in.classB.empty()) return in;
    const auto pair = cfg.coversFor(d);
    const auto avgA = CliqueAverages::of(in.classA.graphs);
    const auto avgB = CliqueAverages::of(in.classB.graphs);
    auto build = [&](const GraphClassSet& cls, StrategyConfig s, const CliqueAverages& counterpart, std::uint64_t salt) {
        s.seed = cfg.seed ^ salt;
        s.workers = cfg.workers;
        if (s.maxGray == 0) {
            auto c = singletonCover(cls);
            c.seed = s.seed;
            c.strategy = s.describe();
            return c;
        }
        return buildCover(cls, s, &counterpart);
    };
    in.coverA = build(in.classA, pair.a, avgB, static_cast<std::uint64_t>(d) * 2);
    in.coverB = build(in.classB, pair.b, avgA, static_cast<std::uint64_t>(d) * 2 + 1);
    return in;
}

inline std::vector<GlueProblem> gluingProblems(const PipelineConfig& cfg, const Cover& a, const Cover& b) {
    std::vector<GlueProblem> out;
    out.reserve(a.size() * b.size());
    for (const auto& ga : a.gens)
        for (const auto& gb : b.gens) out.push_back({ga.rep, gb.rep, {cfg.p, cfg.q}});
    return out;
}

/// Runs every configured degree: classes, covers (verified exact), gluing
/// problems, solving with resume from the job store.
inline CampaignReport runPipeline(const PipelineConfig& cfg, std::ostream* log = nullptr) {
    if (cfg.p < 3 || cfg.q < 3) throw ArgumentError("target needs p, q >= 3");
    if (cfg.solver == SolverChoice::External && cfg.solverCommand.empty())
        throw ArgumentError("external solver needs solver.command");
    const auto analysis = analyzeTarget(cfg.p, cfg.q, cfg.n);
    for (int d : cfg.degrees) {
        if (std::find(analysis.window.candidates.begin(), analysis.window.candidates.end(), d) ==
            analysis.window.candidates.end())
            throw ArgumentError("degree " + std::to_string(d) + " is not a candidate for the target");
    }
    std::filesystem::create_directories(cfg.outputRoot);
    {
        std::ofstream resolved(cfg.outputRoot / "resolved.conf");
        resolved << formatConfig(cfg);
    }
    JobStore store(cfg.storeDir());
    const auto previous = JobStore::load(store.dir()).latest();

    CampaignReport report{cfg.p, cfg.q, cfg.n, {}, analysis.window.candidates};
    for (int d : cfg.degrees) {
        DegreeReport dr;
        dr.degree = d;
        auto in = prepareDegree(cfg, d);
        dr.classA = in.classA.size();
        dr.classB = in.classB.size();
        if (in.classA.empty() || in.classB.empty()) {
            dr.coversExact = true;
            if (log) *log << "d=" << d << ": a neighborhood class is empty, nothing to glue\n";
            report.degrees.push_back(dr);
            continue;
        }
        const auto exactA = verifyCoverExact(in.coverA, in.classA, cfg.workers);
        const auto exactB = verifyCoverExact(in.coverB, in.classB, cfg.workers);
        dr.coverA = in.coverA.size();
        dr.coverB = in.coverB.size();
        dr.coversExact = exactA.exact && exactB.exact;
        writeCoverFile(cfg.outputRoot / ("d" + std::to_string(d)) / "cover-a.txt", in.coverA);
        writeCoverFile(cfg.outputRoot / ("d" + std::to_string(d)) / "cover-b.txt", in.coverB);
        if (!dr.coversExact) {
            dr.failure = "cover not exact (A: " + std::to_string(exactA.missing.size()) + " missing, " +
                         std::to_string(exactA.extra.size()) + " extra; B: " + std::to_string(exactB.missing.size()) +
                         " missing, " + std::to_string(exactB.extra.size()) + " extra)";
            if (log) *log << "d=" << d << ": " << dr.failure << ", degree aborted\n";
            report.degrees.push_back(dr);
            continue;
        }
        store.appendDegree({d, dr.classA, dr.classB, dr.coverA, dr.coverB, in.coverA.strategy, in.coverB.strategy});
        const auto problems = gluingProblems(cfg, in.coverA, in.coverB);
        dr.problems = problems.size();
        if (log)
            *log << "d=" << d << ": classes " << dr.classA << " x " << dr.classB << ", covers " << dr.coverA << " x "
                 << dr.coverB << " = " << dr.problems << " problems\n";

        std::vector<std::string> ids(problems.size());
        std::unordered_map<std::string, int> attempts;
        std::vector<std::size_t> todo;
        for (std::size_t i = 0; i < problems.size(); ++i) {
            ids[i] = problems[i].id();
            auto it = previous.find(ids[i]);
            if (it != previous.end()) attempts[ids[i]] = it->second.attempt;
            if (it != previous.end() && (it->second.verdict == "unsat" || it->second.verdict == "sat")) {
                ++dr.reused;
                if (it->second.verdict == "unsat") ++dr.unsat;
                else ++dr.sat;
            } else {
                todo.push_back(i);
            }
        }
        std::mutex mutex;
        const int workers = cfg.solver == SolverChoice::External ? std::min(cfg.workers, cfg.maxProcesses) : cfg.workers;
        const auto t0 = std::chrono::steady_clock::now();
        parallelFor(
            todo.size(), workers,
            [&](int, std::size_t t) {
                const std::size_t i = todo[t];
                const auto& problem = problems[i];
                JobRecord rec;
                rec.problemId = ids[i];
                rec.degree = d;
                if (auto a = attempts.find(ids[i]); a != attempts.end()) rec.attempt = a->second + 1;
                rec.label = "d" + std::to_string(d) + ":a" + std::to_string(i / in.coverB.size()) + ":b" +
                            std::to_string(i % in.coverB.size());
                rec.simplicity = simplicityPair(problem.gStar, problem.hStar);
                std::optional<ColoredGraph> found;
                try {
                    auto outcome = solveProblem(problem, cfg, cfg.outputRoot / "cnf");
                    rec.verdict = statusName(outcome.verdict.status);
                    rec.elapsed = outcome.verdict.elapsed;
                    rec.solver = outcome.verdict.solver;
                    rec.conflicts = outcome.verdict.stats.conflicts;
                    rec.unverified = outcome.verdict.unverifiedUnsat;
                    found = std::move(outcome.counterexample);
                } catch (const std::exception& e) {
                    rec.verdict = "error";
                    rec.solver = e.what();
                }
                rec.timestamp = utcTimestamp();
                store.append(rec);
                std::lock_guard lock(mutex);
                if (rec.verdict == "unsat") ++dr.unsat;
                else if (rec.verdict == "sat") {
                    ++dr.sat;
                    if (found) dr.satGraphs.push_back(*found);
                } else ++dr.pending;
            },
            1);
        dr.solveSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (log)
            *log << "d=" << d << ": " << dr.unsat << " unsat, " << dr.sat << " sat, " << dr.pending << " pending ("
                 << dr.reused << " from store)\n";
        for (const auto& g : dr.satGraphs)
            if (log) *log << "d=" << d << ": satisfiable gluing, graph " << writeGraph(g) << '\n';
        report.degrees.push_back(std::move(dr));
    }
    if (log) *log << report.conclusion() << '\n';
    return report;
}

// ---------------------------------------------------------------------------
// Parameter search.

/// Spearman rank correlation (average ranks for ties); NaN when undefined.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ArgumentError("spearman needs equal-length samples");
    const std::size_t n = x.size();
    if (n < 2) return std::nan("");
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return std::nan("");
    return sxy / std::sqrt(sxx * syy);
}

struct SearchRow {
    CoverPair strategies;
    std::size_t coverA = 0, coverB = 0, problems = 0, sampled = 0;
    double coverSeconds = 0.0;
    double meanSolveSeconds = 0.0;
    double estimatedTotalSeconds = 0.0;
    double correlation = std::nan("");  // simplicity vs solve time
    std::vector<double> simplicity, seconds;
};

/// For each grid point: build both covers at degree d, sample problems,
/// time them and extrapolate; also correlates simplicity with time.
inline std::vector<SearchRow> parameterSearch(const PipelineConfig& base, int d, const std::vector<CoverPair>& grid,
                                              std::size_t sampleCount, std::ostream* log = nullptr) {
    std::vector<SearchRow> rows;
    for (const auto& point : grid) {
        PipelineConfig cfg = base;
        cfg.perDegree.clear();
        cfg.covers = point;
        SearchRow row;
        row.strategies = point;
        const auto t0 = std::chrono::steady_clock::now();
        auto in = prepareDegree(cfg, d);
        row.coverSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.coverA = in.coverA.size();
        row.coverB = in.coverB.size();
        row.problems = row.coverA * row.coverB;
        if (row.problems > 0 && sampleCount > 0) {
            std::mt19937_64 rng(detail::splitmix(cfg.seed));
            std::vector<std::size_t> picks;
            if (sampleCount >= row.problems) {
                picks.resize(row.problems);
                std::iota(picks.begin(), picks.end(), 0);
            } else {
                std::uniform_int_distribution<std::size_t> dist(0, row.problems - 1);
                for (std::size_t i = 0; i < sampleCount; ++i) picks.push_back(dist(rng));
            }
            row.sampled = picks.size();
            row.simplicity.resize(picks.size());
            row.seconds.resize(picks.size());
            parallelFor(
                picks.size(), cfg.workers,
                [&](int, std::size_t i) {
                    const std::size_t k = picks[i];
                    const GlueProblem problem{in.coverA.gens[k / row.coverB].rep, in.coverB.gens[k % row.coverB].rep,
                                              {cfg.p, cfg.q}};
                    row.simplicity[i] = simplicityPair(problem.gStar, problem.hStar);
                    const auto s0 = std::chrono::steady_clock::now();
                    solveProblem(problem, cfg, cfg.outputRoot / "cnf");
                    row.seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
                },
                1);
            row.meanSolveSeconds =
                std::accumulate(row.seconds.begin(), row.seconds.end(), 0.0) / static_cast<double>(row.sampled);
            row.estimatedTotalSeconds = row.meanSolveSeconds * static_cast<double>(row.problems);
            row.correlation = spearman(row.simplicity, row.seconds);
        }
        if (log)
            *log << point.a.describe() << " max-gray " << point.a.maxGray << " | " << point.b.describe() << " max-gray "
                 << point.b.maxGray << ": " << row.problems << " problems\n";
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string formatSearchTable(const std::vector<SearchRow>& rows) {
    std::ostringstream out;
    out << "strategy_a,max_gray_a,strategy_b,max_gray_b,cover_a,cover_b,problems,sampled,cover_seconds,"
           "mean_solve_seconds,estimated_total_seconds,spearman_simplicity_time\n";
    out << std::setprecision(6);
    for (const auto& r : rows) {
        out << r.strategies.a.describe() << ',' << r.strategies.a.maxGray << ',' << r.strategies.b.describe() << ','
            << r.strategies.b.maxGray << ',' << r.coverA << ',' << r.coverB << ',' << r.problems << ',' << r.sampled
            << ',' << r.coverSeconds << ',' << r.meanSolveSeconds << ',' << r.estimatedTotalSeconds << ',';
        if (std::isnan(r.correlation)) out << "nan";
        else out << r.correlation;
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Reports.

struct ReportRow {
    int degree = 0;
    std::size_t problems = 0, unsat = 0, sat = 0, pending = 0, errors = 0, unverified = 0;
    std::size_t baseline = 0;  // singleton problem count |classA| * |classB|
    double reduction = std::nan("");
    double total = 0, p50 = 0, p90 = 0, max = 0;
};

struct StoreReport {
    std::vector<ReportRow> rows;
    std::size_t corruptLines = 0;
    std::vector<std::string> warnings;
};

inline double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

inline StoreReport report(const std::filesystem::path& storeDir) {
    const auto contents = JobStore::load(storeDir);
    StoreReport out;
    out.corruptLines = contents.corruptLines;
    out.warnings = contents.warnings;
    std::map<int, ReportRow> rows;
    std::map<int, std::vector<double>> times;
    for (const auto& [id, job] : contents.latest()) {
        auto& r = rows[job.degree];
        r.degree = job.degree;
        ++r.problems;
        if (job.verdict == "unsat") ++r.unsat;
        else if (job.verdict == "sat") ++r.sat;
        else if (job.verdict == "error") ++r.errors;
        else ++r.pending;
        if (job.unverified) ++r.unverified;
        times[job.degree].push_back(job.elapsed);
    }
    for (const auto& d : contents.degrees) {
        auto& r = rows[d.degree];
        r.degree = d.degree;
        r.baseline = d.classA * d.classB;
        if (d.coverA * d.coverB > 0)
            r.reduction = static_cast<double>(r.baseline) / static_cast<double>(d.coverA * d.coverB);
    }
    for (auto& [d, r] : rows) {
        const auto& t = times[d];
        r.total = std::accumulate(t.begin(), t.end(), 0.0);
        r.p50 = percentile(t, 0.5);
        r.p90 = percentile(t, 0.9);
        r.max = t.empty() ? 0.0 : *std::max_element(t.begin(), t.end());
        out.rows.push_back(r);
    }
    return out;
}

inline std::string formatReportText(const StoreReport& rep) {
    std::ostringstream out;
    out << std::setprecision(4);
    std::size_t problems = 0, unsat = 0, sat = 0;
    for (const auto& r : rep.rows) {
        problems += r.problems;
        unsat += r.unsat;
        sat += r.sat;
    }
    out << problems << " problems, " << unsat << " Unsat, " << sat << " Sat\n";
    for (const auto& r : rep.rows) {
        out << "d=" << r.degree << ": " << r.problems << " problems, " << r.unsat << " Unsat, " << r.sat << " Sat, "
            << r.pending << " pending, " << r.errors << " errors";
        if (r.unverified) out << ", " << r.unverified << " unverified-unsat";
        out << "; time total " << r.total << " s, p50 " << r.p50 << " s, p90 " << r.p90 << " s, max " << r.max
            << " s";
        if (!std::isnan(r.reduction)) out << "; reduction x" << r.reduction << " vs " << r.baseline << " singleton";
        out << '\n';
    }
    if (rep.corruptLines) out << "warning: " << rep.corruptLines << " corrupt record(s) skipped\n";
    return out.str();
}

inline std::string formatReportCsv(const StoreReport& rep) {
    std::ostringstream out;
    out << std::setprecision(6);
    out << "degree,problems,unsat,sat,pending,errors,unverified_unsat,baseline_problems,reduction_factor,"
           "time_total_s,time_p50_s,time_p90_s,time_max_s\n";
    for (const auto& r : rep.rows) {
        out << r.degree << ',' << r.problems << ',' << r.unsat << ',' << r.sat << ',' << r.pending << ',' << r.errors
            << ',' << r.unverified << ',' << r.baseline << ',';
        if (std::isnan(r.reduction)) out << "";
        else out << r.reduction;
        out << ',' << r.total << ',' << r.p50 << ',' << r.p90 << ',' << r.max << '\n';
    }
    return out.str();
}

}  // namespace ramsey
