#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ramsey/cnf.hpp"
#include "ramsey/error.hpp"

namespace ramsey {

enum class SatStatus { Sat, Unsat, LimitExceeded };

inline const char* statusName(SatStatus s) {
    switch (s) {
        case SatStatus::Sat: return "sat";
        case SatStatus::Unsat: return "unsat";
        case SatStatus::LimitExceeded: return "limit";
    }
    return "?";
}

struct SolveLimits {
    double seconds = 0.0;          // 0 = unlimited
    std::uint64_t conflicts = 0;   // 0 = unlimited
};

struct SolverStats {
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t propagations = 0;
};

struct SatVerdict {
    SatStatus status = SatStatus::LimitExceeded;
    std::vector<bool> model;  // model[v] for v = 1..varCount when Sat
    std::string solver = "embedded";
    /// Unsat reported by an external solver and not re-checked.
    bool unverifiedUnsat = false;
    double elapsed = 0.0;
    SolverStats stats;
};

/// True iff every clause has a literal satisfied by the model.
inline bool verifyModel(const Cnf& cnf, const std::vector<bool>& model) {
    if (model.size() < static_cast<std::size_t>(cnf.varCount) + 1)
        throw ArgumentError("model does not assign every variable");
    for (const auto& clause : cnf.clauses) {
        bool sat = false;
        for (Literal l : clause) {
            if (model[static_cast<std::size_t>(std::abs(l))] == (l > 0)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

/// Chronological-backtracking DPLL with two watched literals. Branches on
/// the unassigned variable with the most occurrences (ties: lowest index),
/// trying true first. No clause learning.
class DpllSolver {
public:
    explicit DpllSolver(const Cnf& cnf) : varCount_(cnf.varCount) {
        const auto litCount = static_cast<std::size_t>(2 * (varCount_ + 1));
        watches_.resize(litCount);
        value_.assign(static_cast<std::size_t>(varCount_) + 1, kUnassigned);
        std::vector<std::uint64_t> occurrences(static_cast<std::size_t>(varCount_) + 1, 0);
        for (const auto& clause : cnf.clauses) {
            for (Literal l : clause) ++occurrences[static_cast<std::size_t>(std::abs(l))];
            if (clause.empty()) {
                trivialConflict_ = true;
                continue;
            }
            if (clause.size() == 1) {
                units_.push_back(encode(clause[0]));
                continue;
            }
            const auto start = static_cast<std::uint32_t>(lits_.size());
            for (Literal l : clause) lits_.push_back(encode(l));
            const auto index = static_cast<std::uint32_t>(clauses_.size());
            clauses_.push_back({start, static_cast<std::uint32_t>(clause.size())});
            watches_[lits_[start]].push_back(index);
            watches_[lits_[start + 1]].push_back(index);
        }
        for (int v = 1; v <= varCount_; ++v) order_.push_back(v);
        std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
            return occurrences[static_cast<std::size_t>(a)] > occurrences[static_cast<std::size_t>(b)];
        });
    }

    SatVerdict solve(const SolveLimits& limits = {}) {
        const auto t0 = std::chrono::steady_clock::now();
        SatVerdict verdict;
        auto finish = [&](SatStatus s) {
            verdict.status = s;
            verdict.stats = stats_;
            verdict.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return verdict;
        };
        if (trivialConflict_) return finish(SatStatus::Unsat);
        for (auto lit : units_) {
            const int v = litValue(lit);
            if (v == kFalse) return finish(SatStatus::Unsat);
            if (v == kUnassigned) assign(lit);
        }
        std::uint64_t steps = 0;
        std::size_t nextOrder = 0;
        while (true) {
            if (!propagate()) {
                ++stats_.conflicts;
                if (limits.conflicts != 0 && stats_.conflicts >= limits.conflicts) return finish(SatStatus::LimitExceeded);
                // Undo levels whose second branch is already exhausted.
                while (!levels_.empty() && levels_.back().flipped) popLevel();
                if (levels_.empty()) return finish(SatStatus::Unsat);
                const auto decision = trail_[levels_.back().trailStart];
                popLevel();
                levels_.push_back({static_cast<std::uint32_t>(trail_.size()), true});
                assign(decision ^ 1u);
                nextOrder = 0;
            } else {
                while (nextOrder < order_.size() && value_[static_cast<std::size_t>(order_[nextOrder])] != kUnassigned)
                    ++nextOrder;
                if (nextOrder == order_.size()) {
                    verdict.model.assign(static_cast<std::size_t>(varCount_) + 1, false);
                    for (int v = 1; v <= varCount_; ++v)
                        verdict.model[static_cast<std::size_t>(v)] = value_[static_cast<std::size_t>(v)] == kTrue;
                    return finish(SatStatus::Sat);
                }
                ++stats_.decisions;
                levels_.push_back({static_cast<std::uint32_t>(trail_.size()), false});
                assign(encode(order_[nextOrder]));
            }
            if (limits.seconds > 0.0 && (++steps & 1023u) == 0) {
                const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (elapsed > limits.seconds) return finish(SatStatus::LimitExceeded);
            }
        }
    }

private:
    static constexpr signed char kUnassigned = -1, kFalse = 0, kTrue = 1;

    struct ClauseRef {
        std::uint32_t start;
        std::uint32_t size;
    };
    struct Level {
        std::uint32_t trailStart;
        bool flipped;
    };

    static std::uint32_t encode(Literal l) {
        return static_cast<std::uint32_t>(2 * std::abs(l)) + (l < 0 ? 1u : 0u);
    }
    int litValue(std::uint32_t lit) const {
        const signed char v = value_[lit >> 1];
        if (v == kUnassigned) return kUnassigned;
        return (lit & 1u) ? (v == kTrue ? kFalse : kTrue) : v;
    }
    void assign(std::uint32_t lit) {
        value_[lit >> 1] = (lit & 1u) ? kFalse : kTrue;
        trail_.push_back(lit);
    }
    void popLevel() {
        const auto start = levels_.back().trailStart;
        while (trail_.size() > start) {
            value_[trail_.back() >> 1] = kUnassigned;
            trail_.pop_back();
        }
        if (qhead_ > trail_.size()) qhead_ = trail_.size();
        levels_.pop_back();
    }

    /// Returns false on conflict.
    bool propagate() {
        while (qhead_ < trail_.size()) {
            const std::uint32_t falseLit = trail_[qhead_++] ^ 1u;
            ++stats_.propagations;
            auto& ws = watches_[falseLit];
            std::size_t keep = 0;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                const auto ci = ws[i];
                const auto& c = clauses_[ci];
                std::uint32_t* lits = &lits_[c.start];
                if (lits[0] == falseLit) std::swap(lits[0], lits[1]);
                if (litValue(lits[0]) == kTrue) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::uint32_t k = 2; k < c.size; ++k) {
                    if (litValue(lits[k]) != kFalse) {
                        std::swap(lits[1], lits[k]);
                        watches_[lits[1]].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                ws[keep++] = ci;
                const int v0 = litValue(lits[0]);
                if (v0 == kFalse) {
                    for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
                    ws.resize(keep);
                    qhead_ = trail_.size();
                    return false;
                }
                if (v0 == kUnassigned) assign(lits[0]);
            }
            ws.resize(keep);
        }
        return true;
    }

    int varCount_ = 0;
    bool trivialConflict_ = false;
    std::vector<std::uint32_t> lits_;
    std::vector<ClauseRef> clauses_;
    std::vector<std::uint32_t> units_;
    std::vector<std::vector<std::uint32_t>> watches_;
    std::vector<signed char> value_;
    std::vector<std::uint32_t> trail_;
    std::vector<Level> levels_;
    std::vector<int> order_;
    std::size_t qhead_ = 0;
    SolverStats stats_;
};

/// Two-watched-literal solver with first-UIP clause learning, recursive
/// clause minimization and non-chronological backjumping. Variable
/// activities start from the occurrence counts (ties: lowest index) and are
/// bumped on conflicts; learnt clauses are pruned by literal-block
/// distance. No restarts. Fully deterministic.
class LearningSolver {
public:
    explicit LearningSolver(const Cnf& cnf) : varCount_(cnf.varCount) {
        const auto vars = static_cast<std::size_t>(varCount_) + 1;
        watches_.resize(2 * vars);
        value_.assign(vars, kUnassigned);
        litValue_.assign(2 * vars, kUnassigned);
        level_.assign(vars, 0);
        reason_.assign(vars, kNoReason);
        seen_.assign(vars, 0);
        phase_.assign(vars, 1);
        activity_.assign(vars, 0.0);
        heapIndex_.assign(vars, -1);
        levelStamp_.assign(vars + 1, 0);
        std::vector<std::uint32_t> lits;
        for (const auto& clause : cnf.clauses) {
            for (Literal l : clause) activity_[static_cast<std::size_t>(std::abs(l))] += 1.0;
            if (clause.empty()) {
                trivialConflict_ = true;
                continue;
            }
            lits.clear();
            for (Literal l : clause) lits.push_back(encode(l));
            if (lits.size() == 1) {
                units_.push_back(lits[0]);
                continue;
            }
            addClause(lits, false, 0);
        }
        // Occurrence counts only order the first decisions; conflict bumps
        // take over quickly.
        for (int v = 1; v <= varCount_; ++v) {
            activity_[static_cast<std::size_t>(v)] *= 1e-3;
            heapInsert(v);
        }
    }

    SatVerdict solve(const SolveLimits& limits = {}) {
        const auto t0 = std::chrono::steady_clock::now();
        SatVerdict verdict;
        auto finish = [&](SatStatus s) {
            verdict.status = s;
            verdict.stats = stats_;
            verdict.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return verdict;
        };
        if (trivialConflict_) return finish(SatStatus::Unsat);
        for (auto lit : units_) {
            const int v = litValue(lit);
            if (v == kFalse) return finish(SatStatus::Unsat);
            if (v == kUnassigned) assign(lit, kNoReason);
        }
        if (propagate() != kNoReason) return finish(SatStatus::Unsat);

        std::uint64_t nextReduce = 1000;
        std::vector<std::uint32_t> learnt;
        while (true) {
            const std::uint32_t conflict = propagate();
            if (conflict != kNoReason) {
                ++stats_.conflicts;
                if (decisionLevel() == 0) return finish(SatStatus::Unsat);
                int backLevel = 0;
                analyze(conflict, learnt, backLevel);
                cancelUntil(backLevel);
                if (learnt.size() == 1) {
                    assign(learnt[0], kNoReason);
                } else {
                    const auto cref = addClause(learnt, true, blockDistance(learnt));
                    assign(learnt[0], cref);
                }
                varInc_ /= 0.95;
                if (limits.conflicts != 0 && stats_.conflicts >= limits.conflicts)
                    return finish(SatStatus::LimitExceeded);
                if ((stats_.conflicts & 255u) == 0 && limits.seconds > 0.0) {
                    const double elapsed =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    if (elapsed > limits.seconds) return finish(SatStatus::LimitExceeded);
                }
                if (stats_.conflicts >= nextReduce) {
                    reduceLearnts();
                    nextReduce = stats_.conflicts + 1000 + 100 * ++reductions_;
                }
                continue;
            }
            int next = 0;
            while (!heap_.empty()) {
                const int v = heapPop();
                if (value_[static_cast<std::size_t>(v)] == kUnassigned) {
                    next = v;
                    break;
                }
            }
            if (next == 0) {
                verdict.model.assign(static_cast<std::size_t>(varCount_) + 1, false);
                for (int v = 1; v <= varCount_; ++v)
                    verdict.model[static_cast<std::size_t>(v)] = value_[static_cast<std::size_t>(v)] == kTrue;
                return finish(SatStatus::Sat);
            }
            ++stats_.decisions;
            trailLim_.push_back(static_cast<std::uint32_t>(trail_.size()));
            assign(static_cast<std::uint32_t>(2 * next) + (phase_[static_cast<std::size_t>(next)] ? 0u : 1u), kNoReason);
        }
    }

private:
    static constexpr signed char kUnassigned = -1, kFalse = 0, kTrue = 1;
    static constexpr std::uint32_t kNoReason = 0xffffffffu;

    // Clause arena layout: [size, lbd | learnt << 31 | deleted << 30, lits...].
    static constexpr std::uint32_t kHeader = 2;
    static constexpr std::uint32_t kLearntBit = 1u << 31;
    static constexpr std::uint32_t kDeletedBit = 1u << 30;

    struct Watcher {
        std::uint32_t cref;
        std::uint32_t blocker;
    };

    static std::uint32_t encode(Literal l) {
        return static_cast<std::uint32_t>(2 * std::abs(l)) + (l < 0 ? 1u : 0u);
    }
    std::uint32_t clauseSize(std::uint32_t cref) const { return arena_[cref]; }
    std::uint32_t* clauseLits(std::uint32_t cref) { return &arena_[cref + kHeader]; }
    const std::uint32_t* clauseLits(std::uint32_t cref) const { return &arena_[cref + kHeader]; }
    bool isLearnt(std::uint32_t cref) const { return (arena_[cref + 1] & kLearntBit) != 0; }
    bool isDeleted(std::uint32_t cref) const { return (arena_[cref + 1] & kDeletedBit) != 0; }
    std::uint32_t lbd(std::uint32_t cref) const { return arena_[cref + 1] & (kDeletedBit - 1); }

    int litValue(std::uint32_t lit) const { return litValue_[lit]; }
    int decisionLevel() const { return static_cast<int>(trailLim_.size()); }

    void assign(std::uint32_t lit, std::uint32_t reason) {
        const auto v = lit >> 1;
        value_[v] = (lit & 1u) ? kFalse : kTrue;
        litValue_[lit] = kTrue;
        litValue_[lit ^ 1u] = kFalse;
        level_[v] = decisionLevel();
        reason_[v] = reason;
        trail_.push_back(lit);
    }

    std::uint32_t addClause(const std::vector<std::uint32_t>& lits, bool learnt, std::uint32_t glue) {
        const auto cref = static_cast<std::uint32_t>(arena_.size());
        arena_.push_back(static_cast<std::uint32_t>(lits.size()));
        arena_.push_back(glue | (learnt ? kLearntBit : 0u));
        arena_.insert(arena_.end(), lits.begin(), lits.end());
        watches_[lits[0] ^ 1u].push_back({cref, lits[1]});
        watches_[lits[1] ^ 1u].push_back({cref, lits[0]});
        if (learnt) learnts_.push_back(cref);
        return cref;
    }

    std::uint32_t blockDistance(const std::vector<std::uint32_t>& lits) {
        ++stamp_;
        std::uint32_t count = 0;
        for (auto l : lits) {
            const auto lv = static_cast<std::size_t>(level_[l >> 1]);
            if (levelStamp_[lv] != stamp_) {
                levelStamp_[lv] = stamp_;
                ++count;
            }
        }
        return count;
    }

    /// Returns the conflicting clause or kNoReason. watches_[p] lists the
    /// clauses watching the negation of p.
    std::uint32_t propagate() {
        std::uint32_t conflict = kNoReason;
        while (qhead_ < trail_.size()) {
            const std::uint32_t p = trail_[qhead_++];
            const std::uint32_t falseLit = p ^ 1u;
            ++stats_.propagations;
            auto& ws = watches_[p];
            Watcher* i = ws.data();
            Watcher* j = ws.data();
            Watcher* const end = ws.data() + ws.size();
            while (i != end) {
                if (litValue(i->blocker) == kTrue) {
                    *j++ = *i++;
                    continue;
                }
                const std::uint32_t cref = i->cref;
                std::uint32_t* lits = clauseLits(cref);
                if (lits[0] == falseLit) std::swap(lits[0], lits[1]);
                ++i;
                const std::uint32_t first = lits[0];
                const Watcher w{cref, first};
                if (litValue(first) == kTrue) {
                    *j++ = w;
                    continue;
                }
                const std::uint32_t size = clauseSize(cref);
                bool moved = false;
                for (std::uint32_t k = 2; k < size; ++k) {
                    if (litValue(lits[k]) != kFalse) {
                        std::swap(lits[1], lits[k]);
                        watches_[lits[1] ^ 1u].push_back(w);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                *j++ = w;
                if (litValue(first) == kFalse) {
                    conflict = cref;
                    qhead_ = trail_.size();
                    while (i != end) *j++ = *i++;
                } else {
                    assign(first, cref);
                }
            }
            ws.resize(static_cast<std::size_t>(j - ws.data()));
        }
        return conflict;
    }

    std::uint32_t abstractLevel(std::uint32_t v) const { return 1u << (static_cast<unsigned>(level_[v]) & 31u); }

    void analyze(std::uint32_t conflict, std::vector<std::uint32_t>& learnt, int& backLevel) {
        learnt.assign(1, 0);
        int pathCount = 0;
        std::uint32_t p = kNoReason;
        std::size_t index = trail_.size();
        std::uint32_t cref = conflict;
        do {
            if (isLearnt(cref)) bumpClause(cref);
            const std::uint32_t size = clauseSize(cref);
            const std::uint32_t* lits = clauseLits(cref);
            for (std::uint32_t k = (p == kNoReason ? 0 : 1); k < size; ++k) {
                const std::uint32_t q = lits[k];
                const auto v = q >> 1;
                if (!seen_[v] && level_[v] > 0) {
                    bumpVar(static_cast<int>(v));
                    seen_[v] = 1;
                    if (level_[v] >= decisionLevel()) ++pathCount;
                    else learnt.push_back(q);
                }
            }
            while (!seen_[trail_[--index] >> 1]) {
            }
            p = trail_[index];
            cref = reason_[p >> 1];
            seen_[p >> 1] = 0;
            --pathCount;
        } while (pathCount > 0);
        learnt[0] = p ^ 1u;

        toClear_.assign(learnt.begin(), learnt.end());
        std::uint32_t levels = 0;
        for (std::size_t k = 1; k < learnt.size(); ++k) levels |= abstractLevel(learnt[k] >> 1);
        std::size_t keep = 1;
        for (std::size_t k = 1; k < learnt.size(); ++k) {
            if (reason_[learnt[k] >> 1] == kNoReason || !redundant(learnt[k], levels)) learnt[keep++] = learnt[k];
        }
        learnt.resize(keep);

        backLevel = 0;
        if (learnt.size() > 1) {
            std::size_t maxIndex = 1;
            for (std::size_t k = 2; k < learnt.size(); ++k)
                if (level_[learnt[k] >> 1] > level_[learnt[maxIndex] >> 1]) maxIndex = k;
            std::swap(learnt[1], learnt[maxIndex]);
            backLevel = level_[learnt[1] >> 1];
        }
        for (auto l : toClear_) seen_[l >> 1] = 0;
    }

    /// True if lit is implied by literals already in the learnt clause.
    bool redundant(std::uint32_t lit, std::uint32_t levels) {
        stack_.assign(1, lit);
        const std::size_t top = toClear_.size();
        while (!stack_.empty()) {
            const auto r = reason_[stack_.back() >> 1];
            stack_.pop_back();
            const std::uint32_t size = clauseSize(r);
            const std::uint32_t* lits = clauseLits(r);
            for (std::uint32_t k = 1; k < size; ++k) {
                const auto q = lits[k];
                const auto v = q >> 1;
                if (seen_[v] || level_[v] == 0) continue;
                if (reason_[v] != kNoReason && (abstractLevel(v) & levels) != 0) {
                    seen_[v] = 1;
                    stack_.push_back(q);
                    toClear_.push_back(q);
                } else {
                    for (std::size_t m = top; m < toClear_.size(); ++m) seen_[toClear_[m] >> 1] = 0;
                    toClear_.resize(top);
                    return false;
                }
            }
        }
        return true;
    }

    void cancelUntil(int level) {
        if (decisionLevel() <= level) return;
        const auto stop = trailLim_[static_cast<std::size_t>(level)];
        for (std::size_t k = trail_.size(); k > stop; --k) {
            const auto lit = trail_[k - 1];
            const auto v = lit >> 1;
            value_[v] = kUnassigned;
            litValue_[lit] = kUnassigned;
            litValue_[lit ^ 1u] = kUnassigned;
            reason_[v] = kNoReason;
            phase_[v] = (lit & 1u) ? 0 : 1;
            if (heapIndex_[v] < 0) heapInsert(static_cast<int>(v));
        }
        trail_.resize(stop);
        trailLim_.resize(static_cast<std::size_t>(level));
        qhead_ = trail_.size();
    }

    bool locked(std::uint32_t cref) const {
        const auto lit = clauseLits(cref)[0];
        return reason_[lit >> 1] == cref && litValue(lit) == kTrue;
    }

    /// Deletes the worse half of the learnt clauses (high LBD, then low
    /// activity), keeping binary and glue (LBD <= 2) clauses, and compacts
    /// the arena.
    void reduceLearnts() {
        std::sort(learnts_.begin(), learnts_.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (lbd(a) != lbd(b)) return lbd(a) > lbd(b);
            const double x = clauseActivity(a), y = clauseActivity(b);
            if (x != y) return x < y;
            return a < b;
        });
        const std::size_t half = learnts_.size() / 2;
        for (std::size_t k = 0; k < half; ++k) {
            const auto cref = learnts_[k];
            if (lbd(cref) > 2 && clauseSize(cref) > 2 && !locked(cref)) arena_[cref + 1] |= kDeletedBit;
        }
        compact();
    }

    void compact() {
        std::vector<std::uint32_t> fresh;
        fresh.reserve(arena_.size());
        std::unordered_map<std::uint32_t, std::uint32_t> moved;
        moved.reserve(learnts_.size() * 2);
        std::unordered_map<std::uint32_t, double> activity;
        for (std::uint32_t cref = 0; cref < arena_.size(); cref += kHeader + clauseSize(cref)) {
            if (isDeleted(cref)) continue;
            const auto to = static_cast<std::uint32_t>(fresh.size());
            moved.emplace(cref, to);
            fresh.insert(fresh.end(), arena_.begin() + cref, arena_.begin() + cref + kHeader + clauseSize(cref));
            if (isLearnt(cref)) activity.emplace(to, clauseActivity(cref));
        }
        for (auto& ws : watches_) {
            std::size_t keep = 0;
            for (const auto& w : ws) {
                auto it = moved.find(w.cref);
                if (it != moved.end()) ws[keep++] = {it->second, w.blocker};
            }
            ws.resize(keep);
        }
        for (auto lit : trail_) {
            auto& r = reason_[lit >> 1];
            if (r != kNoReason) r = moved.at(r);
        }
        std::vector<std::uint32_t> learnts;
        for (auto cref : learnts_) {
            auto it = moved.find(cref);
            if (it != moved.end()) learnts.push_back(it->second);
        }
        std::sort(learnts.begin(), learnts.end());
        learnts_ = std::move(learnts);
        arena_ = std::move(fresh);
        clauseActivity_ = std::move(activity);
    }

    double clauseActivity(std::uint32_t cref) const {
        const auto it = clauseActivity_.find(cref);
        return it == clauseActivity_.end() ? 0.0 : it->second;
    }

    void bumpVar(int v) {
        auto& a = activity_[static_cast<std::size_t>(v)];
        a += varInc_;
        if (a > 1e100) {
            for (auto& x : activity_) x *= 1e-100;
            varInc_ *= 1e-100;
        }
        if (heapIndex_[static_cast<std::size_t>(v)] >= 0) siftUp(heapIndex_[static_cast<std::size_t>(v)]);
    }
    void bumpClause(std::uint32_t cref) {
        auto& a = clauseActivity_[cref];
        a += clauseInc_;
        if (a > 1e20) {
            for (auto& [_, x] : clauseActivity_) x *= 1e-20;
            clauseInc_ *= 1e-20;
        }
    }

    // Binary max-heap on activity, ties broken towards the lower index.
    bool before(int a, int b) const {
        const double x = activity_[static_cast<std::size_t>(a)], y = activity_[static_cast<std::size_t>(b)];
        return x != y ? x > y : a < b;
    }
    void heapInsert(int v) {
        heapIndex_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        siftUp(static_cast<int>(heap_.size()) - 1);
    }
    int heapPop() {
        const int top = heap_[0];
        heapIndex_[static_cast<std::size_t>(top)] = -1;
        const int last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_[0] = last;
            heapIndex_[static_cast<std::size_t>(last)] = 0;
            siftDown(0);
        }
        return top;
    }
    void siftUp(int i) {
        const int v = heap_[static_cast<std::size_t>(i)];
        while (i > 0) {
            const int parent = (i - 1) / 2;
            const int pv = heap_[static_cast<std::size_t>(parent)];
            if (!before(v, pv)) break;
            heap_[static_cast<std::size_t>(i)] = pv;
            heapIndex_[static_cast<std::size_t>(pv)] = i;
            i = parent;
        }
        heap_[static_cast<std::size_t>(i)] = v;
        heapIndex_[static_cast<std::size_t>(v)] = i;
    }
    void siftDown(int i) {
        const int v = heap_[static_cast<std::size_t>(i)];
        const int n = static_cast<int>(heap_.size());
        while (true) {
            int child = 2 * i + 1;
            if (child >= n) break;
            if (child + 1 < n && before(heap_[static_cast<std::size_t>(child + 1)], heap_[static_cast<std::size_t>(child)]))
                ++child;
            const int cv = heap_[static_cast<std::size_t>(child)];
            if (!before(cv, v)) break;
            heap_[static_cast<std::size_t>(i)] = cv;
            heapIndex_[static_cast<std::size_t>(cv)] = i;
            i = child;
        }
        heap_[static_cast<std::size_t>(i)] = v;
        heapIndex_[static_cast<std::size_t>(v)] = i;
    }

    int varCount_ = 0;
    bool trivialConflict_ = false;
    std::vector<std::uint32_t> arena_;
    std::vector<std::uint32_t> learnts_;
    std::unordered_map<std::uint32_t, double> clauseActivity_;
    std::vector<std::uint32_t> units_;
    std::vector<std::vector<Watcher>> watches_;
    std::vector<signed char> value_;
    std::vector<signed char> litValue_;
    std::vector<int> level_;
    std::vector<std::uint32_t> reason_;
    std::vector<char> seen_;
    std::vector<char> phase_;
    std::vector<double> activity_;
    std::vector<int> heap_;
    std::vector<int> heapIndex_;
    std::vector<std::uint32_t> trail_;
    std::vector<std::uint32_t> trailLim_;
    std::vector<std::uint32_t> toClear_;
    std::vector<std::uint32_t> stack_;
    std::vector<std::uint64_t> levelStamp_;
    std::uint64_t stamp_ = 0;
    std::uint64_t reductions_ = 0;
    std::size_t qhead_ = 0;
    double varInc_ = 1.0;
    double clauseInc_ = 1.0;
    SolverStats stats_;
};

enum class EmbeddedAlgorithm { Dpll, Learning };

inline const char* algorithmName(EmbeddedAlgorithm a) { return a == EmbeddedAlgorithm::Dpll ? "dpll" : "learning"; }

inline SatVerdict solveEmbedded(const Cnf& cnf, const SolveLimits& limits = {},
                                EmbeddedAlgorithm algorithm = EmbeddedAlgorithm::Dpll) {
    SatVerdict verdict;
    if (algorithm == EmbeddedAlgorithm::Dpll) {
        DpllSolver solver(cnf);
        verdict = solver.solve(limits);
    } else {
        LearningSolver solver(cnf);
        verdict = solver.solve(limits);
    }
    verdict.solver = std::string("embedded:") + algorithmName(algorithm);
    if (verdict.status == SatStatus::Sat && !verifyModel(cnf, verdict.model))
        throw StateError("embedded solver produced an invalid model");
    return verdict;
}

// ---------------------------------------------------------------------------
// External solvers speaking the SAT-competition output format.

class ExternalSolverError : public std::runtime_error {
public:
    enum class Kind { ProcessFailure, UnparseableOutput, ModelVerificationFailure };
    ExternalSolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Parses "s SATISFIABLE"/"s UNSATISFIABLE" and "v ..." model lines.
inline SatVerdict parseCompetitionOutput(const std::string& output, int varCount) {
    std::istringstream in(output);
    std::string line;
    std::optional<SatStatus> status;
    std::vector<bool> model(static_cast<std::size_t>(varCount) + 1, false);
    std::vector<bool> seen(static_cast<std::size_t>(varCount) + 1, false);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("s ", 0) == 0) {
            const auto word = line.substr(2);
            if (word == "SATISFIABLE") status = SatStatus::Sat;
            else if (word == "UNSATISFIABLE") status = SatStatus::Unsat;
            else if (word == "UNKNOWN") status = SatStatus::LimitExceeded;
            else throw ExternalSolverError(ExternalSolverError::Kind::UnparseableOutput, "unknown status line: " + line);
        } else if (line.rfind("v ", 0) == 0 || line == "v") {
            std::istringstream vs(line.substr(1));
            long lit = 0;
            while (vs >> lit) {
                if (lit == 0) break;
                const auto var = static_cast<std::size_t>(std::labs(lit));
                if (var > static_cast<std::size_t>(varCount))
                    throw ExternalSolverError(ExternalSolverError::Kind::UnparseableOutput, "model literal out of range");
                model[var] = lit > 0;
                seen[var] = true;
            }
        }
    }
    if (!status) throw ExternalSolverError(ExternalSolverError::Kind::UnparseableOutput, "no status line in solver output");
    SatVerdict verdict;
    verdict.status = *status;
    if (*status == SatStatus::Sat) verdict.model = std::move(model);
    return verdict;
}

struct ExternalSolverOptions {
    std::string name = "external";
    /// Shell command with {input} replaced by the DIMACS path.
    std::string commandTemplate;
    /// Re-run the embedded solver on Unsat answers.
    bool doubleCheck = false;
    SolveLimits doubleCheckLimits;
    EmbeddedAlgorithm doubleCheckAlgorithm = EmbeddedAlgorithm::Learning;
};

/// Runs an external solver on a DIMACS file. Sat models are always
/// verified against the formula; Unsat answers are flagged as unverified
/// unless doubleCheck is set.
inline SatVerdict solveExternal(const std::filesystem::path& cnfFile, const ExternalSolverOptions& options) {
    std::ifstream in(cnfFile);
    if (!in) throw ExternalSolverError(ExternalSolverError::Kind::ProcessFailure, "cannot read " + cnfFile.string());
    const Cnf cnf = fromDimacs(in);

    std::string command = options.commandTemplate;
    const std::string placeholder = "{input}";
    for (auto pos = command.find(placeholder); pos != std::string::npos; pos = command.find(placeholder))
        command.replace(pos, placeholder.size(), "'" + cnfFile.string() + "'");

    const auto t0 = std::chrono::steady_clock::now();
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) throw ExternalSolverError(ExternalSolverError::Kind::ProcessFailure, "failed to start: " + command);
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), got);
    const int rc = pclose(pipe);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // SAT-competition solvers exit with 10 (sat) or 20 (unsat).
    const int exitCode = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    if (exitCode != 0 && exitCode != 10 && exitCode != 20)
        throw ExternalSolverError(ExternalSolverError::Kind::ProcessFailure,
                                  "solver exited with status " + std::to_string(exitCode));

    SatVerdict verdict = parseCompetitionOutput(output, cnf.varCount);
    verdict.solver = "external:" + options.name;
    verdict.elapsed = elapsed;
    if (verdict.status == SatStatus::Sat && !verifyModel(cnf, verdict.model))
        throw ExternalSolverError(ExternalSolverError::Kind::ModelVerificationFailure,
                                  "external model violates a clause");
    if (verdict.status == SatStatus::Unsat) {
        verdict.unverifiedUnsat = true;
        if (options.doubleCheck) {
            const auto check = solveEmbedded(cnf, options.doubleCheckLimits, options.doubleCheckAlgorithm);
            if (check.status == SatStatus::Sat)
                throw ExternalSolverError(ExternalSolverError::Kind::ModelVerificationFailure,
                                          "external solver claimed unsat but the embedded solver found a model");
            if (check.status == SatStatus::Unsat) verdict.unverifiedUnsat = false;
        }
    }
    return verdict;
}

/// SAT-competition style output for a verdict.
inline std::string competitionOutput(const SatVerdict& verdict) {
    std::string out;
    if (verdict.status == SatStatus::Sat) {
        out += "s SATISFIABLE\nv";
        for (std::size_t v = 1; v < verdict.model.size(); ++v) {
            out += ' ';
            out += verdict.model[v] ? std::to_string(v) : "-" + std::to_string(v);
        }
        out += " 0\n";
    } else if (verdict.status == SatStatus::Unsat) {
        out += "s UNSATISFIABLE\n";
    } else {
        out += "s UNKNOWN\n";
    }
    return out;
}

}  // namespace ramsey
