#pragma once

#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ramsey/error.hpp"
#include "ramsey/graph.hpp"

namespace ramsey {

/// Nonzero DIMACS literal; the sign is the polarity.
using Literal = int;
using Clause = std::vector<Literal>;

/// Propositional formula in conjunctive normal form. Variable v encodes the
/// edge slot v - 1 (true = blue) when built from a gluing problem.
struct Cnf {
    int varCount = 0;
    std::vector<Clause> clauses;

    friend bool operator==(const Cnf&, const Cnf&) = default;
};

inline int edgeVariable(int a, int b) { return slotIndex(a, b) + 1; }
inline EdgeSlot variableEdge(int var) { return EdgeSlot::fromSlot(var - 1); }

inline std::string toDimacs(const Cnf& cnf) {
    std::string out = "p cnf " + std::to_string(cnf.varCount) + " " + std::to_string(cnf.clauses.size()) + "\n";
    for (const auto& clause : cnf.clauses) {
        for (Literal l : clause) {
            out += std::to_string(l);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

/// Parses DIMACS CNF. Comment lines start with 'c'; clauses may span lines.
/// Rejects literals beyond the declared variable count, a clause count
/// different from the header, and clauses containing both v and -v.
inline Cnf fromDimacs(std::istream& in) {
    Cnf cnf;
    bool haveHeader = false;
    std::size_t declaredClauses = 0;
    Clause current;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == 'c') continue;
        if (line[start] == '%') break;
        if (line[start] == 'p') {
            if (haveHeader) throw ParseError("duplicate problem line", lineNo, start);
            std::istringstream header(line.substr(start));
            std::string p, fmt;
            long vars = -1, clauses = -1;
            header >> p >> fmt >> vars >> clauses;
            std::string extra;
            if (p != "p" || fmt != "cnf" || vars < 0 || clauses < 0 || (header >> extra))
                throw ParseError("malformed problem line", lineNo, start);
            cnf.varCount = static_cast<int>(vars);
            declaredClauses = static_cast<std::size_t>(clauses);
            haveHeader = true;
            continue;
        }
        if (!haveHeader) throw ParseError("clause before problem line", lineNo, start);
        std::size_t pos = start;
        while (pos < line.size()) {
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
            if (pos >= line.size()) break;
            const std::size_t tokenStart = pos;
            while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
            const std::string token = line.substr(tokenStart, pos - tokenStart);
            char* end = nullptr;
            const long value = std::strtol(token.c_str(), &end, 10);
            if (end == token.c_str() || *end != '\0') throw ParseError("invalid literal '" + token + "'", lineNo, tokenStart);
            if (value == 0) {
                cnf.clauses.push_back(std::move(current));
                current.clear();
                continue;
            }
            if (std::labs(value) > cnf.varCount) throw ParseError("literal exceeds declared variable count", lineNo, tokenStart);
            for (Literal l : current)
                if (l == -value) throw ParseError("clause contains a variable in both polarities", lineNo, tokenStart);
            current.push_back(static_cast<Literal>(value));
        }
    }
    if (!haveHeader) throw ParseError("missing problem line", lineNo + 1, 0);
    if (!current.empty()) throw ParseError("last clause is not terminated by 0", lineNo, 0);
    if (cnf.clauses.size() != declaredClauses)
        throw ParseError("header declares " + std::to_string(declaredClauses) + " clauses, found " +
                             std::to_string(cnf.clauses.size()),
                         lineNo, 0);
    return cnf;
}

inline Cnf fromDimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    return fromDimacs(in);
}

}  // namespace ramsey
