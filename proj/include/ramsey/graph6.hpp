#pragma once

#include <string>
#include <string_view>

#include "ramsey/graph.hpp"

// graph6 codec for concrete colored graphs. An edge present in the graph6
// sense is Blue, an absent one is Red. The bit order of graph6 (x(0,1),
// x(0,2), x(1,2), x(0,3), ...) coincides with the slot order.

namespace ramsey {

inline std::string toGraph6(const ColoredGraph& g) {
    if (!g.isConcrete()) throw StateError("graph6 requires a graph without gray edges");
    std::string out;
    out.push_back(static_cast<char>(g.order() + 63));
    const int bits = g.slots();
    for (int start = 0; start < bits; start += 6) {
        int value = 0;
        for (int k = 0; k < 6; ++k) {
            value <<= 1;
            const int s = start + k;
            if (s < bits && g.blueMask().test(static_cast<std::size_t>(s))) value |= 1;
        }
        out.push_back(static_cast<char>(value + 63));
    }
    return out;
}

inline ColoredGraph fromGraph6(std::string_view text, std::size_t lineNo = 1) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
    constexpr std::string_view header = ">>graph6<<";
    std::size_t offset = 0;
    if (text.starts_with(header)) {
        text.remove_prefix(header.size());
        offset = header.size();
    }
    if (text.empty()) throw ParseError("empty graph6 string", lineNo, offset);
    const int first = static_cast<unsigned char>(text[0]);
    if (first < 63 || first > 126) throw ParseError("invalid graph6 size byte", lineNo, offset);
    if (first == 126) throw ParseError("graph6 graphs above 62 vertices are not supported", lineNo, offset);
    const int n = first - 63;
    if (n > kMaxVertices) throw ParseError("vertex count exceeds 31", lineNo, offset);
    const int bits = slotCount(n);
    const std::size_t expected = 1 + static_cast<std::size_t>((bits + 5) / 6);
    if (text.size() != expected)
        throw ParseError("graph6 length mismatch: expected " + std::to_string(expected) + " bytes", lineNo,
                         offset + text.size());
    ColoredGraph g = ColoredGraph::complete(n, EdgeColor::Red);
    for (std::size_t i = 1; i < text.size(); ++i) {
        const int value = static_cast<unsigned char>(text[i]) - 63;
        if (value < 0 || value > 63) throw ParseError("invalid graph6 data byte", lineNo, offset + i);
        for (int k = 0; k < 6; ++k) {
            const int s = static_cast<int>(i - 1) * 6 + k;
            const bool bit = (value >> (5 - k)) & 1;
            if (s < bits) {
                if (bit) g.setSlotColor(s, EdgeColor::Blue);
            } else if (bit) {
                throw ParseError("nonzero graph6 padding bit", lineNo, offset + i);
            }
        }
    }
    return g;
}

}  // namespace ramsey
