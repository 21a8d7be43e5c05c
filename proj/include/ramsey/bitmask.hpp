#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace ramsey {

/// Vertex subsets of graphs with at most 31 vertices.
using VertexSet = std::uint32_t;

inline constexpr VertexSet bitOf(int v) { return VertexSet{1} << v; }
inline constexpr VertexSet firstVertices(int n) {
    return n >= 32 ? ~VertexSet{0} : (VertexSet{1} << n) - 1;
}
inline int popcount(VertexSet s) { return std::popcount(s); }
inline int lowestVertex(VertexSet s) { return std::countr_zero(s); }

/// Calls f(v) for every vertex of s in increasing order.
template <typename F>
inline void forEachVertex(VertexSet s, F&& f) {
    while (s != 0) {
        f(std::countr_zero(s));
        s &= s - 1;
    }
}

/// Fixed-width bit array over edge slots.
template <std::size_t Words>
class BitMask {
public:
    static constexpr std::size_t kWords = Words;
    static constexpr std::size_t kBits = Words * 64;

    constexpr BitMask() = default;

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void assign(std::size_t i, bool value) { value ? set(i) : reset(i); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool none() const {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }
    /// Index of the lowest set bit, or kBits when empty.
    std::size_t lowest() const {
        for (std::size_t i = 0; i < Words; ++i)
            if (words_[i] != 0) return i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i]));
        return kBits;
    }
    /// Index of the highest set bit, or kBits when empty.
    std::size_t highest() const {
        for (std::size_t i = Words; i-- > 0;)
            if (words_[i] != 0) return i * 64 + 63 - static_cast<std::size_t>(std::countl_zero(words_[i]));
        return kBits;
    }

    BitMask& operator|=(const BitMask& o) {
        for (std::size_t i = 0; i < Words; ++i) words_[i] |= o.words_[i];
        return *this;
    }
    BitMask& operator&=(const BitMask& o) {
        for (std::size_t i = 0; i < Words; ++i) words_[i] &= o.words_[i];
        return *this;
    }
    BitMask& operator^=(const BitMask& o) {
        for (std::size_t i = 0; i < Words; ++i) words_[i] ^= o.words_[i];
        return *this;
    }
    friend BitMask operator|(BitMask a, const BitMask& b) { return a |= b; }
    friend BitMask operator&(BitMask a, const BitMask& b) { return a &= b; }
    friend BitMask operator^(BitMask a, const BitMask& b) { return a ^= b; }

    friend bool operator==(const BitMask&, const BitMask&) = default;

    const std::array<std::uint64_t, Words>& words() const { return words_; }
    std::array<std::uint64_t, Words>& words() { return words_; }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }

private:
    std::array<std::uint64_t, Words> words_{};
};

template <std::size_t Words>
struct BitMaskHash {
    std::size_t operator()(const BitMask<Words>& m) const { return m.hash(); }
};

}  // namespace ramsey
