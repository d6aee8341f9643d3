#pragma once

// Permutation states of S_n and the three LRX moves acting on them.
//
// Moves act on positions of the one-line array:
//   L: q[i] = p[(i + 1) mod n]      (left cyclic shift of the contents)
//   R: q[i] = p[(i - 1 + n) mod n]  (inverse of L)
//   X: swap p[0] and p[1]
// Every module uses this convention.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lrx {

using Entry = std::uint16_t;

enum class Move : std::uint8_t { L = 0, R = 1, X = 2 };

inline constexpr std::array<Move, 3> kMoves{Move::L, Move::R, Move::X};

constexpr Move inverse(Move g) {
    switch (g) {
    case Move::L: return Move::R;
    case Move::R: return Move::L;
    default: return Move::X;
    }
}

char to_char(Move g);
Move move_from_char(char c);

using Word = std::vector<Move>;

std::string to_string(const Word& w);
Word parse_word(std::string_view text);

class Permutation {
public:
    Permutation() = default;

    // Throws InvalidArgument unless entries is a bijection on {0..n-1}, n >= 2.
    explicit Permutation(std::vector<Entry> entries);

    // Caller guarantees validity; used on hot paths that only move entries around.
    static Permutation unchecked(std::vector<Entry> entries) {
        Permutation p;
        p.entries_ = std::move(entries);
        return p;
    }

    static Permutation identity(std::size_t n);

    // "1,0,4,3,2"
    static Permutation parse(std::string_view text);
    std::string to_string() const;

    std::size_t size() const { return entries_.size(); }
    Entry operator[](std::size_t i) const { return entries_[i]; }
    std::span<const Entry> entries() const { return entries_; }
    bool is_identity() const;

    // Lexicographic on the one-line notation (the canonical state order).
    auto operator<=>(const Permutation&) const = default;
    bool operator==(const Permutation&) const = default;

private:
    std::vector<Entry> entries_;
};

bool is_valid_permutation(std::span<const Entry> entries);

// In-place move on any array of entries (permutations and 0/1 coset strings alike).
void apply_move_inplace(std::span<Entry> state, Move g);

Permutation apply_move(const Permutation& p, Move g);

// Left-to-right fold of apply_move. Runs in O(|w| + n) by tracking a
// rotation offset instead of shifting the array on every L/R.
Permutation apply_word(const Permutation& p, const Word& w);
void apply_word_inplace(std::span<Entry> state, const Word& w);

// Pairs i < j with p[i] > p[j]; O(n log n).
std::uint64_t inversion_count(std::span<const Entry> p);
inline std::uint64_t inversion_count(const Permutation& p) { return inversion_count(p.entries()); }

// Change in inversion count caused by applying g to the permutation p (O(1)).
std::int64_t inversion_delta(std::span<const Entry> p, Move g);

// 4 bits per entry, entry i in bits [4i, 4i+4) of one 64-bit block; n <= 16.
struct PackedState {
    std::uint64_t bits = 0;
    std::uint8_t n = 0;

    auto operator<=>(const PackedState&) const = default;
};

inline constexpr std::size_t kMaxPackedN = 16;

PackedState pack(const Permutation& p);
PackedState pack(std::span<const Entry> p);
Permutation unpack(PackedState s);
void unpack_into(PackedState s, std::span<Entry> out);

inline std::uint64_t packed_low_mask(unsigned n) {
    return n >= 16 ? ~0ULL : ((1ULL << (4 * n)) - 1);
}

inline std::uint64_t packed_move(std::uint64_t bits, unsigned n, Move g) {
    switch (g) {
    case Move::L:
        return (bits >> 4) | ((bits & 0xFULL) << (4 * (n - 1)));
    case Move::R:
        return ((bits << 4) & packed_low_mask(n)) | (bits >> (4 * (n - 1)));
    default: {
        const std::uint64_t a = bits & 0xFULL;
        const std::uint64_t b = (bits >> 4) & 0xFULL;
        return (bits & ~0xFFULL) | (a << 4) | b;
    }
    }
}

inline PackedState apply_move(PackedState s, Move g) {
    return PackedState{packed_move(s.bits, s.n, g), s.n};
}

// Seeded 64-bit hash. For n <= 16 it is a function of the packed block, so
// hash_state(p, s) == hash_state(pack(p), s).
std::uint64_t hash_state(std::span<const Entry> p, std::uint64_t seed);
inline std::uint64_t hash_state(const Permutation& p, std::uint64_t seed) {
    return hash_state(p.entries(), seed);
}
std::uint64_t hash_state(PackedState s, std::uint64_t seed);

} // namespace lrx
