#pragma once

// Perfect hashing of enumerable spaces onto [0, size()).
//
// States travel through the BFS kernels as a packed 64-bit code: 4-bit
// nibbles for permutations (n <= 16), a plain bit string for coset states.
// Ranks are lexicographic in the one-line / 0-1 string notation, so sorting
// by rank is the canonical state order.

#include "lrx/graph_space.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace lrx {

class StateIndexer {
public:
    // Full graphs up to n = 16 (ranks fit 64 bits for n <= 20), cosets up to n = 64
    // as long as C(n, n/2) fits 64 bits.
    explicit StateIndexer(const GraphSpec& spec);

    const GraphSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    std::uint64_t size() const { return size_; }

    std::uint64_t encode(std::span<const Entry> state) const;
    void decode(std::uint64_t code, std::span<Entry> out) const;
    std::vector<Entry> decode(std::uint64_t code) const;

    std::uint64_t move(std::uint64_t code, Move g) const {
        return full_ ? packed_move(code, n_, g) : coset_move(code, n_, g);
    }

    // X-trick pruning decided on the code directly.
    bool x_pruned(std::uint64_t code) const {
        const unsigned width = full_ ? 4 : 1;
        const std::uint64_t lane = full_ ? 0xFULL : 1ULL;
        return x_move_pruned(static_cast<Entry>(code & lane),
                             static_cast<Entry>((code >> width) & lane));
    }

    std::uint64_t rank(std::uint64_t code) const { return full_ ? rank_perm(code) : rank_coset(code); }
    std::uint64_t unrank(std::uint64_t index) const {
        return full_ ? unrank_perm(index) : unrank_coset(index);
    }

    std::uint64_t rank_state(std::span<const Entry> state) const { return rank(encode(state)); }
    std::vector<Entry> unrank_state(std::uint64_t index) const { return decode(unrank(index)); }

    std::uint64_t target_code() const { return target_code_; }

private:
    std::uint64_t rank_perm(std::uint64_t code) const;
    std::uint64_t unrank_perm(std::uint64_t index) const;
    std::uint64_t rank_coset(std::uint64_t code) const;
    std::uint64_t unrank_coset(std::uint64_t index) const;

    GraphSpec spec_;
    bool full_;
    unsigned n_;
    std::uint64_t size_ = 0;
    std::uint64_t target_code_ = 0;
    std::vector<std::uint64_t> factorial_;          // full: (k)! for k < n
    std::vector<std::vector<std::uint64_t>> binom_; // coset: C(a, b)
};

// Rank-indexed adjacency: row r holds the ranks of the L, R, X images.
struct NeighborTable {
    std::vector<std::array<std::uint32_t, 3>> rows;

    std::size_t size() const { return rows.size(); }
};

NeighborTable build_neighbor_table(const StateIndexer& indexer);

namespace serial {
NeighborTable build_neighbor_table(const StateIndexer& indexer);
}

} // namespace lrx
