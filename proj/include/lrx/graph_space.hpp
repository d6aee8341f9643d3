#pragma once

// The two searchable spaces: the full LRX Cayley graph of S_n and the
// Schreier coset graph on balanced binary strings of length n = 2m.

#include "lrx/perm.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lrx {

enum class GraphKind : std::uint8_t { FullCayley, Coset };

std::string to_string(GraphKind kind);
GraphKind parse_graph_kind(std::string_view text);

struct GraphSpec {
    GraphKind kind = GraphKind::FullCayley;
    int n = 0;
    bool x_trick = false;

    // FullCayley: n >= 2. Coset: n = 2m, m >= 2, n <= 64.
    void validate() const;

    bool operator==(const GraphSpec&) const = default;
};

// Bit i of `bits` is character i of the 0/1 string.
struct CosetState {
    std::uint64_t bits = 0;
    std::uint8_t n = 0;

    static CosetState parse(std::string_view text);
    std::string to_string() const;

    auto operator<=>(const CosetState&) const = default;
};

inline constexpr unsigned kMaxCosetN = 64;

inline std::uint64_t coset_mask(unsigned n) { return n >= 64 ? ~0ULL : ((1ULL << n) - 1); }

inline std::uint64_t coset_move(std::uint64_t bits, unsigned n, Move g) {
    switch (g) {
    case Move::L:
        return (bits >> 1) | ((bits & 1ULL) << (n - 1));
    case Move::R:
        return ((bits << 1) & coset_mask(n)) | (bits >> (n - 1));
    default: {
        const std::uint64_t b0 = bits & 1ULL;
        const std::uint64_t b1 = (bits >> 1) & 1ULL;
        return (bits & ~3ULL) | (b0 << 1) | b1;
    }
    }
}

inline CosetState apply_move(CosetState s, Move g) { return CosetState{coset_move(s.bits, s.n, g), s.n}; }

// 0^m 1^m, the reference state of the coset graph.
CosetState coset_start(int n);

std::vector<Entry> to_entries(CosetState s);
CosetState coset_from_entries(std::span<const Entry> entries);

// The X-trick drops X whenever the first two entries are already in order.
// Permutations never have equal entries; for 0/1 strings equal bits make X a
// self-loop, so `<=` covers both spaces with one rule.
inline bool x_move_pruned(Entry first, Entry second) { return first <= second; }

template <typename State>
struct Neighbor {
    Move move;
    State state;

    bool operator==(const Neighbor&) const = default;
};

// Images under (L, R, X) in that fixed order; X omitted when spec.x_trick and
// the first two entries are ordered.
std::vector<Neighbor<Permutation>> neighbors(const Permutation& p, const GraphSpec& spec);
std::vector<Neighbor<CosetState>> neighbors(CosetState s, const GraphSpec& spec);

// Moves allowed from an entries-array state (same filtering as neighbors()).
int allowed_moves(std::span<const Entry> state, bool x_trick, std::array<Move, 3>& out);

// l_n[i] = (1 - i) mod n, i.e. (1, 0, n-1, n-2, ..., 2). n >= 3.
Permutation longest_element(int n);

// The n reflections r_k[i] = (k - i) mod n; k = 1 gives l_n.
Permutation dihedral_element(int n, int k);
std::vector<Permutation> dihedral_long_elements(int n);

// bit i = 1 iff p[i] >= n/2. n even.
CosetState coset_project(const Permutation& p);

// 1^{n0} 0^{n1} 1^{n2} 0^{n3}, n_i = floor((n + i) / 4). n even, n >= 4.
CosetState coset_long_element(int n);

// Target of the search for a space: e for the full graph, 0^m 1^m for cosets.
std::vector<Entry> target_entries(const GraphSpec& spec);

// Parse a state given either as "1,0,2" (full) or "0011" (coset).
std::vector<Entry> parse_state(const GraphSpec& spec, std::string_view text);
std::string format_state(const GraphSpec& spec, std::span<const Entry> state);
bool is_valid_state(const GraphSpec& spec, std::span<const Entry> state);

} // namespace lrx
