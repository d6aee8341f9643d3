#include "lrx/state_index.hpp"

#include "lrx/error.hpp"

#include <bit>
#include <limits>

namespace lrx {

StateIndexer::StateIndexer(const GraphSpec& spec)
    : spec_(spec), full_(spec.kind == GraphKind::FullCayley), n_(static_cast<unsigned>(spec.n)) {
    spec_.validate();
    if (full_) {
        if (n_ > kMaxPackedN) {
            throw ResourceError("full graph enumeration supports n <= 16");
        }
        factorial_.assign(n_ + 1, 1);
        for (unsigned k = 1; k <= n_; ++k) factorial_[k] = factorial_[k - 1] * k;
        size_ = factorial_[n_];
        target_code_ = pack(Permutation::identity(n_)).bits;
    } else {
        binom_.assign(n_ + 1, std::vector<std::uint64_t>(n_ + 1, 0));
        for (unsigned a = 0; a <= n_; ++a) {
            binom_[a][0] = 1;
            for (unsigned b = 1; b <= a; ++b) {
                const std::uint64_t x = binom_[a - 1][b - 1];
                const std::uint64_t y = b <= a - 1 ? binom_[a - 1][b] : 0;
                binom_[a][b] = x > std::numeric_limits<std::uint64_t>::max() - y
                                   ? std::numeric_limits<std::uint64_t>::max()
                                   : x + y;
            }
        }
        size_ = binom_[n_][n_ / 2];
        target_code_ = coset_start(spec.n).bits;
    }
}

std::uint64_t StateIndexer::encode(std::span<const Entry> state) const {
    if (state.size() != n_) throw InvalidArgument("state size does not match n");
    if (full_) return pack(state).bits;
    return coset_from_entries(state).bits;
}

void StateIndexer::decode(std::uint64_t code, std::span<Entry> out) const {
    if (full_) {
        unpack_into(PackedState{code, static_cast<std::uint8_t>(n_)}, out);
        return;
    }
    for (unsigned i = 0; i < n_; ++i) out[i] = static_cast<Entry>((code >> i) & 1ULL);
}

std::vector<Entry> StateIndexer::decode(std::uint64_t code) const {
    std::vector<Entry> out(n_);
    decode(code, out);
    return out;
}

std::uint64_t StateIndexer::rank_perm(std::uint64_t code) const {
    // Lehmer code: digit i counts unused values below p[i].
    std::uint32_t used = 0;
    std::uint64_t r = 0;
    for (unsigned i = 0; i < n_; ++i) {
        const unsigned v = static_cast<unsigned>((code >> (4 * i)) & 0xF);
        const unsigned smaller_used = static_cast<unsigned>(std::popcount(used & ((1U << v) - 1)));
        r += (v - smaller_used) * factorial_[n_ - 1 - i];
        used |= 1U << v;
    }
    return r;
}

std::uint64_t StateIndexer::unrank_perm(std::uint64_t index) const {
    std::uint32_t free_values = (1U << n_) - 1;
    std::uint64_t code = 0;
    for (unsigned i = 0; i < n_; ++i) {
        const std::uint64_t f = factorial_[n_ - 1 - i];
        auto digit = static_cast<unsigned>(index / f);
        index %= f;
        std::uint32_t mask = free_values;
        for (unsigned k = 0; k < digit; ++k) mask &= mask - 1;
        const auto v = static_cast<unsigned>(std::countr_zero(mask));
        free_values &= ~(1U << v);
        code |= static_cast<std::uint64_t>(v) << (4 * i);
    }
    return code;
}

std::uint64_t StateIndexer::rank_coset(std::uint64_t code) const {
    // Lexicographic among balanced strings: a '1' at position i skips every
    // completion that has '0' there.
    std::uint64_t r = 0;
    unsigned ones_left = n_ / 2;
    for (unsigned i = 0; i < n_ && ones_left > 0; ++i) {
        if ((code >> i) & 1ULL) {
            r += binom_[n_ - i - 1][ones_left];
            --ones_left;
        }
    }
    return r;
}

std::uint64_t StateIndexer::unrank_coset(std::uint64_t index) const {
    std::uint64_t code = 0;
    unsigned ones_left = n_ / 2;
    for (unsigned i = 0; i < n_ && ones_left > 0; ++i) {
        const unsigned rest = n_ - i - 1;
        const std::uint64_t with_zero = ones_left <= rest ? binom_[rest][ones_left] : 0;
        if (index >= with_zero) {
            index -= with_zero;
            code |= 1ULL << i;
            --ones_left;
        }
    }
    return code;
}

namespace {

NeighborTable make_table(const StateIndexer& indexer) {
    if (indexer.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw ResourceError("neighbor table needs fewer than 2^32 states");
    }
    NeighborTable table;
    table.rows.resize(indexer.size());
    return table;
}

} // namespace

NeighborTable build_neighbor_table(const StateIndexer& indexer) {
    NeighborTable table = make_table(indexer);
    const auto size = static_cast<std::int64_t>(indexer.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < size; ++r) {
        const std::uint64_t code = indexer.unrank(static_cast<std::uint64_t>(r));
        auto& row = table.rows[static_cast<std::size_t>(r)];
        for (int g = 0; g < 3; ++g) {
            row[g] = static_cast<std::uint32_t>(indexer.rank(indexer.move(code, kMoves[g])));
        }
    }
    return table;
}

NeighborTable serial::build_neighbor_table(const StateIndexer& indexer) {
    NeighborTable table = make_table(indexer);
    std::vector<Entry> state(static_cast<std::size_t>(indexer.n()));
    for (std::uint64_t r = 0; r < indexer.size(); ++r) {
        for (int g = 0; g < 3; ++g) {
            indexer.decode(indexer.unrank(r), state);
            apply_move_inplace(state, kMoves[g]);
            table.rows[r][g] = static_cast<std::uint32_t>(indexer.rank_state(state));
        }
    }
    return table;
}

} // namespace lrx
