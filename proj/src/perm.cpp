#include "lrx/perm.hpp"

#include "lrx/error.hpp"
#include "lrx/rng.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <utility>

namespace lrx {

char to_char(Move g) {
    switch (g) {
    case Move::L: return 'L';
    case Move::R: return 'R';
    default: return 'X';
    }
}

Move move_from_char(char c) {
    switch (c) {
    case 'L': return Move::L;
    case 'R': return Move::R;
    case 'X': return Move::X;
    default: throw InvalidArgument(std::string("not a move: '") + c + "'");
    }
}

std::string to_string(const Word& w) {
    std::string out;
    out.reserve(w.size());
    for (Move g : w) {
        out.push_back(to_char(g));
    }
    return out;
}

Word parse_word(std::string_view text) {
    Word w;
    w.reserve(text.size());
    for (char c : text) {
        w.push_back(move_from_char(c));
    }
    return w;
}

bool is_valid_permutation(std::span<const Entry> entries) {
    const std::size_t n = entries.size();
    if (n < 2) {
        return false;
    }
    std::vector<bool> seen(n, false);
    for (Entry e : entries) {
        if (e >= n || seen[e]) {
            return false;
        }
        seen[e] = true;
    }
    return true;
}

Permutation::Permutation(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (!is_valid_permutation(entries_)) {
        throw InvalidArgument("not a permutation of 0..n-1 with n >= 2");
    }
}

Permutation Permutation::identity(std::size_t n) {
    if (n < 2) {
        throw InvalidArgument("permutation size must be >= 2");
    }
    std::vector<Entry> e(n);
    std::iota(e.begin(), e.end(), Entry{0});
    return unchecked(std::move(e));
}

Permutation Permutation::parse(std::string_view text) {
    std::vector<Entry> entries;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) {
            comma = text.size();
        }
        std::string_view field = text.substr(pos, comma - pos);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty() ||
            value > 0xFFFF) {
            throw InvalidArgument("malformed permutation: '" + std::string(text) + "'");
        }
        entries.push_back(static_cast<Entry>(value));
        pos = comma + 1;
    }
    return Permutation(std::move(entries));
}

std::string Permutation::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(entries_[i]);
    }
    return out;
}

bool Permutation::is_identity() const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i] != i) return false;
    }
    return true;
}

void apply_move_inplace(std::span<Entry> s, Move g) {
    switch (g) {
    case Move::L: std::rotate(s.begin(), s.begin() + 1, s.end()); break;
    case Move::R: std::rotate(s.rbegin(), s.rbegin() + 1, s.rend()); break;
    default: std::swap(s[0], s[1]); break;
    }
}

Permutation apply_move(const Permutation& p, Move g) {
    std::vector<Entry> q(p.entries().begin(), p.entries().end());
    apply_move_inplace(q, g);
    return Permutation::unchecked(std::move(q));
}

void apply_word_inplace(std::span<Entry> s, const Word& w) {
    const std::size_t n = s.size();
    // Logical position i lives at physical slot (offset + i) mod n.
    std::size_t offset = 0;
    for (Move g : w) {
        switch (g) {
        case Move::L: offset = offset + 1 == n ? 0 : offset + 1; break;
        case Move::R: offset = offset == 0 ? n - 1 : offset - 1; break;
        default: {
            const std::size_t next = offset + 1 == n ? 0 : offset + 1;
            std::swap(s[offset], s[next]);
            break;
        }
        }
    }
    std::rotate(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(offset), s.end());
}

Permutation apply_word(const Permutation& p, const Word& w) {
    std::vector<Entry> q(p.entries().begin(), p.entries().end());
    apply_word_inplace(q, w);
    return Permutation::unchecked(std::move(q));
}

std::uint64_t inversion_count(std::span<const Entry> p) {
    // Fenwick tree over values seen so far (scanning right to left).
    const std::size_t n = p.size();
    std::vector<std::uint32_t> tree(n + 1, 0);
    std::uint64_t inversions = 0;
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t i = p[k]; i > 0; i -= i & (~i + 1)) {
            inversions += tree[i];
        }
        for (std::size_t i = static_cast<std::size_t>(p[k]) + 1; i <= n; i += i & (~i + 1)) {
            ++tree[i];
        }
    }
    return inversions;
}

std::int64_t inversion_delta(std::span<const Entry> p, Move g) {
    const auto n = static_cast<std::int64_t>(p.size());
    switch (g) {
    case Move::L: return n - 1 - 2 * static_cast<std::int64_t>(p.front());
    case Move::R: return 2 * static_cast<std::int64_t>(p.back()) - (n - 1);
    default: return p[0] < p[1] ? 1 : -1;
    }
}

PackedState pack(std::span<const Entry> p) {
    if (p.size() > kMaxPackedN) {
        throw InvalidArgument("packed states support n <= 16");
    }
    PackedState s;
    s.n = static_cast<std::uint8_t>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        s.bits |= static_cast<std::uint64_t>(p[i] & 0xF) << (4 * i);
    }
    return s;
}

PackedState pack(const Permutation& p) { return pack(p.entries()); }

void unpack_into(PackedState s, std::span<Entry> out) {
    for (std::size_t i = 0; i < s.n; ++i) {
        out[i] = static_cast<Entry>((s.bits >> (4 * i)) & 0xF);
    }
}

Permutation unpack(PackedState s) {
    std::vector<Entry> e(s.n);
    unpack_into(s, e);
    return Permutation(std::move(e));
}

namespace {

constexpr std::uint64_t kHashDomain = 0x6c72782d73746174ULL; // "lrx-stat"

std::uint64_t hash_block(std::uint64_t h, std::uint64_t block) {
    return mix64(h ^ mix64(block + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t hash_packed_bits(std::uint64_t bits, unsigned n, std::uint64_t seed) {
    return hash_block(mix64(seed ^ kHashDomain) + n, bits);
}

} // namespace

std::uint64_t hash_state(PackedState s, std::uint64_t seed) {
    return hash_packed_bits(s.bits, s.n, seed);
}

std::uint64_t hash_state(std::span<const Entry> p, std::uint64_t seed) {
    const std::size_t n = p.size();
    if (n <= kMaxPackedN) {
        bool fits = true;
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            fits &= p[i] < 16;
            bits |= static_cast<std::uint64_t>(p[i] & 0xF) << (4 * i);
        }
        if (fits) {
            return hash_packed_bits(bits, static_cast<unsigned>(n), seed);
        }
    }
    // Wide states: 16 bits per entry, four entries per block.
    std::uint64_t h = mix64(seed ^ kHashDomain ^ 0xffffULL) + n;
    std::uint64_t block = 0;
    for (std::size_t i = 0; i < n; ++i) {
        block |= static_cast<std::uint64_t>(p[i]) << (16 * (i % 4));
        if (i % 4 == 3) {
            h = hash_block(h, block);
            block = 0;
        }
    }
    if (n % 4 != 0) {
        h = hash_block(h, block);
    }
    return h;
}

} // namespace lrx
