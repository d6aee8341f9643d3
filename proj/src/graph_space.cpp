#include "lrx/graph_space.hpp"

#include "lrx/error.hpp"

#include <bit>

namespace lrx {

std::string to_string(GraphKind kind) {
    return kind == GraphKind::FullCayley ? "full" : "coset";
}

GraphKind parse_graph_kind(std::string_view text) {
    if (text == "full" || text == "FullCayley") return GraphKind::FullCayley;
    if (text == "coset" || text == "Coset") return GraphKind::Coset;
    throw InvalidArgument("unknown graph kind: " + std::string(text));
}

void GraphSpec::validate() const {
    if (kind == GraphKind::FullCayley) {
        if (n < 2) throw InvalidArgument("full Cayley graph needs n >= 2");
        if (n > 0xFFFF) throw InvalidArgument("n too large");
        return;
    }
    if (n < 4 || n % 2 != 0) throw InvalidArgument("coset graph needs even n >= 4");
    if (n > static_cast<int>(kMaxCosetN)) throw InvalidArgument("coset graph supports n <= 64");
}

CosetState CosetState::parse(std::string_view text) {
    if (text.size() < 2 || text.size() > kMaxCosetN) {
        throw InvalidArgument("coset string length must be in [2, 64]");
    }
    CosetState s;
    s.n = static_cast<std::uint8_t>(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') {
            s.bits |= 1ULL << i;
        } else if (text[i] != '0') {
            throw InvalidArgument("coset string must be over {0,1}");
        }
    }
    if (2 * static_cast<unsigned>(std::popcount(s.bits)) != s.n) {
        throw InvalidArgument("coset string must have exactly n/2 ones");
    }
    return s;
}

std::string CosetState::to_string() const {
    std::string out(n, '0');
    for (unsigned i = 0; i < n; ++i) {
        if ((bits >> i) & 1ULL) out[i] = '1';
    }
    return out;
}

CosetState coset_start(int n) {
    GraphSpec{GraphKind::Coset, n, false}.validate();
    const unsigned m = static_cast<unsigned>(n) / 2;
    return CosetState{coset_mask(static_cast<unsigned>(n)) & ~coset_mask(m),
                      static_cast<std::uint8_t>(n)};
}

std::vector<Entry> to_entries(CosetState s) {
    std::vector<Entry> e(s.n);
    for (unsigned i = 0; i < s.n; ++i) {
        e[i] = static_cast<Entry>((s.bits >> i) & 1ULL);
    }
    return e;
}

CosetState coset_from_entries(std::span<const Entry> entries) {
    if (entries.size() > kMaxCosetN) throw InvalidArgument("coset string too long");
    CosetState s;
    s.n = static_cast<std::uint8_t>(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i] > 1) throw InvalidArgument("coset entries must be 0/1");
        s.bits |= static_cast<std::uint64_t>(entries[i]) << i;
    }
    return s;
}

int allowed_moves(std::span<const Entry> state, bool x_trick, std::array<Move, 3>& out) {
    out[0] = Move::L;
    out[1] = Move::R;
    if (x_trick && x_move_pruned(state[0], state[1])) {
        return 2;
    }
    out[2] = Move::X;
    return 3;
}

std::vector<Neighbor<Permutation>> neighbors(const Permutation& p, const GraphSpec& spec) {
    std::vector<Neighbor<Permutation>> out;
    out.reserve(3);
    std::array<Move, 3> moves{};
    const int count = allowed_moves(p.entries(), spec.x_trick, moves);
    for (int i = 0; i < count; ++i) {
        out.push_back({moves[i], apply_move(p, moves[i])});
    }
    return out;
}

std::vector<Neighbor<CosetState>> neighbors(CosetState s, const GraphSpec& spec) {
    std::vector<Neighbor<CosetState>> out;
    out.reserve(3);
    const auto b0 = static_cast<Entry>(s.bits & 1ULL);
    const auto b1 = static_cast<Entry>((s.bits >> 1) & 1ULL);
    out.push_back({Move::L, apply_move(s, Move::L)});
    out.push_back({Move::R, apply_move(s, Move::R)});
    if (!(spec.x_trick && x_move_pruned(b0, b1))) {
        out.push_back({Move::X, apply_move(s, Move::X)});
    }
    return out;
}

Permutation dihedral_element(int n, int k) {
    if (n < 3) throw InvalidArgument("dihedral elements need n >= 3");
    std::vector<Entry> e(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        e[static_cast<std::size_t>(i)] = static_cast<Entry>((((k - i) % n) + n) % n);
    }
    return Permutation::unchecked(std::move(e));
}

Permutation longest_element(int n) {
    if (n < 3) throw InvalidArgument("longest element defined for n >= 3");
    return dihedral_element(n, 1);
}

std::vector<Permutation> dihedral_long_elements(int n) {
    std::vector<Permutation> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out.push_back(dihedral_element(n, k));
    }
    return out;
}

CosetState coset_project(const Permutation& p) {
    const std::size_t n = p.size();
    if (n % 2 != 0) throw InvalidArgument("coset projection needs even n");
    if (n > kMaxCosetN) throw InvalidArgument("coset projection supports n <= 64");
    CosetState s;
    s.n = static_cast<std::uint8_t>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (2 * static_cast<std::size_t>(p[i]) >= n) s.bits |= 1ULL << i;
    }
    return s;
}

CosetState coset_long_element(int n) {
    GraphSpec{GraphKind::Coset, n, false}.validate();
    CosetState s;
    s.n = static_cast<std::uint8_t>(n);
    unsigned pos = 0;
    for (int i = 0; i < 4; ++i) {
        const int run = (n + i) / 4;
        for (int j = 0; j < run; ++j, ++pos) {
            if (i % 2 == 0) s.bits |= 1ULL << pos;
        }
    }
    return s;
}

std::vector<Entry> target_entries(const GraphSpec& spec) {
    spec.validate();
    if (spec.kind == GraphKind::Coset) return to_entries(coset_start(spec.n));
    const auto id = Permutation::identity(static_cast<std::size_t>(spec.n));
    return {id.entries().begin(), id.entries().end()};
}

std::vector<Entry> parse_state(const GraphSpec& spec, std::string_view text) {
    std::vector<Entry> state;
    if (spec.kind == GraphKind::Coset) {
        state = to_entries(CosetState::parse(text));
    } else {
        const auto p = Permutation::parse(text);
        state.assign(p.entries().begin(), p.entries().end());
    }
    if (static_cast<int>(state.size()) != spec.n) {
        throw InvalidArgument("state size does not match n");
    }
    return state;
}

std::string format_state(const GraphSpec& spec, std::span<const Entry> state) {
    if (spec.kind == GraphKind::Coset) return coset_from_entries(state).to_string();
    std::string out;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(state[i]);
    }
    return out;
}

bool is_valid_state(const GraphSpec& spec, std::span<const Entry> state) {
    if (static_cast<int>(state.size()) != spec.n) return false;
    if (spec.kind == GraphKind::FullCayley) return is_valid_permutation(state);
    std::size_t ones = 0;
    for (Entry e : state) {
        if (e > 1) return false;
        ones += e;
    }
    return 2 * ones == state.size();
}

} // namespace lrx
