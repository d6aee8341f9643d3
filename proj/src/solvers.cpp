#include "lrx/solvers.hpp"

#include "lrx/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace lrx {

Word longest_word(int n) {
    if (n < 4) throw InvalidArgument("longest word defined for n >= 4");
    const int m = n / 2;
    const int delta = n % 2 == 0 ? 1 : 0;
    // L^{(-1)^e}: L for even e, R for odd e.
    const auto signed_l = [](int e) { return e % 2 == 0 ? Move::L : Move::R; };

    Word w;
    w.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
    for (int i = 1; i <= m - delta; ++i) {
        for (int k = 0; k < i; ++k) {
            w.push_back(Move::X);
            w.push_back(signed_l(i - 1));
        }
    }
    for (int i = m - 1; i >= 1; --i) {
        for (int k = 0; k < i; ++k) {
            w.push_back(signed_l(i - delta));
            w.push_back(Move::X);
        }
    }
    w.insert(w.end(), static_cast<std::size_t>(m), Move::R);
    return w;
}

std::int64_t constructive_bound(int n) {
    const auto m = static_cast<std::int64_t>(n);
    return m * (m - 1) / 2 + 3 * m;
}

std::int64_t axial_lower_bound(int n) {
    if (n < 4) throw InvalidArgument("axial lower bound defined for n >= 4");
    const auto m = static_cast<std::int64_t>(n);
    return m * m / 2 - m - 1;
}

Word simplify_word(const Word& w, int n) {
    if (n < 2) throw InvalidArgument("simplify_word needs n >= 2");
    // Stack of X tokens (kind 0) and net rotations (kind 1, amount k).
    struct Token {
        bool rotation;
        int k;
    };
    std::vector<Token> stack;
    for (Move g : w) {
        if (g == Move::X) {
            if (!stack.empty() && !stack.back().rotation) {
                stack.pop_back();
            } else {
                stack.push_back({false, 0});
            }
            continue;
        }
        const int step = g == Move::L ? 1 : -1;
        if (!stack.empty() && stack.back().rotation) {
            stack.back().k = ((stack.back().k + step) % n + n) % n;
            if (stack.back().k == 0) stack.pop_back();
        } else {
            stack.push_back({true, (step + n) % n});
        }
    }
    Word out;
    for (const Token& t : stack) {
        if (!t.rotation) {
            out.push_back(Move::X);
            continue;
        }
        // Shortest representative in (-n/2, n/2]; k == n/2 stays as L^k.
        const int k = t.k <= n / 2 ? t.k : t.k - n;
        out.insert(out.end(), static_cast<std::size_t>(std::abs(k)), k > 0 ? Move::L : Move::R);
    }
    return out;
}

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; }

// Cyclic sorter working in the absolute frame of the array. Applying L to
// the array moves the exchange window (slots cur, cur+1) one slot to the
// right, so a word is a walk of the cursor plus exchanges at the cursor.
// Positions are lifted to the integers: value v travels from X[v] = pos[v]
// to Y[v] = pos[v] + D[v], where D[v] = v + r - pos[v] (mod n) and the final
// rotation r is undone by parking the cursor at slot r. Going once around
// the circle changes a lifted position by n; this is the wrap bookkeeping.
class CycleSorter {
public:
    explicit CycleSorter(const Permutation& p) : n_(static_cast<std::int64_t>(p.size())) {
        const auto n = static_cast<std::size_t>(n_);
        slot_.assign(p.entries().begin(), p.entries().end());
        pos_.resize(n);
        for (std::size_t j = 0; j < n; ++j) pos_[p[j]] = static_cast<std::int64_t>(j);
        choose_lift();
        x_ = pos_;
        y_.resize(n);
        for (std::size_t v = 0; v < n; ++v) y_[v] = pos_[v] + d_[v];
        cycle_rank();
    }

    Word run() {
        for (;;) {
            const std::int64_t v = pick();
            if (v < 0) break;
            const int dir = movable(v);
            travel(floor_mod(dir > 0 ? x_[v] : x_[v] - 1, n_));
            for (;;) {
                exchange();
                if (x_[v] != y_[v] && inverted(v, dir)) {
                    travel(floor_mod(cur_ + dir, n_));
                } else {
                    break;
                }
            }
        }
        travel(rotation_);
        return std::move(word_);
    }

private:
    // Lifted displacements for every final rotation r: shortest residues in
    // (-n/2, n/2], then the sum is forced to 0 by moving the largest (or
    // smallest) displacements by -n (+n). Keeps the r with least total travel.
    void choose_lift() {
        const auto n = static_cast<std::size_t>(n_);
        std::int64_t best_cost = -1;
        std::vector<std::int64_t> d(n);
        std::vector<std::size_t> order(n);
        for (std::int64_t r = 0; r < n_; ++r) {
            std::int64_t sum = 0;
            for (std::size_t v = 0; v < n; ++v) {
                std::int64_t x = floor_mod(static_cast<std::int64_t>(v) + r - pos_[v], n_);
                if (x > n_ / 2) x -= n_;
                d[v] = x;
                sum += x;
            }
            const std::int64_t j = sum / n_;
            if (j != 0) {
                std::iota(order.begin(), order.end(), std::size_t{0});
                const auto k = static_cast<std::size_t>(std::abs(j));
                if (j > 0) {
                    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                                      [&](std::size_t a, std::size_t b) { return d[a] != d[b] ? d[a] > d[b] : a < b; });
                    for (std::size_t i = 0; i < k; ++i) d[order[i]] -= n_;
                } else {
                    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                                      [&](std::size_t a, std::size_t b) { return d[a] != d[b] ? d[a] < d[b] : a < b; });
                    for (std::size_t i = 0; i < k; ++i) d[order[i]] += n_;
                }
            }
            std::int64_t cost = 0;
            for (std::int64_t x : d) cost += std::abs(x);
            if (best_cost < 0 || cost < best_cost) {
                best_cost = cost;
                rotation_ = r;
                d_ = d;
            }
        }
    }

    // Order in which values appear when following cycles of the target map
    // slot pos[v] -> slot pos[v] + D[v], starting from slot 0.
    void cycle_rank() {
        const auto n = static_cast<std::size_t>(n_);
        rank_.assign(n, 0);
        std::vector<char> seen(n, 0);
        std::size_t next = 0;
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t j = s; !seen[j];) {
                seen[j] = 1;
                const Entry v = slot_[j];
                rank_[v] = next++;
                j = static_cast<std::size_t>(floor_mod(pos_[v] + d_[v], n_));
            }
        }
    }

    // Neighbor of v in direction dir and its target, shifted into v's lift.
    std::int64_t neighbor_target(std::int64_t v, int dir) const {
        const std::int64_t t = floor_mod(x_[v] + dir, n_);
        const Entry w = slot_[static_cast<std::size_t>(t)];
        return y_[w] + (x_[v] + dir - x_[w]);
    }

    bool inverted(std::int64_t v, int dir) const {
        const std::int64_t yw = neighbor_target(v, dir);
        return dir > 0 ? yw < y_[v] : yw > y_[v];
    }

    int movable(std::int64_t v) const {
        if (x_[v] == y_[v]) return 0;
        const int dir = y_[v] > x_[v] ? 1 : -1;
        return inverted(v, dir) ? dir : 0;
    }

    // Nearest movable value by cursor distance, ties by cycle rank.
    std::int64_t pick() const {
        std::int64_t best = -1;
        std::int64_t best_dist = 0;
        std::size_t best_rank = 0;
        for (std::int64_t v = 0; v < n_; ++v) {
            const int dir = movable(v);
            if (dir == 0) continue;
            const std::int64_t w = floor_mod(dir > 0 ? x_[v] : x_[v] - 1, n_);
            const std::int64_t dist = std::min(floor_mod(w - cur_, n_), floor_mod(cur_ - w, n_));
            const std::size_t rank = rank_[static_cast<std::size_t>(v)];
            if (best < 0 || dist < best_dist || (dist == best_dist && rank < best_rank)) {
                best = v;
                best_dist = dist;
                best_rank = rank;
            }
        }
        return best;
    }

    // Shorter way round, ties toward L.
    void travel(std::int64_t to) {
        const std::int64_t right = floor_mod(to - cur_, n_);
        if (right <= n_ - right) {
            word_.insert(word_.end(), static_cast<std::size_t>(right), Move::L);
        } else {
            word_.insert(word_.end(), static_cast<std::size_t>(n_ - right), Move::R);
        }
        cur_ = to;
    }

    void exchange() {
        const auto c = static_cast<std::size_t>(cur_);
        const auto c1 = static_cast<std::size_t>(floor_mod(cur_ + 1, n_));
        const Entry a = slot_[c];
        const Entry b = slot_[c1];
        ++x_[a];
        --x_[b];
        std::swap(slot_[c], slot_[c1]);
        word_.push_back(Move::X);
    }

    std::int64_t n_;
    std::vector<Entry> slot_;
    std::vector<std::int64_t> pos_, d_, x_, y_;
    std::vector<std::size_t> rank_;
    std::int64_t rotation_ = 0;
    std::int64_t cur_ = 0;
    Word word_;
};

} // namespace

Word constructive_solve(const Permutation& p) {
    if (!is_valid_permutation(p.entries())) throw InvalidArgument("not a valid permutation");
    const int n = static_cast<int>(p.size());
    Word w = simplify_word(CycleSorter(p).run(), n);
    if (!apply_word(p, w).is_identity()) throw std::logic_error("constructive solver produced an invalid word");
    if (static_cast<std::int64_t>(w.size()) > constructive_bound(n)) {
        throw std::logic_error("constructive solver exceeded its length bound");
    }
    return w;
}

} // namespace lrx
