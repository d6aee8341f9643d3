#pragma once

// Constructive words: the explicit decomposition of the longest element, a
// cycle-following sorter with a quadratic length guarantee, and the axial
// lower bound.

#include "lrx/perm.hpp"

#include <cstdint>

namespace lrx {

// Closed-form word for l_n, n >= 4. Read left to right, it maps e to l_n
// (and l_n to e, since l_n is an involution); |word| = n(n-1)/2.
Word longest_word(int n);

// n(n-1)/2 + 3n.
std::int64_t constructive_bound(int n);

// Word w with apply_word(p, w) == e and |w| <= constructive_bound(n).
// Output is peephole-simplified and never contains XX, LR or RL.
Word constructive_solve(const Permutation& p);

// Cancels XX, LR, RL and fuses rotation runs modulo n; each run is written
// as its shortest rotation, ties toward L. The result acts identically.
Word simplify_word(const Word& w, int n);

// floor(n^2 / 2) - n - 1, n >= 4.
std::int64_t axial_lower_bound(int n);

} // namespace lrx
