#include "lrx/tropical.hpp"

#include "lrx/error.hpp"
#include "lrx/state_index.hpp"

#include <algorithm>

namespace lrx {

TropicalMatrix::TropicalMatrix(std::size_t size) : size_(size), a_(size * size, kInf) {
    for (std::size_t i = 0; i < size; ++i) a_[i * size + i] = 0.0;
}

namespace {

void check_shapes(const TropicalMatrix& a, const TropicalMatrix& b) {
    if (a.size() != b.size()) throw InvalidArgument("min-plus product needs equal sizes");
}

// Row i of the product; k-outer loop keeps the inner loop contiguous.
void product_row(const TropicalMatrix& a, const TropicalMatrix& b, std::size_t i, double* out) {
    const std::size_t n = a.size();
    std::fill(out, out + n, TropicalMatrix::kInf);
    for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        if (aik == TropicalMatrix::kInf) continue;
        const double* brow = b.data().data() + k * n;
        for (std::size_t j = 0; j < n; ++j) out[j] = std::min(out[j], aik + brow[j]);
    }
}

} // namespace

TropicalMatrix min_plus(const TropicalMatrix& a, const TropicalMatrix& b) {
    check_shapes(a, b);
    const std::size_t n = a.size();
    TropicalMatrix c(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        product_row(a, b, static_cast<std::size_t>(i), &c(static_cast<std::size_t>(i), 0));
    }
    return c;
}

TropicalMatrix serial::min_plus(const TropicalMatrix& a, const TropicalMatrix& b) {
    check_shapes(a, b);
    const std::size_t n = a.size();
    TropicalMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double best = TropicalMatrix::kInf;
            for (std::size_t k = 0; k < n; ++k) best = std::min(best, a(i, k) + b(k, j));
            c(i, j) = best;
        }
    }
    return c;
}

TropicalMatrix tropical_power(const TropicalMatrix& a, int k) {
    if (k < 1) throw InvalidArgument("tropical power needs k >= 1");
    TropicalMatrix result;
    TropicalMatrix base = a;
    bool have = false;
    for (unsigned e = static_cast<unsigned>(k);;) {
        if (e & 1U) {
            result = have ? min_plus(result, base) : base;
            have = true;
        }
        e >>= 1U;
        if (e == 0) break;
        base = min_plus(base, base);
    }
    return result;
}

TropicalMatrix tropical_adjacency(const GraphSpec& spec) {
    if (spec.x_trick) throw InvalidArgument("tropical adjacency uses the unpruned graph");
    StateIndexer idx(spec);
    constexpr std::uint64_t kMaxStates = 40320;
    if (idx.size() > kMaxStates) throw ResourceError("dense tropical adjacency supports <= 40320 states");
    const NeighborTable table = build_neighbor_table(idx);
    TropicalMatrix a(table.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
        for (std::uint32_t c : table.rows[r]) {
            if (c != r) a(r, c) = 1.0;
        }
    }
    return a;
}

} // namespace lrx
