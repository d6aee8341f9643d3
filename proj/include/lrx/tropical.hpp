#pragma once

// Min-plus (tropical) matrices: powers of the tropical adjacency matrix give
// shortest-path lengths.

#include "lrx/graph_space.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace lrx {

class TropicalMatrix {
public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    TropicalMatrix() = default;
    // All off-diagonal entries +inf, diagonal 0.
    explicit TropicalMatrix(std::size_t size);

    std::size_t size() const { return size_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * size_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * size_ + j]; }
    const std::vector<double>& data() const { return a_; }

    bool operator==(const TropicalMatrix&) const = default;

private:
    std::size_t size_ = 0;
    std::vector<double> a_;
};

// (A (x) B)_ij = min_k A_ik + B_kj.
TropicalMatrix min_plus(const TropicalMatrix& a, const TropicalMatrix& b);

namespace serial {
TropicalMatrix min_plus(const TropicalMatrix& a, const TropicalMatrix& b);
}

// k-fold min-plus power by repeated squaring; k >= 1.
TropicalMatrix tropical_power(const TropicalMatrix& a, int k);

// Unit-weight adjacency of the graph, rows and columns in state-rank order.
TropicalMatrix tropical_adjacency(const GraphSpec& spec);

} // namespace lrx
