#include "lrx/analysis.hpp"
#include "lrx/error.hpp"
#include "lrx/state_index.hpp"

#include <algorithm>
#include <cmath>

namespace lrx {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) s += a[i * n + j] * a[i * n + j];
        }
    }
    return std::sqrt(s);
}

struct Rotation {
    std::size_t p, q;
    double c, s;
};

// Rotation that annihilates a_pq.
bool make_rotation(const std::vector<double>& a, std::size_t n, std::size_t p, std::size_t q, Rotation& r) {
    const double apq = a[p * n + q];
    if (apq == 0.0) return false;
    const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    r.c = 1.0 / std::sqrt(t * t + 1.0);
    r.s = t * r.c;
    r.p = p;
    r.q = q;
    return true;
}

std::vector<double> sorted_diagonal(const std::vector<double>& a, std::size_t n) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
    std::sort(d.begin(), d.end());
    return d;
}

void check_square(const std::vector<double>& a, std::size_t n) {
    if (a.size() != n * n) throw InvalidArgument("matrix is not size x size");
}

} // namespace

// Brent-Luk round-robin ordering: each round is a set of disjoint pairs,
// whose rotations are applied together (all columns, then all rows).
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n, double tol) {
    check_square(a, n);
    if (n == 0) return {};
    const std::size_t m = n + (n % 2);  // padded with a dummy index when odd
    std::vector<std::size_t> ring(m);
    for (std::size_t i = 0; i < m; ++i) ring[i] = i;
    std::vector<Rotation> rots;
    rots.reserve(m / 2);

    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a, n) >= tol; ++sweep) {
        for (std::size_t round = 0; round + 1 < m; ++round) {
            rots.clear();
            for (std::size_t k = 0; k < m / 2; ++k) {
                std::size_t p = ring[k];
                std::size_t q = ring[m - 1 - k];
                if (p > q) std::swap(p, q);
                Rotation r{};
                if (q < n && make_rotation(a, n, p, q, r)) rots.push_back(r);
            }
            const auto nrot = static_cast<std::int64_t>(rots.size());
            const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < rows; ++i) {
                double* row = a.data() + static_cast<std::size_t>(i) * n;
                for (std::int64_t k = 0; k < nrot; ++k) {
                    const Rotation& r = rots[static_cast<std::size_t>(k)];
                    const double ip = row[r.p], iq = row[r.q];
                    row[r.p] = r.c * ip - r.s * iq;
                    row[r.q] = r.s * ip + r.c * iq;
                }
            }
#pragma omp parallel for schedule(static)
            for (std::int64_t k = 0; k < nrot; ++k) {
                const Rotation& r = rots[static_cast<std::size_t>(k)];
                double* rp = a.data() + r.p * n;
                double* rq = a.data() + r.q * n;
                for (std::size_t j = 0; j < n; ++j) {
                    const double pj = rp[j], qj = rq[j];
                    rp[j] = r.c * pj - r.s * qj;
                    rq[j] = r.s * pj + r.c * qj;
                }
            }
            // Keep ring[0] fixed, rotate the rest by one.
            std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
        }
    }
    return sorted_diagonal(a, n);
}

std::vector<double> serial::jacobi_eigenvalues(std::vector<double> a, std::size_t n, double tol) {
    check_square(a, n);
    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a, n) >= tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                Rotation r{};
                if (!make_rotation(a, n, p, q, r)) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    const double ip = a[i * n + p], iq = a[i * n + q];
                    a[i * n + p] = r.c * ip - r.s * iq;
                    a[i * n + q] = r.s * ip + r.c * iq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double pj = a[p * n + j], qj = a[q * n + j];
                    a[p * n + j] = r.c * pj - r.s * qj;
                    a[q * n + j] = r.s * pj + r.c * qj;
                }
            }
        }
    }
    return sorted_diagonal(a, n);
}

std::vector<double> spectrum(const GraphSpec& spec) {
    spec.validate();
    if (spec.kind != GraphKind::FullCayley) throw InvalidArgument("spectrum is computed for the full graph");
    if (spec.n < 4) throw InvalidArgument("spectrum needs n >= 4");
    if (spec.n > 7) throw ResourceError("dense spectrum supports n <= 7");
    StateIndexer idx(spec);
    const NeighborTable table = build_neighbor_table(idx);
    const std::size_t size = table.size();
    std::vector<double> a(size * size, 0.0);
    for (std::size_t r = 0; r < size; ++r) {
        for (std::uint32_t c : table.rows[r]) a[r * size + c] += 1.0;
    }
    return jacobi_eigenvalues(std::move(a), size);
}

} // namespace lrx
