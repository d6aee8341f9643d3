#pragma once

// Statistics over growth profiles and other desk-scale outputs: moments,
// Gumbel fits, least-squares polynomials, the coset diameter formula and
// adjacency spectra.

#include "lrx/exact_search.hpp"
#include "lrx/graph_space.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lrx {

struct GrowthStats {
    double mean = 0.0;
    int mode = 0;               // argmax layer, smallest index on ties
    double std = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

// Throws InvalidArgument for an empty profile or a single layer (the
// standard deviation is undefined).
GrowthStats growth_stats(std::span<const std::uint64_t> layer_sizes);
inline GrowthStats growth_stats(const LayerProfile& profile) { return growth_stats(profile.layer_sizes); }

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Left-skewed Gumbel: p(x) = exp(t - e^t) / beta, t = (x - mu) / beta.
struct GumbelParams {
    double mu = 0.0;
    double beta = 1.0;
};

double gumbel_pdf(double x, const GumbelParams& p);
double gumbel_cdf(double x, const GumbelParams& p);
double gumbel_mean(const GumbelParams& p);      // mu - gamma beta
double gumbel_variance(const GumbelParams& p);  // pi^2 beta^2 / 6
// Inverse CDF: mu + beta ln(-ln(1 - u)), u in (0, 1).
double gumbel_quantile(const GumbelParams& p, double u);

// beta = sqrt(6 var) / pi, mu = mean + gamma beta.
GumbelParams gumbel_from_moments(double mean, double variance);

enum class FitObjective : std::uint8_t { L2, Linf, KS };

std::string to_string(FitObjective objective);
FitObjective parse_fit_objective(std::string_view text);

struct GumbelFit {
    GumbelParams moment;
    GumbelParams refined;
    double moment_objective = 0.0;
    double objective = 0.0;
    FitObjective kind = FitObjective::L2;
};

// Objective between the normalized profile (pmf at 0, 1, 2, ...) and the
// density at the same integers.
double gumbel_objective(std::span<const double> pmf, const GumbelParams& p, FitObjective kind);

// Moment start, then a 41 x 41 grid over mu (1 +- 5%) x beta (1 +- 5%)
// keeping the best point (the start itself if nothing beats it).
GumbelFit gumbel_fit(std::span<const std::uint64_t> counts, FitObjective kind = FitObjective::L2);

struct PolyFit {
    std::vector<double> coefficients;  // highest degree first
    double residual_norm = 0.0;
};

// Least squares; InvalidArgument on too few points or a rank-deficient design.
PolyFit poly_fit(std::span<const double> xs, std::span<const double> ys, int degree);
double poly_eval(std::span<const double> coefficients, double x);

// (3n^2 - 4n + 32 - 2 (n mod 4)) / 16 for even n >= 6.
std::int64_t coset_gods_number(int n);

// Eigenvalues (ascending) of the symmetric adjacency operator of the full
// graph, n in [4, 7], by parallel cyclic Jacobi.
std::vector<double> spectrum(const GraphSpec& spec);

// Dense symmetric eigenvalues, ascending; row-major input. Stops when the
// off-diagonal Frobenius norm drops below tol.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t size, double tol = 1e-10);

namespace serial {
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t size, double tol = 1e-10);
}

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
};

// Equal-width bins over [lo, hi]; the last bin is closed.
Histogram histogram(std::span<const double> values, int bins, double lo, double hi);

} // namespace lrx
