#pragma once

// Tabular value iteration on enumerable graphs, its initialization menu and
// the correlation diagnostics used to track it.

#include "lrx/estimator.hpp"
#include "lrx/exact_search.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lrx {

using StateFunction = std::function<double(std::span<const Entry>)>;

enum class InitKind : std::uint8_t {
    Zero,
    Hamming,
    Manhattan,
    RandomInt,
    RandomGauss,
    LayerMix,
    Model,
    Exact,
    Constant,
};

struct InitSpec {
    InitKind kind = InitKind::Zero;
    int layer_k = 1;            // LayerMix: layers d < k get true distances, the rest 0
    double sigma = 0.0;         // RandomGauss; <= 0 means n
    double constant = 0.0;      // Constant
    std::uint64_t seed = 0;     // RandomInt / RandomGauss
    int diameter = -1;          // RandomInt range [0, diameter]; < 0 means oracle diameter or n(n-1)/2
    const DistanceTable* oracle = nullptr;        // LayerMix, Exact
    const DistanceEstimator* model = nullptr;     // Model
};

// "zero", "hamming", "manhattan", "random_int", "random_gauss", "layer_mix:K",
// "model", "exact", "constant:V".
InitSpec parse_init_tag(std::string_view tag);
std::string to_string(const InitSpec& spec);

// Hamming and Manhattan measure against the search target of the graph.
StateFunction make_initializer(const InitSpec& init, const GraphSpec& spec);

struct DpConfig {
    double tolerance = 1e-9;
    double alpha = 1.0;
    int max_iterations = 1000;
    InitSpec init;

    void validate() const;
};

struct DpTracePoint {
    int iteration = 0;
    double pearson = 0.0;       // NaN while the iterate is constant
    double max_abs_err = 0.0;   // vs oracle, or vs previous iterate without one
};

struct DpResult {
    std::vector<double> distances;  // indexed by state rank
    int iterations = 0;             // number of iterates examined, d_0 included
    bool converged = false;
    std::vector<DpTracePoint> trace;
};

// Jacobi sweeps d_{i+1}(s) = alpha (1 + min_g d_i(g s)) + (1 - alpha) d_i(s)
// with d(target) reset to 0. With an oracle, stops once
// max |d_i - d| < tolerance and traces Pearson correlation; without one, stops
// when successive iterates differ by less than tolerance.
DpResult dp_solve(const GraphSpec& spec, const DpConfig& cfg, const DistanceTable* oracle = nullptr);

namespace serial {
DpResult dp_solve(const GraphSpec& spec, const DpConfig& cfg, const DistanceTable* oracle = nullptr);
}

// Throw UndefinedCorrelation on constant input or length < 2.
double pearson(std::span<const double> xs, std::span<const double> ys);
double spearman(std::span<const double> xs, std::span<const double> ys);

// Average ranks (1-based), ties share the mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

} // namespace lrx
