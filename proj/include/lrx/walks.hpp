#pragma once

// Random walks from the reference state: training-set generation, diffusion
// distance (exact and Monte-Carlo) and inversion-count mixing curves.

#include "lrx/exact_search.hpp"
#include "lrx/graph_space.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace lrx {

enum class WalkKind : std::uint8_t { Plain, NonBacktracking, XTrick };

std::string to_string(WalkKind kind);
WalkKind parse_walk_kind(std::string_view text);

struct WalkConfig {
    WalkKind kind = WalkKind::Plain;
    int history_depth = 1; // NonBacktracking only
    int k_max = 1;
    std::int64_t trajectories = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

// (state, k) pairs, flat: state i occupies states[i*n, (i+1)*n).
struct TrainingSet {
    GraphSpec spec;
    WalkConfig config;
    std::vector<Entry> states;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const Entry> state(std::size_t i) const {
        const auto n = static_cast<std::size_t>(spec.n);
        return {states.data() + i * n, n};
    }
};

// One trajectory as a list of k_max + 1 states, starting at the target.
// X is dropped when cfg.kind == XTrick or spec.x_trick is set.
std::vector<std::vector<Entry>> walk_trajectory(const GraphSpec& spec, const WalkConfig& cfg,
                                                std::int64_t index);

// Per-trajectory first visits, trajectories concatenated in index order; the
// start pair (target, 0) appears once at the front.
TrainingSet generate_walks(const GraphSpec& spec, const WalkConfig& cfg);

// How the k-step weights of a state are counted.
//   AllVisits:  P(V,k) = (A^k)_{eV} / 3^k, every arrival counts.
//   FirstVisit: P(V,k) = probability that the walk reaches V for the first
//               time at step k; this is what the Monte-Carlo estimate measures.
enum class VisitRule : std::uint8_t { AllVisits, FirstVisit };

std::string to_string(VisitRule rule);
VisitRule parse_visit_rule(std::string_view text);

// Indexed by state rank; NaN for states not reachable within k_max steps.
struct DiffusionMap {
    StateIndexer indexer;
    int k_max = 0;
    VisitRule rule = VisitRule::AllVisits;
    std::vector<double> value;

    bool defined(std::uint64_t rank) const { return value[rank] == value[rank]; }
};

// FirstVisit runs one absorbing walk per target state and is limited to
// graphs with at most 7! states.
DiffusionMap exact_diffusion_distance(const GraphSpec& spec, int k_max,
                                      VisitRule rule = VisitRule::AllVisits);

// AllVisits values for every k_max in [k_first, k_last], reduced to per-layer
// means. layer_means[j][d] belongs to k_max = k_first + j; NaN where a layer
// has no defined value. Used for the non-monotonicity scan.
struct DiffusionScan {
    int k_first = 0;
    std::vector<std::vector<double>> layer_means;
};
DiffusionScan diffusion_layer_scan(const DistanceTable& table, int k_first, int k_last);

struct McCell {
    double mean = 0.0;
    std::uint64_t visits = 0;
};

// Mean first-visit step per state, in canonical state order.
std::map<std::vector<Entry>, McCell> mc_diffusion_estimate(const TrainingSet& ts);
std::map<std::vector<Entry>, McCell> mc_diffusion_estimate(const GraphSpec& spec, const WalkConfig& cfg);

struct MixingPoint {
    int step = 0;
    double mean_inversions = 0.0;
    double stderr_ = 0.0;
};

// Mean inversion count over `trials` independent walks at steps 0..k_max.
// cfg.trajectories is ignored. Full graph only.
std::vector<MixingPoint> mixing_curve(const GraphSpec& spec, const WalkConfig& cfg, std::int64_t trials);

} // namespace lrx
