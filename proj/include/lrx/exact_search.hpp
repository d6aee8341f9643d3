#pragma once

// Exhaustive breadth-first search over the full Cayley graph and the coset
// graph, and the geodesic-ensemble statistic built on top of it.

#include "lrx/graph_space.hpp"
#include "lrx/state_index.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lrx {

inline constexpr std::uint64_t kDefaultMemBudget = 4ULL << 30;

struct LayerProfile {
    GraphKind kind = GraphKind::FullCayley;
    int n = 0;
    std::vector<std::uint64_t> layer_sizes;

    int diameter() const { return static_cast<int>(layer_sizes.size()) - 1; }
    std::uint64_t total() const;
};

// Distances from the BFS start to every state, stored by rank.
class DistanceTable {
public:
    static constexpr std::uint8_t kUnreached = 0xFF;

    DistanceTable(StateIndexer indexer, std::vector<Entry> start, std::vector<std::uint8_t> dist,
                  int diameter)
        : indexer_(std::move(indexer)), start_(std::move(start)), dist_(std::move(dist)),
          diameter_(diameter) {}

    const StateIndexer& indexer() const { return indexer_; }
    const GraphSpec& spec() const { return indexer_.spec(); }
    std::span<const Entry> start() const { return start_; }
    int diameter() const { return diameter_; }
    std::uint64_t size() const { return dist_.size(); }

    // -1 when unreachable.
    int distance(std::span<const Entry> state) const { return at_rank(indexer_.rank_state(state)); }
    int at_rank(std::uint64_t rank) const {
        const std::uint8_t d = dist_[rank];
        return d == kUnreached ? -1 : d;
    }
    std::span<const std::uint8_t> raw() const { return dist_; }

private:
    StateIndexer indexer_;
    std::vector<Entry> start_;
    std::vector<std::uint8_t> dist_;
    int diameter_ = 0;
};

struct BfsOptions {
    std::uint64_t mem_budget_bytes = kDefaultMemBudget;
};

struct BfsResult {
    LayerProfile profile;
    DistanceTable table;
};

// Rejects x_trick (pruned graphs do not give exact distances) and throws
// ResourceError when the distance array would exceed the memory budget.
BfsResult bfs(const GraphSpec& spec, std::span<const Entry> start, const BfsOptions& options = {});
inline BfsResult bfs(const GraphSpec& spec, const BfsOptions& options = {}) {
    const auto start = target_entries(spec);
    return bfs(spec, start, options);
}

namespace serial {
// Queue-and-hash-map reference BFS, independent of the ranking codecs.
LayerProfile bfs_profile(const GraphSpec& spec, std::span<const Entry> start);
}

// All states at maximal distance, in canonical (lexicographic) order.
std::vector<std::vector<Entry>> farthest_states(const DistanceTable& table);

struct GeodesicEnsemble {
    int length = 0;                                  // d(source, target)
    std::vector<std::vector<double>> positions;      // [t][v]: expected position of value v
    std::string path_count;                          // exact, decimal
    double path_count_approx = 0.0;
};

// Expected value trajectories under a uniformly random shortest path from
// source to the start of `to_target`. Counts are exact big integers.
GeodesicEnsemble geodesic_ensemble(const DistanceTable& to_target, const Permutation& source);
GeodesicEnsemble geodesic_ensemble(const Permutation& source, const Permutation& target,
                                   const BfsOptions& options = {});

} // namespace lrx
