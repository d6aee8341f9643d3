#include "lrx/exact_search.hpp"

#include "lrx/error.hpp"

#include <atomic>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace lrx {

std::uint64_t LayerProfile::total() const {
    return std::accumulate(layer_sizes.begin(), layer_sizes.end(), std::uint64_t{0});
}

BfsResult bfs(const GraphSpec& spec, std::span<const Entry> start, const BfsOptions& options) {
    if (spec.x_trick) throw InvalidArgument("exact BFS requires x_trick = false");
    if (!is_valid_state(spec, start)) throw InvalidArgument("start state is not valid for the graph");

    StateIndexer indexer(spec);
    const std::uint64_t size = indexer.size();
    if (size > options.mem_budget_bytes) {
        throw ResourceError("BFS distance table needs " + std::to_string(size) +
                            " bytes, over the memory budget of " +
                            std::to_string(options.mem_budget_bytes));
    }

    std::vector<std::uint8_t> dist(size, DistanceTable::kUnreached);
    dist[indexer.rank_state(start)] = 0;
    LayerProfile profile{spec.kind, spec.n, {1}};

    const auto total = static_cast<std::int64_t>(size);
    for (int d = 0;; ++d) {
        if (d + 1 >= DistanceTable::kUnreached) throw ResourceError("BFS depth exceeds 254 layers");
        const auto cur = static_cast<std::uint8_t>(d);
        const auto next = static_cast<std::uint8_t>(d + 1);
        std::uint64_t discovered = 0;
#pragma omp parallel for schedule(dynamic, 1 << 14) reduction(+ : discovered)
        for (std::int64_t r = 0; r < total; ++r) {
            if (std::atomic_ref<std::uint8_t>(dist[static_cast<std::size_t>(r)])
                    .load(std::memory_order_relaxed) != cur) {
                continue;
            }
            const std::uint64_t code = indexer.unrank(static_cast<std::uint64_t>(r));
            for (Move g : kMoves) {
                std::atomic_ref<std::uint8_t> slot(dist[indexer.rank(indexer.move(code, g))]);
                std::uint8_t expected = DistanceTable::kUnreached;
                if (slot.load(std::memory_order_relaxed) == expected &&
                    slot.compare_exchange_strong(expected, next, std::memory_order_relaxed)) {
                    ++discovered;
                }
            }
        }
        if (discovered == 0) break;
        profile.layer_sizes.push_back(discovered);
    }

    const int diameter = profile.diameter();
    std::vector<Entry> start_copy(start.begin(), start.end());
    return BfsResult{std::move(profile),
                     DistanceTable(std::move(indexer), std::move(start_copy), std::move(dist), diameter)};
}

namespace {

struct EntriesHash {
    std::size_t operator()(const std::vector<Entry>& v) const { return hash_state(v, 0); }
};

} // namespace

LayerProfile serial::bfs_profile(const GraphSpec& spec, std::span<const Entry> start) {
    if (spec.x_trick) throw InvalidArgument("exact BFS requires x_trick = false");
    if (!is_valid_state(spec, start)) throw InvalidArgument("start state is not valid for the graph");

    std::unordered_map<std::vector<Entry>, int, EntriesHash> seen;
    std::deque<std::vector<Entry>> queue;
    LayerProfile profile{spec.kind, spec.n, {}};

    queue.emplace_back(start.begin(), start.end());
    seen.emplace(queue.front(), 0);
    while (!queue.empty()) {
        std::vector<Entry> s = std::move(queue.front());
        queue.pop_front();
        const int d = seen.at(s);
        if (static_cast<std::size_t>(d) >= profile.layer_sizes.size()) profile.layer_sizes.push_back(0);
        ++profile.layer_sizes[static_cast<std::size_t>(d)];
        for (Move g : kMoves) {
            std::vector<Entry> t = s;
            apply_move_inplace(t, g);
            if (seen.emplace(t, d + 1).second) queue.push_back(std::move(t));
        }
    }
    return profile;
}

std::vector<std::vector<Entry>> farthest_states(const DistanceTable& table) {
    std::vector<std::vector<Entry>> out;
    const auto raw = table.raw();
    const auto far = static_cast<std::uint8_t>(table.diameter());
    for (std::uint64_t r = 0; r < raw.size(); ++r) {
        if (raw[r] == far) out.push_back(table.indexer().unrank_state(r));
    }
    return out;
}

} // namespace lrx
