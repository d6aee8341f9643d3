#include "lrx/error.hpp"
#include "lrx/exact_search.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>

namespace lrx {

namespace mp = boost::multiprecision;

GeodesicEnsemble geodesic_ensemble(const DistanceTable& to_target, const Permutation& source) {
    const StateIndexer& idx = to_target.indexer();
    if (to_target.spec().kind != GraphKind::FullCayley) {
        throw InvalidArgument("geodesic ensemble is defined on the full Cayley graph");
    }
    if (static_cast<int>(source.size()) != idx.n()) throw InvalidArgument("source size does not match n");
    const int length = to_target.distance(source.entries());
    if (length < 0) throw InvalidArgument("target unreachable from source");

    // layers[t]: states t steps along some geodesic, with forward path counts.
    std::vector<std::map<std::uint64_t, mp::cpp_int>> forward(static_cast<std::size_t>(length) + 1);
    forward[0].emplace(idx.encode(source.entries()), 1);
    for (int t = 0; t < length; ++t) {
        for (const auto& [code, count] : forward[static_cast<std::size_t>(t)]) {
            for (Move g : kMoves) {
                const std::uint64_t next = idx.move(code, g);
                if (to_target.at_rank(idx.rank(next)) == length - t - 1) {
                    forward[static_cast<std::size_t>(t) + 1][next] += count;
                }
            }
        }
    }

    std::vector<std::map<std::uint64_t, mp::cpp_int>> backward(forward.size());
    for (const auto& [code, count] : forward.back()) backward.back().emplace(code, 1);
    for (int t = length - 1; t >= 0; --t) {
        const auto& later = backward[static_cast<std::size_t>(t) + 1];
        for (const auto& entry : forward[static_cast<std::size_t>(t)]) {
            mp::cpp_int sum = 0;
            for (Move g : kMoves) {
                const auto it = later.find(idx.move(entry.first, g));
                if (it != later.end() && to_target.at_rank(idx.rank(it->first)) == length - t - 1) {
                    sum += it->second;
                }
            }
            backward[static_cast<std::size_t>(t)].emplace(entry.first, std::move(sum));
        }
    }

    const mp::cpp_int total = backward[0].begin()->second;
    const std::size_t n = source.size();
    GeodesicEnsemble out;
    out.length = length;
    out.path_count = total.str();
    out.path_count_approx = static_cast<double>(total);
    out.positions.assign(forward.size(), std::vector<double>(n, 0.0));

    std::vector<Entry> state(n);
    for (std::size_t t = 0; t < forward.size(); ++t) {
        std::vector<mp::cpp_int> weighted(n);
        for (const auto& [code, f] : forward[t]) {
            const mp::cpp_int w = f * backward[t].at(code);
            idx.decode(code, state);
            for (std::size_t i = 0; i < n; ++i) weighted[state[i]] += w * i;
        }
        for (std::size_t v = 0; v < n; ++v) {
            out.positions[t][v] = static_cast<double>(mp::cpp_rational(weighted[v], total));
        }
    }
    return out;
}

GeodesicEnsemble geodesic_ensemble(const Permutation& source, const Permutation& target,
                                   const BfsOptions& options) {
    if (source.size() != target.size()) throw InvalidArgument("source and target sizes differ");
    const GraphSpec spec{GraphKind::FullCayley, static_cast<int>(source.size()), false};
    const BfsResult result = bfs(spec, target.entries(), options);
    return geodesic_ensemble(result.table, source);
}

} // namespace lrx
