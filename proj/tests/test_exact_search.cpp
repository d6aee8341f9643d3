#include "lrx/analysis.hpp"
#include "lrx/error.hpp"
#include "lrx/exact_search.hpp"
#include "lrx/rng.hpp"

#include <doctest.h>

#include <deque>
#include <map>

using namespace lrx;

namespace {

// Plain BFS over permutations with std::map, distances to `root`.
std::map<Permutation, int> map_bfs(const Permutation& root) {
    std::map<Permutation, int> dist{{root, 0}};
    std::deque<Permutation> queue{root};
    while (!queue.empty()) {
        const Permutation p = queue.front();
        queue.pop_front();
        for (Move g : kMoves) {
            const Permutation q = apply_move(p, g);
            if (dist.emplace(q, dist[p] + 1).second) queue.push_back(q);
        }
    }
    return dist;
}

// Number of shortest paths by exhaustive DFS along distance-decreasing edges.
std::uint64_t count_geodesics(const Permutation& p, const std::map<Permutation, int>& dist) {
    const int d = dist.at(p);
    if (d == 0) return 1;
    std::uint64_t total = 0;
    for (Move g : kMoves) {
        const Permutation q = apply_move(p, g);
        if (dist.at(q) == d - 1) total += count_geodesics(q, dist);
    }
    return total;
}

} // namespace

TEST_CASE("bfs on S_3 by hand") {
    const auto r = bfs(GraphSpec{GraphKind::FullCayley, 3, false});
    CHECK(r.profile.layer_sizes == std::vector<std::uint64_t>{1, 3, 2});
    CHECK(r.profile.diameter() == 2);
    CHECK(r.table.distance(std::vector<Entry>{0, 1, 2}) == 0);
}

TEST_CASE("full graph profiles against an independent BFS") {
    for (int n = 4; n <= 7; ++n) {
        const GraphSpec spec{GraphKind::FullCayley, n, false};
        const auto r = bfs(spec);
        const auto ref = serial::bfs_profile(spec, target_entries(spec));
        CHECK(r.profile.layer_sizes == ref.layer_sizes);

        const auto dist = map_bfs(Permutation::identity(static_cast<std::size_t>(n)));
        for (const auto& [p, d] : dist) REQUIRE(r.table.distance(p.entries()) == d);
        CHECK(r.profile.diameter() == n * (n - 1) / 2);
        CHECK(r.profile.total() == dist.size());
    }
}

TEST_CASE("diameter n(n-1)/2 with a unique farthest state, n = 4..9") {
    for (int n = 4; n <= 9; ++n) {
        const auto r = bfs(GraphSpec{GraphKind::FullCayley, n, false});
        CHECK(r.profile.layer_sizes.size() == static_cast<std::size_t>(n * (n - 1) / 2 + 1));
        const auto far = farthest_states(r.table);
        REQUIRE(far.size() == 1);
        const auto l = longest_element(n);
        CHECK(far[0] == std::vector<Entry>(l.entries().begin(), l.entries().end()));
    }
}

TEST_CASE("n = 10 diameter") {
    const auto r = bfs(GraphSpec{GraphKind::FullCayley, 10, false});
    CHECK(r.profile.diameter() == 45);
    CHECK(r.profile.total() == 3628800);
}

TEST_CASE("adjacent states differ by at most one") {
    const GraphSpec spec{GraphKind::FullCayley, 9, false};
    const auto r = bfs(spec);
    SplitMix64 rng(17);
    for (int t = 0; t < 100000; ++t) {
        const auto s = r.table.indexer().unrank_state(rng.below(r.table.size()));
        auto q = s;
        apply_move_inplace(q, kMoves[rng.below(3)]);
        REQUIRE(std::abs(r.table.distance(s) - r.table.distance(q)) <= 1);
    }
}

TEST_CASE("coset bfs") {
    const GraphSpec spec{GraphKind::Coset, 8, false};
    const auto r = bfs(spec, parse_state(spec, "00001111"));
    CHECK(r.profile.diameter() == 12);
    CHECK(r.profile.total() == 70);
    CHECK(r.profile.layer_sizes == serial::bfs_profile(spec, target_entries(spec)).layer_sizes);

    CHECK(farthest_states(bfs(GraphSpec{GraphKind::Coset, 10, false}).table).size() == 4);
    CHECK(farthest_states(bfs(GraphSpec{GraphKind::Coset, 14, false}).table).size() == 11);
    for (int n = 6; n <= 20; n += 2) {
        CHECK(bfs(GraphSpec{GraphKind::Coset, n, false}).profile.diameter() == coset_gods_number(n));
    }
}

TEST_CASE("bfs from a non-target start") {
    const GraphSpec spec{GraphKind::FullCayley, 6, false};
    const auto l = longest_element(6);
    const auto r = bfs(spec, l.entries());
    CHECK(r.table.distance(std::vector<Entry>{0, 1, 2, 3, 4, 5}) == 15);
    CHECK(r.table.distance(l.entries()) == 0);
}

TEST_CASE("bfs rejects x_trick and oversized tables") {
    CHECK_THROWS_AS(bfs(GraphSpec{GraphKind::FullCayley, 6, true}), InvalidArgument);
    CHECK_THROWS_AS(bfs(GraphSpec{GraphKind::FullCayley, 8, false}, BfsOptions{1000}), ResourceError);
}

TEST_CASE("geodesic ensemble endpoints and counts") {
    const auto id5 = Permutation::identity(5);
    const auto l5 = longest_element(5);
    const auto ens = geodesic_ensemble(l5, id5);
    CHECK(ens.length == 10);
    REQUIRE(ens.positions.size() == 11);
    for (std::size_t v = 0; v < 5; ++v) {
        std::size_t pos = 0;
        while (l5[pos] != v) ++pos;
        CHECK(ens.positions[0][v] == doctest::Approx(static_cast<double>(pos)));
        CHECK(ens.positions[10][v] == doctest::Approx(static_cast<double>(v)));
    }
    const auto dist5 = map_bfs(id5);
    CHECK(ens.path_count == std::to_string(count_geodesics(l5, dist5)));
    CHECK(std::stoull(ens.path_count) > 0);

    // Every source at n <= 6 (sampled at n = 6).
    for (const auto& [p, d] : dist5) {
        REQUIRE(geodesic_ensemble(p, id5).path_count == std::to_string(count_geodesics(p, dist5)));
    }
    const auto id6 = Permutation::identity(6);
    const auto dist6 = map_bfs(id6);
    const GraphSpec spec6{GraphKind::FullCayley, 6, false};
    const auto table6 = bfs(spec6);
    int k = 0;
    for (const auto& [p, d] : dist6) {
        if (k++ % 7 != 0) continue;
        const auto e = geodesic_ensemble(table6.table, p);
        REQUIRE(e.path_count == std::to_string(count_geodesics(p, dist6)));
        REQUIRE(e.length == d);
        // Expected positions of all values always form a permutation average.
        for (const auto& row : e.positions) {
            double sum = 0.0;
            for (double x : row) sum += x;
            CHECK(sum == doctest::Approx(15.0));
        }
    }
}
