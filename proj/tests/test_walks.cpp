#include "lrx/exact_search.hpp"
#include "lrx/walks.hpp"

#include <doctest.h>

#include <cmath>

using namespace lrx;

namespace {

bool adjacent(const std::vector<Entry>& a, const std::vector<Entry>& b) {
    for (Move g : kMoves) {
        auto c = a;
        apply_move_inplace(c, g);
        if (c == b) return true;
    }
    return false;
}

} // namespace

TEST_CASE("single one-step walk") {
    const GraphSpec spec{GraphKind::FullCayley, 5, false};
    WalkConfig cfg;
    cfg.k_max = 1;
    cfg.trajectories = 1;
    cfg.seed = 3;
    const auto ts = generate_walks(spec, cfg);
    REQUIRE(ts.size() == 2);
    CHECK(ts.labels[0] == 0);
    CHECK(ts.labels[1] == 1);
    const auto e = target_entries(spec);
    CHECK(std::vector<Entry>(ts.state(0).begin(), ts.state(0).end()) == e);
    CHECK(adjacent(e, std::vector<Entry>(ts.state(1).begin(), ts.state(1).end())));
}

TEST_CASE("trajectories are edge paths and honour their walk kind") {
    const GraphSpec spec{GraphKind::FullCayley, 7, false};
    for (const char* kind : {"plain", "non_backtracking", "x_trick"}) {
        WalkConfig cfg;
        cfg.kind = parse_walk_kind(kind);
        cfg.history_depth = 1;
        cfg.k_max = 40;
        cfg.seed = 12;
        for (std::int64_t t = 0; t < 50; ++t) {
            const auto traj = walk_trajectory(spec, cfg, t);
            REQUIRE(traj.size() == 41);
            CHECK(traj[0] == target_entries(spec));
            for (std::size_t i = 1; i < traj.size(); ++i) {
                REQUIRE(adjacent(traj[i - 1], traj[i]));
                if (cfg.kind == WalkKind::NonBacktracking && i >= 2) REQUIRE(traj[i] != traj[i - 2]);
                if (cfg.kind == WalkKind::XTrick && traj[i - 1][0] < traj[i - 1][1]) {
                    auto x = traj[i - 1];
                    apply_move_inplace(x, Move::X);
                    REQUIRE(traj[i] != x);
                }
            }
        }
    }
    WalkConfig nb;
    nb.kind = WalkKind::NonBacktracking;
    nb.history_depth = 1;
    nb.k_max = 2;
    for (std::int64_t t = 0; t < 100; ++t) CHECK(walk_trajectory(spec, nb, t)[2] != target_entries(spec));
}

TEST_CASE("labels never undercut the true distance") {
    for (int n : {6, 7}) {
        const GraphSpec spec{GraphKind::FullCayley, n, false};
        const auto oracle = bfs(spec);
        for (WalkKind kind : {WalkKind::Plain, WalkKind::NonBacktracking, WalkKind::XTrick}) {
            WalkConfig cfg;
            cfg.kind = kind;
            cfg.history_depth = 4;
            cfg.k_max = 30;
            cfg.trajectories = n == 7 ? 2000 : 300;
            cfg.seed = 5;
            const auto ts = generate_walks(spec, cfg);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                REQUIRE(ts.labels[i] >= oracle.table.distance(ts.state(i)));
                REQUIRE(ts.labels[i] <= cfg.k_max);
            }
            // (e, 0) appears exactly once.
            std::size_t zeros = 0;
            for (auto k : ts.labels) zeros += k == 0;
            CHECK(zeros == 1);
        }
    }
}

TEST_CASE("walk generation is deterministic") {
    const GraphSpec spec{GraphKind::Coset, 12, false};
    WalkConfig cfg;
    cfg.k_max = 20;
    cfg.trajectories = 200;
    cfg.seed = 77;
    const auto a = generate_walks(spec, cfg);
    const auto b = generate_walks(spec, cfg);
    CHECK(a.states == b.states);
    CHECK(a.labels == b.labels);
    cfg.seed = 78;
    CHECK(generate_walks(spec, cfg).states != a.states);
}

TEST_CASE("exact diffusion distance basics") {
    const GraphSpec spec{GraphKind::FullCayley, 5, false};
    StateIndexer idx(spec);
    const auto root = idx.rank(idx.target_code());
    for (VisitRule rule : {VisitRule::AllVisits, VisitRule::FirstVisit}) {
        for (int k : {0, 1, 4, 12}) CHECK(exact_diffusion_distance(spec, k, rule).value[root] == 0.0);
        const auto dd1 = exact_diffusion_distance(spec, 1, rule);
        std::size_t defined = 0;
        for (std::uint64_t r = 0; r < dd1.value.size(); ++r) defined += dd1.defined(r);
        CHECK(defined == 4);
        for (const auto& nb : neighbors(Permutation::identity(5), spec)) {
            CHECK(dd1.value[idx.rank_state(nb.state.entries())] == doctest::Approx(1.0));
        }
    }
    CHECK_THROWS(exact_diffusion_distance(GraphSpec{GraphKind::FullCayley, 5, true}, 3));
}

TEST_CASE("diffusion distance is invariant under the reflection automorphism") {
    // phi(s)[i] = c[s[c[i]]] with c = the reflection i -> (1 - i) mod n.
    const int n = 6;
    const GraphSpec spec{GraphKind::FullCayley, n, false};
    StateIndexer idx(spec);
    const auto c = longest_element(n);
    const auto phi = [&](const std::vector<Entry>& s) {
        std::vector<Entry> t(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) t[i] = c[s[c[i]]];
        return t;
    };
    for (std::uint64_t r = 0; r < idx.size(); ++r) {
        const auto s = idx.unrank_state(r);
        for (Move g : kMoves) {
            auto a = s;
            apply_move_inplace(a, g);
            REQUIRE(adjacent(phi(s), phi(a)));
        }
    }
    CHECK(phi(target_entries(spec)) == target_entries(spec));
    for (VisitRule rule : {VisitRule::AllVisits, VisitRule::FirstVisit}) {
        const auto dd = exact_diffusion_distance(spec, 15, rule);
        for (std::uint64_t r = 0; r < idx.size(); ++r) {
            const auto image = idx.rank_state(phi(idx.unrank_state(r)));
            REQUIRE(dd.value[r] == doctest::Approx(dd.value[image]).epsilon(1e-12));
        }
    }
}

TEST_CASE("first-visit renewal matches the absorbing computation") {
    // Coset graphs always take the absorbing path; the full graph uses renewal.
    // Cross-check on a full graph by brute-force absorbing walks.
    const GraphSpec spec{GraphKind::FullCayley, 5, false};
    StateIndexer idx(spec);
    const auto table = build_neighbor_table(idx);
    const auto root = idx.rank(idx.target_code());
    const int k_max = 12;
    const auto dd = exact_diffusion_distance(spec, k_max, VisitRule::FirstVisit);
    for (std::uint64_t target = 0; target < idx.size(); target += 7) {
        if (target == root) continue;
        std::vector<double> p(idx.size(), 0.0), q(idx.size());
        p[root] = 1.0;
        double w = 0.0, m = 0.0;
        for (int k = 1; k <= k_max; ++k) {
            for (std::size_t v = 0; v < p.size(); ++v) {
                const auto& row = table.rows[v];
                q[v] = (p[row[0]] + p[row[1]] + p[row[2]]) / 3.0;
            }
            w += k * q[target];
            m += q[target];
            q[target] = 0.0;
            std::swap(p, q);
        }
        if (m > 0.0) {
            CHECK(dd.value[target] == doctest::Approx(w / m).epsilon(1e-9));
        } else {
            CHECK_FALSE(dd.defined(target));
        }
    }
}

TEST_CASE("Monte-Carlo first visits track the exact first-visit DD") {
    const GraphSpec spec{GraphKind::FullCayley, 6, false};
    WalkConfig cfg;
    cfg.k_max = 15;
    cfg.trajectories = 100000;
    cfg.seed = 2024;
    const auto mc = mc_diffusion_estimate(spec, cfg);
    const auto exact = exact_diffusion_distance(spec, 15, VisitRule::FirstVisit);
    StateIndexer idx(spec);
    int checked = 0;
    for (const auto& [state, cell] : mc) {
        REQUIRE(exact.defined(idx.rank_state(state)));
        if (cell.visits < 1000) continue;
        const double ref = exact.value[idx.rank_state(state)];
        if (ref == 0.0) {
            CHECK(cell.mean == 0.0);
            continue;
        }
        ++checked;
        CHECK(std::abs(cell.mean - ref) / ref < 0.02);
    }
    CHECK(checked > 10);
    CHECK(mc_diffusion_estimate(spec, cfg).size() == mc.size());

    cfg.trajectories = 3;
    const auto sparse = mc_diffusion_estimate(spec, cfg);
    CHECK(sparse.size() < 720);  // unvisited states are absent
}

TEST_CASE("mixing curve") {
    const GraphSpec spec{GraphKind::FullCayley, 6, false};
    WalkConfig cfg;
    cfg.k_max = 500;
    cfg.seed = 1;
    const auto curve = mixing_curve(spec, cfg, 2000);
    REQUIRE(curve.size() == 501);
    CHECK(curve[0].mean_inversions == 0.0);
    CHECK(curve[0].stderr_ == 0.0);
    CHECK(std::abs(curve.back().mean_inversions - 7.5) < 4 * curve.back().stderr_ + 0.05);

    cfg.kind = WalkKind::NonBacktracking;
    cfg.history_depth = 2;
    const auto nb = mixing_curve(spec, cfg, 500);
    CHECK(nb[0].mean_inversions == 0.0);
    CHECK(std::abs(nb.back().mean_inversions - 7.5) < 1.0);
    CHECK_THROWS(mixing_curve(GraphSpec{GraphKind::Coset, 6, false}, cfg, 10));
}
