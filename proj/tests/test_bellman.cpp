#include "lrx/bellman.hpp"
#include "lrx/error.hpp"
#include "lrx/rng.hpp"
#include "lrx/tropical.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <deque>

using namespace lrx;

namespace {

// Ranks by counting: rank = #less + (#equal + 1) / 2.
std::vector<double> naive_ranks(const std::vector<double>& xs) {
    std::vector<double> r(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double less = 0, equal = 0;
        for (double y : xs) {
            less += y < xs[i];
            equal += y == xs[i];
        }
        r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
}

double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    long double a = 0, b = 0, c = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        a += (x[i] - mx) * (y[i] - my);
        b += (x[i] - mx) * (x[i] - mx);
        c += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(a / std::sqrt(b * c));
}

// Single-source BFS over a rank-indexed neighbor table.
std::vector<int> table_bfs(const NeighborTable& t, std::size_t src) {
    std::vector<int> d(t.size(), -1);
    std::deque<std::size_t> q{src};
    d[src] = 0;
    while (!q.empty()) {
        const auto u = q.front();
        q.pop_front();
        for (auto v : t.rows[u]) {
            if (d[v] < 0) {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    return d;
}

} // namespace

TEST_CASE("initializers") {
    const GraphSpec spec{GraphKind::FullCayley, 4, false};
    const std::vector<Entry> l4{1, 0, 3, 2};
    CHECK(make_initializer(parse_init_tag("hamming"), spec)(l4) == 4.0);
    CHECK(make_initializer(parse_init_tag("manhattan"), spec)(l4) == 4.0);
    CHECK(make_initializer(parse_init_tag("zero"), spec)(l4) == 0.0);
    CHECK(make_initializer(parse_init_tag("constant:2.5"), spec)(l4) == 2.5);
    CHECK_THROWS_AS(parse_init_tag("bogus"), InvalidArgument);
    CHECK_THROWS_AS(parse_init_tag("zero:3"), InvalidArgument);
    CHECK_THROWS_AS(make_initializer(parse_init_tag("exact"), spec), InvalidArgument);

    auto tag = parse_init_tag("random_int");
    tag.seed = 5;
    const auto f = make_initializer(tag, spec);
    CHECK(f(l4) == f(l4));
    for (double v = 0; v < 20; ++v) {
        const double x = f(std::vector<Entry>{static_cast<Entry>(static_cast<int>(v) % 4), 9, 9, 9});
        CHECK(x >= 0.0);
        CHECK(x <= 6.0);
        CHECK(x == std::floor(x));
    }
}

TEST_CASE("zero init converges in at most diameter + 1 iterations, n = 4..7") {
    for (int n = 4; n <= 7; ++n) {
        const GraphSpec spec{GraphKind::FullCayley, n, false};
        const auto oracle = bfs(spec);
        DpConfig cfg;
        const auto r = dp_solve(spec, cfg, &oracle.table);
        CHECK(r.converged);
        CHECK(r.iterations <= oracle.table.diameter() + 1);
        for (std::uint64_t i = 0; i < oracle.table.size(); ++i) REQUIRE(r.distances[i] == oracle.table.at_rank(i));
        CHECK(std::isnan(r.trace.front().pearson));
        CHECK(r.trace.back().pearson == doctest::Approx(1.0));
    }
}

TEST_CASE("exact init is a fixed point") {
    const GraphSpec spec{GraphKind::FullCayley, 5, false};
    const auto oracle = bfs(spec);
    DpConfig cfg;
    cfg.init = parse_init_tag("exact");
    cfg.init.oracle = &oracle.table;
    const auto r = dp_solve(spec, cfg, &oracle.table);
    CHECK(r.iterations == 1);
    for (const auto& p : r.trace) CHECK(p.pearson == doctest::Approx(1.0));
}

TEST_CASE("every initializer reaches the BFS fixed point, n <= 6") {
    const DistanceEstimator model(6, 16, 3);
    for (int n : {4, 6}) {
        const GraphSpec spec{GraphKind::FullCayley, n, false};
        const auto oracle = bfs(spec);
        for (const char* tag : {"zero", "hamming", "manhattan", "random_int", "random_gauss", "random_gauss:2",
                                "layer_mix:3", "exact", "constant:-4", "model"}) {
            if (std::string(tag) == "model" && n != 6) continue;
            DpConfig cfg;
            cfg.init = parse_init_tag(tag);
            cfg.init.seed = 11;
            cfg.init.oracle = &oracle.table;
            cfg.init.model = &model;
            const auto r = dp_solve(spec, cfg, &oracle.table);
            INFO(tag);
            CHECK(r.converged);
            for (std::uint64_t i = 0; i < oracle.table.size(); ++i) REQUIRE(r.distances[i] == oracle.table.at_rank(i));
        }
    }
}

TEST_CASE("damped updates and oracle-free stopping") {
    const GraphSpec spec{GraphKind::FullCayley, 5, false};
    const auto oracle = bfs(spec);
    DpConfig cfg;
    cfg.alpha = 0.5;
    cfg.tolerance = 1e-6;
    const auto with = dp_solve(spec, cfg, &oracle.table);
    CHECK(with.converged);
    CHECK(with.iterations > oracle.table.diameter() + 1);
    const auto without = dp_solve(spec, cfg);
    CHECK(without.converged);
    for (std::uint64_t i = 0; i < oracle.table.size(); ++i) CHECK(without.distances[i] == doctest::Approx(oracle.table.at_rank(i)).epsilon(1e-4));

    cfg.max_iterations = 3;
    CHECK_FALSE(dp_solve(spec, cfg, &oracle.table).converged);
    CHECK_THROWS_AS(dp_solve(GraphSpec{GraphKind::FullCayley, 5, true}, cfg), InvalidArgument);
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(dp_solve(spec, cfg), InvalidArgument);
}

TEST_CASE("dp is thread-count invariant and matches the serial sweep") {
    const GraphSpec spec{GraphKind::FullCayley, 7, false};
    const auto oracle = bfs(spec);
    DpConfig cfg;
    cfg.init = parse_init_tag("random_gauss");
    cfg.init.seed = 4;
    const auto ref = serial::dp_solve(spec, cfg, &oracle.table);
    for (int t : {1, 2, 8}) {
        omp_set_num_threads(t);
        const auto r = dp_solve(spec, cfg, &oracle.table);
        CHECK(r.distances == ref.distances);
        CHECK(r.iterations == ref.iterations);
    }
    omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("coset value iteration") {
    const GraphSpec spec{GraphKind::Coset, 12, false};
    const auto oracle = bfs(spec);
    const auto r = dp_solve(spec, DpConfig{}, &oracle.table);
    CHECK(r.converged);
    CHECK(r.iterations <= oracle.table.diameter() + 1);
}

TEST_CASE("correlations") {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    const std::vector<double> rev{5, 4, 3, 2, 1};
    CHECK(pearson(xs, xs) == doctest::Approx(1.0));
    CHECK(spearman(xs, rev) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pearson(xs, std::vector<double>(5, 1.0)), UndefinedCorrelation);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), UndefinedCorrelation);

    SplitMix64 rng(21);
    std::vector<double> a(10000), b(10000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = static_cast<double>(rng.below(50));
        b[i] = a[i] + rng.normal() * 10.0;
    }
    CHECK(std::abs(pearson(a, b) - naive_pearson(a, b)) < 1e-12);
    CHECK(std::abs(spearman(a, b) - naive_pearson(naive_ranks(a), naive_ranks(b))) < 1e-12);
}

TEST_CASE("tropical powers") {
    TropicalMatrix path(3);
    path(0, 1) = path(1, 0) = path(1, 2) = path(2, 1) = 1.0;
    CHECK(tropical_power(path, 1) == path);
    CHECK(tropical_power(path, 2)(0, 2) == 2.0);
    CHECK(tropical_power(path, 1)(0, 2) == TropicalMatrix::kInf);

    const GraphSpec spec{GraphKind::FullCayley, 4, false};
    const auto a = tropical_adjacency(spec);
    REQUIRE(a.size() == 24);
    const auto p = tropical_power(a, 23);
    StateIndexer idx(spec);
    const auto table = build_neighbor_table(idx);
    for (std::size_t i = 0; i < 24; ++i) {
        const auto d = table_bfs(table, i);
        for (std::size_t j = 0; j < 24; ++j) REQUIRE(p(i, j) == d[j]);
    }
}

TEST_CASE("tropical power satisfies the Bellman identity, n = 5") {
    const GraphSpec spec{GraphKind::FullCayley, 5, false};
    const auto a = tropical_adjacency(spec);
    const auto p = tropical_power(a, static_cast<int>(a.size()) - 1);
    StateIndexer idx(spec);
    const auto table = build_neighbor_table(idx);
    for (std::size_t j = 0; j < p.size(); ++j) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i == j) {
                REQUIRE(p(i, j) == 0.0);
                continue;
            }
            const auto& row = table.rows[i];
            REQUIRE(p(i, j) == 1.0 + std::min({p(row[0], j), p(row[1], j), p(row[2], j)}));
        }
    }
    // The column to the identity is the BFS distance vector.
    const auto oracle = bfs(spec);
    const auto root = idx.rank(idx.target_code());
    for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(p(i, root) == oracle.table.at_rank(i));
}

TEST_CASE("parallel min-plus equals the serial product") {
    SplitMix64 rng(8);
    TropicalMatrix a(37), b(37);
    for (std::size_t i = 0; i < 37; ++i) {
        for (std::size_t j = 0; j < 37; ++j) {
            if (rng.below(3) == 0) a(i, j) = static_cast<double>(rng.below(9));
            if (rng.below(3) == 0) b(i, j) = static_cast<double>(rng.below(9));
        }
    }
    CHECK(min_plus(a, b) == serial::min_plus(a, b));
}
