// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "lrx/analysis.hpp"
#include "lrx/beam.hpp"
#include "lrx/bellman.hpp"
#include "lrx/estimator.hpp"
#include "lrx/exact_search.hpp"
#include "lrx/rng.hpp"
#include "lrx/solvers.hpp"
#include "lrx/tropical.hpp"
#include "lrx/walks.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

using namespace lrx;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<Entry> entries(const Permutation& p) { return {p.entries().begin(), p.entries().end()}; }

std::vector<Entry> random_perm(int n, SplitMix64& rng) {
    std::vector<Entry> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), Entry{0});
    std::shuffle(v.begin(), v.end(), rng);
    return v;
}

bool replays(std::vector<Entry> s, const Word& w, const std::vector<Entry>& target) {
    apply_word_inplace(s, w);
    return s == target;
}

double spearman_vs_table(const DistanceEstimator& est, const DistanceTable& table) {
    const auto& idx = table.indexer();
    std::vector<Entry> flat;
    flat.reserve(idx.size() * static_cast<std::uint64_t>(idx.n()));
    std::vector<double> truth(idx.size());
    for (std::uint64_t r = 0; r < idx.size(); ++r) {
        const auto s = idx.unrank_state(r);
        flat.insert(flat.end(), s.begin(), s.end());
        truth[r] = table.at_rank(r);
    }
    return spearman(est.predict_batch(flat), truth);
}

// 1, 3, 5 share the BFS tables for n = 4..11.
Verdict full_bfs() {
    Verdict v;
    const auto t0 = Clock::now();
    for (int n = 4; n <= 11; ++n) {
        const auto r = bfs(GraphSpec{GraphKind::FullCayley, n, false});
        const auto far = farthest_states(r.table);
        v.require(r.profile.diameter() == n * (n - 1) / 2, "diameter n=" + std::to_string(n));
        v.require(far.size() == 1 && far[0] == entries(longest_element(n)), "farthest n=" + std::to_string(n));
    }
    const double secs = seconds_since(t0);
    v.require(secs <= 300.0, "runtime over 5 min");
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("n=4..11 in %.1f s", secs);
    return v;
}

Verdict coset_bfs() {
    Verdict v;
    const std::int64_t gods[] = {7, 12, 18, 26, 35, 46, 58, 72, 87, 104};
    const std::uint64_t longest[] = {1, 1, 4, 4, 11, 6, 14, 10, 32, 16};
    const auto t0 = Clock::now();
    for (int i = 0; i < 10; ++i) {
        const int n = 6 + 2 * i;
        const auto r = bfs(GraphSpec{GraphKind::Coset, n, false});
        v.require(r.profile.diameter() == gods[i] && coset_gods_number(n) == gods[i], "God's number n=" + std::to_string(n));
        v.require(r.profile.layer_sizes.back() == longest[i], "last layer n=" + std::to_string(n));
    }
    const double secs = seconds_since(t0);
    v.require(secs <= 120.0, "runtime over 2 min");
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("even n=6..24 in %.1f s", secs);
    return v;
}

Verdict longest_word_check() {
    Verdict v;
    const auto t0 = Clock::now();
    for (int n = 4; n <= 9; ++n) {
        const auto w = longest_word(n);
        const auto reached = apply_word(Permutation::identity(static_cast<std::size_t>(n)), w);
        v.require(reached == longest_element(n), "replay n=" + std::to_string(n));
        const auto r = bfs(GraphSpec{GraphKind::FullCayley, n, false});
        v.require(r.table.distance(reached.entries()) == static_cast<int>(w.size()) &&
                      static_cast<int>(w.size()) == n * (n - 1) / 2,
                  "optimality n=" + std::to_string(n));
    }
    for (int n = 4; n <= 1000; ++n) {
        const auto w = longest_word(n);
        if (static_cast<std::int64_t>(w.size()) != static_cast<std::int64_t>(n) * (n - 1) / 2 ||
            apply_word(Permutation::identity(static_cast<std::size_t>(n)), w) != longest_element(n)) {
            v.require(false, "length or replay n=" + std::to_string(n));
        }
    }
    const double secs = seconds_since(t0);
    v.require(secs <= 10.0, "runtime over 10 s");
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("n<=1000 in %.2f s", secs);
    return v;
}

Verdict constructive() {
    Verdict v;
    const auto t0 = Clock::now();
    SplitMix64 rng(stream_seed(1, "acceptance-construct"));
    std::int64_t worst_slack = 1 << 30;
    for (int n : {10, 50, 100, 200}) {
        for (int t = 0; t < 1000; ++t) {
            const Permutation p(random_perm(n, rng));
            const auto w = constructive_solve(p);
            if (!apply_word(p, w).is_identity()) v.require(false, "invalid word n=" + std::to_string(n));
            const std::int64_t slack = constructive_bound(n) - static_cast<std::int64_t>(w.size());
            if (slack < 0) v.require(false, "bound exceeded n=" + std::to_string(n));
            worst_slack = std::min(worst_slack, slack);
        }
    }
    const double secs = seconds_since(t0);
    v.require(secs <= 60.0, "runtime over 1 min");
    v.detail += (v.detail.empty() ? "" : "; ") + fmt("4000 words in %.1f s", secs) +
                ", min slack to bound " + std::to_string(worst_slack);
    return v;
}

Verdict lower_bound() {
    Verdict v;
    for (int n = 4; n <= 11; ++n) {
        const auto r = bfs(GraphSpec{GraphKind::FullCayley, n, false});
        int least = 1 << 30;
        for (const auto& d : dihedral_long_elements(n)) least = std::min(least, r.table.distance(d.entries()));
        v.require(least >= axial_lower_bound(n), "n=" + std::to_string(n));
    }
    v.detail += v.detail.empty() ? "all dihedral elements n=4..11" : "";
    return v;
}

Verdict value_iteration() {
    Verdict v;
    for (int n = 4; n <= 8; ++n) {
        const GraphSpec spec{GraphKind::FullCayley, n, false};
        const auto oracle = bfs(spec);
        const auto r = dp_solve(spec, DpConfig{}, &oracle.table);
        bool exact = r.converged;
        for (std::uint64_t i = 0; exact && i < oracle.table.size(); ++i) exact = r.distances[i] == oracle.table.at_rank(i);
        v.require(exact, "dp not exact n=" + std::to_string(n));
        v.require(r.iterations <= oracle.table.diameter() + 1, "dp iterations n=" + std::to_string(n));
    }
    for (int n = 4; n <= 5; ++n) {
        const GraphSpec spec{GraphKind::FullCayley, n, false};
        const auto a = tropical_adjacency(spec);
        const auto p = tropical_power(a, static_cast<int>(a.size()) - 1);
        StateIndexer idx(spec);
        const auto table = build_neighbor_table(idx);
        for (std::size_t s = 0; s < a.size(); ++s) {
            std::vector<int> d(a.size(), -1);
            std::deque<std::size_t> q{s};
            d[s] = 0;
            while (!q.empty()) {
                const auto u = q.front();
                q.pop_front();
                for (auto w : table.rows[u]) {
                    if (d[w] < 0) {
                        d[w] = d[u] + 1;
                        q.push_back(w);
                    }
                }
            }
            for (std::size_t t = 0; t < a.size(); ++t) {
                if (p(s, t) != d[t]) {
                    v.require(false, "tropical n=" + std::to_string(n));
                    t = a.size();
                    s = a.size() - 1;
                }
            }
        }
    }
    v.detail += v.detail.empty() ? "dp n=4..8 exact; tropical n=4,5 equals all-pairs BFS" : "";
    return v;
}

Verdict diffusion() {
    Verdict v;
    const GraphSpec spec6{GraphKind::FullCayley, 6, false};
    WalkConfig cfg;
    cfg.k_max = 15;
    cfg.trajectories = 100000;
    cfg.seed = stream_seed(1, "acceptance-dd");
    const auto mc = mc_diffusion_estimate(spec6, cfg);
    const auto exact = exact_diffusion_distance(spec6, 15, VisitRule::FirstVisit);
    StateIndexer idx(spec6);
    double worst = 0.0;
    int checked = 0;
    for (const auto& [state, cell] : mc) {
        if (cell.visits < 1000) continue;
        const double ref = exact.value[idx.rank_state(state)];
        if (ref == 0.0) continue;
        worst = std::max(worst, std::abs(cell.mean - ref) / ref);
        ++checked;
    }
    v.require(checked > 0 && worst < 0.02, fmt("MC relative error %.4f", worst));

    const GraphSpec spec10{GraphKind::FullCayley, 10, false};
    const auto table = bfs(spec10);
    const int diam = table.table.diameter();
    const auto scan = diffusion_layer_scan(table.table, (diam + 1) / 2, 2 * diam);
    int witness = -1;
    for (std::size_t j = 0; j < scan.layer_means.size() && witness < 0; ++j) {
        if (scan.layer_means[j][22] < scan.layer_means[j][21]) witness = scan.k_first + static_cast<int>(j);
    }
    v.require(witness >= 0, "no K_max with mean(layer 22) < mean(layer 21)");
    v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(checked) + " states, max rel err " +
                fmt("%.4f", worst) + "; n=10 witness K_max=" + std::to_string(witness);
    return v;
}

Verdict mixing() {
    Verdict v;
    const auto t0 = Clock::now();
    for (int n : {8, 12, 16}) {
        const GraphSpec spec{GraphKind::FullCayley, n, false};
        const double uniform = n * (n - 1) / 4.0;
        WalkConfig cfg;
        cfg.k_max = 10 * n * n * n;
        cfg.seed = stream_seed(1, "acceptance-mixing", static_cast<std::uint64_t>(n));
        const auto plain = mixing_curve(spec, cfg, 5000).back();
        v.require(std::abs(plain.mean_inversions - uniform) / uniform <= 0.03, "plain plateau n=" + std::to_string(n));
        cfg.kind = WalkKind::XTrick;
        const auto xt = mixing_curve(spec, cfg, 5000).back();
        v.require(std::abs(xt.mean_inversions - uniform) > 3.0 * xt.stderr_, "x-trick plateau n=" + std::to_string(n));
        v.detail += (v.detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + fmt(" plain %.2f", plain.mean_inversions) +
                    fmt(" x-trick %.2f", xt.mean_inversions) + fmt(" vs %.1f", uniform);
    }
    v.require(seconds_since(t0) <= 600.0, "runtime over 10 min");
    return v;
}

Verdict learning() {
    Verdict v;
    const GraphSpec spec{GraphKind::FullCayley, 8, false};
    const auto oracle = bfs(spec);
    bool ok = false;
    std::string log;
    for (std::uint64_t seed = 1; seed <= 3 && !ok; ++seed) {
        WalkConfig wc;
        wc.kind = WalkKind::NonBacktracking;
        wc.history_depth = 8;
        wc.k_max = 28;
        wc.trajectories = 5000;
        wc.seed = stream_seed(seed, "walks");
        ModelConfig mc;
        mc.epochs_warmup = 30;
        mc.epochs_dqn = 60;
        mc.seed = stream_seed(seed, "model");
        const auto warm = train_warmup(generate_walks(spec, wc), mc);
        const double s_warm = spearman_vs_table(warm, oracle.table);
        wc.seed = stream_seed(seed, "dqn-walks");
        const double s_dqn = spearman_vs_table(train_dqn(spec, warm, mc, wc), oracle.table);
        log += (log.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + fmt(" warm-up %.3f", s_warm) +
               fmt(" dqn %.3f", s_dqn);
        ok = s_dqn >= 0.90 && s_dqn >= s_warm;
    }
    v.require(ok, "no seed reached the threshold");
    v.detail += (v.detail.empty() ? "" : "; ") + log;
    return v;
}

Verdict beam() {
    Verdict v;
    {
        const GraphSpec spec{GraphKind::FullCayley, 7, false};
        const auto oracle = bfs(spec);
        const OracleHeuristic h(oracle.table);
        SplitMix64 rng(stream_seed(1, "acceptance-beam7"));
        int optimal = 0;
        for (int i = 0; i < 100; ++i) {
            const auto s = random_perm(7, rng);
            const auto r = beam_search(spec, s, BeamConfig{}, h);
            optimal += r.found && replays(s, r.word, target_entries(spec)) &&
                       static_cast<int>(r.word.size()) == oracle.table.distance(s);
        }
        v.require(optimal == 100, "oracle W=1 optimal on " + std::to_string(optimal) + "/100");
        v.detail += "oracle W=1 optimal " + std::to_string(optimal) + "/100";
    }
    const GraphSpec spec{GraphKind::FullCayley, 16, false};
    const auto start = entries(longest_element(16));
    int successes = 0;
    std::vector<std::size_t> lengths;
    bool all_valid = true;
    for (std::uint64_t run = 0; run < 10; ++run) {
        // Each run trains its own model from its own seed stream.
        WalkConfig wc;
        wc.kind = WalkKind::NonBacktracking;
        wc.history_depth = 16;
        wc.k_max = 120;
        wc.trajectories = 1500;
        wc.seed = stream_seed(run, "walks");
        ModelConfig mc;
        mc.epochs_warmup = 15;
        mc.epochs_dqn = 10;
        mc.seed = stream_seed(run, "model");
        const auto warm = train_warmup(generate_walks(spec, wc), mc);
        wc.seed = stream_seed(run, "dqn-walks");
        const auto model = train_dqn(spec, warm, mc, wc);
        const ModelHeuristic h(model);
        BeamConfig cfg;
        cfg.width = 65536;
        cfg.x_trick = true;
        cfg.history_depth = 2;
        cfg.max_steps = 600;
        cfg.seed = stream_seed(run, "beam");
        const auto r = beam_search(spec, start, cfg, h);
        if (!r.found) continue;
        ++successes;
        lengths.push_back(r.word.size());
        all_valid = all_valid && replays(start, r.word, target_entries(spec)) && r.word.size() >= 120;
    }
    v.require(successes >= 7, "model beam solved " + std::to_string(successes) + "/10");
    v.require(all_valid, "invalid or too-short word");
    std::string ls;
    for (auto l : lengths) ls += (ls.empty() ? "" : ",") + std::to_string(l);
    v.detail += "; l_16 model beam " + std::to_string(successes) + "/10 solved, lengths [" + ls + "]";
    return v;
}

Verdict gradient() {
    Verdict v;
    SplitMix64 rng(stream_seed(1, "acceptance-grad"));
    const int n = 8;
    const DistanceEstimator est(n, 32, stream_seed(1, "acceptance-grad-init"));
    std::vector<Entry> states;
    std::vector<double> targets;
    for (int i = 0; i < 100; ++i) {
        const auto s = random_perm(n, rng);
        states.insert(states.end(), s.begin(), s.end());
        targets.push_back(static_cast<double>(rng.below(29)));
    }
    const auto gc = gradient_check(est, states, targets);
    v.require(gc.max_rel_error < 1e-4, "max relative error too large");
    v.detail += fmt("max rel error %.2e", gc.max_rel_error) + fmt(" (W1 %.1e", gc.per_tensor[0]) +
                fmt(", b1 %.1e", gc.per_tensor[1]) + fmt(", W2 %.1e", gc.per_tensor[2]) + fmt(", b2 %.1e)", gc.per_tensor[3]);
    return v;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LRX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string directory_digest(const fs::path& dir) {
    std::set<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() != "run.json") files.insert(e.path());
    }
    std::string all;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        all += f.filename().string() + "\n" + s.str();
    }
    return all;
}

Verdict determinism() {
    Verdict v;
    const fs::path root = fs::temp_directory_path() / "lrx_acceptance_determinism";
    fs::remove_all(root);
    const fs::path ckpt = root / "model.json";
    fs::create_directories(root);
    if (run_cli("train --n 7 --walks 300 --epochs-warmup 4 --hidden 16 --seed 3 --out " + (root / "ckpt").string() +
                " --save " + ckpt.string()) != 0) {
        v.require(false, "could not train a checkpoint");
        return v;
    }
    const std::vector<std::string> commands = {
        "bfs --n 9",
        "coset-bfs --n 16",
        "dp --n 7 --init random_gauss",
        "tropical --n 4",
        "walks --n 8 --walks 500 --walk-kind nb --history-depth 4",
        "dd-exact --n 6 --kmax 12 --visit-rule first_visit",
        "mixing --n 10 --trials 500 --kmax 1000 --walk-kind x_trick",
        "train --n 6 --walks 300 --epochs-warmup 4 --hidden 16",
        "dqn --n 6 --walks 200 --epochs-warmup 2 --epochs-dqn 2 --hidden 16",
        "beam --n 7 --heuristic model --width 256 --x-trick --checkpoint " + ckpt.string(),
        "solve-batch --n 8 --heuristic hamming --width 128 --starts 6 --repeats 2 --no-timing",
        "construct --n 30 --starts 20",
        "longest-word --n 12",
        "bounds --n 12",
        "growth --n 8",
        "gumbel --n 8 --objective ks",
        "spectrum --n 5",
        "sortnet --n 6",
    };
    int identical = 0;
    for (const auto& cmd : commands) {
        std::string reference;
        bool same = true;
        for (int threads : {1, 2, 8}) {
            for (int repeat = 0; repeat < (threads == 1 ? 2 : 1); ++repeat) {
                const fs::path dir = root / ("t" + std::to_string(threads) + "_" + std::to_string(repeat));
                fs::remove_all(dir);
                if (run_cli(cmd + " --seed 11 --threads " + std::to_string(threads) + " --out " + dir.string()) != 0) {
                    same = false;
                    continue;
                }
                const auto digest = directory_digest(dir);
                if (reference.empty()) {
                    reference = digest;
                } else if (digest != reference) {
                    same = false;
                }
            }
        }
        if (same) {
            ++identical;
        } else {
            v.require(false, "differs: " + cmd);
        }
    }
    v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(identical) + "/" + std::to_string(commands.size()) +
                " subcommands byte-identical at 1, 1, 2 and 8 threads";
    fs::remove_all(root);
    return v;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"full-graph BFS diameter and unique farthest state", full_bfs},
        {"coset BFS God's numbers and last layers", coset_bfs},
        {"longest-element word", longest_word_check},
        {"constructive solver bound", constructive},
        {"dihedral lower bound", lower_bound},
        {"value iteration and tropical powers", value_iteration},
        {"diffusion distance", diffusion},
        {"mixing plateaus", mixing},
        {"learning pipeline", learning},
        {"beam search", beam},
        {"gradient check", gradient},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        failures += !v.pass;
        std::printf("%s %2zu %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                    v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
