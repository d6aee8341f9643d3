#include "lrx/walks.hpp"

#include "lrx/error.hpp"
#include "lrx/rng.hpp"

#include <omp.h>

#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

namespace lrx {

std::string to_string(WalkKind kind) {
    switch (kind) {
    case WalkKind::Plain: return "plain";
    case WalkKind::NonBacktracking: return "non_backtracking";
    default: return "x_trick";
    }
}

WalkKind parse_walk_kind(std::string_view text) {
    if (text == "plain") return WalkKind::Plain;
    if (text == "non_backtracking" || text == "nb") return WalkKind::NonBacktracking;
    if (text == "x_trick" || text == "xtrick") return WalkKind::XTrick;
    throw InvalidArgument("unknown walk kind: " + std::string(text));
}

std::string to_string(VisitRule rule) { return rule == VisitRule::AllVisits ? "all_visits" : "first_visit"; }

VisitRule parse_visit_rule(std::string_view text) {
    if (text == "all_visits") return VisitRule::AllVisits;
    if (text == "first_visit") return VisitRule::FirstVisit;
    throw InvalidArgument("unknown visit rule: " + std::string(text));
}

void WalkConfig::validate() const {
    if (k_max < 1) throw InvalidArgument("k_max must be >= 1");
    if (trajectories < 1) throw InvalidArgument("trajectory count must be >= 1");
    if (kind == WalkKind::NonBacktracking && history_depth < 1) {
        throw InvalidArgument("non-backtracking walks need history depth >= 1");
    }
}

namespace {

constexpr std::uint64_t kVisitSeed = 0x7669736974ULL;

class Walker {
public:
    Walker(const GraphSpec& spec, const WalkConfig& cfg, std::uint64_t stream)
        : cfg_(cfg), prune_x_(cfg.kind == WalkKind::XTrick || spec.x_trick), rng_(stream),
          state_(target_entries(spec)), next_(state_.size()) {}

    std::span<const Entry> state() const { return state_; }

    // Returns the move taken.
    Move step() {
        std::array<Move, 3> moves{};
        int count = allowed_moves(state_, prune_x_, moves);
        if (cfg_.kind == WalkKind::NonBacktracking) {
            std::array<Move, 3> open{};
            int kept = 0;
            for (int i = 0; i < count; ++i) {
                next_ = state_;
                apply_move_inplace(next_, moves[static_cast<std::size_t>(i)]);
                bool banned = false;
                for (const auto& h : history_) banned = banned || h == next_;
                if (!banned) open[static_cast<std::size_t>(kept++)] = moves[static_cast<std::size_t>(i)];
            }
            // Dead end: every move leads back into the history.
            if (kept > 0) {
                moves = open;
                count = kept;
            }
            history_.push_back(state_);
            if (history_.size() > static_cast<std::size_t>(cfg_.history_depth)) history_.pop_front();
        }
        const Move g = moves[rng_.below(static_cast<std::uint64_t>(count))];
        apply_move_inplace(state_, g);
        return g;
    }

private:
    const WalkConfig& cfg_;
    bool prune_x_;
    SplitMix64 rng_;
    std::vector<Entry> state_;
    std::vector<Entry> next_;
    std::deque<std::vector<Entry>> history_;
};

} // namespace

std::vector<std::vector<Entry>> walk_trajectory(const GraphSpec& spec, const WalkConfig& cfg,
                                                std::int64_t index) {
    spec.validate();
    cfg.validate();
    Walker walker(spec, cfg, stream_seed(cfg.seed, "walks", static_cast<std::uint64_t>(index)));
    std::vector<std::vector<Entry>> out;
    out.reserve(static_cast<std::size_t>(cfg.k_max) + 1);
    out.emplace_back(walker.state().begin(), walker.state().end());
    for (int k = 1; k <= cfg.k_max; ++k) {
        walker.step();
        out.emplace_back(walker.state().begin(), walker.state().end());
    }
    return out;
}

TrainingSet generate_walks(const GraphSpec& spec, const WalkConfig& cfg) {
    spec.validate();
    cfg.validate();
    const auto n = static_cast<std::size_t>(spec.n);
    const auto count = static_cast<std::size_t>(cfg.trajectories);
    const std::vector<Entry> start = target_entries(spec);
    const std::uint64_t start_hash = hash_state(start, kVisitSeed);

    std::vector<std::vector<Entry>> states(count);
    std::vector<std::vector<int>> labels(count);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t t = 0; t < cfg.trajectories; ++t) {
        Walker walker(spec, cfg, stream_seed(cfg.seed, "walks", static_cast<std::uint64_t>(t)));
        std::unordered_set<std::uint64_t> seen{start_hash};
        auto& out_states = states[static_cast<std::size_t>(t)];
        auto& out_labels = labels[static_cast<std::size_t>(t)];
        for (int k = 1; k <= cfg.k_max; ++k) {
            walker.step();
            if (seen.insert(hash_state(walker.state(), kVisitSeed)).second) {
                out_states.insert(out_states.end(), walker.state().begin(), walker.state().end());
                out_labels.push_back(k);
            }
        }
    }

    TrainingSet ts{spec, cfg, start, {0}};
    std::size_t total = 1;
    for (const auto& l : labels) total += l.size();
    ts.states.reserve(total * n);
    ts.labels.reserve(total);
    for (std::size_t t = 0; t < count; ++t) {
        ts.states.insert(ts.states.end(), states[t].begin(), states[t].end());
        ts.labels.insert(ts.labels.end(), labels[t].begin(), labels[t].end());
    }
    return ts;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// p_k = p_{k-1} A / 3 on a 3-regular graph (the neighbor multiset of v is
// its predecessor multiset, since L/R pair up and X is an involution).
void diffuse(const NeighborTable& table, const std::vector<double>& prev, std::vector<double>& next) {
    const auto size = static_cast<std::int64_t>(table.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t v = 0; v < size; ++v) {
        const auto& row = table.rows[static_cast<std::size_t>(v)];
        next[static_cast<std::size_t>(v)] = (prev[row[0]] + prev[row[1]] + prev[row[2]]) / 3.0;
    }
}

DiffusionMap all_visits(const StateIndexer& idx, const NeighborTable& table, int k_max) {
    const std::size_t size = table.size();
    std::vector<double> p(size, 0.0), q(size, 0.0), weighted(size, 0.0), mass(size, 0.0);
    const std::uint64_t root = idx.rank(idx.target_code());
    p[root] = 1.0;
    mass[root] = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        diffuse(table, p, q);
        std::swap(p, q);
        for (std::size_t v = 0; v < size; ++v) {
            weighted[v] += k * p[v];
            mass[v] += p[v];
        }
    }
    DiffusionMap out{idx, k_max, VisitRule::AllVisits, std::vector<double>(size, kNaN)};
    for (std::size_t v = 0; v < size; ++v) {
        if (mass[v] > 0.0) out.value[v] = weighted[v] / mass[v];
    }
    // Returns to the start would otherwise give it a positive value.
    out.value[root] = 0.0;
    return out;
}

// Cayley graphs are vertex-transitive, so the return probabilities r_t are
// the same at every vertex and first-passage weights follow from the
// renewal identity a_k = sum_{j=1..k} f_j r_{k-j}.
DiffusionMap first_visit_cayley(const StateIndexer& idx, const NeighborTable& table, int k_max) {
    const std::size_t size = table.size();
    const auto steps = static_cast<std::size_t>(k_max) + 1;
    std::vector<std::vector<double>> arrive(steps, std::vector<double>(size, 0.0));
    const std::uint64_t root = idx.rank(idx.target_code());
    arrive[0][root] = 1.0;
    for (std::size_t k = 1; k < steps; ++k) diffuse(table, arrive[k - 1], arrive[k]);

    std::vector<double> ret(steps);
    for (std::size_t t = 0; t < steps; ++t) ret[t] = arrive[t][root];

    DiffusionMap out{idx, k_max, VisitRule::FirstVisit, std::vector<double>(size, kNaN)};
    out.value[root] = 0.0;
    const auto total = static_cast<std::int64_t>(size);
#pragma omp parallel for schedule(static)
    for (std::int64_t vi = 0; vi < total; ++vi) {
        const auto v = static_cast<std::size_t>(vi);
        if (v == root) continue;
        std::vector<double> f(steps, 0.0);
        double weighted = 0.0, mass = 0.0;
        for (std::size_t k = 1; k < steps; ++k) {
            double fk = arrive[k][v];
            for (std::size_t j = 1; j < k; ++j) fk -= f[j] * ret[k - j];
            f[k] = fk;
            weighted += static_cast<double>(k) * fk;
            mass += fk;
        }
        if (mass > 0.0) out.value[v] = weighted / mass;
    }
    return out;
}

// Schreier graphs are not vertex-transitive: one absorbing walk per target.
DiffusionMap first_visit_absorbing(const StateIndexer& idx, const NeighborTable& table, int k_max) {
    constexpr std::size_t kMaxStates = 5040;
    const std::size_t size = table.size();
    if (size > kMaxStates) throw ResourceError("first-visit diffusion on this graph supports <= 5040 states");
    const std::uint64_t root = idx.rank(idx.target_code());
    DiffusionMap out{idx, k_max, VisitRule::FirstVisit, std::vector<double>(size, kNaN)};
    out.value[root] = 0.0;
    const auto total = static_cast<std::int64_t>(size);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t vi = 0; vi < total; ++vi) {
        const auto target = static_cast<std::size_t>(vi);
        if (target == root) continue;
        std::vector<double> p(size, 0.0), q(size, 0.0);
        p[root] = 1.0;
        double weighted = 0.0, mass = 0.0;
        for (int k = 1; k <= k_max; ++k) {
            for (std::size_t v = 0; v < size; ++v) {
                const auto& row = table.rows[v];
                q[v] = (p[row[0]] + p[row[1]] + p[row[2]]) / 3.0;
            }
            weighted += k * q[target];
            mass += q[target];
            q[target] = 0.0;
            std::swap(p, q);
        }
        if (mass > 0.0) out.value[target] = weighted / mass;
    }
    return out;
}

} // namespace

DiffusionMap exact_diffusion_distance(const GraphSpec& spec, int k_max, VisitRule rule) {
    if (spec.x_trick) throw InvalidArgument("exact diffusion distance requires x_trick = false");
    if (k_max < 0) throw InvalidArgument("k_max must be >= 0");
    StateIndexer idx(spec);
    const NeighborTable table = build_neighbor_table(idx);
    if (rule == VisitRule::AllVisits) return all_visits(idx, table, k_max);
    if (spec.kind == GraphKind::FullCayley) return first_visit_cayley(idx, table, k_max);
    return first_visit_absorbing(idx, table, k_max);
}

DiffusionScan diffusion_layer_scan(const DistanceTable& dist, int k_first, int k_last) {
    if (k_first < 0 || k_last < k_first) throw InvalidArgument("invalid k_max range");
    const StateIndexer& idx = dist.indexer();
    const NeighborTable table = build_neighbor_table(idx);
    const std::size_t size = table.size();
    const auto layers = static_cast<std::size_t>(dist.diameter()) + 1;
    const auto raw = dist.raw();

    std::vector<double> p(size, 0.0), q(size, 0.0), weighted(size, 0.0), mass(size, 0.0);
    const std::uint64_t root = idx.rank(idx.target_code());
    p[root] = 1.0;
    mass[root] = 1.0;

    DiffusionScan scan{k_first, {}};
    const auto total = static_cast<std::int64_t>(size);
    for (int k = 0; k <= k_last; ++k) {
        if (k > 0) {
            diffuse(table, p, q);
            std::swap(p, q);
#pragma omp parallel for schedule(static)
            for (std::int64_t v = 0; v < total; ++v) {
                const auto u = static_cast<std::size_t>(v);
                weighted[u] += k * p[u];
                mass[u] += p[u];
            }
        }
        if (k < k_first) continue;
        std::vector<double> sum(layers, 0.0);
        std::vector<std::uint64_t> count(layers, 0);
        for (std::size_t v = 0; v < size; ++v) {
            if (mass[v] > 0.0 && raw[v] < layers) {
                sum[raw[v]] += weighted[v] / mass[v];
                ++count[raw[v]];
            }
        }
        std::vector<double> means(layers, kNaN);
        for (std::size_t d = 0; d < layers; ++d) {
            if (count[d] > 0) means[d] = sum[d] / static_cast<double>(count[d]);
        }
        means[0] = 0.0;
        scan.layer_means.push_back(std::move(means));
    }
    return scan;
}

std::map<std::vector<Entry>, McCell> mc_diffusion_estimate(const TrainingSet& ts) {
    std::map<std::vector<Entry>, std::pair<std::uint64_t, std::uint64_t>> acc;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto s = ts.state(i);
        auto& cell = acc[std::vector<Entry>(s.begin(), s.end())];
        cell.first += static_cast<std::uint64_t>(ts.labels[i]);
        ++cell.second;
    }
    std::map<std::vector<Entry>, McCell> out;
    for (auto& [state, cell] : acc) {
        out.emplace_hint(out.end(), state,
                         McCell{static_cast<double>(cell.first) / static_cast<double>(cell.second),
                                cell.second});
    }
    return out;
}

std::map<std::vector<Entry>, McCell> mc_diffusion_estimate(const GraphSpec& spec, const WalkConfig& cfg) {
    return mc_diffusion_estimate(generate_walks(spec, cfg));
}

namespace {

// Plain / X-trick walk in O(1) per step: logical entry i lives at physical
// slot (offset + i) mod n and the inversion count is updated incrementally.
void fast_mixing_trial(int n, int k_max, bool prune_x, std::uint64_t stream, std::int64_t* sum,
                       std::int64_t* sum_sq) {
    std::vector<Entry> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = static_cast<Entry>(i);
    SplitMix64 rng(stream);
    std::size_t offset = 0;
    const auto un = static_cast<std::size_t>(n);
    std::int64_t inv = 0;
    for (int k = 1; k <= k_max; ++k) {
        const std::size_t second = offset + 1 == un ? 0 : offset + 1;
        const Entry p0 = a[offset];
        const Entry p1 = a[second];
        const std::uint64_t choices = prune_x && x_move_pruned(p0, p1) ? 2 : 3;
        switch (rng.below(choices)) {
        case 0:
            inv += n - 1 - 2 * static_cast<std::int64_t>(p0);
            offset = second;
            break;
        case 1: {
            const std::size_t last = offset == 0 ? un - 1 : offset - 1;
            inv += 2 * static_cast<std::int64_t>(a[last]) - (n - 1);
            offset = last;
            break;
        }
        default:
            inv += p0 < p1 ? 1 : -1;
            std::swap(a[offset], a[second]);
            break;
        }
        sum[k] += inv;
        sum_sq[k] += inv * inv;
    }
}

void generic_mixing_trial(const GraphSpec& spec, const WalkConfig& cfg, std::uint64_t stream,
                          std::int64_t* sum, std::int64_t* sum_sq) {
    Walker walker(spec, cfg, stream);
    for (int k = 1; k <= cfg.k_max; ++k) {
        walker.step();
        const auto inv = static_cast<std::int64_t>(inversion_count(walker.state()));
        sum[k] += inv;
        sum_sq[k] += inv * inv;
    }
}

} // namespace

std::vector<MixingPoint> mixing_curve(const GraphSpec& spec, const WalkConfig& cfg, std::int64_t trials) {
    spec.validate();
    cfg.validate();
    if (spec.kind != GraphKind::FullCayley) throw InvalidArgument("mixing curves need the full graph");
    if (trials < 2) throw InvalidArgument("mixing curves need at least 2 trials");
    const auto steps = static_cast<std::size_t>(cfg.k_max) + 1;
    const bool fast = cfg.kind != WalkKind::NonBacktracking;
    const bool prune_x = cfg.kind == WalkKind::XTrick || spec.x_trick;

    // Integer accumulators: the merge order cannot change the result.
    std::vector<std::int64_t> sum(steps, 0), sum_sq(steps, 0);
#pragma omp parallel
    {
        std::vector<std::int64_t> local(steps, 0), local_sq(steps, 0);
#pragma omp for schedule(dynamic, 16)
        for (std::int64_t t = 0; t < trials; ++t) {
            const std::uint64_t stream = stream_seed(cfg.seed, "mixing", static_cast<std::uint64_t>(t));
            if (fast) {
                fast_mixing_trial(spec.n, cfg.k_max, prune_x, stream, local.data(), local_sq.data());
            } else {
                generic_mixing_trial(spec, cfg, stream, local.data(), local_sq.data());
            }
        }
#pragma omp critical
        for (std::size_t k = 0; k < steps; ++k) {
            sum[k] += local[k];
            sum_sq[k] += local_sq[k];
        }
    }

    std::vector<MixingPoint> out(steps);
    const auto t = static_cast<double>(trials);
    for (std::size_t k = 0; k < steps; ++k) {
        const double mean = static_cast<double>(sum[k]) / t;
        const double var = std::max(
            0.0, (static_cast<double>(sum_sq[k]) - static_cast<double>(sum[k]) * mean) / (t - 1.0));
        out[k] = MixingPoint{static_cast<int>(k), mean, std::sqrt(var / t)};
    }
    return out;
}

} // namespace lrx
