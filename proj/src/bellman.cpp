#include "lrx/bellman.hpp"

#include "lrx/error.hpp"
#include "lrx/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace lrx {

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidArgument("malformed " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

} // namespace

InitSpec parse_init_tag(std::string_view tag) {
    InitSpec init;
    const auto colon = tag.find(':');
    const std::string_view head = tag.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : tag.substr(colon + 1);
    if (head == "zero") {
        init.kind = InitKind::Zero;
    } else if (head == "hamming") {
        init.kind = InitKind::Hamming;
    } else if (head == "manhattan") {
        init.kind = InitKind::Manhattan;
    } else if (head == "random_int") {
        init.kind = InitKind::RandomInt;
    } else if (head == "random_gauss") {
        init.kind = InitKind::RandomGauss;
        if (!arg.empty()) init.sigma = parse_number<double>(arg, "sigma");
    } else if (head == "layer_mix") {
        init.kind = InitKind::LayerMix;
        init.layer_k = arg.empty() ? 1 : parse_number<int>(arg, "layer count");
    } else if (head == "model") {
        init.kind = InitKind::Model;
    } else if (head == "exact") {
        init.kind = InitKind::Exact;
    } else if (head == "constant") {
        init.kind = InitKind::Constant;
        init.constant = parse_number<double>(arg, "constant");
    } else {
        throw InvalidArgument("unknown initializer: '" + std::string(tag) + "'");
    }
    if (!arg.empty() && init.kind != InitKind::RandomGauss && init.kind != InitKind::LayerMix &&
        init.kind != InitKind::Constant) {
        throw InvalidArgument("initializer takes no argument: '" + std::string(tag) + "'");
    }
    return init;
}

std::string to_string(const InitSpec& init) {
    switch (init.kind) {
    case InitKind::Zero: return "zero";
    case InitKind::Hamming: return "hamming";
    case InitKind::Manhattan: return "manhattan";
    case InitKind::RandomInt: return "random_int";
    case InitKind::RandomGauss: return "random_gauss:" + std::to_string(init.sigma);
    case InitKind::LayerMix: return "layer_mix:" + std::to_string(init.layer_k);
    case InitKind::Model: return "model";
    case InitKind::Exact: return "exact";
    default: return "constant:" + std::to_string(init.constant);
    }
}

StateFunction make_initializer(const InitSpec& init, const GraphSpec& spec) {
    spec.validate();
    const std::vector<Entry> target = target_entries(spec);
    const auto need_oracle = [&] {
        if (!init.oracle) throw InvalidArgument("initializer '" + to_string(init) + "' needs a distance oracle");
        return init.oracle;
    };
    switch (init.kind) {
    case InitKind::Zero:
        return [](std::span<const Entry>) { return 0.0; };
    case InitKind::Constant:
        return [c = init.constant](std::span<const Entry>) { return c; };
    case InitKind::Hamming:
        return [target](std::span<const Entry> s) {
            int d = 0;
            for (std::size_t i = 0; i < s.size(); ++i) d += s[i] != target[i];
            return static_cast<double>(d);
        };
    case InitKind::Manhattan:
        return [target](std::span<const Entry> s) {
            int d = 0;
            for (std::size_t i = 0; i < s.size(); ++i) d += std::abs(int{s[i]} - int{target[i]});
            return static_cast<double>(d);
        };
    case InitKind::RandomInt: {
        int diameter = init.diameter;
        if (diameter < 0) diameter = init.oracle ? init.oracle->diameter() : spec.n * (spec.n - 1) / 2;
        const std::uint64_t seed = init.seed;
        return [seed, diameter](std::span<const Entry> s) {
            SplitMix64 rng(stream_seed(seed, "init-int", hash_state(s, seed)));
            return static_cast<double>(rng.below(static_cast<std::uint64_t>(diameter) + 1));
        };
    }
    case InitKind::RandomGauss: {
        const double sigma = init.sigma > 0.0 ? init.sigma : spec.n;
        const std::uint64_t seed = init.seed;
        return [seed, sigma](std::span<const Entry> s) {
            SplitMix64 rng(stream_seed(seed, "init-gauss", hash_state(s, seed)));
            return sigma * rng.normal();
        };
    }
    case InitKind::LayerMix: {
        const DistanceTable* oracle = need_oracle();
        return [oracle, k = init.layer_k](std::span<const Entry> s) {
            const int d = oracle->distance(s);
            return d < k ? static_cast<double>(d) : 0.0;
        };
    }
    case InitKind::Exact: {
        const DistanceTable* oracle = need_oracle();
        return [oracle](std::span<const Entry> s) { return static_cast<double>(oracle->distance(s)); };
    }
    default: {
        if (!init.model) throw InvalidArgument("model initializer needs an estimator");
        if (init.model->n() != spec.n) throw InvalidArgument("estimator n does not match the graph");
        const DistanceEstimator* model = init.model;
        return [model](std::span<const Entry> s) { return model->predict(s); };
    }
    }
}

void DpConfig::validate() const {
    if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0, 1]");
    if (max_iterations < 0) throw InvalidArgument("max iterations must be >= 0");
}

namespace {

bool is_constant(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

template <bool Parallel>
DpResult dp_impl(const GraphSpec& spec, const DpConfig& cfg, const DistanceTable* oracle) {
    cfg.validate();
    if (spec.x_trick) throw InvalidArgument("value iteration runs on the unpruned graph (x_trick = false)");
    StateIndexer idx(spec);
    const NeighborTable table = Parallel ? build_neighbor_table(idx) : serial::build_neighbor_table(idx);
    const std::size_t size = table.size();
    const auto total = static_cast<std::int64_t>(size);
    const std::uint64_t root = idx.rank(idx.target_code());

    std::vector<double> truth;
    if (oracle) {
        if (oracle->spec().kind != spec.kind || oracle->spec().n != spec.n ||
            idx.encode(oracle->start()) != idx.target_code()) {
            throw InvalidArgument("oracle must hold distances to the target of the same graph");
        }
        truth.resize(size);
        for (std::size_t r = 0; r < size; ++r) truth[r] = oracle->at_rank(r);
    }

    const StateFunction init = make_initializer(cfg.init, spec);
    std::vector<double> cur(size), next(size);
    {
        std::vector<Entry> state(static_cast<std::size_t>(spec.n));
        for (std::size_t r = 0; r < size; ++r) {
            idx.decode(idx.unrank(r), state);
            cur[r] = init(state);
        }
    }
    cur[root] = 0.0;

    const auto sweep = [&] {
        const double alpha = cfg.alpha;
        const auto body = [&](std::size_t r) {
            if (r == root) {
                next[r] = 0.0;
                return;
            }
            const auto& row = table.rows[r];
            const double best = std::min({cur[row[0]], cur[row[1]], cur[row[2]]});
            next[r] = alpha * (1.0 + best) + (1.0 - alpha) * cur[r];
        };
        if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
            for (std::int64_t r = 0; r < total; ++r) body(static_cast<std::size_t>(r));
        } else {
            for (std::size_t r = 0; r < size; ++r) body(r);
        }
    };
    const auto max_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        double m = 0.0;
        for (std::size_t r = 0; r < a.size(); ++r) m = std::max(m, std::abs(a[r] - b[r]));
        return m;
    };

    DpResult result;
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0;; ++i) {
        if (oracle) {
            const double err = max_diff(cur, truth);
            const double r = is_constant(cur) ? kNaN : pearson(cur, truth);
            result.trace.push_back({i, r, err});
            result.iterations = i + 1;
            if (err < cfg.tolerance) {
                result.converged = true;
                break;
            }
            if (i >= cfg.max_iterations) break;
            sweep();
            std::swap(cur, next);
        } else {
            if (i >= cfg.max_iterations) {
                result.iterations = i + 1;
                break;
            }
            sweep();
            const double diff = max_diff(cur, next);
            std::swap(cur, next);
            result.trace.push_back({i + 1, kNaN, diff});
            result.iterations = i + 2;
            if (diff < cfg.tolerance) {
                result.converged = true;
                break;
            }
        }
    }
    result.distances = std::move(cur);
    return result;
}

} // namespace

DpResult dp_solve(const GraphSpec& spec, const DpConfig& cfg, const DistanceTable* oracle) {
    return dp_impl<true>(spec, cfg, oracle);
}

DpResult serial::dp_solve(const GraphSpec& spec, const DpConfig& cfg, const DistanceTable* oracle) {
    return dp_impl<false>(spec, cfg, oracle);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("correlation inputs differ in length");
    if (xs.size() < 2) throw UndefinedCorrelation("correlation needs at least two points");
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("correlation of a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InvalidArgument("correlation inputs differ in length");
    const std::vector<double> rx = average_ranks(xs);
    const std::vector<double> ry = average_ranks(ys);
    return pearson(rx, ry);
}

} // namespace lrx
