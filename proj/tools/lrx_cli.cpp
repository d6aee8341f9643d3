// lrx: command-line front end for the LRX graph toolkit.
//
// Every subcommand writes its files into --out plus a run.json manifest.
// Data files depend only on the configuration and seed; run.json also
// records thread count, timings and peak memory.

#include "lrx/analysis.hpp"
#include "lrx/beam.hpp"
#include "lrx/bellman.hpp"
#include "lrx/error.hpp"
#include "lrx/estimator.hpp"
#include "lrx/exact_search.hpp"
#include "lrx/rng.hpp"
#include "lrx/solvers.hpp"
#include "lrx/tropical.hpp"
#include "lrx/walks.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>
#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kFormatVersion = 1;

struct Options {
    int n = 0;
    std::string kind = "full";
    bool x_trick = false;
    std::uint64_t seed = 42;
    std::string out = "lrx-out";
    int threads = 0;
    std::uint64_t mem_budget = lrx::kDefaultMemBudget;
    std::int64_t width = 1024;
    int history_depth = 2;
    int kmax = -1;
    int kmin = -1;
    std::int64_t walks = 1000;
    int epochs_warmup = 30;
    int epochs_dqn = 30;
    double lr = 1e-3;
    int hidden = 128;
    int batch = 256;
    bool sgd = false;
    std::string checkpoint;
    std::string save;
    std::string heuristic = "model";
    std::string perm;
    std::string input;
    int degree = 2;
    bool no_timing = false;
    std::string init = "zero";
    double alpha = 1.0;
    double tol = 1e-9;
    int max_iter = 1000;
    std::int64_t trials = 5000;
    std::string walk_kind = "plain";
    std::string visit_rule = "all_visits";
    int repeats = 1;
    int starts = 0;
    int max_steps = -1;
    std::string objective = "l2";
    int bins = 50;
};

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string quoted(const std::string& s) { return s.find(',') == std::string::npos ? s : "\"" + s + "\""; }

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw lrx::InvalidArgument("cannot write " + (dir_ / name).string());
        f << content;
        files_.push_back(name);
    }
    void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void record(const std::string& name) { files_.push_back(name); }
    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

lrx::GraphSpec graph_spec(const Options& o) {
    lrx::GraphSpec spec{lrx::parse_graph_kind(o.kind), o.n, o.x_trick};
    spec.validate();
    return spec;
}

json spec_json(const lrx::GraphSpec& spec) {
    return {{"kind", lrx::to_string(spec.kind)}, {"n", spec.n}, {"x_trick", spec.x_trick}};
}

lrx::BfsOptions bfs_options(const Options& o) { return lrx::BfsOptions{o.mem_budget}; }

lrx::GraphSpec exact_spec(const Options& o) {
    lrx::GraphSpec spec = graph_spec(o);
    spec.x_trick = false;
    return spec;
}

// Default walk length: the conjectured diameter of the full graph.
int default_kmax(const lrx::GraphSpec& spec) {
    if (spec.kind == lrx::GraphKind::Coset && spec.n >= 6) {
        return static_cast<int>(lrx::coset_gods_number(spec.n));
    }
    return spec.n * (spec.n - 1) / 2;
}

lrx::WalkConfig walk_config(const Options& o, const lrx::GraphSpec& spec) {
    lrx::WalkConfig cfg;
    cfg.kind = lrx::parse_walk_kind(o.walk_kind);
    cfg.history_depth = std::max(1, o.history_depth);
    cfg.k_max = o.kmax > 0 ? o.kmax : default_kmax(spec);
    cfg.trajectories = o.walks;
    cfg.seed = lrx::stream_seed(o.seed, "walks");
    return cfg;
}

lrx::ModelConfig model_config(const Options& o) {
    lrx::ModelConfig cfg;
    cfg.hidden_width = o.hidden;
    cfg.epochs_warmup = o.epochs_warmup;
    cfg.epochs_dqn = o.epochs_dqn;
    cfg.batch_size = o.batch;
    cfg.lr = o.lr;
    cfg.sgd = o.sgd;
    cfg.seed = lrx::stream_seed(o.seed, "model");
    return cfg;
}

std::vector<lrx::Entry> start_state(const Options& o, const lrx::GraphSpec& spec) {
    if (!o.perm.empty()) return lrx::parse_state(spec, o.perm);
    if (spec.kind == lrx::GraphKind::Coset) return lrx::to_entries(lrx::coset_long_element(spec.n));
    const auto l = lrx::longest_element(spec.n);
    return {l.entries().begin(), l.entries().end()};
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lrx::InvalidArgument("cannot read " + path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty() && line.front() != '#') lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool in_quotes = false;
    for (char c : line) {
        if (c == '"') {
            in_quotes = !in_quotes;
        } else if (c == ',' && !in_quotes) {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

// Layer sizes from --input (a distance,layer_size CSV) or from a fresh BFS.
std::vector<std::uint64_t> load_profile(const Options& o, json& source) {
    if (!o.input.empty()) {
        std::vector<std::uint64_t> sizes;
        for (const auto& line : read_lines(o.input)) {
            const auto cells = split_csv_row(line);
            if (cells.size() < 2 || cells[0] == "distance") continue;
            sizes.push_back(std::stoull(cells[1]));
        }
        source = {{"input", o.input}};
        return sizes;
    }
    const lrx::GraphSpec spec = exact_spec(o);
    const auto result = lrx::bfs(spec, bfs_options(o));
    source = {{"bfs", spec_json(spec)}};
    return result.profile.layer_sizes;
}

void validated_word_or_throw(const std::vector<lrx::Entry>& start, const lrx::Word& w,
                             const std::vector<lrx::Entry>& target) {
    std::vector<lrx::Entry> s = start;
    lrx::apply_word_inplace(s, w);
    if (s != target) throw std::logic_error("refusing to write a word that does not replay to the target");
}

double spearman_vs_bfs(const lrx::DistanceEstimator& est, const lrx::DistanceTable& table) {
    const auto& idx = table.indexer();
    std::vector<lrx::Entry> flat(static_cast<std::size_t>(idx.size()) * static_cast<std::size_t>(idx.n()));
    std::vector<double> truth(idx.size());
    for (std::uint64_t r = 0; r < idx.size(); ++r) {
        idx.decode(idx.unrank(r), std::span<lrx::Entry>(flat.data() + r * static_cast<std::uint64_t>(idx.n()),
                                                         static_cast<std::size_t>(idx.n())));
        truth[r] = table.at_rank(r);
    }
    return lrx::spearman(est.predict_batch(flat), truth);
}

using Handler = std::function<json(const Options&, Output&)>;

// ---- exact search --------------------------------------------------------

json run_bfs(const Options& o, Output& out, bool coset) {
    Options oo = o;
    if (coset) oo.kind = "coset";
    const lrx::GraphSpec spec = exact_spec(oo);
    const auto result = lrx::bfs(spec, bfs_options(oo));
    std::ostringstream layers;
    layers << "distance,layer_size\n";
    for (std::size_t d = 0; d < result.profile.layer_sizes.size(); ++d) {
        layers << d << ',' << result.profile.layer_sizes[d] << '\n';
    }
    out.write("layers.csv", layers.str());
    std::ostringstream far;
    const auto farthest = lrx::farthest_states(result.table);
    for (const auto& s : farthest) far << lrx::format_state(spec, s) << '\n';
    out.write("farthest.txt", far.str());
    json summary = {{"graph", spec_json(spec)},
                    {"states", result.profile.total()},
                    {"diameter", result.profile.diameter()},
                    {"farthest_count", farthest.size()}};
    out.write_json("bfs.json", summary);
    return summary;
}

json run_sortnet(const Options& o, Output& out) {
    const lrx::GraphSpec spec{lrx::GraphKind::FullCayley, o.n, false};
    spec.validate();
    const auto start = start_state(o, spec);
    const lrx::Permutation source{std::vector<lrx::Entry>(start.begin(), start.end())};
    const auto ens = lrx::geodesic_ensemble(source, lrx::Permutation::identity(static_cast<std::size_t>(o.n)),
                                            bfs_options(o));
    std::ostringstream csv;
    csv << "step";
    for (int v = 0; v < o.n; ++v) csv << ",v" << v;
    csv << '\n';
    for (std::size_t t = 0; t < ens.positions.size(); ++t) {
        csv << t;
        for (double x : ens.positions[t]) csv << ',' << fmt(x);
        csv << '\n';
    }
    out.write("sortnet.csv", csv.str());
    json summary = {{"source", source.to_string()}, {"length", ens.length}, {"geodesic_count", ens.path_count}};
    out.write_json("sortnet.json", summary);
    return summary;
}

// ---- value iteration -----------------------------------------------------

json run_dp(const Options& o, Output& out) {
    const lrx::GraphSpec spec = exact_spec(o);
    const auto oracle = lrx::bfs(spec, bfs_options(o));
    lrx::DpConfig cfg;
    cfg.alpha = o.alpha;
    cfg.tolerance = o.tol;
    cfg.max_iterations = o.max_iter;
    cfg.init = lrx::parse_init_tag(o.init);
    cfg.init.seed = lrx::stream_seed(o.seed, "init");
    cfg.init.oracle = &oracle.table;
    lrx::DistanceEstimator model;
    if (cfg.init.kind == lrx::InitKind::Model) {
        if (o.checkpoint.empty()) throw lrx::InvalidArgument("--init model needs --checkpoint");
        model = lrx::DistanceEstimator::load(o.checkpoint, spec.n);
        cfg.init.model = &model;
    }
    const auto result = lrx::dp_solve(spec, cfg, &oracle.table);

    std::ostringstream trace;
    trace << "iteration,pearson,max_abs_err\n";
    for (const auto& p : result.trace) trace << p.iteration << ',' << fmt(p.pearson) << ',' << fmt(p.max_abs_err) << '\n';
    out.write("dp_trace.csv", trace.str());

    std::ostringstream dist;
    dist << "state,distance\n";
    const auto& idx = oracle.table.indexer();
    for (std::uint64_t r = 0; r < idx.size(); ++r) {
        dist << quoted(lrx::format_state(spec, idx.unrank_state(r))) << ',' << fmt(result.distances[r]) << '\n';
    }
    out.write("distances.csv", dist.str());
    json summary = {{"graph", spec_json(spec)},       {"init", lrx::to_string(cfg.init)},
                    {"alpha", cfg.alpha},             {"iterations", result.iterations},
                    {"converged", result.converged},  {"diameter", oracle.table.diameter()}};
    out.write_json("dp.json", summary);
    return summary;
}

json run_tropical(const Options& o, Output& out) {
    const lrx::GraphSpec spec = exact_spec(o);
    const auto a = lrx::tropical_adjacency(spec);
    const int k = o.kmax > 0 ? o.kmax : static_cast<int>(a.size()) - 1;
    const auto p = lrx::tropical_power(a, k);
    lrx::StateIndexer idx(spec);
    const auto root = idx.rank(idx.target_code());
    std::ostringstream csv;
    csv << "state,distance_to_target\n";
    for (std::size_t r = 0; r < p.size(); ++r) {
        csv << quoted(lrx::format_state(spec, idx.unrank_state(r))) << ',' << fmt(p(r, root)) << '\n';
    }
    out.write("tropical.csv", csv.str());
    double diameter = 0.0;
    for (double x : p.data()) diameter = std::max(diameter, x);
    json summary = {{"graph", spec_json(spec)}, {"power", k}, {"states", p.size()}, {"max_entry", diameter}};
    out.write_json("tropical.json", summary);
    return summary;
}

// ---- walks ---------------------------------------------------------------

json run_walks(const Options& o, Output& out) {
    const lrx::GraphSpec spec = graph_spec(o);
    const auto cfg = walk_config(o, spec);
    const auto ts = lrx::generate_walks(spec, cfg);
    std::ostringstream csv;
    csv << "state,k\n";
    for (std::size_t i = 0; i < ts.size(); ++i) csv << quoted(lrx::format_state(spec, ts.state(i))) << ',' << ts.labels[i] << '\n';
    out.write("training.csv", csv.str());
    json meta = {{"graph", spec_json(spec)},
                 {"walk", {{"kind", lrx::to_string(cfg.kind)},
                           {"history_depth", cfg.history_depth},
                           {"k_max", cfg.k_max},
                           {"trajectories", cfg.trajectories},
                           {"seed", cfg.seed}}},
                 {"pairs", ts.size()}};
    out.write_json("training.json", meta);
    return meta;
}

json run_dd_exact(const Options& o, Output& out) {
    const lrx::GraphSpec spec = exact_spec(o);
    const int k_max = o.kmax > 0 ? o.kmax : default_kmax(spec);
    const auto rule = lrx::parse_visit_rule(o.visit_rule);
    json summary = {{"graph", spec_json(spec)}, {"k_max", k_max}, {"visit_rule", lrx::to_string(rule)}};
    if (o.kmin >= 0) {
        // Layer-mean scan over k_max in [kmin, kmax].
        if (rule != lrx::VisitRule::AllVisits) throw lrx::InvalidArgument("the k_max scan uses all_visits");
        const auto table = lrx::bfs(spec, bfs_options(o));
        const auto scan = lrx::diffusion_layer_scan(table.table, o.kmin, k_max);
        std::ostringstream csv;
        csv << "k_max,layer,mean_dd\n";
        for (std::size_t j = 0; j < scan.layer_means.size(); ++j) {
            for (std::size_t d = 0; d < scan.layer_means[j].size(); ++d) {
                csv << scan.k_first + static_cast<int>(j) << ',' << d << ',' << fmt(scan.layer_means[j][d]) << '\n';
            }
        }
        out.write("dd_scan.csv", csv.str());
        summary["k_min"] = o.kmin;
        out.write_json("dd.json", summary);
        return summary;
    }
    const auto dd = lrx::exact_diffusion_distance(spec, k_max, rule);
    std::ostringstream csv;
    csv << "state,dd\n";
    std::uint64_t defined = 0;
    for (std::uint64_t r = 0; r < dd.value.size(); ++r) {
        if (!dd.defined(r)) continue;
        ++defined;
        csv << quoted(lrx::format_state(spec, dd.indexer.unrank_state(r))) << ',' << fmt(dd.value[r]) << '\n';
    }
    out.write("dd.csv", csv.str());
    summary["defined_states"] = defined;
    out.write_json("dd.json", summary);
    return summary;
}

json run_mixing(const Options& o, Output& out) {
    const lrx::GraphSpec spec = graph_spec(o);
    lrx::WalkConfig cfg = walk_config(o, spec);
    cfg.k_max = o.kmax > 0 ? o.kmax : 10 * o.n * o.n * o.n;
    cfg.seed = lrx::stream_seed(o.seed, "mixing");
    const auto curve = lrx::mixing_curve(spec, cfg, o.trials);
    std::ostringstream csv;
    csv << "step,mean_inversions,stderr\n";
    for (const auto& p : curve) csv << p.step << ',' << fmt(p.mean_inversions) << ',' << fmt(p.stderr_) << '\n';
    out.write("mixing.csv", csv.str());
    json summary = {{"graph", spec_json(spec)},
                    {"walk_kind", lrx::to_string(cfg.kind)},
                    {"k_max", cfg.k_max},
                    {"trials", o.trials},
                    {"final_mean", curve.back().mean_inversions},
                    {"final_stderr", curve.back().stderr_},
                    {"uniform_mean", o.n * (o.n - 1) / 4.0}};
    out.write_json("mixing.json", summary);
    return summary;
}

// ---- learning ------------------------------------------------------------

std::string loss_csv(const lrx::TrainReport& r) {
    std::ostringstream csv;
    csv << "epoch,loss\n0," << fmt(r.initial_loss) << '\n';
    for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) csv << e + 1 << ',' << fmt(r.epoch_loss[e]) << '\n';
    return csv.str();
}

json evaluate(const lrx::GraphSpec& spec, const lrx::DistanceEstimator& est, const Options& o) {
    if (spec.kind != lrx::GraphKind::FullCayley || spec.n > 9) return json::object();
    const auto table = lrx::bfs(lrx::GraphSpec{spec.kind, spec.n, false}, bfs_options(o));
    return {{"spearman_vs_bfs", spearman_vs_bfs(est, table.table)}};
}

json run_train(const Options& o, Output& out) {
    const lrx::GraphSpec spec = graph_spec(o);
    const auto wcfg = walk_config(o, spec);
    const auto mcfg = model_config(o);
    const auto ts = lrx::generate_walks(spec, wcfg);
    lrx::TrainReport report;
    auto est = lrx::train_warmup(ts, mcfg, &report);
    est.training_meta_json = json{{"phase", "warmup"}, {"epochs", mcfg.epochs_warmup}, {"pairs", ts.size()},
                                  {"k_max", wcfg.k_max}, {"walks", wcfg.trajectories}}
                                 .dump();
    const std::string path = o.save.empty() ? out.path("model.json") : o.save;
    est.save(path);
    if (o.save.empty()) out.record("model.json");
    out.write("train.csv", loss_csv(report));
    json summary = {{"graph", spec_json(spec)}, {"checkpoint", o.save.empty() ? "model.json" : o.save}, {"pairs", ts.size()},
                    {"evaluation", evaluate(spec, est, o)}};
    out.write_json("train.json", summary);
    return summary;
}

json run_dqn(const Options& o, Output& out) {
    const lrx::GraphSpec spec = graph_spec(o);
    const auto wcfg = walk_config(o, spec);
    const auto mcfg = model_config(o);
    lrx::DistanceEstimator start;
    json warm = json::object();
    if (!o.checkpoint.empty()) {
        start = lrx::DistanceEstimator::load(o.checkpoint, spec.n);
    } else {
        lrx::TrainReport report;
        start = lrx::train_warmup(lrx::generate_walks(spec, wcfg), mcfg, &report);
        out.write("train.csv", loss_csv(report));
        warm = evaluate(spec, start, o);
    }
    lrx::WalkConfig dqn_walks = wcfg;
    dqn_walks.seed = lrx::stream_seed(o.seed, "dqn-walks");
    lrx::TrainReport report;
    auto est = lrx::train_dqn(spec, start, mcfg, dqn_walks, &report);
    est.training_meta_json = json{{"phase", "dqn"}, {"epochs_dqn", mcfg.epochs_dqn}, {"k_max", wcfg.k_max},
                                  {"walks", wcfg.trajectories}}
                                 .dump();
    const std::string path = o.save.empty() ? out.path("model_dqn.json") : o.save;
    est.save(path);
    if (o.save.empty()) out.record("model_dqn.json");
    out.write("dqn.csv", loss_csv(report));
    json summary = {{"graph", spec_json(spec)}, {"checkpoint", o.save.empty() ? "model_dqn.json" : o.save}, {"warmup_evaluation", warm},
                    {"evaluation", evaluate(spec, est, o)}};
    out.write_json("dqn.json", summary);
    return summary;
}

// ---- beam search ---------------------------------------------------------

struct HeuristicHolder {
    lrx::DistanceEstimator model;
    std::unique_ptr<lrx::BfsResult> table;
    std::unique_ptr<lrx::Heuristic> heuristic;
};

HeuristicHolder make_heuristic(const Options& o, const lrx::GraphSpec& spec) {
    HeuristicHolder h;
    if (o.heuristic == "model") {
        if (o.checkpoint.empty()) throw lrx::InvalidArgument("--heuristic model needs --checkpoint");
        h.model = lrx::DistanceEstimator::load(o.checkpoint, spec.n);
        h.heuristic = std::make_unique<lrx::ModelHeuristic>(h.model);
    } else if (o.heuristic == "hamming") {
        h.heuristic = std::make_unique<lrx::HammingHeuristic>(spec);
    } else if (o.heuristic == "oracle") {
        h.table = std::make_unique<lrx::BfsResult>(
            lrx::bfs(lrx::GraphSpec{spec.kind, spec.n, false}, bfs_options(o)));
        h.heuristic = std::make_unique<lrx::OracleHeuristic>(h.table->table);
    } else {
        throw lrx::InvalidArgument("unknown heuristic: " + o.heuristic);
    }
    return h;
}

lrx::BeamConfig beam_config(const Options& o, const lrx::GraphSpec& spec) {
    lrx::BeamConfig cfg;
    cfg.width = o.width;
    cfg.max_steps = o.max_steps > 0 ? o.max_steps : 4 * default_kmax(spec) + 4 * spec.n;
    cfg.history_depth = o.history_depth;
    cfg.x_trick = o.x_trick;
    cfg.seed = lrx::stream_seed(o.seed, "beam");
    cfg.mem_budget_bytes = o.mem_budget;
    return cfg;
}

json run_beam(const Options& o, Output& out) {
    const lrx::GraphSpec spec = graph_spec(o);
    const auto start = start_state(o, spec);
    const auto h = make_heuristic(o, spec);
    const auto cfg = beam_config(o, spec);
    const auto res = lrx::beam_search(spec, start, cfg, *h.heuristic);
    if (res.found) validated_word_or_throw(start, res.word, lrx::target_entries(spec));
    json doc = {{"found", res.found},
                {"length", res.found ? json(res.word.size()) : json(nullptr)},
                {"word", res.found ? json(lrx::to_string(res.word)) : json(nullptr)},
                {"steps", res.steps},
                {"peak_beam", res.peak_beam},
                {"seed", o.seed},
                {"start", lrx::format_state(spec, start)},
                {"heuristic", h.heuristic->name()},
                {"width", cfg.width},
                {"history_depth", cfg.history_depth},
                {"x_trick", spec.x_trick || cfg.x_trick}};
    out.write_json("beam.json", doc);
    return doc;
}

std::vector<std::vector<lrx::Entry>> batch_starts(const Options& o, const lrx::GraphSpec& spec) {
    std::vector<std::vector<lrx::Entry>> starts;
    if (!o.input.empty()) {
        for (const auto& line : read_lines(o.input)) starts.push_back(lrx::parse_state(spec, line));
    } else if (o.starts > 0) {
        // Random states: shuffles of the target drawn from the seed.
        for (int i = 0; i < o.starts; ++i) {
            lrx::SplitMix64 rng(lrx::stream_seed(o.seed, "starts", static_cast<std::uint64_t>(i)));
            auto s = lrx::target_entries(spec);
            for (std::size_t k = s.size(); k > 1; --k) std::swap(s[k - 1], s[rng.below(k)]);
            starts.push_back(std::move(s));
        }
    } else {
        starts.push_back(start_state(o, spec));
    }
    return starts;
}

json run_solve_batch(const Options& o, Output& out) {
    const lrx::GraphSpec spec = graph_spec(o);
    const auto starts = batch_starts(o, spec);
    const auto h = make_heuristic(o, spec);
    const auto cfg = beam_config(o, spec);
    const auto report = lrx::solve_batch(spec, starts, cfg, *h.heuristic, o.repeats);
    std::ostringstream csv;
    csv << "run,found,length,seconds,peak_mem_bytes\n";
    const auto target = lrx::target_entries(spec);
    for (const auto& r : report.runs) {
        if (r.found) validated_word_or_throw(starts[r.start_index], lrx::parse_word(r.word), target);
        csv << r.run << ',' << (r.found ? 1 : 0) << ',' << r.length << ',' << (o.no_timing ? "0" : fmt(r.seconds))
            << ',' << (o.no_timing ? 0 : r.peak_mem_bytes) << '\n';
    }
    out.write("batch.csv", csv.str());
    json summary = {{"graph", spec_json(spec)},
                    {"runs", report.runs.size()},
                    {"success_rate", report.success_rate},
                    {"min_length", report.min_length},
                    {"median_length", report.median_length},
                    {"heuristic", h.heuristic->name()}};
    out.write_json("batch.json", summary);
    return summary;
}

// ---- constructive words --------------------------------------------------

json run_longest_word(const Options& o, Output& out) {
    const auto w = lrx::longest_word(o.n);
    const auto id = lrx::Permutation::identity(static_cast<std::size_t>(o.n));
    const bool valid = lrx::apply_word(id, w) == lrx::longest_element(o.n);
    if (!valid) throw std::logic_error("longest word does not replay to the longest element");
    json doc = {{"n", o.n}, {"word", lrx::to_string(w)}, {"length", w.size()}, {"valid", valid}};
    out.write_json("longest_word.json", doc);
    return doc;
}

json run_construct(const Options& o, Output& out) {
    if (o.input.empty() && o.starts <= 0) {
        if (o.perm.empty()) throw lrx::InvalidArgument("construct needs --perm, --input or --starts");
        const auto p = lrx::Permutation::parse(o.perm);
        const auto w = lrx::constructive_solve(p);
        json doc = {{"perm", p.to_string()},
                    {"word", lrx::to_string(w)},
                    {"length", w.size()},
                    {"bound", lrx::constructive_bound(static_cast<int>(p.size()))},
                    {"valid", lrx::apply_word(p, w).is_identity()}};
        out.write_json("construct.json", doc);
        return doc;
    }
    Options oo = o;
    oo.kind = "full";
    const lrx::GraphSpec spec = graph_spec(oo);
    const auto starts = batch_starts(oo, spec);
    std::ostringstream csv;
    csv << "perm,length,bound,valid\n";
    std::size_t worst = 0;
    for (const auto& s : starts) {
        const lrx::Permutation p{std::vector<lrx::Entry>(s)};
        const auto w = lrx::constructive_solve(p);
        worst = std::max(worst, w.size());
        csv << quoted(p.to_string()) << ',' << w.size() << ',' << lrx::constructive_bound(static_cast<int>(p.size()))
            << ",true\n";
    }
    out.write("construct.csv", csv.str());
    json summary = {{"count", starts.size()}, {"max_length", worst}};
    out.write_json("construct.json", summary);
    return summary;
}

json run_bounds(const Options& o, Output& out) {
    json doc = {{"n", o.n},
                {"axial_lower_bound", lrx::axial_lower_bound(o.n)},
                {"conjectured_diameter", static_cast<std::int64_t>(o.n) * (o.n - 1) / 2},
                {"constructive_upper_bound", lrx::constructive_bound(o.n)},
                {"longest_word_length", lrx::longest_word(o.n).size()}};
    if (o.n >= 6 && o.n % 2 == 0) doc["coset_gods_number"] = lrx::coset_gods_number(o.n);
    out.write_json("bounds.json", doc);
    return doc;
}

// ---- statistics ----------------------------------------------------------

json run_growth(const Options& o, Output& out) {
    json source;
    const auto sizes = load_profile(o, source);
    const auto s = lrx::growth_stats(sizes);
    json doc = {{"source", source},
                {"layers", sizes.size()},
                {"mean", s.mean},
                {"mode", s.mode},
                {"std", s.std},
                {"skewness", s.skewness},
                {"excess_kurtosis", s.excess_kurtosis}};
    out.write_json("growth.json", doc);
    return doc;
}

json run_gumbel(const Options& o, Output& out) {
    json source;
    const auto sizes = load_profile(o, source);
    const auto fit = lrx::gumbel_fit(sizes, lrx::parse_fit_objective(o.objective));
    json doc = {{"source", source},
                {"objective_kind", lrx::to_string(fit.kind)},
                {"mu", fit.refined.mu},
                {"beta", fit.refined.beta},
                {"objective", fit.objective},
                {"moment_mu", fit.moment.mu},
                {"moment_beta", fit.moment.beta},
                {"moment_objective", fit.moment_objective}};
    out.write_json("gumbel.json", doc);
    return doc;
}

json run_fit(const Options& o, Output& out) {
    if (o.input.empty()) throw lrx::InvalidArgument("fit needs --input with x,y rows");
    std::vector<double> xs, ys;
    for (const auto& line : read_lines(o.input)) {
        const auto cells = split_csv_row(line);
        if (cells.size() < 2) continue;
        try {
            const double x = std::stod(cells[0]);
            const double y = std::stod(cells[1]);
            xs.push_back(x);
            ys.push_back(y);
        } catch (const std::invalid_argument&) {
            continue;  // header
        }
    }
    const auto fit = lrx::poly_fit(xs, ys, o.degree);
    json doc = {{"degree", o.degree}, {"coefficients", fit.coefficients}, {"residual_norm", fit.residual_norm},
                {"points", xs.size()}};
    out.write_json("fit.json", doc);
    return doc;
}

json run_spectrum(const Options& o, Output& out) {
    const lrx::GraphSpec spec = exact_spec(o);
    const auto ev = lrx::spectrum(spec);
    std::ostringstream csv;
    csv << "index,eigenvalue\n";
    for (std::size_t i = 0; i < ev.size(); ++i) csv << i << ',' << fmt(ev[i]) << '\n';
    out.write("spectrum.csv", csv.str());
    const auto hist = lrx::histogram(ev, o.bins, -3.0, 3.0);
    std::ostringstream h;
    h << "bin_lo,bin_hi,count\n";
    const double w = (hist.hi - hist.lo) / static_cast<double>(hist.counts.size());
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        h << fmt(hist.lo + w * static_cast<double>(b)) << ',' << fmt(hist.lo + w * static_cast<double>(b + 1)) << ','
          << hist.counts[b] << '\n';
    }
    out.write("spectrum_hist.csv", h.str());
    double sum = 0.0;
    for (double x : ev) sum += x;
    json doc = {{"graph", spec_json(spec)}, {"operator", "adjacency"}, {"eigenvalues", ev.size()},
                {"max", ev.back()}, {"min", ev.front()}, {"sum", sum}};
    out.write_json("spectrum.json", doc);
    return doc;
}

std::uint64_t peak_rss_bytes() {
    rusage u{};
    getrusage(RUSAGE_SELF, &u);
    return static_cast<std::uint64_t>(u.ru_maxrss) * 1024;
}

json options_json(const Options& o) {
    return {{"n", o.n},
            {"kind", o.kind},
            {"x_trick", o.x_trick},
            {"seed", o.seed},
            {"out", o.out},
            {"mem_budget_bytes", o.mem_budget},
            {"width", o.width},
            {"history_depth", o.history_depth},
            {"kmax", o.kmax},
            {"kmin", o.kmin},
            {"walks", o.walks},
            {"epochs_warmup", o.epochs_warmup},
            {"epochs_dqn", o.epochs_dqn},
            {"lr", o.lr},
            {"hidden", o.hidden},
            {"batch", o.batch},
            {"sgd", o.sgd},
            {"checkpoint", o.checkpoint},
            {"save", o.save},
            {"heuristic", o.heuristic},
            {"perm", o.perm},
            {"input", o.input},
            {"degree", o.degree},
            {"init", o.init},
            {"alpha", o.alpha},
            {"tol", o.tol},
            {"max_iter", o.max_iter},
            {"trials", o.trials},
            {"walk_kind", o.walk_kind},
            {"visit_rule", o.visit_rule},
            {"repeats", o.repeats},
            {"starts", o.starts},
            {"max_steps", o.max_steps},
            {"objective", o.objective},
            {"bins", o.bins}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LRX Cayley graph toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;

    app.add_option("--n", o.n, "Number of elements");
    app.add_option("--kind", o.kind, "Graph kind: full | coset")->check(CLI::IsMember({"full", "coset"}));
    app.add_flag("--x-trick", o.x_trick, "Drop X when the first two entries are ordered");
    app.add_option("--seed", o.seed, "Run seed");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--threads", o.threads, "OpenMP threads (0: runtime default)");
    app.add_option("--mem-budget-bytes", o.mem_budget, "Memory budget for tables and beams");
    app.add_option("--width", o.width, "Beam width");
    app.add_option("--history-depth", o.history_depth, "Beam frontiers / walk steps banned from revisits");
    app.add_option("--kmax", o.kmax, "Walk length, DD horizon or tropical power");
    app.add_option("--kmin", o.kmin, "First k_max of a diffusion-distance scan");
    app.add_option("--walks", o.walks, "Random walk count");
    app.add_option("--epochs-warmup", o.epochs_warmup, "Warm-up epochs");
    app.add_option("--epochs-dqn", o.epochs_dqn, "DQN epochs");
    app.add_option("--lr", o.lr, "Learning rate");
    app.add_option("--hidden", o.hidden, "Hidden width");
    app.add_option("--batch", o.batch, "Minibatch size");
    app.add_flag("--sgd", o.sgd, "Plain SGD instead of Adam");
    app.add_option("--checkpoint", o.checkpoint, "Model checkpoint to load");
    app.add_option("--save", o.save, "Where to write a trained checkpoint");
    app.add_option("--heuristic", o.heuristic, "Beam heuristic: model | hamming | oracle")
        ->check(CLI::IsMember({"model", "hamming", "oracle"}));
    app.add_option("--perm", o.perm, "State, e.g. 1,0,4,3,2 or 0011");
    app.add_option("--input", o.input, "Input file");
    app.add_option("--degree", o.degree, "Polynomial degree");
    app.add_flag("--no-timing", o.no_timing, "Zero timing and memory columns in data files");
    app.add_option("--init", o.init, "DP initializer tag");
    app.add_option("--alpha", o.alpha, "DP learning rate");
    app.add_option("--tol", o.tol, "DP tolerance");
    app.add_option("--max-iter", o.max_iter, "DP iteration cap");
    app.add_option("--trials", o.trials, "Mixing trials");
    app.add_option("--walk-kind", o.walk_kind, "plain | non_backtracking | x_trick");
    app.add_option("--visit-rule", o.visit_rule, "all_visits | first_visit");
    app.add_option("--repeats", o.repeats, "Batch repeats");
    app.add_option("--starts", o.starts, "Random start count");
    app.add_option("--max-steps", o.max_steps, "Beam step limit");
    app.add_option("--objective", o.objective, "Gumbel objective: l2 | linf | ks");
    app.add_option("--bins", o.bins, "Histogram bins");

    const std::map<std::string, Handler> handlers = {
        {"bfs", [](const Options& opt, Output& out) { return run_bfs(opt, out, false); }},
        {"coset-bfs", [](const Options& opt, Output& out) { return run_bfs(opt, out, true); }},
        {"dp", run_dp},
        {"tropical", run_tropical},
        {"walks", run_walks},
        {"dd-exact", run_dd_exact},
        {"mixing", run_mixing},
        {"train", run_train},
        {"dqn", run_dqn},
        {"beam", run_beam},
        {"solve-batch", run_solve_batch},
        {"longest-word", run_longest_word},
        {"construct", run_construct},
        {"solve", run_construct},
        {"bounds", run_bounds},
        {"growth", run_growth},
        {"gumbel", run_gumbel},
        {"fit", run_fit},
        {"spectrum", run_spectrum},
        {"sortnet", run_sortnet},
    };
    for (const auto& [name, handler] : handlers) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::string command;
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();

    try {
        if (o.threads > 0) omp_set_num_threads(o.threads);
        Output out(o.out);
        const auto t0 = std::chrono::steady_clock::now();
        const json summary = handlers.at(command)(o, out);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        json manifest = {{"format_version", kFormatVersion},
                         {"tool", "lrx"},
                         {"version", kVersion},
                         {"subcommand", command},
                         {"config", options_json(o)},
                         {"threads", omp_get_max_threads()},
                         {"seconds", seconds},
                         {"peak_rss_bytes", peak_rss_bytes()},
                         {"outputs", out.files()},
                         {"summary", summary}};
        out.write_json("run.json", manifest);
        std::cout << summary.dump() << '\n';
        return 0;
    } catch (const lrx::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 3;
    } catch (const lrx::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
