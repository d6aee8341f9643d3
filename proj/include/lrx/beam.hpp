#pragma once

// Guided beam search toward the target state of a graph, with hash dedup,
// banned-history non-backtracking, X-trick pruning and replay-validated
// path reconstruction.

#include "lrx/estimator.hpp"
#include "lrx/exact_search.hpp"
#include "lrx/graph_space.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lrx {

// Scores a flat batch of states (n entries each); lower is closer.
class Heuristic {
public:
    virtual ~Heuristic() = default;
    virtual int n() const = 0;
    virtual std::string name() const = 0;
    virtual void score(std::span<const Entry> states, std::span<double> out) const = 0;
};

class ModelHeuristic final : public Heuristic {
public:
    explicit ModelHeuristic(const DistanceEstimator& model) : model_(model) {}
    int n() const override { return model_.n(); }
    std::string name() const override { return "model"; }
    void score(std::span<const Entry> states, std::span<double> out) const override;

private:
    const DistanceEstimator& model_;
};

// |{i : s[i] != target[i]}|.
class HammingHeuristic final : public Heuristic {
public:
    explicit HammingHeuristic(const GraphSpec& spec) : target_(target_entries(spec)) {}
    int n() const override { return static_cast<int>(target_.size()); }
    std::string name() const override { return "hamming"; }
    void score(std::span<const Entry> states, std::span<double> out) const override;

private:
    std::vector<Entry> target_;
};

// Exact distances from a BFS table rooted at the target.
class OracleHeuristic final : public Heuristic {
public:
    explicit OracleHeuristic(const DistanceTable& table) : table_(table) {}
    int n() const override { return table_.indexer().n(); }
    std::string name() const override { return "oracle"; }
    void score(std::span<const Entry> states, std::span<double> out) const override;

private:
    const DistanceTable& table_;
};

// inner + constant.
class OffsetHeuristic final : public Heuristic {
public:
    OffsetHeuristic(const Heuristic& inner, double offset) : inner_(inner), offset_(offset) {}
    int n() const override { return inner_.n(); }
    std::string name() const override { return inner_.name() + "+offset"; }
    void score(std::span<const Entry> states, std::span<double> out) const override;

private:
    const Heuristic& inner_;
    double offset_;
};

struct BeamConfig {
    std::int64_t width = 1;
    int max_steps = 1000;
    int history_depth = 1;       // 0: no banning; D: ban the last D frontiers (current beam included)
    bool x_trick = false;
    std::uint64_t seed = 0;      // hash seed for dedup and tie-breaking
    std::uint64_t mem_budget_bytes = 4ULL << 30;
    std::string spill_dir;       // empty: system temp directory

    void validate() const;
};

struct BeamStepStats {
    int step = 0;
    std::uint64_t candidates = 0;  // after history filter and dedup
    std::uint64_t beam_size = 0;
    double best_score = 0.0;
};

struct SearchResult {
    bool found = false;
    Word word;                     // apply_word(start, word) == target when found
    int steps = 0;
    std::uint64_t peak_beam = 0;
    std::uint64_t working_set_bytes = 0;
    bool spilled = false;
    std::vector<BeamStepStats> stats;
};

// GraphSpec.x_trick or cfg.x_trick enables pruning.
SearchResult beam_search(const GraphSpec& spec, std::span<const Entry> start, const BeamConfig& cfg,
                         const Heuristic& heuristic);

struct BatchRun {
    std::size_t run = 0;
    std::size_t start_index = 0;
    bool found = false;
    int length = 0;
    double seconds = 0.0;
    std::uint64_t peak_mem_bytes = 0;
    std::string word;
};

struct BatchReport {
    std::vector<BatchRun> runs;
    double success_rate = 0.0;
    int min_length = -1;           // over found runs; -1 when none
    double median_length = -1.0;
};

// Every start is searched `repeats` times; repeat r uses the seed stream
// (cfg.seed, "beam", r).
BatchReport solve_batch(const GraphSpec& spec, const std::vector<std::vector<Entry>>& starts,
                        const BeamConfig& cfg, const Heuristic& heuristic, int repeats);

} // namespace lrx
