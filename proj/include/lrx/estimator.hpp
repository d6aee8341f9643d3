#pragma once

// One-hidden-layer ReLU perceptron over one-hot permutation matrices, trained
// by supervised regression on walk labels and refined by clipped Bellman
// targets (the modified DQN loop).

#include "lrx/graph_space.hpp"
#include "lrx/walks.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lrx {

struct ModelConfig {
    int hidden_width = 128;
    int epochs_warmup = 50;
    int epochs_dqn = 50;
    int batch_size = 256;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    bool sgd = false;
    std::uint64_t seed = 0;

    void validate() const;
};

// Entry (i*n + s[i]) = 1, everything else 0.
std::vector<double> encode_state(std::span<const Entry> state);

class DistanceEstimator {
public:
    DistanceEstimator() = default;

    // Weights uniform in +-1/sqrt(fan_in), drawn from the seed.
    DistanceEstimator(int n, int hidden_width, std::uint64_t seed);

    int n() const { return n_; }
    int hidden_width() const { return hidden_; }
    std::uint64_t seed() const { return seed_; }

    double predict(std::span<const Entry> state) const;
    // `states` is flat, n entries per state.
    std::vector<double> predict_batch(std::span<const Entry> states) const;
    std::vector<double> predict_batch(const std::vector<std::vector<Entry>>& states) const;

    // Flat parameter vector: W1 (n*n x H, input-major), b1 (H), W2 (H), b2 (1).
    std::span<const double> parameters() const { return theta_; }
    std::span<double> parameters() { return theta_; }
    std::size_t parameter_count() const { return theta_.size(); }

    // Offsets of W1, b1, W2, b2 inside parameters(), plus the end.
    std::array<std::size_t, 5> tensor_offsets() const;

    // Summed squared error sum_i (f(s_i) - t_i)^2 and its gradient.
    double loss_and_gradient(std::span<const Entry> states, std::span<const double> targets,
                             std::span<double> grad) const;
    double loss(std::span<const Entry> states, std::span<const double> targets) const;

    std::string training_meta_json = "{}";

    // Versioned JSON checkpoint. Loading rejects a version or n mismatch
    // (expected_n < 0 accepts any n).
    std::string to_json() const;
    static DistanceEstimator from_json(std::string_view text, int expected_n = -1);
    void save(const std::string& path) const;
    static DistanceEstimator load(const std::string& path, int expected_n = -1);

    bool operator==(const DistanceEstimator&) const = default;

private:
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return static_cast<std::size_t>(n_ * n_) * hidden_; }
    std::size_t w2() const { return b1() + static_cast<std::size_t>(hidden_); }
    std::size_t b2() const { return w2() + static_cast<std::size_t>(hidden_); }

    int n_ = 0;
    int hidden_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<double> theta_;
};

struct TrainReport {
    double initial_loss = 0.0;            // full-set mean squared error before training
    std::vector<double> epoch_loss;       // full-set mean squared error after each epoch
};

// Minibatch regression epochs on (states, targets). Deterministic for a
// fixed seed regardless of thread count: gradients are accumulated over a
// fixed number of shards and summed in shard order.
TrainReport fit_regression(DistanceEstimator& est, std::span<const Entry> states,
                           std::span<const double> targets, const ModelConfig& cfg, int epochs,
                           std::uint64_t stream);

// Warm-up: regress the walk labels k.
DistanceEstimator train_warmup(const TrainingSet& ts, const ModelConfig& cfg, TrainReport* report = nullptr);

// Targets min(k, max(0, 1 + min over all three neighbors of f)), computed from
// `frozen`; the pair (target, 0) always gets 0.
std::vector<double> dqn_targets(const DistanceEstimator& frozen, const TrainingSet& ts);

// cfg.epochs_dqn epochs; each regenerates walks from its own seed stream,
// freezes a copy of the estimator, builds targets and trains one pass.
DistanceEstimator train_dqn(const GraphSpec& spec, DistanceEstimator est, const ModelConfig& cfg,
                            const WalkConfig& walk_cfg, TrainReport* report = nullptr);

struct GradientCheck {
    double max_rel_error = 0.0;
    std::array<double, 4> per_tensor{}; // W1, b1, W2, b2
    double gradient_norm = 0.0;
};

// Analytic gradient of the summed squared error vs central differences with
// step 1e-5; relative error |a - f| / max(|a| + |f|, 1e-7).
GradientCheck gradient_check(const DistanceEstimator& est, std::span<const Entry> states,
                             std::span<const double> targets);

} // namespace lrx
