#include "lrx/estimator.hpp"

#include "lrx/error.hpp"
#include "lrx/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lrx {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr std::size_t kGradShards = 16;

} // namespace

void ModelConfig::validate() const {
    if (hidden_width < 1) throw InvalidArgument("hidden width must be >= 1");
    if (!(lr > 0.0)) throw InvalidArgument("learning rate must be > 0");
    if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
    if (epochs_warmup < 0 || epochs_dqn < 0) throw InvalidArgument("epoch counts must be >= 0");
}

std::vector<double> encode_state(std::span<const Entry> state) {
    const std::size_t n = state.size();
    std::vector<double> x(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (state[i] >= n) throw InvalidArgument("state entry out of range");
        x[i * n + state[i]] = 1.0;
    }
    return x;
}

DistanceEstimator::DistanceEstimator(int n, int hidden_width, std::uint64_t seed)
    : n_(n), hidden_(hidden_width), seed_(seed) {
    if (n < 2) throw InvalidArgument("estimator needs n >= 2");
    if (hidden_width < 1) throw InvalidArgument("hidden width must be >= 1");
    theta_.assign(b2() + 1, 0.0);
    SplitMix64 rng(stream_seed(seed, "weights"));
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(n * n));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_width));
    for (std::size_t i = 0; i < w2(); ++i) theta_[i] = bound1 * (2.0 * rng.uniform() - 1.0);
    for (std::size_t i = w2(); i < theta_.size(); ++i) theta_[i] = bound2 * (2.0 * rng.uniform() - 1.0);
}

std::array<std::size_t, 5> DistanceEstimator::tensor_offsets() const {
    return {w1(), b1(), w2(), b2(), theta_.size()};
}

namespace {

// Hidden pre-activations for a one-hot input: b1 + the n active rows of W1.
void hidden_layer(std::span<const double> theta, int n, int hidden, std::size_t b1,
                  std::span<const Entry> state, double* h) {
    const auto H = static_cast<std::size_t>(hidden);
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(b1),
              theta.begin() + static_cast<std::ptrdiff_t>(b1 + H), h);
    for (int i = 0; i < n; ++i) {
        const double* row = theta.data() + (static_cast<std::size_t>(i * n) + state[static_cast<std::size_t>(i)]) * H;
        for (std::size_t j = 0; j < H; ++j) h[j] += row[j];
    }
}

} // namespace

double DistanceEstimator::predict(std::span<const Entry> state) const {
    if (static_cast<int>(state.size()) != n_) throw InvalidArgument("state size does not match estimator n");
    std::vector<double> h(static_cast<std::size_t>(hidden_));
    hidden_layer(theta_, n_, hidden_, b1(), state, h.data());
    double f = theta_[b2()];
    const double* v = theta_.data() + w2();
    for (std::size_t j = 0; j < h.size(); ++j) f += v[j] * std::max(h[j], 0.0);
    return f;
}

std::vector<double> DistanceEstimator::predict_batch(std::span<const Entry> states) const {
    const auto n = static_cast<std::size_t>(n_);
    if (states.size() % n != 0) throw InvalidArgument("batch size is not a multiple of n");
    const auto count = static_cast<std::int64_t>(states.size() / n);
    std::vector<double> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = predict(states.subspan(static_cast<std::size_t>(i) * n, n));
    }
    return out;
}

std::vector<double> DistanceEstimator::predict_batch(const std::vector<std::vector<Entry>>& states) const {
    std::vector<double> out(states.size());
    const auto count = static_cast<std::int64_t>(states.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = predict(states[static_cast<std::size_t>(i)]);
    }
    return out;
}

namespace {

// Accumulates d/dtheta of scale * sum (f - t)^2 over [begin, end).
double accumulate_gradient(std::span<const double> theta, int n, int hidden, std::size_t b1,
                           std::size_t w2, std::size_t b2, std::span<const Entry> states,
                           std::span<const double> targets, std::size_t begin, std::size_t end,
                           double scale, double* grad) {
    const auto H = static_cast<std::size_t>(hidden);
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> h(H);
    double loss = 0.0;
    for (std::size_t s = begin; s < end; ++s) {
        const auto state = states.subspan(s * un, un);
        hidden_layer(theta, n, hidden, b1, state, h.data());
        double f = theta[b2];
        for (std::size_t j = 0; j < H; ++j) f += theta[w2 + j] * std::max(h[j], 0.0);
        const double err = f - targets[s];
        loss += err * err;
        const double e = 2.0 * err * scale;
        grad[b2] += e;
        for (std::size_t j = 0; j < H; ++j) {
            if (h[j] <= 0.0) continue;
            grad[w2 + j] += e * h[j];
            const double g = e * theta[w2 + j];
            grad[b1 + j] += g;
            for (std::size_t i = 0; i < un; ++i) grad[(i * un + state[i]) * H + j] += g;
        }
    }
    return loss;
}

// Fixed shard partition, shard results summed in order: independent of the
// number of threads.
double sharded_gradient(const DistanceEstimator& est, std::span<const Entry> states,
                        std::span<const double> targets, double scale, std::span<double> grad,
                        std::vector<std::vector<double>>& shard_buffers) {
    const std::size_t count = targets.size();
    const std::size_t shards = std::min(kGradShards, std::max<std::size_t>(count, 1));
    const auto offsets = est.tensor_offsets();
    const std::size_t params = offsets[4];
    shard_buffers.resize(shards);
    std::vector<double> losses(shards, 0.0);
#pragma omp parallel for schedule(static, 1)
    for (std::int64_t si = 0; si < static_cast<std::int64_t>(shards); ++si) {
        const auto s = static_cast<std::size_t>(si);
        auto& buf = shard_buffers[s];
        buf.assign(params, 0.0);
        const std::size_t begin = count * s / shards;
        const std::size_t end = count * (s + 1) / shards;
        losses[s] = accumulate_gradient(est.parameters(), est.n(), est.hidden_width(), offsets[1],
                                        offsets[2], offsets[3], states, targets, begin, end, scale,
                                        buf.data());
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t s = 0; s < shards; ++s) {
        loss += losses[s];
        for (std::size_t p = 0; p < params; ++p) grad[p] += shard_buffers[s][p];
    }
    return loss;
}

void check_batch(const DistanceEstimator& est, std::span<const Entry> states, std::span<const double> targets) {
    if (states.size() != targets.size() * static_cast<std::size_t>(est.n())) {
        throw InvalidArgument("states and targets disagree in length");
    }
}

} // namespace

double DistanceEstimator::loss_and_gradient(std::span<const Entry> states, std::span<const double> targets,
                                            std::span<double> grad) const {
    check_batch(*this, states, targets);
    if (grad.size() != theta_.size()) throw InvalidArgument("gradient buffer has the wrong size");
    std::vector<std::vector<double>> buffers;
    return sharded_gradient(*this, states, targets, 1.0, grad, buffers);
}

double DistanceEstimator::loss(std::span<const Entry> states, std::span<const double> targets) const {
    check_batch(*this, states, targets);
    const std::vector<double> pred = predict_batch(states);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - targets[i];
        total += e * e;
    }
    return total;
}

std::string DistanceEstimator::to_json() const {
    const auto H = static_cast<std::size_t>(hidden_);
    const auto inputs = static_cast<std::size_t>(n_ * n_);
    nlohmann::json w1_rows = nlohmann::json::array();
    for (std::size_t j = 0; j < H; ++j) {
        std::vector<double> row(inputs);
        for (std::size_t i = 0; i < inputs; ++i) row[i] = theta_[i * H + j];
        w1_rows.push_back(std::move(row));
    }
    nlohmann::json doc;
    doc["version"] = kCheckpointVersion;
    doc["n"] = n_;
    doc["hidden_width"] = hidden_;
    doc["activation"] = "relu";
    doc["weights"] = nlohmann::json::array(
        {w1_rows, std::vector<double>(theta_.begin() + static_cast<std::ptrdiff_t>(b1()),
                                      theta_.begin() + static_cast<std::ptrdiff_t>(w2())),
         std::vector<double>(theta_.begin() + static_cast<std::ptrdiff_t>(w2()),
                             theta_.begin() + static_cast<std::ptrdiff_t>(b2())),
         std::vector<double>{theta_[b2()]}});
    doc["seed"] = seed_;
    doc["training_meta"] = nlohmann::json::parse(training_meta_json);
    return doc.dump();
}

DistanceEstimator DistanceEstimator::from_json(std::string_view text, int expected_n) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed checkpoint: ") + e.what());
    }
    if (!doc.contains("version") || doc["version"] != kCheckpointVersion) {
        throw InvalidArgument("unsupported checkpoint version");
    }
    try {
        const int n = doc.at("n").get<int>();
        if (expected_n >= 0 && n != expected_n) {
            throw InvalidArgument("checkpoint n = " + std::to_string(n) + " does not match n = " +
                                  std::to_string(expected_n));
        }
        if (doc.at("activation") != "relu") throw InvalidArgument("unsupported activation");
        DistanceEstimator est(n, doc.at("hidden_width").get<int>(), doc.at("seed").get<std::uint64_t>());
        const auto& w = doc.at("weights");
        const auto H = static_cast<std::size_t>(est.hidden_);
        const auto inputs = static_cast<std::size_t>(n * n);
        const auto& rows = w.at(0);
        const auto b1v = w.at(1).get<std::vector<double>>();
        const auto w2v = w.at(2).get<std::vector<double>>();
        const auto b2v = w.at(3).get<std::vector<double>>();
        if (w.size() != 4 || rows.size() != H || b1v.size() != H || w2v.size() != H || b2v.size() != 1) {
            throw InvalidArgument("checkpoint weight shapes do not match");
        }
        for (std::size_t j = 0; j < H; ++j) {
            const auto row = rows[j].get<std::vector<double>>();
            if (row.size() != inputs) throw InvalidArgument("checkpoint weight shapes do not match");
            for (std::size_t i = 0; i < inputs; ++i) est.theta_[i * H + j] = row[i];
        }
        std::copy(b1v.begin(), b1v.end(), est.theta_.begin() + static_cast<std::ptrdiff_t>(est.b1()));
        std::copy(w2v.begin(), w2v.end(), est.theta_.begin() + static_cast<std::ptrdiff_t>(est.w2()));
        est.theta_[est.b2()] = b2v[0];
        if (doc.contains("training_meta")) est.training_meta_json = doc["training_meta"].dump();
        for (double x : est.theta_) {
            if (!std::isfinite(x)) throw InvalidArgument("checkpoint contains non-finite weights");
        }
        return est;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed checkpoint: ") + e.what());
    }
}

void DistanceEstimator::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write checkpoint: " + path);
    out << to_json() << '\n';
}

DistanceEstimator DistanceEstimator::load(const std::string& path, int expected_n) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read checkpoint: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str(), expected_n);
}

TrainReport fit_regression(DistanceEstimator& est, std::span<const Entry> states,
                           std::span<const double> targets, const ModelConfig& cfg, int epochs,
                           std::uint64_t stream) {
    cfg.validate();
    check_batch(est, states, targets);
    if (targets.empty()) throw InvalidArgument("empty training set");
    const auto n = static_cast<std::size_t>(est.n());
    const std::size_t count = targets.size();
    const std::size_t params = est.parameter_count();

    TrainReport report;
    report.initial_loss = est.loss(states, targets) / static_cast<double>(count);

    std::vector<double> grad(params), m(params, 0.0), v(params, 0.0);
    std::vector<std::vector<double>> buffers;
    std::vector<std::size_t> order(count);
    std::vector<Entry> batch_states;
    std::vector<double> batch_targets;
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    double beta1_t = 1.0, beta2_t = 1.0;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        SplitMix64 rng(stream_seed(stream, "shuffle", static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        for (std::size_t start = 0; start < count; start += batch) {
            const std::size_t end = std::min(count, start + batch);
            batch_states.clear();
            batch_targets.clear();
            for (std::size_t k = start; k < end; ++k) {
                const std::size_t s = order[k];
                batch_states.insert(batch_states.end(), states.begin() + static_cast<std::ptrdiff_t>(s * n),
                                    states.begin() + static_cast<std::ptrdiff_t>((s + 1) * n));
                batch_targets.push_back(targets[s]);
            }
            sharded_gradient(est, batch_states, batch_targets, 1.0 / static_cast<double>(end - start), grad,
                             buffers);
            auto theta = est.parameters();
            if (cfg.sgd) {
                for (std::size_t p = 0; p < params; ++p) theta[p] -= cfg.lr * grad[p];
                continue;
            }
            beta1_t *= cfg.beta1;
            beta2_t *= cfg.beta2;
            const double c1 = 1.0 / (1.0 - beta1_t);
            const double c2 = 1.0 / (1.0 - beta2_t);
            for (std::size_t p = 0; p < params; ++p) {
                m[p] = cfg.beta1 * m[p] + (1.0 - cfg.beta1) * grad[p];
                v[p] = cfg.beta2 * v[p] + (1.0 - cfg.beta2) * grad[p] * grad[p];
                theta[p] -= cfg.lr * (m[p] * c1) / (std::sqrt(v[p] * c2) + cfg.adam_eps);
            }
        }
        report.epoch_loss.push_back(est.loss(states, targets) / static_cast<double>(count));
    }
    return report;
}

DistanceEstimator train_warmup(const TrainingSet& ts, const ModelConfig& cfg, TrainReport* report) {
    cfg.validate();
    if (ts.size() == 0) throw InvalidArgument("empty training set");
    DistanceEstimator est(ts.spec.n, cfg.hidden_width, stream_seed(cfg.seed, "init"));
    const std::vector<double> targets(ts.labels.begin(), ts.labels.end());
    TrainReport r = fit_regression(est, ts.states, targets, cfg, cfg.epochs_warmup, stream_seed(cfg.seed, "warmup"));
    if (report) *report = std::move(r);
    return est;
}

std::vector<double> dqn_targets(const DistanceEstimator& frozen, const TrainingSet& ts) {
    const auto n = static_cast<std::size_t>(ts.spec.n);
    if (frozen.n() != ts.spec.n) throw InvalidArgument("estimator n does not match the training set");
    const auto count = static_cast<std::int64_t>(ts.size());
    std::vector<double> out(ts.size());
#pragma omp parallel
    {
        std::vector<Entry> next(n);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            const auto s = ts.state(static_cast<std::size_t>(i));
            const double k = ts.labels[static_cast<std::size_t>(i)];
            double best = std::numeric_limits<double>::infinity();
            for (Move g : kMoves) {
                std::copy(s.begin(), s.end(), next.begin());
                apply_move_inplace(next, g);
                best = std::min(best, frozen.predict(next));
            }
            out[static_cast<std::size_t>(i)] = std::min(k, std::max(0.0, 1.0 + best));
        }
    }
    return out;
}

DistanceEstimator train_dqn(const GraphSpec& spec, DistanceEstimator est, const ModelConfig& cfg,
                            const WalkConfig& walk_cfg, TrainReport* report) {
    cfg.validate();
    if (est.n() != spec.n) throw InvalidArgument("estimator n does not match the graph");
    TrainReport total;
    for (int epoch = 0; epoch < cfg.epochs_dqn; ++epoch) {
        WalkConfig wc = walk_cfg;
        wc.seed = stream_seed(walk_cfg.seed, "dqn-walks", static_cast<std::uint64_t>(epoch));
        const TrainingSet ts = generate_walks(spec, wc);
        const DistanceEstimator frozen = est;
        const std::vector<double> targets = dqn_targets(frozen, ts);
        const TrainReport r = fit_regression(est, ts.states, targets, cfg, 1,
                                             stream_seed(cfg.seed, "dqn", static_cast<std::uint64_t>(epoch)));
        if (epoch == 0) total.initial_loss = r.initial_loss;
        total.epoch_loss.push_back(r.epoch_loss.back());
    }
    if (report) *report = std::move(total);
    return est;
}

GradientCheck gradient_check(const DistanceEstimator& est, std::span<const Entry> states,
                             std::span<const double> targets) {
    check_batch(est, states, targets);
    if (targets.empty()) throw InvalidArgument("gradient check needs a non-empty sample");
    constexpr double h = 1e-5;
    const std::size_t params = est.parameter_count();
    std::vector<double> analytic(params);
    est.loss_and_gradient(states, targets, analytic);

    std::vector<double> numeric(params);
#pragma omp parallel
    {
        DistanceEstimator probe = est;
#pragma omp for schedule(static)
        for (std::int64_t pi = 0; pi < static_cast<std::int64_t>(params); ++pi) {
            const auto p = static_cast<std::size_t>(pi);
            auto theta = probe.parameters();
            const double saved = theta[p];
            theta[p] = saved + h;
            const double plus = probe.loss(states, targets);
            theta[p] = saved - h;
            const double minus = probe.loss(states, targets);
            theta[p] = saved;
            numeric[p] = (plus - minus) / (2.0 * h);
        }
    }

    GradientCheck out;
    const auto offsets = est.tensor_offsets();
    double norm = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
        for (std::size_t p = offsets[t]; p < offsets[t + 1]; ++p) {
            const double rel =
                std::abs(analytic[p] - numeric[p]) / std::max(std::abs(analytic[p]) + std::abs(numeric[p]), 1e-7);
            out.per_tensor[t] = std::max(out.per_tensor[t], rel);
            norm += analytic[p] * analytic[p];
        }
    }
    out.max_rel_error = *std::max_element(out.per_tensor.begin(), out.per_tensor.end());
    out.gradient_norm = std::sqrt(norm);
    return out;
}

} // namespace lrx
