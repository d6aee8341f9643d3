#include "lrx/beam.hpp"

#include "lrx/error.hpp"
#include "lrx/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <numeric>

namespace lrx {

void ModelHeuristic::score(std::span<const Entry> states, std::span<double> out) const {
    const std::vector<double> pred = model_.predict_batch(states);
    std::copy(pred.begin(), pred.end(), out.begin());
}

void HammingHeuristic::score(std::span<const Entry> states, std::span<double> out) const {
    const std::size_t n = target_.size();
    const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        const Entry* s = states.data() + static_cast<std::size_t>(i) * n;
        int d = 0;
        for (std::size_t k = 0; k < n; ++k) d += s[k] != target_[k];
        out[static_cast<std::size_t>(i)] = d;
    }
}

void OracleHeuristic::score(std::span<const Entry> states, std::span<double> out) const {
    const auto width = static_cast<std::size_t>(n());
    const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] =
            table_.distance(states.subspan(static_cast<std::size_t>(i) * width, width));
    }
}

void OffsetHeuristic::score(std::span<const Entry> states, std::span<double> out) const {
    inner_.score(states, out);
    for (double& x : out) x += offset_;
}

void BeamConfig::validate() const {
    if (width < 1) throw InvalidArgument("beam width must be >= 1");
    if (max_steps < 1) throw InvalidArgument("step limit must be >= 1");
    if (history_depth < 0) throw InvalidArgument("history depth must be >= 0");
    if (width > static_cast<std::int64_t>(UINT32_MAX / 3)) throw ResourceError("beam width too large");
}

namespace {

// Per-step (parent index, move) arrays. Kept in memory until they outgrow
// their share of the budget, then appended to a scratch file.
class ParentStore {
public:
    ParentStore(std::uint64_t budget, std::string dir) : budget_(budget), dir_(std::move(dir)) {}
    ParentStore(const ParentStore&) = delete;
    ParentStore& operator=(const ParentStore&) = delete;

    ~ParentStore() {
        if (file_) std::fclose(file_);
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }

    bool spilled() const { return file_ != nullptr; }

    void push(std::vector<std::uint32_t> parents, std::vector<std::uint8_t> moves) {
        sizes_.push_back(parents.size());
        bytes_ += parents.size() * (sizeof(std::uint32_t) + 1);
        if (!file_ && bytes_ > budget_) spill_existing();
        if (file_) {
            write(parents, moves);
        } else {
            parents_.push_back(std::move(parents));
            moves_.push_back(std::move(moves));
        }
    }

    // Link of entry `index` in the beam produced at step `step` (1-based).
    std::pair<std::uint32_t, Move> link(std::size_t step, std::uint32_t index) {
        if (!file_) return {parents_[step - 1][index], static_cast<Move>(moves_[step - 1][index])};
        const std::uint64_t base = offsets_[step - 1];
        const std::uint64_t count = sizes_[step - 1];
        std::uint32_t parent = 0;
        std::uint8_t move = 0;
        seek(base + index * sizeof(std::uint32_t));
        if (std::fread(&parent, sizeof parent, 1, file_) != 1) throw ResourceError("parent spill read failed");
        seek(base + count * sizeof(std::uint32_t) + index);
        if (std::fread(&move, 1, 1, file_) != 1) throw ResourceError("parent spill read failed");
        return {parent, static_cast<Move>(move)};
    }

private:
    void open() {
        if (dir_.empty()) {
            file_ = std::tmpfile();
        } else {
            static std::uint64_t counter = 0;
            path_ = (std::filesystem::path(dir_) /
                     ("lrx-parents-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
                      std::to_string(counter++) + ".bin"))
                        .string();
            file_ = std::fopen(path_.c_str(), "w+b");
        }
        if (!file_) throw ResourceError("cannot open a spill file for parent links");
    }

    void spill_existing() {
        open();
        for (std::size_t s = 0; s < parents_.size(); ++s) write(parents_[s], moves_[s]);
        parents_.clear();
        moves_.clear();
    }

    void write(const std::vector<std::uint32_t>& parents, const std::vector<std::uint8_t>& moves) {
        if (std::fseek(file_, 0, SEEK_END) != 0) throw ResourceError("parent spill seek failed");
        offsets_.push_back(static_cast<std::uint64_t>(std::ftell(file_)));
        if (std::fwrite(parents.data(), sizeof(std::uint32_t), parents.size(), file_) != parents.size() ||
            std::fwrite(moves.data(), 1, moves.size(), file_) != moves.size()) {
            throw ResourceError("parent spill write failed");
        }
    }

    void seek(std::uint64_t pos) {
        if (std::fseek(file_, static_cast<long>(pos), SEEK_SET) != 0) throw ResourceError("parent spill seek failed");
    }

    std::uint64_t budget_;
    std::string dir_;
    std::string path_;
    std::FILE* file_ = nullptr;
    std::uint64_t bytes_ = 0;
    std::vector<std::uint64_t> sizes_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::vector<std::uint32_t>> parents_;
    std::vector<std::vector<std::uint8_t>> moves_;
};

bool contains_sorted(const std::vector<std::uint64_t>& sorted, std::uint64_t h) {
    return std::binary_search(sorted.begin(), sorted.end(), h);
}

} // namespace

SearchResult beam_search(const GraphSpec& spec, std::span<const Entry> start, const BeamConfig& cfg,
                         const Heuristic& heuristic) {
    spec.validate();
    cfg.validate();
    if (!is_valid_state(spec, start)) throw InvalidArgument("start state is not valid for the graph");
    if (heuristic.n() != spec.n) throw InvalidArgument("heuristic n does not match the graph");

    const auto n = static_cast<std::size_t>(spec.n);
    const bool prune_x = spec.x_trick || cfg.x_trick;
    const std::vector<Entry> target = target_entries(spec);
    const auto width = static_cast<std::uint64_t>(cfg.width);

    // Candidate buffers dominate: states, hash, score, parent, move, order.
    const std::uint64_t per_candidate = n * sizeof(Entry) + 8 + 8 + 4 + 1 + 8;
    const std::uint64_t working = 3 * width * per_candidate + width * n * sizeof(Entry) +
                                  static_cast<std::uint64_t>(cfg.history_depth) * width * 8;
    if (working > cfg.mem_budget_bytes) {
        throw ResourceError("beam working set of " + std::to_string(working) +
                            " bytes exceeds the memory budget of " + std::to_string(cfg.mem_budget_bytes));
    }

    SearchResult result;
    result.working_set_bytes = working;
    result.peak_beam = 1;
    std::vector<Entry> beam(start.begin(), start.end());
    if (std::equal(start.begin(), start.end(), target.begin())) {
        result.found = true;
        return result;
    }

    ParentStore parents(cfg.mem_budget_bytes - working, cfg.spill_dir);
    std::deque<std::vector<std::uint64_t>> history;
    const auto remember = [&](const std::vector<Entry>& frontier) {
        if (cfg.history_depth == 0) return;
        const std::size_t count = frontier.size() / n;
        std::vector<std::uint64_t> hashes(count);
        for (std::size_t i = 0; i < count; ++i) {
            hashes[i] = hash_state(std::span<const Entry>(frontier.data() + i * n, n), cfg.seed);
        }
        std::sort(hashes.begin(), hashes.end());
        history.push_back(std::move(hashes));
        if (history.size() > static_cast<std::size_t>(cfg.history_depth)) history.pop_front();
    };
    remember(beam);

    std::vector<Entry> cand_states;
    std::vector<std::uint64_t> cand_hash;
    std::vector<std::uint32_t> cand_parent;
    std::vector<std::uint8_t> cand_move;
    std::vector<char> cand_ok;

    std::int64_t found_index = -1;
    int step = 0;
    for (step = 1; step <= cfg.max_steps; ++step) {
        const std::size_t beam_count = beam.size() / n;
        const std::size_t slots = 3 * beam_count;
        cand_states.resize(slots * n);
        cand_hash.resize(slots);
        cand_parent.resize(slots);
        cand_move.resize(slots);
        cand_ok.assign(slots, 0);

        // Expansion into fixed slots 3b + g keeps the candidate order
        // independent of scheduling.
#pragma omp parallel for schedule(static)
        for (std::int64_t bi = 0; bi < static_cast<std::int64_t>(beam_count); ++bi) {
            const auto b = static_cast<std::size_t>(bi);
            const std::span<const Entry> parent(beam.data() + b * n, n);
            std::array<Move, 3> moves{};
            const int count = allowed_moves(parent, prune_x, moves);
            for (int k = 0; k < count; ++k) {
                const Move g = moves[static_cast<std::size_t>(k)];
                const std::size_t slot = 3 * b + static_cast<std::size_t>(g);
                std::span<Entry> child(cand_states.data() + slot * n, n);
                std::copy(parent.begin(), parent.end(), child.begin());
                apply_move_inplace(child, g);
                const std::uint64_t h = hash_state(child, cfg.seed);
                bool banned = false;
                for (const auto& layer : history) banned = banned || contains_sorted(layer, h);
                cand_hash[slot] = h;
                cand_parent[slot] = static_cast<std::uint32_t>(b);
                cand_move[slot] = static_cast<std::uint8_t>(g);
                cand_ok[slot] = banned ? 0 : 1;
            }
        }

        // Target reached? Smallest slot wins.
        for (std::size_t s = 0; s < slots && found_index < 0; ++s) {
            if (cand_ok[s] && std::equal(target.begin(), target.end(), cand_states.begin() + static_cast<std::ptrdiff_t>(s * n))) {
                found_index = static_cast<std::int64_t>(s);
            }
        }
        if (found_index >= 0) break;

        // Within-step dedup by hash, keeping the smallest slot.
        std::vector<std::uint32_t> live;
        live.reserve(slots);
        for (std::size_t s = 0; s < slots; ++s) {
            if (cand_ok[s]) live.push_back(static_cast<std::uint32_t>(s));
        }
        std::stable_sort(live.begin(), live.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return cand_hash[a] < cand_hash[b]; });
        live.erase(std::unique(live.begin(), live.end(),
                               [&](std::uint32_t a, std::uint32_t b) { return cand_hash[a] == cand_hash[b]; }),
                   live.end());
        if (live.empty()) {
            result.stats.push_back({step, 0, 0, 0.0});
            break;
        }

        std::vector<Entry> packed(live.size() * n);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(live.size()); ++i) {
            const auto src = cand_states.begin() + static_cast<std::ptrdiff_t>(live[static_cast<std::size_t>(i)] * n);
            std::copy(src, src + static_cast<std::ptrdiff_t>(n), packed.begin() + i * static_cast<std::ptrdiff_t>(n));
        }
        std::vector<double> scores(live.size());
        heuristic.score(packed, scores);

        // Top-W by (score, hash); hashes are unique after dedup.
        std::vector<std::uint32_t> order(live.size());
        std::iota(order.begin(), order.end(), 0U);
        const auto key_less = [&](std::uint32_t a, std::uint32_t b) {
            if (scores[a] != scores[b]) return scores[a] < scores[b];
            return cand_hash[live[a]] < cand_hash[live[b]];
        };
        const std::size_t keep = std::min<std::size_t>(width, order.size());
        if (keep < order.size()) {
            std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), key_less);
            order.resize(keep);
        }
        std::sort(order.begin(), order.end(), key_less);

        std::vector<Entry> next(keep * n);
        std::vector<std::uint32_t> link_parent(keep);
        std::vector<std::uint8_t> link_move(keep);
        for (std::size_t i = 0; i < keep; ++i) {
            const std::uint32_t s = live[order[i]];
            std::copy(packed.begin() + static_cast<std::ptrdiff_t>(order[i] * n),
                      packed.begin() + static_cast<std::ptrdiff_t>((order[i] + 1) * n),
                      next.begin() + static_cast<std::ptrdiff_t>(i * n));
            link_parent[i] = cand_parent[s];
            link_move[i] = cand_move[s];
        }
        parents.push(std::move(link_parent), std::move(link_move));
        result.stats.push_back({step, static_cast<std::uint64_t>(live.size()), static_cast<std::uint64_t>(keep),
                                scores[order.front()]});
        result.peak_beam = std::max<std::uint64_t>(result.peak_beam, keep);
        beam = std::move(next);
        remember(beam);
    }

    result.spilled = parents.spilled();
    if (found_index < 0) {
        result.steps = std::min(step, cfg.max_steps);
        return result;
    }

    // Walk the parent links back from the winning candidate.
    Word reversed;
    const auto slot = static_cast<std::size_t>(found_index);
    reversed.push_back(static_cast<Move>(cand_move[slot]));
    std::uint32_t index = cand_parent[slot];
    for (int s = step - 1; s >= 1; --s) {
        const auto [parent, move] = parents.link(static_cast<std::size_t>(s), index);
        reversed.push_back(move);
        index = parent;
    }
    result.word.assign(reversed.rbegin(), reversed.rend());
    result.steps = step;
    result.found = true;

    std::vector<Entry> replay(start.begin(), start.end());
    apply_word_inplace(replay, result.word);
    if (replay != target) throw std::logic_error("beam search reconstructed an invalid path");
    return result;
}

BatchReport solve_batch(const GraphSpec& spec, const std::vector<std::vector<Entry>>& starts,
                        const BeamConfig& cfg, const Heuristic& heuristic, int repeats) {
    if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
    BatchReport report;
    std::vector<int> lengths;
    std::size_t run = 0;
    for (int r = 0; r < repeats; ++r) {
        BeamConfig rc = cfg;
        rc.seed = stream_seed(cfg.seed, "beam", static_cast<std::uint64_t>(r));
        for (std::size_t i = 0; i < starts.size(); ++i, ++run) {
            const auto t0 = std::chrono::steady_clock::now();
            const SearchResult res = beam_search(spec, starts[i], rc, heuristic);
            const auto t1 = std::chrono::steady_clock::now();
            BatchRun row;
            row.run = run;
            row.start_index = i;
            row.found = res.found;
            row.length = res.found ? static_cast<int>(res.word.size()) : -1;
            row.seconds = std::chrono::duration<double>(t1 - t0).count();
            row.peak_mem_bytes = res.working_set_bytes;
            row.word = to_string(res.word);
            if (res.found) lengths.push_back(row.length);
            report.runs.push_back(std::move(row));
        }
    }
    report.success_rate = report.runs.empty()
                              ? 0.0
                              : static_cast<double>(lengths.size()) / static_cast<double>(report.runs.size());
    if (!lengths.empty()) {
        std::sort(lengths.begin(), lengths.end());
        report.min_length = lengths.front();
        const std::size_t m = lengths.size();
        report.median_length = m % 2 == 1 ? lengths[m / 2] : 0.5 * (lengths[m / 2 - 1] + lengths[m / 2]);
    }
    return report;
}

} // namespace lrx
