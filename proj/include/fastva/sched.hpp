#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastva/profiles.hpp"

// The two schedulers. Each round decides one offloaded frame (at a chosen
// resolution and server model) plus the frames that buffer during its
// transmission, which are processed locally at the top resolution.
//
// Max-Accuracy maximizes the round's average accuracy; the local side is a
// dynamic program over completion times. Max-Utility maximizes a weighted
// sum of throughput and accuracy; the local side keeps dominance-pruned
// (time, utility, count) triples.

namespace fastva {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Placement { Offload, LocalNpu, Skip };

inline const char* placement_name(Placement p) {
    switch (p) {
        case Placement::Offload: return "offload";
        case Placement::LocalNpu: return "local";
        case Placement::Skip: return "skip";
    }
    return "?";
}

// One frame's schedule entry. Skip carries no model and no resolution.
struct ScheduleDecision {
    std::int64_t frame_index = 0;
    Placement placement = Placement::Skip;
    std::optional<int> model_id;
    std::optional<int> resolution;

    static ScheduleDecision skip(std::int64_t i) { return {i, Placement::Skip, {}, {}}; }
    static ScheduleDecision local(std::int64_t i, int model, int r_max) {
        return {i, Placement::LocalNpu, model, r_max};
    }
    static ScheduleDecision offload(std::int64_t i, int model, int r) {
        return {i, Placement::Offload, model, r};
    }

    bool operator==(const ScheduleDecision&) const = default;
};

struct RoundPlan {
    std::vector<ScheduleDecision> decisions;  // frame-index order
    double round_accuracy_sum = 0.0;          // sum of scheduled accuracies
    double round_utility = 0.0;               // Max-Utility objective, 0 for accuracy plans
    std::int64_t n_local = 0;                 // frames buffered behind the offloaded one
};

// A frame scheduled for local processing: only its arrival matters.
struct LocalFrame {
    std::int64_t index = 0;
    MicroTime arrival_us = 0;
};

// Frames buffered while one transmission of `bits` is in flight:
// floor(S / (B * gamma)) = floor(S * f / B). The second form avoids the
// rounding error of representing gamma itself.
inline std::int64_t buffered_frame_count(std::int64_t bits, const EnvProfile& env) {
    return static_cast<std::int64_t>(
        std::floor(static_cast<double>(bits) * env.frame_rate_fps / env.bandwidth_bps));
}

// The window buffered behind an offloaded frame: frames 1..n_local arriving
// at k*gamma after `base_index`.
inline std::vector<LocalFrame> local_window(std::int64_t base_index, std::int64_t n_local,
                                            const EnvProfile& env) {
    std::vector<LocalFrame> w;
    w.reserve(static_cast<std::size_t>(n_local));
    for (std::int64_t k = 1; k <= n_local; ++k)
        w.push_back({base_index + k, env.arrival_us(base_index + k)});
    return w;
}

// ---------------------------------------------------------------------------
// Max-Accuracy local DP
// ---------------------------------------------------------------------------

// H(k, t): maximum accuracy sum for the first k buffered frames, all meeting
// their own deadlines, with the k-th finishing by t. Internally each row is a
// pruned Pareto list of exact (finish_us, accuracy) points with parent links;
// the public table view samples those lists on a fixed time grid, flooring
// queries onto grid points so a cell never reports accuracy unattainable by
// its time.
class AccDpTable {
public:
    struct Point {
        MicroTime finish_us = 0;
        double acc_sum = 0.0;
        int model_id = -1;   // model that processed this row's frame, -1 for row 0
        int parent = -1;     // index into the previous row's list
    };

    AccDpTable(std::vector<LocalFrame> frames, MicroTime t_idle_us, MicroTime deadline_us,
               MicroTime grid_us)
        : frames_(std::move(frames)),
          t_idle_us_(t_idle_us),
          grid_us_(grid_us > 0 ? grid_us : 1000) {
        t_lo_us_ = frames_.empty() ? t_idle_us_ : frames_.front().arrival_us;
        t_hi_us_ = frames_.empty() ? t_lo_us_ : frames_.back().arrival_us + deadline_us;
        if (t_hi_us_ < t_lo_us_) t_hi_us_ = t_lo_us_;
    }

    std::int64_t n_frames() const { return static_cast<std::int64_t>(frames_.size()); }
    const std::vector<LocalFrame>& frames() const { return frames_; }
    MicroTime t_idle_us() const { return t_idle_us_; }

    std::int64_t n_ticks() const { return (t_hi_us_ - t_lo_us_) / grid_us_ + 1; }
    MicroTime time_at(std::int64_t tick) const { return t_lo_us_ + tick * grid_us_; }

    // Grid cell value: H(k, time_at(tick)).
    double at(std::int64_t k, std::int64_t tick) const { return value_exact(k, time_at(tick)); }

    // H(k, t) for arbitrary t, floored onto the grid.
    double value(std::int64_t k, MicroTime t_us) const {
        if (t_us < t_lo_us_) return kNegInf;
        const std::int64_t tick = std::min((t_us - t_lo_us_) / grid_us_, n_ticks() - 1);
        return value_exact(k, time_at(tick));
    }

    bool forced_skip(std::int64_t k) const {  // k in [1, n_frames]
        return forced_skip_[static_cast<std::size_t>(k)];
    }

    const std::vector<Point>& row(std::int64_t k) const {
        return rows_[static_cast<std::size_t>(k)];
    }

    struct Backtrack {
        // model per window frame, nullopt = skipped
        std::vector<std::optional<int>> model_for_frame;
        double acc_sum = 0.0;
        MicroTime finish_us = 0;  // completion of the last processed frame (t_idle if none)
    };

    // Recover the argmax schedule by walking parent links.
    Backtrack backtrack() const {
        Backtrack bt;
        bt.model_for_frame.assign(frames_.size(), std::nullopt);
        const Point* p = &rows_.back().back();  // pruned rows keep max acc last
        bt.acc_sum = p->acc_sum;
        bt.finish_us = p->finish_us;
        for (std::int64_t k = n_frames(); k >= 1; --k) {
            if (p->model_id >= 0)
                bt.model_for_frame[static_cast<std::size_t>(k - 1)] = p->model_id;
            p = &rows_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p->parent)];
        }
        return bt;
    }

private:
    friend AccDpTable acc_dp_fill(std::vector<LocalFrame>, const std::vector<ModelProfile>&,
                                  const EnvProfile&, MicroTime, MicroTime);

    double value_exact(std::int64_t k, MicroTime t_us) const {
        const auto& r = rows_[static_cast<std::size_t>(k)];
        double best = kNegInf;
        for (const auto& p : r) {
            if (p.finish_us > t_us) break;  // sorted by finish
            best = p.acc_sum;               // acc strictly increasing with finish
        }
        return best;
    }

    std::vector<LocalFrame> frames_;
    MicroTime t_idle_us_;
    MicroTime grid_us_;
    MicroTime t_lo_us_ = 0;
    MicroTime t_hi_us_ = 0;
    std::vector<std::vector<Point>> rows_;
    std::vector<bool> forced_skip_;
};

namespace detail {

// Keep only non-dominated points: sorted by finish time, strictly increasing
// accuracy. Ties resolve to the lower model index, then lower parent.
inline void prune_acc_points(std::vector<AccDpTable::Point>& pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        if (a.finish_us != b.finish_us) return a.finish_us < b.finish_us;
        if (a.acc_sum != b.acc_sum) return a.acc_sum > b.acc_sum;
        if (a.model_id != b.model_id) return a.model_id < b.model_id;
        return a.parent < b.parent;
    });
    std::vector<AccDpTable::Point> kept;
    double last = kNegInf;
    for (const auto& p : pts) {
        if (p.acc_sum > last) {
            kept.push_back(p);
            last = p.acc_sum;
        }
    }
    pts.swap(kept);
}

}  // namespace detail

// Fill the Max-Accuracy table. Row 0 encodes the NPU idle time (the queueing
// point for the first buffered frame); row k extends row k-1 with every local
// model that lets frame k start at max(previous finish, arrival) and still
// meet arrival + deadline. A frame no model can fit is marked as a forced
// skip and its row carries the previous row through unchanged.
inline AccDpTable acc_dp_fill(std::vector<LocalFrame> frames,
                              const std::vector<ModelProfile>& models, const EnvProfile& env,
                              MicroTime t_idle_us, MicroTime grid_us = 1000) {
    AccDpTable table(std::move(frames), t_idle_us, env.deadline_us, grid_us);
    const auto n = table.n_frames();
    table.rows_.assign(static_cast<std::size_t>(n) + 1, {});
    table.forced_skip_.assign(static_cast<std::size_t>(n) + 1, false);
    table.rows_[0] = {AccDpTable::Point{t_idle_us, 0.0, -1, -1}};

    for (std::int64_t k = 1; k <= n; ++k) {
        const auto& frame = table.frames_[static_cast<std::size_t>(k - 1)];
        const MicroTime deadline = frame.arrival_us + env.deadline_us;
        const auto& prev = table.rows_[static_cast<std::size_t>(k - 1)];
        std::vector<AccDpTable::Point> next;
        for (int pi = 0; pi < static_cast<int>(prev.size()); ++pi) {
            const auto& p = prev[static_cast<std::size_t>(pi)];
            for (const auto& m : models) {
                if (!m.local_capable()) continue;
                const MicroTime finish =
                    std::max(p.finish_us, frame.arrival_us) + *m.npu_time_us;
                if (finish > deadline) continue;
                next.push_back({finish, p.acc_sum + m.local_accuracy(), m.model_id, pi});
            }
        }
        if (next.empty()) {
            // Even the fastest model misses this frame's deadline from every
            // reachable state; the frame is skipped and costs no NPU time.
            table.forced_skip_[static_cast<std::size_t>(k)] = true;
            next = prev;
            for (auto& p : next) {
                p.model_id = -1;
                p.parent = static_cast<int>(&p - next.data());
            }
        } else {
            detail::prune_acc_points(next);
        }
        table.rows_[static_cast<std::size_t>(k)] = std::move(next);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Max-Accuracy round
// ---------------------------------------------------------------------------

namespace detail {

struct OffloadChoice {
    int model_id = -1;
    double accuracy = 0.0;
    MicroTime tx_us = 0;
};

// Most accurate server model that returns a result within the remaining
// deadline budget; ties go to the lower model index.
inline std::optional<OffloadChoice> best_server_model(std::int64_t bits,
                                                      const std::vector<ModelProfile>& models,
                                                      const EnvProfile& env, int side_px,
                                                      MicroTime budget_us) {
    const MicroTime tx = tx_time_us(bits, env.bandwidth_bps);
    std::optional<OffloadChoice> best;
    for (const auto& m : models) {
        if (!m.server_capable()) continue;
        if (tx + *m.server_time_us + env.rtt_delay_us > budget_us) continue;
        const double a = m.server_accuracy(side_px);
        if (!best || a > best->accuracy) best = OffloadChoice{m.model_id, a, tx};
    }
    return best;
}

inline const ModelProfile& model_by_id(const std::vector<ModelProfile>& models, int id) {
    for (const auto& m : models)
        if (m.model_id == id) return m;
    throw std::logic_error("unknown model id " + std::to_string(id));
}

}  // namespace detail

// One Max-Accuracy round for the frame at the head of the buffer.
//
// For every ladder resolution with a feasible server model, the candidate
// plan offloads the head frame and runs the DP over the frames that buffer
// during the transmission (never past `last_index`). A local-only candidate
// (the DP over the buffered window, no offload) always competes as well, so
// the scheduler degrades to pure local processing when the network makes
// every offload a bad trade, not only when offloading is infeasible.
// Candidates are ranked by average accuracy per round frame.
inline RoundPlan max_accuracy_round(std::span<const Frame> buffer, std::int64_t last_index,
                                    const std::vector<ModelProfile>& models,
                                    const EnvProfile& env, const Ladder& ladder,
                                    MicroTime npu_free_at_us, MicroTime now_us,
                                    MicroTime grid_us = 1000) {
    if (buffer.empty()) throw std::invalid_argument("max_accuracy_round: empty buffer");
    const Frame& head = buffer.front();

    struct Candidate {
        double avg = kNegInf;
        int model_id = std::numeric_limits<int>::max();
        int side_px = -1;  // -1 marks the local-only candidate
        RoundPlan plan;
    };
    std::optional<Candidate> best;
    auto consider = [&](Candidate c) {
        if (!best || c.avg > best->avg ||
            (c.avg == best->avg && (c.model_id < best->model_id ||
                                    (c.model_id == best->model_id && c.side_px > best->side_px))))
            best = std::move(c);
    };

    // Deadline budget left for the offloaded head frame; equals the full T
    // when the round triggers at its arrival.
    const MicroTime offload_budget = head.arrival_us + env.deadline_us - now_us;

    for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) {
        const int r = *it;
        const std::int64_t bits = head.size_bits(r);
        auto choice = detail::best_server_model(bits, models, env, r, offload_budget);
        if (!choice) continue;

        const std::int64_t n_l =
            std::min(buffered_frame_count(bits, env), last_index - head.index);
        auto window = local_window(head.index, n_l, env);
        const MicroTime t_idle =
            n_l > 0 ? std::max(window.front().arrival_us, npu_free_at_us) : npu_free_at_us;
        auto dp = acc_dp_fill(std::move(window), models, env, t_idle, grid_us);
        auto bt = dp.backtrack();

        Candidate c;
        c.model_id = choice->model_id;
        c.side_px = r;
        c.plan.n_local = n_l;
        c.plan.round_accuracy_sum = choice->accuracy + bt.acc_sum;
        c.avg = c.plan.round_accuracy_sum / static_cast<double>(n_l + 1);
        c.plan.decisions.push_back(ScheduleDecision::offload(head.index, choice->model_id, r));
        for (std::int64_t k = 0; k < n_l; ++k) {
            const auto idx = head.index + 1 + k;
            const auto& m = bt.model_for_frame[static_cast<std::size_t>(k)];
            c.plan.decisions.push_back(m ? ScheduleDecision::local(idx, *m, ladder.back())
                                         : ScheduleDecision::skip(idx));
        }
        consider(std::move(c));
    }

    // Local-only candidate over the buffered window.
    {
        std::vector<LocalFrame> window;
        window.reserve(buffer.size());
        for (const auto& f : buffer) window.push_back({f.index, f.arrival_us});
        const MicroTime t_idle = std::max(window.front().arrival_us, npu_free_at_us);
        auto dp = acc_dp_fill(std::move(window), models, env, t_idle, grid_us);
        auto bt = dp.backtrack();

        Candidate c;
        c.side_px = -1;
        c.plan.n_local = static_cast<std::int64_t>(buffer.size());
        c.plan.round_accuracy_sum = bt.acc_sum;
        c.avg = bt.acc_sum / static_cast<double>(buffer.size());
        for (std::size_t k = 0; k < buffer.size(); ++k) {
            const auto idx = buffer[k].index;
            const auto& m = bt.model_for_frame[k];
            c.plan.decisions.push_back(m ? ScheduleDecision::local(idx, *m, ladder.back())
                                         : ScheduleDecision::skip(idx));
        }
        consider(std::move(c));
    }

    // Re-derive the plan's accuracy sum from its decisions; the DP and the
    // backtrack must agree.
    double check = 0.0;
    for (const auto& d : best->plan.decisions) {
        if (d.placement == Placement::Offload)
            check += detail::model_by_id(models, *d.model_id).server_accuracy(*d.resolution);
        else if (d.placement == Placement::LocalNpu)
            check += detail::model_by_id(models, *d.model_id).local_accuracy();
    }
    if (std::abs(check - best->plan.round_accuracy_sum) >
        1e-9 * std::max(1.0, std::abs(check)))
        throw std::logic_error("max_accuracy_round: backtracked plan does not reproduce DP value");

    return std::move(best->plan);
}

// ---------------------------------------------------------------------------
// Max-Utility round
// ---------------------------------------------------------------------------

// Pareto point of the utility DP: m of the first k frames processed locally,
// utility u, last completion at t.
struct UtilityTriple {
    MicroTime t_us = 0;
    double u = 0.0;
    std::int64_t m = 0;
    int model_id = -1;  // model processing this level's frame, -1 = not processed
    int parent = -1;    // index into the previous level's list
};

// Remove dominated triples: (t', u') dominates (t, u) when t' <= t and
// u' >= u. The survivors sorted by t have strictly increasing u.
inline void prune_dominated(std::vector<UtilityTriple>& list) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
        if (a.t_us != b.t_us) return a.t_us < b.t_us;
        if (a.u != b.u) return a.u > b.u;
        if (a.m != b.m) return a.m < b.m;
        if (a.model_id != b.model_id) return a.model_id < b.model_id;
        return a.parent < b.parent;
    });
    std::vector<UtilityTriple> kept;
    double last = kNegInf;
    for (const auto& t : list) {
        if (t.u > last) {
            kept.push_back(t);
            last = t.u;
        }
    }
    list.swap(kept);
}

// Utility DP over a local window. Levels U(0..n); level k either copies a
// triple (frame k not processed) or extends it with a local model run at the
// top resolution, finishing by the frame's deadline. The throughput term is
// counted per window span: m / (n * gamma) = m * f / n.
class UtilityDp {
public:
    UtilityDp(std::vector<LocalFrame> frames, const std::vector<ModelProfile>& models,
              const EnvProfile& env, double alpha, MicroTime t_idle_us) {
        frames_ = std::move(frames);
        const auto n = static_cast<std::int64_t>(frames_.size());
        levels_.assign(static_cast<std::size_t>(n) + 1, {});
        levels_[0] = {UtilityTriple{t_idle_us, 0.0, 0, -1, -1}};
        const double horizon_rate = env.frame_rate_fps / std::max<std::int64_t>(n, 1);

        for (std::int64_t k = 1; k <= n; ++k) {
            const auto& frame = frames_[static_cast<std::size_t>(k - 1)];
            const MicroTime deadline = frame.arrival_us + env.deadline_us;
            const auto& prev = levels_[static_cast<std::size_t>(k - 1)];
            std::vector<UtilityTriple> next;
            for (int pi = 0; pi < static_cast<int>(prev.size()); ++pi) {
                const auto& tr = prev[static_cast<std::size_t>(pi)];
                next.push_back({tr.t_us, tr.u, tr.m, -1, pi});  // no processing
                for (const auto& model : models) {
                    if (!model.local_capable()) continue;
                    const MicroTime t2 =
                        std::max(tr.t_us, frame.arrival_us) + *model.npu_time_us;
                    if (t2 > deadline) continue;
                    const double md = static_cast<double>(tr.m);
                    const double avg = md / (md + 1.0) * (tr.u - md * horizon_rate) +
                                       alpha * model.local_accuracy() / (md + 1.0);
                    next.push_back(
                        {t2, avg + (md + 1.0) * horizon_rate, tr.m + 1, model.model_id, pi});
                }
            }
            prune_dominated(next);
            levels_[static_cast<std::size_t>(k)] = std::move(next);
        }
    }

    const std::vector<UtilityTriple>& level(std::int64_t k) const {
        return levels_[static_cast<std::size_t>(k)];
    }
    std::int64_t n_frames() const { return static_cast<std::int64_t>(frames_.size()); }
    const std::vector<LocalFrame>& frames() const { return frames_; }

    struct Backtrack {
        std::vector<std::optional<int>> model_for_frame;
        double utility = 0.0;
        std::int64_t processed = 0;
    };

    Backtrack backtrack() const {
        Backtrack bt;
        bt.model_for_frame.assign(frames_.size(), std::nullopt);
        const auto& last = levels_.back();
        // Max utility; pruned lists keep it last. Tie-break is inherent: one
        // survivor per utility value.
        const UtilityTriple* p = &last.back();
        bt.utility = p->u;
        bt.processed = p->m;
        for (std::int64_t k = n_frames(); k >= 1; --k) {
            if (p->model_id >= 0)
                bt.model_for_frame[static_cast<std::size_t>(k - 1)] = p->model_id;
            p = &levels_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p->parent)];
        }
        return bt;
    }

private:
    std::vector<LocalFrame> frames_;
    std::vector<std::vector<UtilityTriple>> levels_;
};

// One Max-Utility round. The offload phase picks (resolution, server model)
// maximizing B/S + alpha * a(j, r) subject to the deadline; the buffered
// frames then run through the utility DP. With no feasible offload pair the
// whole buffered window runs through the DP instead.
inline RoundPlan max_utility_round(std::span<const Frame> buffer, std::int64_t last_index,
                                   const std::vector<ModelProfile>& models, const EnvProfile& env,
                                   const Ladder& ladder, double alpha, MicroTime npu_free_at_us,
                                   MicroTime now_us) {
    if (buffer.empty()) throw std::invalid_argument("max_utility_round: empty buffer");
    const Frame& head = buffer.front();
    const MicroTime offload_budget = head.arrival_us + env.deadline_us - now_us;

    struct OffloadPick {
        double score = kNegInf;
        int model_id = std::numeric_limits<int>::max();
        int side_px = -1;
        std::int64_t bits = 0;
    };
    std::optional<OffloadPick> pick;
    for (const auto& m : models) {
        if (!m.server_capable()) continue;
        for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) {
            const int r = *it;
            const std::int64_t bits = head.size_bits(r);
            if (tx_time_us(bits, env.bandwidth_bps) + *m.server_time_us + env.rtt_delay_us >
                offload_budget)
                continue;
            const double score =
                env.bandwidth_bps / static_cast<double>(bits) + alpha * m.server_accuracy(r);
            if (!pick || score > pick->score ||
                (score == pick->score &&
                 (m.model_id < pick->model_id ||
                  (m.model_id == pick->model_id && r > pick->side_px))))
                pick = OffloadPick{score, m.model_id, r, bits};
        }
    }

    RoundPlan plan;
    std::vector<LocalFrame> window;
    MicroTime t_idle = npu_free_at_us;
    if (pick) {
        const std::int64_t n_l =
            std::min(buffered_frame_count(pick->bits, env), last_index - head.index);
        plan.n_local = n_l;
        plan.decisions.push_back(
            ScheduleDecision::offload(head.index, pick->model_id, pick->side_px));
        window = local_window(head.index, n_l, env);
        if (n_l > 0) t_idle = std::max(window.front().arrival_us, npu_free_at_us);
        plan.round_utility = pick->score;
        plan.round_accuracy_sum =
            detail::model_by_id(models, pick->model_id).server_accuracy(pick->side_px);
    } else {
        window.reserve(buffer.size());
        for (const auto& f : buffer) window.push_back({f.index, f.arrival_us});
        plan.n_local = static_cast<std::int64_t>(buffer.size());
        t_idle = std::max(window.front().arrival_us, npu_free_at_us);
    }

    if (!window.empty()) {
        UtilityDp dp(window, models, env, alpha, t_idle);
        auto bt = dp.backtrack();
        plan.round_utility += bt.utility;

        // The recovered schedule must reproduce the recorded utility.
        double acc = 0.0;
        for (const auto& m : bt.model_for_frame)
            if (m) acc += detail::model_by_id(models, *m).local_accuracy();
        const double recomputed =
            bt.processed == 0
                ? 0.0
                : static_cast<double>(bt.processed) * env.frame_rate_fps /
                          static_cast<double>(dp.n_frames()) +
                      alpha * acc / static_cast<double>(bt.processed);
        if (std::abs(recomputed - bt.utility) > 1e-9 * std::max(1.0, std::abs(bt.utility)))
            throw std::logic_error("max_utility_round: backtracked schedule does not reproduce u");

        for (std::size_t k = 0; k < window.size(); ++k) {
            const auto idx = window[k].index;
            const auto& m = bt.model_for_frame[k];
            if (m) {
                plan.decisions.push_back(ScheduleDecision::local(idx, *m, ladder.back()));
                plan.round_accuracy_sum += detail::model_by_id(models, *m).local_accuracy();
            } else {
                plan.decisions.push_back(ScheduleDecision::skip(idx));
            }
        }
    }
    return plan;
}

// Utility of a committed plan: throughput over the plan's span plus the
// weighted mean accuracy, zero when nothing is processed.
inline double round_utility(const RoundPlan& plan, const EnvProfile& env, double alpha) {
    if (plan.decisions.empty()) return 0.0;
    std::int64_t processed = 0;
    for (const auto& d : plan.decisions)
        if (d.placement != Placement::Skip) ++processed;
    const double n = static_cast<double>(plan.decisions.size());
    const double throughput = static_cast<double>(processed) * env.frame_rate_fps / n;
    if (processed == 0) return 0.0;
    return throughput + alpha * plan.round_accuracy_sum / static_cast<double>(processed);
}

}  // namespace fastva
