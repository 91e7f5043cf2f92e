#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fastva/profiles.hpp"
#include "fastva/replay.hpp"
#include "fastva/sched.hpp"

// Comparison policies: Offload (everything goes to the server), Local
// (everything runs on the NPU), a simplified DeepDecision that fixes one
// (placement, model, resolution) per time window, and the exhaustive Optimal
// oracle used as the correctness bound on small instances.

namespace fastva {

enum class PolicyId {
    Offload,
    Local,
    DeepDecision,
    OptimalAccuracy,
    OptimalUtility,
    MaxAccuracy,
    MaxUtility,
};

inline const std::vector<std::pair<PolicyId, std::string>>& policy_names() {
    static const std::vector<std::pair<PolicyId, std::string>> names = {
        {PolicyId::Offload, "Offload"},
        {PolicyId::Local, "Local"},
        {PolicyId::DeepDecision, "DeepDecision"},
        {PolicyId::OptimalAccuracy, "OptimalAccuracy"},
        {PolicyId::OptimalUtility, "OptimalUtility"},
        {PolicyId::MaxAccuracy, "MaxAccuracy"},
        {PolicyId::MaxUtility, "MaxUtility"},
    };
    return names;
}

inline std::string policy_name(PolicyId id) {
    for (const auto& [p, n] : policy_names())
        if (p == id) return n;
    return "?";
}

inline PolicyId parse_policy(const std::string& name) {
    for (const auto& [p, n] : policy_names())
        if (n == name) return p;
    std::string valid;
    for (const auto& [p, n] : policy_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown policy '" + name + "', valid: " + valid);
}

enum class Objective { Accuracy, Utility };

// ---------------------------------------------------------------------------
// Offload
// ---------------------------------------------------------------------------

// Every frame is offloaded. A frame may use any resolution that transmits
// within one frame interval (the per-frame bandwidth budget) and has a server
// model that returns in time; among those the most accurate (model,
// resolution) pair wins. No pair feasible means the frame is dropped.
inline std::vector<ScheduleDecision> offload_policy(std::span<const Frame> frames,
                                                    const std::vector<ModelProfile>& models,
                                                    const EnvProfile& env, const Ladder& ladder,
                                                    const BandwidthModel* bw = nullptr) {
    std::vector<ScheduleDecision> decisions;
    decisions.reserve(frames.size());
    for (const auto& frame : frames) {
        const double bps = bw ? bw->at(frame.arrival_us) : env.bandwidth_bps;
        struct Pick {
            double accuracy;
            int model_id;
            int side_px;
        };
        std::optional<Pick> best;
        for (int r : ladder) {
            const std::int64_t bits = frame.size_bits(r);
            const MicroTime tx = tx_time_us(bits, bps);
            if (static_cast<double>(tx) > env.frame_interval_us()) continue;
            for (const auto& m : models) {
                if (!m.server_capable()) continue;
                if (tx + *m.server_time_us + env.rtt_delay_us > env.deadline_us) continue;
                const double a = m.server_accuracy(r);
                if (!best || a > best->accuracy ||
                    (a == best->accuracy && (m.model_id < best->model_id ||
                                             (m.model_id == best->model_id && r > best->side_px))))
                    best = Pick{a, m.model_id, r};
            }
        }
        decisions.push_back(best ? ScheduleDecision::offload(frame.index, best->model_id,
                                                             best->side_px)
                                 : ScheduleDecision::skip(frame.index));
    }
    return decisions;
}

// ---------------------------------------------------------------------------
// Local
// ---------------------------------------------------------------------------

// All frames run on the NPU at the top resolution; the accuracy DP picks the
// model per frame.
inline std::vector<ScheduleDecision> local_policy(std::span<const Frame> frames,
                                                  const std::vector<ModelProfile>& models,
                                                  const EnvProfile& env, const Ladder& ladder,
                                                  MicroTime npu_free_at_us = 0,
                                                  MicroTime grid_us = 1000) {
    std::vector<LocalFrame> window;
    window.reserve(frames.size());
    for (const auto& f : frames) window.push_back({f.index, f.arrival_us});
    const MicroTime t_idle =
        window.empty() ? npu_free_at_us : std::max(window.front().arrival_us, npu_free_at_us);
    auto dp = acc_dp_fill(std::move(window), models, env, t_idle, grid_us);
    auto bt = dp.backtrack();

    std::vector<ScheduleDecision> decisions;
    decisions.reserve(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const auto& m = bt.model_for_frame[k];
        decisions.push_back(m ? ScheduleDecision::local(frames[k].index, *m, ladder.back())
                              : ScheduleDecision::skip(frames[k].index));
    }
    return decisions;
}

// ---------------------------------------------------------------------------
// DeepDecision (simplified)
// ---------------------------------------------------------------------------

namespace detail {

inline double window_objective(std::span<const FrameOutcome> outcomes, const EnvProfile& env,
                               Objective objective, double alpha) {
    double acc = 0.0;
    std::int64_t met = 0;
    for (const auto& o : outcomes) {
        acc += o.scored_accuracy;
        if (o.met_deadline) ++met;
    }
    const double n = static_cast<double>(outcomes.size());
    if (objective == Objective::Accuracy) return acc / n;
    const double throughput = static_cast<double>(met) * env.frame_rate_fps / n;
    return throughput + (met > 0 ? alpha * acc / static_cast<double>(met) : 0.0);
}

}  // namespace detail

// Time is cut into equal windows; at each boundary every uniform
// (placement, model, resolution) combination is replayed over the window's
// frames and the best objective wins. Local runs are always at the top
// resolution. Resource state carries across windows.
inline std::vector<ScheduleDecision> deepdecision_policy(
    std::span<const Frame> frames, const std::vector<ModelProfile>& models, const EnvProfile& env,
    const Ladder& ladder, MicroTime window_us, Objective objective, double alpha,
    const BandwidthModel& bw) {
    if (static_cast<double>(window_us) < env.frame_interval_us())
        throw ConfigError("deepdecision: window shorter than the frame interval");

    struct Combo {
        Placement placement;
        int model_id;
        int side_px;
    };
    std::vector<Combo> combos;
    for (const auto& m : models) {
        if (m.server_capable())
            for (auto it = ladder.rbegin(); it != ladder.rend(); ++it)
                combos.push_back({Placement::Offload, m.model_id, *it});
        if (m.local_capable()) combos.push_back({Placement::LocalNpu, m.model_id, ladder.back()});
    }
    if (combos.empty()) {
        std::vector<ScheduleDecision> all_skip;
        for (const auto& f : frames) all_skip.push_back(ScheduleDecision::skip(f.index));
        return all_skip;
    }

    std::vector<ScheduleDecision> decisions;
    decisions.reserve(frames.size());
    ResourceState state;
    std::size_t pos = 0;
    std::int64_t window_index = 0;
    while (pos < frames.size()) {
        const MicroTime window_end = (window_index + 1) * window_us;
        std::size_t end = pos;
        while (end < frames.size() && frames[end].arrival_us < window_end) ++end;
        ++window_index;
        if (end == pos) continue;  // empty window

        std::span<const Frame> slice(frames.data() + pos, end - pos);
        struct Best {
            double value = kNegInf;
            Combo combo{Placement::Skip, -1, -1};
            ResourceState after;
        };
        std::optional<Best> best;
        for (const auto& combo : combos) {
            std::vector<ScheduleDecision> uniform;
            uniform.reserve(slice.size());
            for (const auto& f : slice) {
                uniform.push_back(combo.placement == Placement::Offload
                                      ? ScheduleDecision::offload(f.index, combo.model_id,
                                                                  combo.side_px)
                                      : ScheduleDecision::local(f.index, combo.model_id,
                                                                combo.side_px));
            }
            ResourceState after = state;
            auto outcomes = commit_schedule(slice, uniform, models, env, bw, after);
            const double value = detail::window_objective(outcomes, env, objective, alpha);
            const bool better =
                !best || value > best->value ||
                (value == best->value &&
                 (static_cast<int>(combo.placement) < static_cast<int>(best->combo.placement) ||
                  (combo.placement == best->combo.placement &&
                   (combo.model_id < best->combo.model_id ||
                    (combo.model_id == best->combo.model_id && combo.side_px > best->combo.side_px)))));
            if (better) best = Best{value, combo, after};
        }
        for (const auto& f : slice) {
            decisions.push_back(best->combo.placement == Placement::Offload
                                    ? ScheduleDecision::offload(f.index, best->combo.model_id,
                                                                best->combo.side_px)
                                    : ScheduleDecision::local(f.index, best->combo.model_id,
                                                              best->combo.side_px));
        }
        state = best->after;
        pos = end;
    }
    return decisions;
}

// ---------------------------------------------------------------------------
// Optimal oracle
// ---------------------------------------------------------------------------

struct OracleTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleResult {
    double objective = kNegInf;
    std::vector<ScheduleDecision> decisions;
    std::uint64_t leaves_explored = 0;
};

namespace detail {

struct OracleOption {
    Placement placement;
    int model_id;
    int side_px;
};

inline int decision_rank(const ScheduleDecision& d) {
    switch (d.placement) {
        case Placement::Offload: return 0;
        case Placement::LocalNpu: return 1;
        case Placement::Skip: return 2;
    }
    return 3;
}

// Canonical order on full schedules, used to break exact objective ties:
// per frame, offload before local before skip, then lower model index, then
// higher resolution.
inline bool schedule_before(const std::vector<ScheduleDecision>& a,
                            const std::vector<ScheduleDecision>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int ra = decision_rank(a[i]), rb = decision_rank(b[i]);
        if (ra != rb) return ra < rb;
        const int ma = a[i].model_id.value_or(-1), mb = b[i].model_id.value_or(-1);
        if (ma != mb) return ma < mb;
        const int sa = a[i].resolution.value_or(-1), sb = b[i].resolution.value_or(-1);
        if (sa != sb) return sa > sb;
    }
    return false;
}

}  // namespace detail

// Exhaustively search every per-frame (placement, model, resolution)
// assignment, replaying each candidate through the exact resource semantics,
// and return the best objective. Skip is only an option under the utility
// objective, mirroring the two formulations. Branches whose optimistic bound
// cannot reach the incumbent are cut; exact ties resolve to the canonical
// schedule order, so the result does not depend on enumeration order.
inline OracleResult optimal_oracle(std::span<const Frame> frames,
                                   const std::vector<ModelProfile>& models, const EnvProfile& env,
                                   const Ladder& ladder, Objective objective, double alpha,
                                   std::int64_t n_cap = 10, double combination_cap = 1e8) {
    const auto n = static_cast<std::int64_t>(frames.size());
    if (n == 0) throw std::invalid_argument("optimal_oracle: empty instance");

    std::vector<detail::OracleOption> options;
    for (const auto& m : models) {
        if (m.server_capable())
            for (auto it = ladder.rbegin(); it != ladder.rend(); ++it)
                options.push_back({Placement::Offload, m.model_id, *it});
        if (m.local_capable()) options.push_back({Placement::LocalNpu, m.model_id, ladder.back()});
    }
    if (objective == Objective::Utility) options.push_back({Placement::Skip, -1, -1});
    if (options.empty()) throw ConfigError("optimal_oracle: no schedulable option");

    if (n > n_cap ||
        std::pow(static_cast<double>(options.size()), static_cast<double>(n)) > combination_cap)
        throw OracleTooLarge("oracle instance too large: " + std::to_string(n) + " frames x " +
                             std::to_string(options.size()) + " options");

    double a_best = 0.0;
    for (const auto& m : models) {
        if (m.server_capable()) a_best = std::max(a_best, m.server_accuracy(ladder.back()));
        if (m.local_capable()) a_best = std::max(a_best, m.local_accuracy());
    }

    const BandwidthModel bw{env.bandwidth_bps, {}};
    const double nd = static_cast<double>(n);

    OracleResult result;
    std::vector<ScheduleDecision> current(static_cast<std::size_t>(n));

    struct Prefix {
        ResourceState state;
        double acc_sum = 0.0;
        std::int64_t met = 0;
    };

    auto objective_of = [&](double acc_sum, std::int64_t met) {
        if (objective == Objective::Accuracy) return acc_sum / nd;
        const double throughput = static_cast<double>(met) * env.frame_rate_fps / nd;
        return throughput + (met > 0 ? alpha * acc_sum / static_cast<double>(met) : 0.0);
    };
    auto bound_of = [&](const Prefix& p, std::int64_t depth) {
        const double rem = static_cast<double>(n - depth);
        if (objective == Objective::Accuracy) return (p.acc_sum + rem * a_best) / nd;
        const double mean_now = p.met > 0 ? p.acc_sum / static_cast<double>(p.met) : 0.0;
        return (static_cast<double>(p.met) + rem) * env.frame_rate_fps / nd +
               alpha * std::max(mean_now, a_best);
    };

    auto dfs = [&](auto&& self, std::int64_t depth, const Prefix& prefix) -> void {
        if (depth == n) {
            ++result.leaves_explored;
            const double value = objective_of(prefix.acc_sum, prefix.met);
            if (value > result.objective ||
                (value == result.objective &&
                 (result.decisions.empty() || detail::schedule_before(current, result.decisions)))) {
                result.objective = value;
                result.decisions = current;
            }
            return;
        }
        if (!result.decisions.empty() &&
            bound_of(prefix, depth) <
                result.objective - 1e-12 * std::max(1.0, std::abs(result.objective)))
            return;

        const auto& frame = frames[static_cast<std::size_t>(depth)];
        for (const auto& opt : options) {
            ScheduleDecision d =
                opt.placement == Placement::Skip
                    ? ScheduleDecision::skip(frame.index)
                    : (opt.placement == Placement::Offload
                           ? ScheduleDecision::offload(frame.index, opt.model_id, opt.side_px)
                           : ScheduleDecision::local(frame.index, opt.model_id, opt.side_px));
            Prefix next = prefix;
            const auto out = apply_decision(frame, d, models, env, bw, next.state);
            next.acc_sum += out.scored_accuracy;
            if (out.met_deadline) ++next.met;
            current[static_cast<std::size_t>(depth)] = d;
            self(self, depth + 1, next);
        }
    };
    dfs(dfs, 0, Prefix{});
    return result;
}

}  // namespace fastva
