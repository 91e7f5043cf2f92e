#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fastva/profiles.hpp"
#include "fastva/sched.hpp"

// Committing decisions onto the two serial resources (one uplink, one NPU)
// and checking finished schedules. Everything that executes a decision goes
// through apply_decision so planners and the simulator agree bit for bit.

namespace fastva {

// Piecewise-constant uplink bandwidth; the rate at transmission start applies
// to the whole transmission.
struct BandwidthModel {
    double base_bps = 0.0;
    std::vector<std::pair<MicroTime, double>> trace;  // (start_us, bps), sorted

    double at(MicroTime t_us) const {
        double bps = base_bps;
        for (const auto& [start, value] : trace) {
            if (start > t_us) break;
            bps = value;
        }
        return bps;
    }
};

struct FrameOutcome {
    std::int64_t frame_index = 0;
    ScheduleDecision decision;
    MicroTime start_us = 0;
    MicroTime finish_us = 0;
    bool met_deadline = false;
    double scored_accuracy = 0.0;

    bool processed() const { return decision.placement != Placement::Skip; }
};

struct ResourceState {
    MicroTime npu_free_us = 0;
    MicroTime uplink_free_us = 0;
};

// Execute one decision: offloads occupy the uplink for S/B and return after
// the server time plus the communication delay; local runs queue on the NPU.
// A frame scores its profile accuracy only when the result is back by
// arrival + T (closed deadline).
inline FrameOutcome apply_decision(const Frame& frame, const ScheduleDecision& d,
                                   const std::vector<ModelProfile>& models,
                                   const EnvProfile& env, const BandwidthModel& bw,
                                   ResourceState& state) {
    FrameOutcome out;
    out.frame_index = frame.index;
    out.decision = d;
    const MicroTime deadline = frame.arrival_us + env.deadline_us;

    switch (d.placement) {
        case Placement::Skip:
            out.start_us = out.finish_us = frame.arrival_us;
            break;
        case Placement::LocalNpu: {
            const auto& m = detail::model_by_id(models, *d.model_id);
            out.start_us = std::max(state.npu_free_us, frame.arrival_us);
            out.finish_us = out.start_us + *m.npu_time_us;
            state.npu_free_us = out.finish_us;
            out.met_deadline = out.finish_us <= deadline;
            if (out.met_deadline) out.scored_accuracy = m.local_accuracy();
            break;
        }
        case Placement::Offload: {
            const auto& m = detail::model_by_id(models, *d.model_id);
            out.start_us = std::max(state.uplink_free_us, frame.arrival_us);
            const MicroTime tx = tx_time_us(frame.size_bits(*d.resolution), bw.at(out.start_us));
            state.uplink_free_us = out.start_us + tx;
            out.finish_us = out.start_us + tx + *m.server_time_us + env.rtt_delay_us;
            out.met_deadline = out.finish_us <= deadline;
            if (out.met_deadline) out.scored_accuracy = m.server_accuracy(*d.resolution);
            break;
        }
    }
    return out;
}

// Execute a full schedule over a frame window, in frame order.
inline std::vector<FrameOutcome> commit_schedule(std::span<const Frame> frames,
                                                 std::span<const ScheduleDecision> decisions,
                                                 const std::vector<ModelProfile>& models,
                                                 const EnvProfile& env, const BandwidthModel& bw,
                                                 ResourceState& state) {
    if (frames.size() != decisions.size())
        throw std::invalid_argument("commit_schedule: decision count != frame count");
    std::vector<FrameOutcome> outcomes;
    outcomes.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i)
        outcomes.push_back(apply_decision(frames[i], decisions[i], models, env, bw, state));
    return outcomes;
}

inline std::vector<FrameOutcome> commit_schedule(std::span<const Frame> frames,
                                                 std::span<const ScheduleDecision> decisions,
                                                 const std::vector<ModelProfile>& models,
                                                 const EnvProfile& env, const BandwidthModel& bw) {
    ResourceState state;
    return commit_schedule(frames, decisions, models, env, bw, state);
}

struct Verdict {
    bool ok = true;
    std::int64_t frame_index = -1;
    std::string message;

    static Verdict fail(std::int64_t index, std::string msg) {
        return {false, index, std::move(msg)};
    }
};

// Validate a finished report against the decisions alone: durations are
// recomputed from the profiles, the two serial resources must never overlap,
// and every deadline flag and score must match the recorded times.
inline Verdict check_schedule(std::span<const FrameOutcome> outcomes,
                              std::span<const Frame> frames,
                              const std::vector<ModelProfile>& models, const EnvProfile& env,
                              const BandwidthModel& bw) {
    if (outcomes.size() != frames.size())
        return Verdict::fail(-1, "outcome count != frame count");

    MicroTime npu_busy_until = std::numeric_limits<MicroTime>::min();
    MicroTime uplink_busy_until = std::numeric_limits<MicroTime>::min();

    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& out = outcomes[i];
        const auto& frame = frames[i];
        const auto k = frame.index;
        if (out.frame_index != k) return Verdict::fail(k, "frame index mismatch");
        const MicroTime deadline = frame.arrival_us + env.deadline_us;
        const auto& d = out.decision;

        if (d.placement == Placement::Skip) {
            if (d.model_id || d.resolution)
                return Verdict::fail(k, "skip decision carries model or resolution");
            if (out.met_deadline) return Verdict::fail(k, "skipped frame flagged as met");
            if (out.scored_accuracy != 0.0) return Verdict::fail(k, "skipped frame scored");
            continue;
        }
        if (!d.model_id || !d.resolution)
            return Verdict::fail(k, "processed frame missing model or resolution");
        if (out.start_us < frame.arrival_us)
            return Verdict::fail(k, "start before arrival at frame " + std::to_string(k));

        MicroTime expect_finish = 0;
        double accuracy = 0.0;
        if (d.placement == Placement::LocalNpu) {
            const auto& m = detail::model_by_id(models, *d.model_id);
            if (!m.local_capable())
                return Verdict::fail(k, "model not deployable on NPU at frame " + std::to_string(k));
            if (out.start_us < npu_busy_until)
                return Verdict::fail(k, "NPU overlap at frame " + std::to_string(k));
            expect_finish = out.start_us + *m.npu_time_us;
            npu_busy_until = expect_finish;
            accuracy = m.local_accuracy();
        } else {
            const auto& m = detail::model_by_id(models, *d.model_id);
            if (!m.server_capable())
                return Verdict::fail(k, "model not on server at frame " + std::to_string(k));
            if (out.start_us < uplink_busy_until)
                return Verdict::fail(k, "uplink overlap at frame " + std::to_string(k));
            const MicroTime tx = tx_time_us(frame.size_bits(*d.resolution), bw.at(out.start_us));
            uplink_busy_until = out.start_us + tx;
            expect_finish = out.start_us + tx + *m.server_time_us + env.rtt_delay_us;
            accuracy = m.server_accuracy(*d.resolution);
        }
        if (out.finish_us != expect_finish)
            return Verdict::fail(k, "finish time mismatch at frame " + std::to_string(k));
        const bool met = out.finish_us <= deadline;
        if (out.met_deadline != met)
            return Verdict::fail(k, "deadline flag wrong at frame " + std::to_string(k));
        const double want = met ? accuracy : 0.0;
        if (out.scored_accuracy != want)
            return Verdict::fail(k, "scored accuracy wrong at frame " + std::to_string(k));
    }
    return {};
}

}  // namespace fastva
