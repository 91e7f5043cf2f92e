#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fastva/baselines.hpp"
#include "fastva/profiles.hpp"
#include "fastva/replay.hpp"
#include "fastva/sched.hpp"

// Deterministic discrete-event simulation: frames arrive on the frame clock,
// the chosen policy is consulted round by round (or replays its offline
// schedule), decisions execute on the serial uplink and NPU, and outcomes are
// scored with the profile accuracies.

namespace fastva {

struct SimConfig {
    ProfileSet profiles;
    PolicyId policy = PolicyId::MaxAccuracy;
    Objective objective = Objective::Accuracy;  // what DeepDecision optimizes
    double alpha = 50.0;
    std::int64_t n_frames = 300;
    std::vector<std::pair<MicroTime, double>> bandwidth_trace;
    MicroTime dd_window_us = 1'000'000;
    MicroTime grid_us = 1000;
    std::int64_t oracle_frame_cap = 10;

    BandwidthModel bandwidth() const {
        return {profiles.env.bandwidth_bps, bandwidth_trace};
    }

    void validate() const {
        profiles.validate();
        if (n_frames < 1) throw ConfigError("sim: n_frames must be >= 1");
        if (alpha < 0.0) throw ConfigError("sim: alpha must be nonnegative");
        MicroTime prev = -1;
        for (const auto& [at, bps] : bandwidth_trace) {
            if (bps <= 0.0) throw ConfigError("sim: bandwidth_trace values must be positive");
            if (at <= prev) throw ConfigError("sim: bandwidth_trace times must increase");
            prev = at;
        }
    }
};

inline SimConfig load_sim_config(const nlohmann::json& doc) {
    SimConfig cfg;
    cfg.profiles = load_profiles(doc);
    if (doc.contains("sim")) {
        const auto& js = doc["sim"];
        if (js.contains("policy")) cfg.policy = parse_policy(js["policy"].get<std::string>());
        cfg.alpha = js.value("alpha", cfg.alpha);
        cfg.n_frames = js.value("n_frames", cfg.n_frames);
        if (js.contains("objective")) {
            const auto o = js["objective"].get<std::string>();
            if (o == "accuracy") cfg.objective = Objective::Accuracy;
            else if (o == "utility") cfg.objective = Objective::Utility;
            else throw ConfigError("sim: unknown objective '" + o + "'");
        } else if (cfg.policy == PolicyId::MaxUtility || cfg.policy == PolicyId::OptimalUtility) {
            cfg.objective = Objective::Utility;
        }
        cfg.dd_window_us = ms_to_us(js.value("dd_window_ms", 1000.0));
        cfg.oracle_frame_cap = js.value("oracle_frame_cap", std::int64_t{10});
        if (js.contains("bandwidth_trace")) {
            for (const auto& jt : js["bandwidth_trace"])
                cfg.bandwidth_trace.emplace_back(ms_to_us(jt.at("at_ms").get<double>()),
                                                 jt.at("bps").get<double>());
        }
    }
    cfg.validate();
    return cfg;
}

inline SimConfig load_sim_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    return load_sim_config(doc);
}

struct SimReport {
    std::vector<FrameOutcome> outcomes;
    double avg_accuracy = 0.0;  // sum of scored accuracies over all frames
    double achieved_fps = 0.0;  // frames finished in time per second of stream
    double utility = 0.0;
    std::int64_t miss_count = 0;
};

inline SimReport score_report(std::vector<FrameOutcome> outcomes, const EnvProfile& env,
                              double alpha) {
    SimReport report;
    report.outcomes = std::move(outcomes);
    double acc_sum = 0.0;
    std::int64_t met = 0;
    for (const auto& o : report.outcomes) {
        acc_sum += o.scored_accuracy;
        if (o.met_deadline) ++met;
    }
    const double n = static_cast<double>(report.outcomes.size());
    report.avg_accuracy = n > 0 ? acc_sum / n : 0.0;
    report.achieved_fps = n > 0 ? static_cast<double>(met) * env.frame_rate_fps / n : 0.0;
    report.utility =
        report.achieved_fps + (met > 0 ? alpha * acc_sum / static_cast<double>(met) : 0.0);
    report.miss_count = static_cast<std::int64_t>(report.outcomes.size()) - met;
    return report;
}

namespace detail {

// Round-by-round loop shared by the online policies. `round_fn` sees the
// frames that have arrived and are still undecided, and returns a plan that
// starts at the head frame and covers a contiguous index range (possibly
// reaching into frames that arrive during the round's transmission).
template <typename RoundFn>
std::vector<FrameOutcome> run_online(std::span<const Frame> frames,
                                     const std::vector<ModelProfile>& models,
                                     const EnvProfile& env, const BandwidthModel& bw,
                                     RoundFn&& round_fn) {
    std::vector<FrameOutcome> outcomes;
    outcomes.reserve(frames.size());
    ResourceState state;
    std::size_t next = 0;
    while (next < frames.size()) {
        const Frame& head = frames[next];
        const MicroTime now = std::max(head.arrival_us, state.uplink_free_us);
        if (head.arrival_us + env.deadline_us < now) {
            // expired while waiting for the uplink
            outcomes.push_back(
                apply_decision(head, ScheduleDecision::skip(head.index), models, env, bw, state));
            ++next;
            continue;
        }
        std::size_t arrived_end = next;
        while (arrived_end < frames.size() && frames[arrived_end].arrival_us <= now)
            ++arrived_end;
        std::span<const Frame> buffer(frames.data() + next, arrived_end - next);

        EnvProfile env_now = env;
        env_now.bandwidth_bps = bw.at(now);
        RoundPlan plan = round_fn(buffer, env_now, state.npu_free_us, now);
        if (plan.decisions.empty())
            throw std::logic_error("online policy returned an empty round plan");
        for (const auto& d : plan.decisions) {
            if (d.frame_index != static_cast<std::int64_t>(next))
                throw std::logic_error("round plan is not contiguous from the head frame");
            outcomes.push_back(
                apply_decision(frames[next], d, models, env, bw, state));
            ++next;
        }
    }
    return outcomes;
}

}  // namespace detail

// Run one simulation end to end.
inline SimReport run(const SimConfig& cfg) {
    cfg.validate();
    const auto& ps = cfg.profiles;
    const auto frames = gen_frames(ps.source, ps.env, ps.ladder, cfg.n_frames);
    const BandwidthModel bw = cfg.bandwidth();
    const std::int64_t last = cfg.n_frames - 1;

    std::vector<FrameOutcome> outcomes;
    switch (cfg.policy) {
        case PolicyId::Offload: {
            auto decisions = offload_policy(frames, ps.models, ps.env, ps.ladder, &bw);
            outcomes = commit_schedule(frames, decisions, ps.models, ps.env, bw);
            break;
        }
        case PolicyId::DeepDecision: {
            auto decisions = deepdecision_policy(frames, ps.models, ps.env, ps.ladder,
                                                 cfg.dd_window_us, cfg.objective, cfg.alpha, bw);
            outcomes = commit_schedule(frames, decisions, ps.models, ps.env, bw);
            break;
        }
        case PolicyId::OptimalAccuracy:
        case PolicyId::OptimalUtility: {
            const auto obj = cfg.policy == PolicyId::OptimalAccuracy ? Objective::Accuracy
                                                                     : Objective::Utility;
            auto oracle = optimal_oracle(frames, ps.models, ps.env, ps.ladder, obj, cfg.alpha,
                                         cfg.oracle_frame_cap);
            outcomes = commit_schedule(frames, oracle.decisions, ps.models, ps.env, bw);
            break;
        }
        case PolicyId::Local: {
            outcomes = detail::run_online(
                frames, ps.models, ps.env, bw,
                [&](std::span<const Frame> buffer, const EnvProfile& env_now,
                    MicroTime npu_free, MicroTime) {
                    RoundPlan plan;
                    plan.decisions = local_policy(buffer, ps.models, env_now, ps.ladder,
                                                  npu_free, cfg.grid_us);
                    return plan;
                });
            break;
        }
        case PolicyId::MaxAccuracy: {
            outcomes = detail::run_online(
                frames, ps.models, ps.env, bw,
                [&](std::span<const Frame> buffer, const EnvProfile& env_now,
                    MicroTime npu_free, MicroTime now) {
                    return max_accuracy_round(buffer, last, ps.models, env_now, ps.ladder,
                                              npu_free, now, cfg.grid_us);
                });
            break;
        }
        case PolicyId::MaxUtility: {
            outcomes = detail::run_online(
                frames, ps.models, ps.env, bw,
                [&](std::span<const Frame> buffer, const EnvProfile& env_now,
                    MicroTime npu_free, MicroTime now) {
                    return max_utility_round(buffer, last, ps.models, env_now, ps.ladder,
                                             cfg.alpha, npu_free, now);
                });
            break;
        }
    }
    return score_report(std::move(outcomes), ps.env, cfg.alpha);
}

// Validate a report produced by run() against its own configuration.
inline Verdict verify_report(const SimReport& report, const SimConfig& cfg) {
    const auto frames =
        gen_frames(cfg.profiles.source, cfg.profiles.env, cfg.profiles.ladder, cfg.n_frames);
    return check_schedule(report.outcomes, frames, cfg.profiles.models, cfg.profiles.env,
                          cfg.bandwidth());
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

// Shortest round-trip representation; keeps CSV output byte-stable.
inline std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

inline std::string report_frame_csv(const SimReport& report) {
    std::string out = "index,placement,model,resolution,start_us,finish_us,met,accuracy\n";
    for (const auto& o : report.outcomes) {
        out += std::to_string(o.frame_index);
        out += ',';
        out += placement_name(o.decision.placement);
        out += ',';
        if (o.decision.model_id) out += std::to_string(*o.decision.model_id);
        out += ',';
        if (o.decision.resolution) out += std::to_string(*o.decision.resolution);
        out += ',';
        out += std::to_string(o.start_us);
        out += ',';
        out += std::to_string(o.finish_us);
        out += ',';
        out += o.met_deadline ? '1' : '0';
        out += ',';
        out += fmt_double(o.scored_accuracy);
        out += '\n';
    }
    return out;
}

inline nlohmann::json report_summary(const SimReport& report, const SimConfig& cfg) {
    return {{"policy", policy_name(cfg.policy)},
            {"n_frames", cfg.n_frames},
            {"alpha", cfg.alpha},
            {"avg_accuracy", report.avg_accuracy},
            {"achieved_fps", report.achieved_fps},
            {"utility", report.utility},
            {"miss_count", report.miss_count}};
}

}  // namespace fastva
