#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fastva/rng.hpp"
#include "fastva/sim.hpp"

// Parameter sweeps over the experiment axes, and the harness that pits the
// heuristics against the exhaustive oracle on randomized small instances.

namespace fastva {

enum class SweepAxis { Bandwidth, FrameRate, UploadDelay, Alpha };

inline SweepAxis parse_axis(const std::string& name) {
    if (name == "bandwidth") return SweepAxis::Bandwidth;
    if (name == "frame_rate") return SweepAxis::FrameRate;
    if (name == "upload_delay") return SweepAxis::UploadDelay;
    if (name == "alpha") return SweepAxis::Alpha;
    throw ConfigError("unknown sweep axis '" + name +
                      "', valid: bandwidth, frame_rate, upload_delay, alpha");
}

inline const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Bandwidth: return "bandwidth";
        case SweepAxis::FrameRate: return "frame_rate";
        case SweepAxis::UploadDelay: return "upload_delay";
        case SweepAxis::Alpha: return "alpha";
    }
    return "?";
}

struct SweepSpec {
    SimConfig base;
    SweepAxis axis = SweepAxis::Bandwidth;
    std::vector<double> values;  // bandwidth in Mbps, frame_rate in fps, upload_delay in ms
    std::vector<PolicyId> policies;
    std::vector<double> alphas;  // optional: one output CSV per alpha

    void validate() const {
        base.validate();
        if (values.empty()) throw ConfigError("sweep: empty values list");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (values[i] <= values[i - 1])
                throw ConfigError("sweep: values must be strictly increasing");
        if (policies.empty()) throw ConfigError("sweep: empty policies list");
    }
};

// Apply one axis value to a base configuration.
inline SimConfig apply_axis(SimConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::Bandwidth: cfg.profiles.env.bandwidth_bps = value * 1e6; break;
        case SweepAxis::FrameRate: cfg.profiles.env.frame_rate_fps = value; break;
        case SweepAxis::UploadDelay: cfg.profiles.env.rtt_delay_us = ms_to_us(value); break;
        case SweepAxis::Alpha: cfg.alpha = value; break;
    }
    return cfg;
}

struct SweepRow {
    double axis_value = 0.0;
    PolicyId policy = PolicyId::Local;
    SimReport report;
};

// Run every (value, policy) point. Points execute on a small worker pool;
// the output order is fixed by (value, policy) regardless of completion.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs = 0) {
    spec.validate();
    struct Job {
        double value;
        PolicyId policy;
    };
    std::vector<Job> todo;
    for (double v : spec.values)
        for (PolicyId p : spec.policies) todo.push_back({v, p});

    std::vector<SweepRow> rows(todo.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= todo.size()) return;
            try {
                SimConfig cfg = apply_axis(spec.base, spec.axis, todo[i].value);
                cfg.policy = todo[i].policy;
                if (spec.axis == SweepAxis::Alpha &&
                    (todo[i].policy == PolicyId::MaxUtility ||
                     todo[i].policy == PolicyId::OptimalUtility))
                    cfg.objective = Objective::Utility;
                rows[i] = {todo[i].value, todo[i].policy, run(cfg)};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    if (jobs == 0)
        jobs = std::min(std::thread::hardware_concurrency(), 8u);
    jobs = std::max(jobs, 1u);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "axis_value,policy,avg_accuracy,achieved_fps,utility,miss_count\n";
    for (const auto& row : rows) {
        out += fmt_double(row.axis_value);
        out += ',';
        out += policy_name(row.policy);
        out += ',';
        out += fmt_double(row.report.avg_accuracy);
        out += ',';
        out += fmt_double(row.report.achieved_fps);
        out += ',';
        out += fmt_double(row.report.utility);
        out += ',';
        out += std::to_string(row.report.miss_count);
        out += '\n';
    }
    return out;
}

inline SweepSpec load_sweep_spec(const nlohmann::json& doc, const std::string& base_dir = ".") {
    SweepSpec spec;
    if (doc.contains("base_path")) {
        spec.base = load_sim_config_file(base_dir + "/" + doc["base_path"].get<std::string>());
    } else if (doc.contains("base")) {
        spec.base = load_sim_config(doc["base"]);
    } else {
        throw ConfigError("sweep: missing 'base' or 'base_path'");
    }
    if (!doc.contains("axis")) throw ConfigError("sweep: missing 'axis'");
    spec.axis = parse_axis(doc["axis"].get<std::string>());
    if (doc.contains("values"))
        for (const auto& v : doc["values"]) spec.values.push_back(v.get<double>());
    if (doc.contains("policies"))
        for (const auto& p : doc["policies"]) spec.policies.push_back(parse_policy(p.get<std::string>()));
    if (doc.contains("alphas"))
        for (const auto& a : doc["alphas"]) spec.alphas.push_back(a.get<double>());
    spec.validate();
    return spec;
}

inline SweepSpec load_sweep_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sweep spec not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("sweep spec parse failure: ") + e.what());
    }
    const auto slash = path.find_last_of('/');
    return load_sweep_spec(doc, slash == std::string::npos ? "." : path.substr(0, slash));
}

// ---------------------------------------------------------------------------
// Heuristic-vs-oracle comparison
// ---------------------------------------------------------------------------

struct GapRow {
    std::int64_t instance = 0;
    std::int64_t n_frames = 0;
    std::uint64_t frame_seed = 0;
    Objective objective = Objective::Accuracy;
    double heuristic = 0.0;
    double optimal = 0.0;
    double gap = 0.0;  // optimal - heuristic
};

struct CompareOptions {
    std::int64_t n_instances = 100;
    std::uint64_t seed = 1;
    std::int64_t frames_min = 1;
    std::int64_t frames_max = 6;
    double bandwidth_mbps_min = 0.5;
    double bandwidth_mbps_max = 5.0;
    double rtt_ms_min = 25.0;
    double rtt_ms_max = 150.0;
    std::vector<double> fps_choices = {10, 20, 30, 40, 50};
    double jitter = 0.2;
};

// Randomize the environment and frame sizes around a base profile, run the
// heuristic and the oracle under both objectives, and report the gaps. The
// oracle searches a superset of the heuristic's decision space, so every gap
// must come out nonnegative.
inline std::vector<GapRow> oracle_compare(const SimConfig& base, const CompareOptions& opt) {
    if (opt.frames_max > base.oracle_frame_cap)
        throw OracleTooLarge("oracle instance too large: " + std::to_string(opt.frames_max) +
                             " frames exceeds cap " + std::to_string(base.oracle_frame_cap));
    Rng rng(opt.seed);
    std::vector<GapRow> rows;
    rows.reserve(static_cast<std::size_t>(opt.n_instances) * 2);

    for (std::int64_t i = 0; i < opt.n_instances; ++i) {
        SimConfig cfg = base;
        cfg.bandwidth_trace.clear();
        cfg.profiles.env.bandwidth_bps =
            rng.uniform(opt.bandwidth_mbps_min, opt.bandwidth_mbps_max) * 1e6;
        cfg.profiles.env.rtt_delay_us =
            ms_to_us(rng.uniform(opt.rtt_ms_min, opt.rtt_ms_max));
        cfg.profiles.env.frame_rate_fps = opt.fps_choices[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(opt.fps_choices.size()) - 1))];
        cfg.n_frames = rng.uniform_int(opt.frames_min, opt.frames_max);
        cfg.profiles.source.mode = FrameSource::Mode::Synthetic;
        cfg.profiles.source.jitter_fraction = opt.jitter;
        cfg.profiles.source.rng_seed = rng.next();

        for (const Objective obj : {Objective::Accuracy, Objective::Utility}) {
            SimConfig heur_cfg = cfg;
            heur_cfg.policy = obj == Objective::Accuracy ? PolicyId::MaxAccuracy
                                                         : PolicyId::MaxUtility;
            heur_cfg.objective = obj;
            SimConfig opt_cfg = cfg;
            opt_cfg.policy = obj == Objective::Accuracy ? PolicyId::OptimalAccuracy
                                                        : PolicyId::OptimalUtility;
            opt_cfg.objective = obj;

            const SimReport heur = run(heur_cfg);
            const SimReport best = run(opt_cfg);
            GapRow row;
            row.instance = i;
            row.n_frames = cfg.n_frames;
            row.frame_seed = cfg.profiles.source.rng_seed;
            row.objective = obj;
            row.heuristic = obj == Objective::Accuracy ? heur.avg_accuracy : heur.utility;
            row.optimal = obj == Objective::Accuracy ? best.avg_accuracy : best.utility;
            row.gap = row.optimal - row.heuristic;
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string gap_csv(const std::vector<GapRow>& rows) {
    std::string out = "instance,n_frames,frame_seed,objective,heuristic,optimal,gap\n";
    for (const auto& r : rows) {
        out += std::to_string(r.instance);
        out += ',';
        out += std::to_string(r.n_frames);
        out += ',';
        out += std::to_string(r.frame_seed);
        out += ',';
        out += r.objective == Objective::Accuracy ? "accuracy" : "utility";
        out += ',';
        out += fmt_double(r.heuristic);
        out += ',';
        out += fmt_double(r.optimal);
        out += ',';
        out += fmt_double(r.gap);
        out += '\n';
    }
    return out;
}

}  // namespace fastva
