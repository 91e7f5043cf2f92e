// Acceptance suite: one check per release criterion, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fastva/sweep.hpp"
#include "test_support.hpp"

using namespace fastva;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome out;
    void require(bool ok, const std::string& what) {
        if (!ok && out.pass) {
            out.pass = false;
            out.detail = what;
        }
    }
    void note(const std::string& what) {
        if (out.pass) out.detail = what;
    }
};

ProfileSet reference_3rung(double bandwidth_bps, double fps) {
    auto ps = testing::reference_profiles(bandwidth_bps, fps);
    ps.ladder = {45, 134, 224};
    for (auto& m : ps.models) {
        std::map<int, double> cut;
        for (int side : ps.ladder) cut[side] = m.accuracy_by_resolution.at(side);
        m.accuracy_by_resolution = cut;
    }
    return ps;
}

// --- criterion 1: heuristics never beat the oracle, and track it closely ---
Outcome oracle_soundness() {
    Check c;
    SimConfig base;
    base.profiles = reference_3rung(3e6, 30.0);
    base.oracle_frame_cap = 8;

    CompareOptions opt;
    opt.n_instances = 500;
    opt.seed = 20'240'817;
    opt.frames_min = 2;
    opt.frames_max = 8;
    opt.bandwidth_mbps_min = 0.5;
    opt.bandwidth_mbps_max = 5.0;

    const auto rows = oracle_compare(base, opt);
    std::int64_t violations = 0, n_acc = 0;
    double mean_acc_gap = 0.0, max_gap = 0.0;
    for (const auto& r : rows) {
        if (r.gap < 0.0) ++violations;
        max_gap = std::max(max_gap, r.gap);
        if (r.objective == Objective::Accuracy) {
            mean_acc_gap += r.gap;
            ++n_acc;
        }
    }
    mean_acc_gap /= static_cast<double>(n_acc);
    c.require(violations == 0, "heuristic beat the oracle on " + std::to_string(violations) +
                                   " of " + std::to_string(rows.size()) + " runs");
    c.require(mean_acc_gap <= 0.02,
              "mean accuracy gap " + fmt_double(mean_acc_gap) + " > 0.02");
    c.note(std::to_string(opt.n_instances) + " instances, 0 violations, mean acc gap " +
           fmt_double(mean_acc_gap) + ", max gap " + fmt_double(max_gap));
    return c.out;
}

// --- criterion 2: every policy's report passes the independent checker ---
SimConfig fuzz_config(Rng& rng) {
    static const Ladder full{45, 90, 134, 179, 224};
    SimConfig cfg;
    auto& ps = cfg.profiles;
    const auto rungs = rng.uniform_int(2, 5);
    std::vector<int> pool = full;
    while (static_cast<std::int64_t>(pool.size()) > rungs)
        pool.erase(pool.begin() + rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
    ps.ladder = pool;

    for (int j = 0; j < 2; ++j) {
        ModelProfile m;
        m.model_id = j;
        m.name = "m" + std::to_string(j);
        const auto kind = j == 0 ? 2 : rng.uniform_int(0, 2);  // model 0 is dual-capable
        if (kind != 1) m.npu_time_us = rng.uniform_int(3'000, 90'000);
        if (kind != 0) m.server_time_us = rng.uniform_int(3'000, 90'000);
        double acc = rng.uniform(0.05, 0.4);
        for (int side : ps.ladder) {
            m.accuracy_by_resolution[side] = acc;
            acc = std::min(0.95, acc + rng.uniform(0.0, 0.2));
        }
        m.npu_accuracy = rng.uniform(0.05, 0.95);
        ps.models.push_back(m);
    }
    ps.env.bandwidth_bps = rng.uniform(2e5, 6e6);
    ps.env.frame_rate_fps = rng.uniform(5.0, 60.0);
    ps.env.rtt_delay_us = rng.uniform_int(0, 200'000);
    ps.env.deadline_us = rng.uniform_int(50'000, 400'000);
    ps.source.bits_per_pixel = rng.uniform(1.0, 10.0);
    ps.source.jitter_fraction = rng.uniform(0.0, 0.5);
    ps.source.rng_seed = rng.next();
    cfg.alpha = rng.uniform(0.0, 200.0);
    cfg.n_frames = rng.uniform_int(1, 40);
    if (rng.uniform01() < 0.2) {
        MicroTime at = 0;
        const auto points = rng.uniform_int(1, 3);
        for (int p = 0; p < points; ++p) {
            at += rng.uniform_int(50'000, 700'000);
            cfg.bandwidth_trace.emplace_back(at, rng.uniform(2e5, 6e6));
        }
    }
    return cfg;
}

Outcome deadline_soundness() {
    Check c;
    Rng rng(7'771'234);
    std::int64_t checked = 0;
    for (int i = 0; i < 1000 && c.out.pass; ++i) {
        const SimConfig base = fuzz_config(rng);
        for (const auto& [policy, name] : policy_names()) {
            SimConfig cfg = base;
            cfg.policy = policy;
            const bool oracle =
                policy == PolicyId::OptimalAccuracy || policy == PolicyId::OptimalUtility;
            if (oracle) cfg.n_frames = std::min<std::int64_t>(cfg.n_frames, 4);
            if (policy == PolicyId::MaxUtility || policy == PolicyId::OptimalUtility)
                cfg.objective = Objective::Utility;
            const auto report = run(cfg);
            const auto verdict = verify_report(report, cfg);
            ++checked;
            c.require(verdict.ok, "config " + std::to_string(i) + " policy " + name + ": " +
                                      verdict.message);
            if (!c.out.pass) break;
        }
    }
    c.note(std::to_string(checked) + " reports across 1000 fuzzed configs, all clean");
    return c.out;
}

// --- criterion 3: DP table and triple-list invariants ---
Outcome dp_invariants() {
    Check c;
    Rng rng(555'001);
    for (int trial = 0; trial < 100 && c.out.pass; ++trial) {
        EnvProfile env = testing::default_env(3e6, rng.uniform(8.0, 55.0), 100.0,
                                              rng.uniform(60.0, 350.0));
        std::vector<ModelProfile> models;
        const auto n_models = rng.uniform_int(1, 3);
        for (int j = 0; j < n_models; ++j) {
            ModelProfile m;
            m.model_id = j;
            m.name = "m" + std::to_string(j);
            m.npu_time_us = rng.uniform_int(3'000, 90'000);
            m.accuracy_by_resolution = {{224, rng.uniform(0.2, 0.9)}};
            m.npu_accuracy = rng.uniform(0.05, 0.95);
            models.push_back(m);
        }
        const auto n_l = rng.uniform_int(0, 6);
        const auto window = local_window(0, n_l, env);
        const MicroTime t_idle =
            (n_l > 0 ? window[0].arrival_us : 0) + rng.uniform_int(0, 50'000);

        const auto dp = acc_dp_fill(window, models, env, t_idle);
        for (std::int64_t k = 0; k <= dp.n_frames() && c.out.pass; ++k) {
            double prev = kNegInf;
            for (std::int64_t tick = 0; tick < dp.n_ticks(); ++tick) {
                const double v = dp.at(k, tick);
                c.require(v >= prev, "H(k,.) not monotone at trial " + std::to_string(trial));
                prev = v;
            }
        }
        const auto bt = dp.backtrack();
        double acc = 0.0;
        MicroTime npu = t_idle;
        for (std::size_t k = 0; k < window.size(); ++k) {
            if (!bt.model_for_frame[k]) continue;
            const auto& m = detail::model_by_id(models, *bt.model_for_frame[k]);
            npu = std::max(npu, window[k].arrival_us) + *m.npu_time_us;
            c.require(npu <= window[k].arrival_us + env.deadline_us,
                      "backtracked schedule misses a deadline");
            acc += m.local_accuracy();
        }
        c.require(std::abs(acc - bt.acc_sum) <= 1e-9 * std::max(1.0, std::abs(acc)),
                  "backtracked accuracy diverges from the DP value");

        const double alpha = rng.uniform(0.0, 200.0);
        UtilityDp udp(window, models, env, alpha, t_idle);
        for (std::int64_t k = 0; k <= udp.n_frames(); ++k) {
            const auto& level = udp.level(k);
            for (std::size_t i = 1; i < level.size(); ++i) {
                c.require(level[i].t_us > level[i - 1].t_us && level[i].u > level[i - 1].u,
                          "dominated triple survived pruning");
            }
        }
        if (n_l > 0) {
            const auto ubt = udp.backtrack();
            double uacc = 0.0;
            std::int64_t m_count = 0;
            for (const auto& m : ubt.model_for_frame)
                if (m) {
                    uacc += detail::model_by_id(models, *m).local_accuracy();
                    ++m_count;
                }
            const double recomputed =
                m_count == 0 ? 0.0
                             : static_cast<double>(m_count) * env.frame_rate_fps /
                                       static_cast<double>(n_l) +
                                   alpha * uacc / static_cast<double>(m_count);
            c.require(std::abs(recomputed - ubt.utility) <=
                          1e-9 * std::max(1.0, std::abs(ubt.utility)),
                      "backtracked utility diverges from the recorded triple");
        }
    }
    c.note("100 random profiles: monotone rows, dominance-free lists, consistent backtracks");
    return c.out;
}

// --- criterion 4: the Local policy never reacts to the network ---
Outcome local_invariance() {
    Check c;
    std::string reference;
    for (double mbps : {0.5, 2.0, 5.0}) {
        for (double rtt : {50.0, 400.0}) {
            SimConfig cfg = testing::reference_config(PolicyId::Local, mbps * 1e6, 30.0, 300);
            cfg.profiles.env.rtt_delay_us = ms_to_us(rtt);
            const auto report = run(cfg);
            const auto bytes = report_frame_csv(report) + "|" + fmt_double(report.avg_accuracy) +
                               "|" + fmt_double(report.utility) + "|" +
                               std::to_string(report.miss_count);
            if (reference.empty()) reference = bytes;
            c.require(bytes == reference,
                      "Local report changed at B=" + fmt_double(mbps) + " Mbps, T_c=" +
                          fmt_double(rtt) + " ms");
        }
    }
    c.note("identical reports over B in {0.5,2,5} Mbps x T_c in {50,400} ms");
    return c.out;
}

// --- criterion 5: bandwidth / frame-rate / delay trends on the reference profiles ---
double trend_point(PolicyId policy, double mbps, double fps, double rtt_ms, double alpha,
                   bool utility) {
    SimConfig cfg = testing::reference_config(policy, mbps * 1e6, fps, 300);
    cfg.profiles.env.rtt_delay_us = ms_to_us(rtt_ms);
    cfg.alpha = alpha;
    cfg.objective = utility ? Objective::Utility : Objective::Accuracy;
    const auto report = run(cfg);
    return utility ? report.utility : report.avg_accuracy;
}

Outcome trend_suite() {
    Check c;
    const std::vector<double> b_grid{0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5};
    const std::vector<double> fps_grid{10, 20, 30, 40, 50};

    // (a) Offload responds monotonically to bandwidth and collapses below
    //     Local when starved
    {
        double prev = -1.0;
        for (double b : b_grid) {
            const double v = trend_point(PolicyId::Offload, b, 30, 100, 0, false);
            c.require(v >= prev - 1e-12, "(a) Offload not monotone in B at " + fmt_double(b));
            prev = v;
        }
        const double offload_low = trend_point(PolicyId::Offload, 0.5, 30, 100, 0, false);
        const double local_low = trend_point(PolicyId::Local, 0.5, 30, 100, 0, false);
        c.require(offload_low < local_low, "(a) Offload did not fall below Local at 0.5 Mbps");
    }

    // (b) Max-Accuracy dominates every baseline on both experiment grids
    for (double fps : {30.0, 50.0}) {
        for (double b : b_grid) {
            const double ours = trend_point(PolicyId::MaxAccuracy, b, fps, 100, 0, false);
            for (auto rival : {PolicyId::Local, PolicyId::Offload, PolicyId::DeepDecision}) {
                const double theirs = trend_point(rival, b, fps, 100, 0, false);
                c.require(ours >= theirs - 1e-9,
                          "(b) MaxAccuracy " + fmt_double(ours) + " < " + policy_name(rival) +
                              " " + fmt_double(theirs) + " at B=" + fmt_double(b) +
                              " fps=" + fmt_double(fps));
            }
        }
    }
    for (double b : {2.0, 3.0}) {
        for (double fps : fps_grid) {
            const double ours = trend_point(PolicyId::MaxAccuracy, b, fps, 100, 0, false);
            for (auto rival : {PolicyId::Local, PolicyId::Offload, PolicyId::DeepDecision}) {
                const double theirs = trend_point(rival, b, fps, 100, 0, false);
                c.require(ours >= theirs - 1e-9,
                          "(b) MaxAccuracy " + fmt_double(ours) + " < " + policy_name(rival) +
                              " " + fmt_double(theirs) + " at B=" + fmt_double(b) +
                              " fps=" + fmt_double(fps));
            }
        }
    }

    // (c) longer upload delay never helps an offload-capable policy
    for (auto policy : {PolicyId::Offload, PolicyId::DeepDecision, PolicyId::MaxAccuracy}) {
        double prev = 2.0;
        for (double rtt : {0.0, 50.0, 100.0, 150.0}) {
            const double v = trend_point(policy, 3.0, 30, rtt, 0, false);
            c.require(v <= prev + 1e-9, "(c) " + policy_name(policy) +
                                            " accuracy rose with T_c at " + fmt_double(rtt));
            prev = v;
        }
    }

    // (d) with alpha = 50 utility grows with the offered frame rate
    {
        double prev = -1.0;
        for (double fps : fps_grid) {
            const double v = trend_point(PolicyId::MaxUtility, 2.5, fps, 100, 50.0, true);
            c.require(v >= prev - 1e-9,
                      "(d) MaxUtility utility fell at fps=" + fmt_double(fps));
            prev = v;
        }
    }
    c.note("Offload monotone + below Local at 0.5 Mbps; MaxAccuracy dominant on both grids; "
           "T_c and frame-rate trends hold");
    return c.out;
}

// --- criterion 6: the worked arithmetic examples, pinned exactly ---
Outcome unit_arithmetic() {
    Check c;

    // utility of two processed frames (0.52, 0.67) at 30 fps, alpha 50
    {
        const auto env = testing::default_env(3e6, 30.0);
        RoundPlan plan;
        plan.decisions = {ScheduleDecision::local(0, 0, 224),
                          ScheduleDecision::offload(1, 0, 224)};
        plan.round_accuracy_sum = 0.52 + 0.67;
        const double u = round_utility(plan, env, 50.0);
        c.require(std::abs(u - 59.75) <= 1e-9 * 59.75,
                  "round utility " + fmt_double(u) + " != 59.75");
    }

    // 269 ms / 209 ms infeasibility at full resolution forces a lower rung
    {
        const auto env = testing::default_env(2'007'040, 30.0);
        c.require(tx_time_us(200'704, env.bandwidth_bps) == 100'000, "tx time not 100 ms");
        c.require(100'000 + 69'000 + 100'000 == 269'000 && 269'000 > env.deadline_us,
                  "ResNet offload not infeasible");
        c.require(100'000 + 9'000 + 100'000 == 209'000 && 209'000 > env.deadline_us,
                  "SqueezeNet offload not infeasible");
        const auto ps = testing::reference_profiles(2'007'040, 30.0);
        const auto frames = gen_frames(ps.source, env, ps.ladder, 1);
        const auto plan =
            max_accuracy_round(frames, 0, ps.models, env, ps.ladder, 0, 0);
        c.require(plan.decisions[0].placement == Placement::Offload &&
                      *plan.decisions[0].resolution == 90 && *plan.decisions[0].model_id == 0,
                  "full-resolution fallback did not pick ResNet at 90 px");
    }

    // n_l arithmetic: S/B of 100 ms at 30 fps buffers exactly 3 frames
    {
        const auto env = testing::default_env(2'007'040, 30.0);
        c.require(buffered_frame_count(200'704, env) == 3, "n_l != 3");
    }

    // per-frame budget at 2 Mbps: 90 px fits 66,667 bits, 134 px does not
    {
        const auto ps = testing::reference_profiles(2e6, 30.0);
        const auto frames = gen_frames(ps.source, ps.env, ps.ladder, 1);
        c.require(frames[0].size_bits(90) == 32'400 && frames[0].size_bits(134) == 71'824,
                  "synthetic sizes off");
        const auto d = offload_policy(frames, ps.models, ps.env, ps.ladder)[0];
        c.require(d.placement == Placement::Offload && *d.resolution == 90,
                  "budget rule did not choose 90 px");
    }

    // two buffered reference frames: optimum is ResNet twice, 1.04 total
    {
        const auto env = testing::default_env(3e6, 30.0);
        const std::vector<ModelProfile> models{testing::resnet50(), testing::squeezenet()};
        const auto dp = acc_dp_fill(local_window(0, 2, env), models, env, 33'333);
        const auto bt = dp.backtrack();
        c.require(std::abs(bt.acc_sum - 1.04) <= 1e-12, "local DP sum != 1.04");
        c.require(bt.finish_us == 137'333, "last local finish != 137,333 us");
    }
    c.note("59.75 utility, 269/209 infeasibility, n_l=3, 66,667-bit budget, 1.04 DP sum");
    return c.out;
}

// --- criterion 7: the sweep suite is byte-deterministic ---
Outcome determinism() {
    Check c;
    SweepSpec spec;
    spec.base = testing::reference_config(PolicyId::MaxAccuracy, 3e6, 30.0, 120);
    spec.base.profiles.source.jitter_fraction = 0.2;
    spec.base.profiles.source.rng_seed = 7;
    spec.axis = SweepAxis::Bandwidth;
    spec.values = {0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5};
    spec.policies = {PolicyId::Local, PolicyId::Offload, PolicyId::DeepDecision,
                     PolicyId::MaxAccuracy};
    const auto first = sweep_csv(run_sweep(spec));
    const auto second = sweep_csv(run_sweep(spec));
    c.require(first == second, "bandwidth sweep CSVs differ between runs");

    SweepSpec utility = spec;
    utility.axis = SweepAxis::FrameRate;
    utility.values = {10, 20, 30, 40, 50};
    utility.policies = {PolicyId::Local, PolicyId::Offload, PolicyId::MaxUtility};
    utility.base.objective = Objective::Utility;
    for (double alpha : {50.0, 200.0}) {
        utility.base.alpha = alpha;
        const auto a = sweep_csv(run_sweep(utility));
        const auto b = sweep_csv(run_sweep(utility));
        c.require(a == b, "frame-rate sweep CSVs differ at alpha=" + fmt_double(alpha));
    }
    c.note("repeated sweeps byte-identical (bandwidth grid + alpha 50/200 frame-rate grids)");
    return c.out;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double cap_seconds;  // 0 = no stated cap
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria{
        {1, "oracle soundness", 60.0, oracle_soundness},
        {2, "deadline soundness", 120.0, deadline_soundness},
        {3, "DP invariants", 0.0, dp_invariants},
        {4, "local-policy network invariance", 0.0, local_invariance},
        {5, "trend suite", 120.0, trend_suite},
        {6, "unit arithmetic", 0.0, unit_arithmetic},
        {7, "determinism", 0.0, determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criterion.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.cap_seconds > 0.0 && seconds > criterion.cap_seconds) {
            out.pass = false;
            out.detail += " [exceeded " + fmt_double(criterion.cap_seconds) + " s budget]";
        }
        std::printf("%s criterion %d: %s — %s (%.1f s)\n", out.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, out.detail.c_str(), seconds);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
