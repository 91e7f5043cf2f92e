#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "fastva/sweep.hpp"

// Command implementations behind the CLI front end. Each returns a process
// exit code: 0 on success, 2 on configuration or validation errors.

namespace fastva {

namespace detail {

inline std::string path_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

}  // namespace detail

// Run one simulation; writes <stem>_frames.csv and <stem>_summary.json.
inline int cmd_run(const std::string& config_path, const std::string& out_dir,
                   MicroTime grid_us = 1000) {
    try {
        SimConfig cfg = load_sim_config_file(config_path);
        cfg.grid_us = grid_us;
        const SimReport report = run(cfg);

        std::filesystem::create_directories(out_dir);
        const std::string stem = detail::path_stem(config_path);
        detail::write_file(std::filesystem::path(out_dir) / (stem + "_frames.csv"),
                           report_frame_csv(report));
        detail::write_file(std::filesystem::path(out_dir) / (stem + "_summary.json"),
                           report_summary(report, cfg).dump(2) + "\n");

        std::cout << "policy=" << policy_name(cfg.policy) << " n=" << cfg.n_frames
                  << " avg_accuracy=" << fmt_double(report.avg_accuracy)
                  << " achieved_fps=" << fmt_double(report.achieved_fps)
                  << " utility=" << fmt_double(report.utility)
                  << " miss_count=" << report.miss_count << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// Run a sweep; one CSV per alpha (or a single CSV when no alphas are given).
inline int cmd_sweep(const std::string& spec_path, const std::string& out_dir,
                     MicroTime grid_us = 1000, unsigned jobs = 0) {
    try {
        SweepSpec spec = load_sweep_spec_file(spec_path);
        spec.base.grid_us = grid_us;
        std::filesystem::create_directories(out_dir);
        const std::string stem = detail::path_stem(spec_path);

        auto emit = [&](const SweepSpec& s, const std::string& name) {
            const auto rows = run_sweep(s, jobs);
            detail::write_file(std::filesystem::path(out_dir) / (name + ".csv"),
                               sweep_csv(rows));
            std::cout << "wrote " << name << ".csv (" << rows.size() << " rows)\n";
        };

        if (spec.alphas.empty()) {
            emit(spec, stem);
        } else {
            for (double alpha : spec.alphas) {
                SweepSpec s = spec;
                s.base.alpha = alpha;
                s.base.objective = Objective::Utility;
                emit(s, stem + "_alpha" + fmt_double(alpha));
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// Random-instance comparison of Max-Accuracy / Max-Utility against the
// exhaustive oracle. A negative gap means the oracle or the simulator is
// broken; that aborts with exit code 1.
inline int cmd_oracle_compare(const std::string& config_path, std::int64_t instances,
                              std::uint64_t seed, std::int64_t frames,
                              const std::string& out_dir) {
    try {
        const SimConfig base = load_sim_config_file(config_path);
        CompareOptions opt;
        opt.n_instances = instances;
        opt.seed = seed;
        opt.frames_min = frames;
        opt.frames_max = frames;

        const auto rows = oracle_compare(base, opt);
        std::filesystem::create_directories(out_dir);
        detail::write_file(std::filesystem::path(out_dir) /
                               (detail::path_stem(config_path) + "_oracle_gaps.csv"),
                           gap_csv(rows));

        double mean_acc = 0, max_acc = 0, mean_util = 0, max_util = 0;
        std::int64_t n_acc = 0, n_util = 0;
        bool negative = false;
        for (const auto& r : rows) {
            if (r.gap < 0.0) negative = true;
            if (r.objective == Objective::Accuracy) {
                mean_acc += r.gap;
                max_acc = std::max(max_acc, r.gap);
                ++n_acc;
            } else {
                mean_util += r.gap;
                max_util = std::max(max_util, r.gap);
                ++n_util;
            }
        }
        if (n_acc) mean_acc /= static_cast<double>(n_acc);
        if (n_util) mean_util /= static_cast<double>(n_util);
        std::cout << "instances=" << instances << " frames=" << frames
                  << " mean_acc_gap=" << fmt_double(mean_acc)
                  << " max_acc_gap=" << fmt_double(max_acc)
                  << " mean_utility_gap=" << fmt_double(mean_util)
                  << " max_utility_gap=" << fmt_double(max_util) << "\n";
        if (negative) {
            std::cerr << "error: negative gap, heuristic beat the exhaustive oracle\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace fastva
