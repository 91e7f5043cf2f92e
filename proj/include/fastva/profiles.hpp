#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fastva/rng.hpp"

// Data model for CNN model profiles, the network/timing environment and the
// incoming frame stream. Everything downstream works in integer microseconds;
// values given in milliseconds are converted on load.

namespace fastva {

using MicroTime = std::int64_t;

inline MicroTime ms_to_us(double ms) { return std::llround(ms * 1000.0); }
inline double us_to_ms(MicroTime us) { return static_cast<double>(us) / 1000.0; }
inline double us_to_s(MicroTime us) { return static_cast<double>(us) / 1e6; }

// Ordered set of square input side lengths a frame may be resized to.
using Ladder = std::vector<int>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void validate_ladder(const Ladder& ladder) {
    if (ladder.empty()) throw ConfigError("ladder: empty resolution ladder");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i] <= 0) throw ConfigError("ladder: side_px must be positive");
        if (i > 0 && ladder[i] <= ladder[i - 1])
            throw ConfigError("ladder: side_px must be strictly increasing");
    }
}

inline bool ladder_contains(const Ladder& ladder, int side_px) {
    return std::binary_search(ladder.begin(), ladder.end(), side_px);
}

// One CNN model. The accuracy map is the full-precision curve used when the
// frame is offloaded; npu_accuracy is the reduced-precision accuracy when the
// model runs on the NPU (always at the top ladder resolution). A model with
// no npu_time is never scheduled locally, one with no server_time is never
// offloaded to.
struct ModelProfile {
    int model_id = 0;
    std::string name;
    std::optional<MicroTime> npu_time_us;
    std::optional<MicroTime> server_time_us;
    std::map<int, double> accuracy_by_resolution;
    std::optional<double> npu_accuracy;

    bool local_capable() const { return npu_time_us.has_value(); }
    bool server_capable() const { return server_time_us.has_value(); }

    double server_accuracy(int side_px) const {
        auto it = accuracy_by_resolution.find(side_px);
        if (it == accuracy_by_resolution.end())
            throw ConfigError("model " + name + ": no accuracy entry for resolution " +
                              std::to_string(side_px));
        return it->second;
    }

    // Accuracy when run on the NPU at the maximum resolution.
    double local_accuracy() const {
        if (npu_accuracy) return *npu_accuracy;
        if (accuracy_by_resolution.empty())
            throw ConfigError("model " + name + ": empty accuracy map");
        return accuracy_by_resolution.rbegin()->second;
    }

    void validate(const Ladder& ladder) const {
        if (!npu_time_us && !server_time_us)
            throw ConfigError("model " + name +
                              ": needs at least one of npu_time_ms / server_time_ms");
        if (npu_time_us && *npu_time_us < 0)
            throw ConfigError("model " + name + ": npu_time_ms negative");
        if (server_time_us && *server_time_us < 0)
            throw ConfigError("model " + name + ": server_time_ms negative");
        if (accuracy_by_resolution.size() != ladder.size())
            throw ConfigError("model " + name + ": accuracy map must cover the whole ladder");
        double prev = -1.0;
        for (const auto& [side, acc] : accuracy_by_resolution) {
            if (!ladder_contains(ladder, side))
                throw ConfigError("model " + name + ": accuracy resolution " +
                                  std::to_string(side) + " not in ladder");
            if (acc < 0.0 || acc > 1.0)
                throw ConfigError("model " + name + ": accuracy out of [0,1]");
            if (acc < prev) throw ConfigError("model " + name + ": accuracy not monotone");
            prev = acc;
        }
        if (npu_accuracy && (*npu_accuracy < 0.0 || *npu_accuracy > 1.0))
            throw ConfigError("model " + name + ": npu_accuracy out of [0,1]");
    }
};

// Uplink bandwidth, server round trip, frame clock and per-frame deadline.
struct EnvProfile {
    double bandwidth_bps = 0.0;
    MicroTime rtt_delay_us = 0;    // communication delay T_c, added once per offload
    double frame_rate_fps = 0.0;
    MicroTime deadline_us = 0;

    double frame_interval_us() const { return 1e6 / frame_rate_fps; }
    double frame_interval_ms() const { return 1000.0 / frame_rate_fps; }

    MicroTime arrival_us(std::int64_t frame_index) const {
        return std::llround(static_cast<double>(frame_index) * frame_interval_us());
    }

    void validate() const {
        if (bandwidth_bps <= 0.0) throw ConfigError("env: bandwidth_bps must be positive");
        if (rtt_delay_us < 0) throw ConfigError("env: rtt_delay_ms must be nonnegative");
        if (frame_rate_fps <= 0.0) throw ConfigError("env: frame_rate_fps must be positive");
        if (deadline_us <= 0) throw ConfigError("env: deadline_ms must be positive");
        const double prod = frame_interval_ms() * frame_rate_fps;
        if (std::abs(prod - 1000.0) > 1e-9 * 1000.0)
            throw ConfigError("env: frame_interval_ms * frame_rate_fps != 1000");
    }
};

// Transmission time of `bits` over `bps`, in integer microseconds.
inline MicroTime tx_time_us(std::int64_t bits, double bps) {
    return std::llround(static_cast<double>(bits) * 1e6 / bps);
}

struct Frame {
    std::int64_t index = 0;
    MicroTime arrival_us = 0;
    std::map<int, std::int64_t> size_bits_by_resolution;

    std::int64_t size_bits(int side_px) const {
        auto it = size_bits_by_resolution.find(side_px);
        if (it == size_bits_by_resolution.end())
            throw ConfigError("frame " + std::to_string(index) + ": no size for resolution " +
                              std::to_string(side_px));
        return it->second;
    }

    void validate() const {
        std::int64_t prev = 0;
        for (const auto& [side, bits] : size_bits_by_resolution) {
            if (bits <= prev)
                throw ConfigError("frame " + std::to_string(index) +
                                  ": sizes not strictly increasing in resolution");
            prev = bits;
        }
    }
};

struct FrameSource {
    enum class Mode { Synthetic, Trace };
    Mode mode = Mode::Synthetic;
    // synthetic
    double bits_per_pixel = 4.0;
    double jitter_fraction = 0.0;
    std::uint64_t rng_seed = 1;
    // trace
    std::string trace_path;

    void validate() const {
        if (mode == Mode::Synthetic) {
            if (bits_per_pixel <= 0.0) throw ConfigError("frames: bits_per_pixel must be positive");
            if (jitter_fraction < 0.0 || jitter_fraction >= 1.0)
                throw ConfigError("frames: jitter_fraction must be in [0,1)");
        } else if (trace_path.empty()) {
            throw ConfigError("frames: trace mode needs a path");
        }
    }
};

// Frame trace: header `index,s45,s90,...` then one row per frame, sizes in bits.
inline std::vector<std::map<int, std::int64_t>> load_frame_trace(const std::string& path,
                                                                 const Ladder& ladder) {
    std::ifstream in(path);
    if (!in) throw ConfigError("frame trace not found: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("frame trace empty: " + path);

    std::string expected = "index";
    for (int side : ladder) expected += ",s" + std::to_string(side);
    if (line != expected)
        throw ConfigError("frame trace header mismatch, expected '" + expected + "'");

    std::vector<std::map<int, std::int64_t>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw ConfigError("frame trace: bad row");
        std::map<int, std::int64_t> sizes;
        for (int side : ladder) {
            if (!std::getline(ss, cell, ','))
                throw ConfigError("frame trace: row missing column s" + std::to_string(side));
            sizes[side] = std::stoll(cell);
        }
        rows.push_back(std::move(sizes));
    }
    return rows;
}

inline void save_frame_trace(const std::string& path, const Ladder& ladder,
                             const std::vector<Frame>& frames) {
    std::ofstream out(path);
    out << "index";
    for (int side : ladder) out << ",s" << side;
    out << "\n";
    for (const auto& f : frames) {
        out << f.index;
        for (int side : ladder) out << ',' << f.size_bits(side);
        out << "\n";
    }
}

// Generate the first n frames of the stream. Synthetic sizes follow
// round(bits_per_pixel * side^2 * (1 + u_i)) with one jitter draw per frame,
// shared across resolutions, so sizes stay strictly increasing in side_px.
inline std::vector<Frame> gen_frames(const FrameSource& source, const EnvProfile& env,
                                     const Ladder& ladder, std::int64_t n) {
    if (n <= 0) throw ConfigError("gen_frames: n must be >= 1");
    source.validate();
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(n));

    if (source.mode == FrameSource::Mode::Synthetic) {
        Rng rng(source.rng_seed);
        for (std::int64_t i = 0; i < n; ++i) {
            const double u = (2.0 * rng.uniform01() - 1.0) * source.jitter_fraction;
            Frame f;
            f.index = i;
            f.arrival_us = env.arrival_us(i);
            for (int side : ladder) {
                const double px = static_cast<double>(side) * side;
                f.size_bits_by_resolution[side] =
                    std::llround(source.bits_per_pixel * px * (1.0 + u));
            }
            f.validate();
            frames.push_back(std::move(f));
        }
    } else {
        auto rows = load_frame_trace(source.trace_path, ladder);
        if (static_cast<std::int64_t>(rows.size()) < n)
            throw ConfigError("frame trace has " + std::to_string(rows.size()) +
                              " rows, need " + std::to_string(n));
        for (std::int64_t i = 0; i < n; ++i) {
            Frame f;
            f.index = i;
            f.arrival_us = env.arrival_us(i);
            f.size_bits_by_resolution = rows[static_cast<std::size_t>(i)];
            f.validate();
            frames.push_back(std::move(f));
        }
    }
    return frames;
}

struct ProfileSet {
    Ladder ladder;
    std::vector<ModelProfile> models;
    EnvProfile env;
    FrameSource source;

    int r_max() const { return ladder.back(); }

    void validate() const {
        validate_ladder(ladder);
        if (models.empty()) throw ConfigError("empty model list");
        for (const auto& m : models) m.validate(ladder);
        env.validate();
        source.validate();
    }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("config: missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

}  // namespace detail

// Parse and validate a profile document (ladder, models, env, frame source).
inline ProfileSet load_profiles(const nlohmann::json& doc) {
    ProfileSet ps;
    if (!doc.contains("ladder") || !doc["ladder"].is_array())
        throw ConfigError("config: missing 'ladder' array");
    for (const auto& v : doc["ladder"]) ps.ladder.push_back(v.get<int>());
    validate_ladder(ps.ladder);

    if (!doc.contains("models") || !doc["models"].is_array() || doc["models"].empty())
        throw ConfigError("empty model list");
    int next_id = 0;
    for (const auto& jm : doc["models"]) {
        ModelProfile m;
        m.model_id = jm.value("id", next_id);
        next_id = m.model_id + 1;
        m.name = jm.value("name", "model" + std::to_string(m.model_id));
        if (jm.contains("npu_time_ms")) m.npu_time_us = ms_to_us(jm["npu_time_ms"].get<double>());
        if (jm.contains("server_time_ms"))
            m.server_time_us = ms_to_us(jm["server_time_ms"].get<double>());
        if (!jm.contains("accuracy") || !jm["accuracy"].is_object())
            throw ConfigError("model " + m.name + ": missing 'accuracy' object");
        for (const auto& [key, val] : jm["accuracy"].items())
            m.accuracy_by_resolution[std::stoi(key)] = val.get<double>();
        if (jm.contains("npu_accuracy")) m.npu_accuracy = jm["npu_accuracy"].get<double>();
        ps.models.push_back(std::move(m));
    }

    if (!doc.contains("env")) throw ConfigError("config: missing 'env' section");
    const auto& je = doc["env"];
    ps.env.bandwidth_bps = detail::require_number(je, "bandwidth_bps");
    ps.env.rtt_delay_us = ms_to_us(detail::require_number(je, "rtt_delay_ms"));
    ps.env.frame_rate_fps = detail::require_number(je, "frame_rate_fps");
    ps.env.deadline_us = ms_to_us(detail::require_number(je, "deadline_ms"));

    if (doc.contains("frames")) {
        const auto& jf = doc["frames"];
        const std::string mode = jf.value("mode", "synthetic");
        if (mode == "synthetic") {
            ps.source.mode = FrameSource::Mode::Synthetic;
            ps.source.bits_per_pixel = jf.value("bits_per_pixel", 4.0);
            ps.source.jitter_fraction = jf.value("jitter_fraction", 0.0);
            ps.source.rng_seed = jf.value("rng_seed", std::uint64_t{1});
        } else if (mode == "trace") {
            ps.source.mode = FrameSource::Mode::Trace;
            ps.source.trace_path = jf.value("path", "");
        } else {
            throw ConfigError("frames: unknown mode '" + mode + "'");
        }
    }

    ps.validate();
    return ps;
}

inline ProfileSet load_profiles(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse failure: ") + e.what());
    }
    return load_profiles(doc);
}

inline nlohmann::json serialize_profiles(const ProfileSet& ps) {
    nlohmann::json doc;
    doc["ladder"] = ps.ladder;
    doc["models"] = nlohmann::json::array();
    for (const auto& m : ps.models) {
        nlohmann::json jm;
        jm["id"] = m.model_id;
        jm["name"] = m.name;
        if (m.npu_time_us) jm["npu_time_ms"] = us_to_ms(*m.npu_time_us);
        if (m.server_time_us) jm["server_time_ms"] = us_to_ms(*m.server_time_us);
        nlohmann::json acc;
        for (const auto& [side, a] : m.accuracy_by_resolution) acc[std::to_string(side)] = a;
        jm["accuracy"] = acc;
        if (m.npu_accuracy) jm["npu_accuracy"] = *m.npu_accuracy;
        doc["models"].push_back(jm);
    }
    doc["env"] = {{"bandwidth_bps", ps.env.bandwidth_bps},
                  {"rtt_delay_ms", us_to_ms(ps.env.rtt_delay_us)},
                  {"frame_rate_fps", ps.env.frame_rate_fps},
                  {"deadline_ms", us_to_ms(ps.env.deadline_us)}};
    if (ps.source.mode == FrameSource::Mode::Synthetic) {
        doc["frames"] = {{"mode", "synthetic"},
                         {"bits_per_pixel", ps.source.bits_per_pixel},
                         {"jitter_fraction", ps.source.jitter_fraction},
                         {"rng_seed", ps.source.rng_seed}};
    } else {
        doc["frames"] = {{"mode", "trace"}, {"path", ps.source.trace_path}};
    }
    return doc;
}

}  // namespace fastva
