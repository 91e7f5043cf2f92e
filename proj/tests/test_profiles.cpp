#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "fastva/profiles.hpp"
#include "test_support.hpp"

using namespace fastva;

TEST_CASE("load_profiles accepts the reference two-model config") {
    const auto ps = load_profiles(testing::reference_config_json());
    REQUIRE(ps.models.size() == 2);
    CHECK(ps.models[0].npu_time_us == 52'000);
    CHECK(ps.models[0].server_time_us == 69'000);
    CHECK(ps.models[1].npu_time_us == 17'000);
    CHECK(ps.models[1].server_time_us == 9'000);
    CHECK(ps.models[0].server_accuracy(224) == 0.67);
    CHECK(ps.models[0].local_accuracy() == 0.52);
    CHECK(ps.models[1].local_accuracy() == 0.41);
    CHECK(ps.ladder == Ladder{45, 90, 134, 179, 224});
}

TEST_CASE("load_profiles rejects non-monotone accuracy") {
    const std::string doc = R"({
      "ladder": [45, 224],
      "models": [{"name": "m", "npu_time_ms": 10, "accuracy": {"45": 0.7, "224": 0.5}}],
      "env": {"bandwidth_bps": 1e6, "rtt_delay_ms": 0, "frame_rate_fps": 30, "deadline_ms": 100}
    })";
    CHECK_THROWS_WITH(load_profiles(doc), Catch::Matchers::ContainsSubstring("accuracy not monotone"));
}

TEST_CASE("load_profiles rejects an empty model list") {
    const std::string doc = R"({
      "ladder": [45],
      "models": [],
      "env": {"bandwidth_bps": 1e6, "rtt_delay_ms": 0, "frame_rate_fps": 30, "deadline_ms": 100}
    })";
    CHECK_THROWS_WITH(load_profiles(doc), Catch::Matchers::ContainsSubstring("empty model list"));
}

TEST_CASE("load_profiles rejects accuracy entries off the ladder") {
    const std::string doc = R"({
      "ladder": [45, 224],
      "models": [{"name": "m", "npu_time_ms": 10, "accuracy": {"45": 0.3, "100": 0.5}}],
      "env": {"bandwidth_bps": 1e6, "rtt_delay_ms": 0, "frame_rate_fps": 30, "deadline_ms": 100}
    })";
    CHECK_THROWS_WITH(load_profiles(doc), Catch::Matchers::ContainsSubstring("not in ladder"));
}

TEST_CASE("a model needs at least one execution side") {
    const std::string doc = R"({
      "ladder": [45],
      "models": [{"name": "m", "accuracy": {"45": 0.3}}],
      "env": {"bandwidth_bps": 1e6, "rtt_delay_ms": 0, "frame_rate_fps": 30, "deadline_ms": 100}
    })";
    CHECK_THROWS_WITH(load_profiles(doc), Catch::Matchers::ContainsSubstring("at least one of"));
}

TEST_CASE("frame interval times frame rate is one second") {
    for (double fps : {10.0, 24.0, 30.0, 50.0, 59.94}) {
        const auto env = testing::default_env(1e6, fps);
        env.validate();
        CHECK(env.frame_interval_ms() * env.frame_rate_fps ==
              Catch::Approx(1000.0).epsilon(1e-9));
    }
}

TEST_CASE("synthetic frames with zero jitter have the closed-form sizes") {
    const auto ps = testing::reference_profiles();
    const auto frames = gen_frames(ps.source, ps.env, ps.ladder, 10);
    REQUIRE(frames.size() == 10);
    for (const auto& f : frames) {
        CHECK(f.size_bits(224) == 4 * 224 * 224);  // 200,704 bits
        CHECK(f.size_bits(45) == 4 * 45 * 45);     // 8,100 bits
        CHECK(f.size_bits(45) < f.size_bits(224));
    }
    CHECK(frames[0].arrival_us == 0);
    CHECK(frames[1].arrival_us == 33'333);
    CHECK(frames[3].arrival_us == 100'000);
}

TEST_CASE("frame generation is deterministic under a fixed seed") {
    auto ps = testing::reference_profiles();
    ps.source.jitter_fraction = 0.2;
    ps.source.rng_seed = 42;
    const auto a = gen_frames(ps.source, ps.env, ps.ladder, 50);
    const auto b = gen_frames(ps.source, ps.env, ps.ladder, 50);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].size_bits_by_resolution == b[i].size_bits_by_resolution);
}

TEST_CASE("sizes stay strictly increasing across the ladder under jitter") {
    auto ps = testing::reference_profiles();
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        ps.source.jitter_fraction = rng.uniform(0.0, 0.9);
        ps.source.bits_per_pixel = rng.uniform(0.5, 12.0);
        ps.source.rng_seed = rng.next();
        const auto frames = gen_frames(ps.source, ps.env, ps.ladder, 20);
        for (const auto& f : frames) {
            std::int64_t prev = 0;
            for (int side : ps.ladder) {
                CHECK(f.size_bits(side) > prev);
                prev = f.size_bits(side);
            }
        }
    }
}

TEST_CASE("one jitter draw per frame applies to every resolution") {
    auto ps = testing::reference_profiles();
    ps.source.jitter_fraction = 0.4;
    ps.source.rng_seed = 5;
    const auto frames = gen_frames(ps.source, ps.env, ps.ladder, 20);
    for (const auto& f : frames) {
        const double ratio = static_cast<double>(f.size_bits(224)) / f.size_bits(45);
        CHECK(ratio == Catch::Approx(224.0 * 224.0 / (45.0 * 45.0)).epsilon(1e-3));
    }
}

TEST_CASE("gen_frames rejects n = 0") {
    const auto ps = testing::reference_profiles();
    CHECK_THROWS_AS(gen_frames(ps.source, ps.env, ps.ladder, 0), ConfigError);
}

TEST_CASE("serialize then load is the identity on validated profiles") {
    auto ps = testing::reference_profiles();
    ps.source.jitter_fraction = 0.15;
    ps.source.rng_seed = 99;
    const auto doc = serialize_profiles(ps);
    const auto back = load_profiles(doc);

    CHECK(back.ladder == ps.ladder);
    REQUIRE(back.models.size() == ps.models.size());
    for (std::size_t i = 0; i < ps.models.size(); ++i) {
        CHECK(back.models[i].model_id == ps.models[i].model_id);
        CHECK(back.models[i].npu_time_us == ps.models[i].npu_time_us);
        CHECK(back.models[i].server_time_us == ps.models[i].server_time_us);
        CHECK(back.models[i].accuracy_by_resolution == ps.models[i].accuracy_by_resolution);
        CHECK(back.models[i].npu_accuracy == ps.models[i].npu_accuracy);
    }
    CHECK(back.env.bandwidth_bps == ps.env.bandwidth_bps);
    CHECK(back.env.rtt_delay_us == ps.env.rtt_delay_us);
    CHECK(back.env.frame_rate_fps == ps.env.frame_rate_fps);
    CHECK(back.env.deadline_us == ps.env.deadline_us);
    CHECK(back.source.jitter_fraction == ps.source.jitter_fraction);
    CHECK(back.source.rng_seed == ps.source.rng_seed);
}

TEST_CASE("frame traces round-trip through save and load") {
    auto ps = testing::reference_profiles();
    ps.source.jitter_fraction = 0.3;
    const auto frames = gen_frames(ps.source, ps.env, ps.ladder, 12);

    const auto path = std::filesystem::temp_directory_path() / "fastva_trace_test.csv";
    save_frame_trace(path.string(), ps.ladder, frames);

    FrameSource trace;
    trace.mode = FrameSource::Mode::Trace;
    trace.trace_path = path.string();
    const auto back = gen_frames(trace, ps.env, ps.ladder, 12);
    for (std::size_t i = 0; i < frames.size(); ++i)
        CHECK(back[i].size_bits_by_resolution == frames[i].size_bits_by_resolution);

    CHECK_THROWS_AS(gen_frames(trace, ps.env, ps.ladder, 13), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("frame trace header must match the ladder") {
    const auto path = std::filesystem::temp_directory_path() / "fastva_trace_bad.csv";
    {
        std::ofstream out(path);
        out << "index,s45,s90\n0,100,200\n";
    }
    CHECK_THROWS_WITH(load_frame_trace(path.string(), {45, 90, 134}),
                      Catch::Matchers::ContainsSubstring("header mismatch"));
    std::filesystem::remove(path);
}
