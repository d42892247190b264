#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "doctest.h"

#include "aeos/atmosphere.hpp"
#include "aeos/scenario.hpp"
#include "support/builders.hpp"

using namespace aeos;
namespace fs = std::filesystem;

namespace {

GenerationParams params_of(int n, double period, double pc, double pcn2, std::uint64_t seed) {
    GenerationParams p;
    p.num_targets = n;
    p.observation_period_s = period;
    p.p_clouds = pc;
    p.p_cn2 = pcn2;
    p.seed = seed;
    return p;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("aeos_scenario_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("reference configuration produces a full candidate set") {
    const Scenario s = generate(params_of(40, 1623.79, 0.4, 0.2, 7));
    CHECK(s.targets.size() == 40);
    CHECK(enumerate_candidates(s).size() == 120);
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
        const Target& t = s.targets[i];
        CHECK(t.id == static_cast<std::int32_t>(i));  // dense ids in order
        CHECK(t.window.start_s >= 0.0);
        CHECK(t.window.end_s <= s.observation_period_s);
        CHECK(t.window.duration_s() >= 18.0);
        CHECK(t.window.duration_s() <= 185.0);
        CHECK(t.window.duration_s() >= t.duration_s);
    }
    CHECK(s.initial_attitude.roll_deg == 0.0);
    CHECK(s.initial_attitude.pitch_deg == 0.0);
    CHECK(s.initial_attitude.yaw_deg == 0.0);
    CHECK(s.capture_times_per_target == 3);
}

TEST_CASE("single-target generation") {
    const Scenario s = generate(params_of(1, 200.0, 0.0, 0.0, 3));
    CHECK(s.targets.size() == 1);
    const auto cands = enumerate_candidates(s);
    CHECK(cands.size() == 3);
    for (const CandidateCapture& c : cands) {
        CHECK(c.time_s >= s.targets[0].window.start_s);
        CHECK(c.time_s <= s.targets[0].window.end_s - s.targets[0].duration_s + 1e-12);
        CHECK(c.profit >= 0.0);
        CHECK(c.profit <= 1.0);
    }
}

TEST_CASE("generation is a pure function of its parameters") {
    const GenerationParams p = params_of(12, 600.0, 0.4, 0.2, 99);
    const Scenario a = generate(p);
    const Scenario b = generate(p);
    CHECK(a == b);
    const Scenario c = generate(params_of(12, 600.0, 0.4, 0.2, 100));
    CHECK_FALSE(a == c);
}

TEST_CASE("candidate slots sit at window start, midpoint, and end minus duration") {
    Scenario s = aeos_test::build_scenario({{{700.0, 0.0}, 100.0, 200.0}}, 400.0);
    const auto cands = enumerate_candidates(s);
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].slot == CaptureSlot::Start);
    CHECK(cands[0].time_s == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(cands[1].slot == CaptureSlot::Middle);
    CHECK(cands[1].time_s == doctest::Approx(150.0).epsilon(1e-12));
    CHECK(cands[2].slot == CaptureSlot::End);
    CHECK(cands[2].time_s == doctest::Approx(199.85).epsilon(1e-12));
}

TEST_CASE("clear nadir overflight yields unit profit at the midpoint") {
    const Scenario s = aeos_test::nadir_scenario();
    const auto cands = enumerate_candidates(s);
    REQUIRE(cands.size() == 3);
    CHECK(cands[1].profit == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cands[1].gsd == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cands[1].suitable == 1);
    CHECK(cands[0].profit < 1.0);
    CHECK(cands[2].profit < 1.0);
}

TEST_CASE("overcast skies zero out every candidate profit") {
    const double v = SatelliteConfig{}.ground_speed_km_s;
    Scenario s = aeos_test::build_scenario({{{350.0, 0.0}, 350.0 / v - 40.0, 350.0 / v + 40.0}},
                                           200.0, /*cloudy=*/true);
    for (const CandidateCapture& c : enumerate_candidates(s)) {
        CHECK(c.suitable == 0);
        CHECK(c.profit == 0.0);
    }
}

TEST_CASE("per-target profit peaks at the midpoint when suitability agrees") {
    const Scenario s = generate(params_of(30, 977.95, 0.4, 0.2, 21));
    const auto cands = enumerate_candidates(s);
    for (std::size_t i = 0; i < cands.size(); i += 3) {
        const auto& start = cands[i];
        const auto& middle = cands[i + 1];
        const auto& end = cands[i + 2];
        if (start.suitable == middle.suitable && middle.suitable == end.suitable) {
            CHECK(middle.profit >= start.profit - 1e-12);
            CHECK(middle.profit >= end.profit - 1e-12);
        }
    }
}

TEST_CASE("candidate skies statistics track the grid parameters") {
    double delta_sum = 0.0;
    double exceed_sum = 0.0;
    long count = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scenario s = generate(params_of(40, 977.95, 0.4, 0.2, seed));
        for (const Target& t : s.targets) {
            delta_sum += cloud_fraction(s.clouds, t.position, t.size_km);
            exceed_sum += cn2_at(s.turbulence, t.position) > s.thresholds.cn2_max ? 1.0 : 0.0;
            ++count;
        }
    }
    CHECK(std::fabs(delta_sum / count - 0.4) <= 0.05);
    CHECK(std::fabs(exceed_sum / count - 0.2) <= 0.05);
}

TEST_CASE("save and load round-trip exactly") {
    TempDir tmp;
    const Scenario s = generate(params_of(15, 600.0, 0.5, 0.3, 11));
    const fs::path file = tmp.path / "scenario.json";
    save(s, file.string());
    const Scenario loaded = load(file.string());
    CHECK(loaded == s);

    // serialization itself is deterministic
    const fs::path file2 = tmp.path / "scenario2.json";
    save(s, file2.string());
    CHECK(slurp(file) == slurp(file2));
}

TEST_CASE("loading rejects truncated and malformed files") {
    TempDir tmp;
    const Scenario s = generate(params_of(5, 400.0, 0.4, 0.2, 2));
    const fs::path file = tmp.path / "scenario.json";
    save(s, file.string());

    const std::string full = slurp(file);
    const fs::path broken = tmp.path / "broken.json";
    std::ofstream(broken, std::ios::binary) << full.substr(0, full.size() / 2);
    CHECK_THROWS_AS((void)load(broken.string()), SchemaError);

    const fs::path garbage = tmp.path / "garbage.json";
    std::ofstream(garbage, std::ios::binary) << "not json at all";
    CHECK_THROWS_AS((void)load(garbage.string()), SchemaError);

    // a missing file is an I/O failure, not a schema problem
    CHECK_THROWS_AS((void)load((tmp.path / "missing.json").string()), std::runtime_error);
}

TEST_CASE("overlapping windows are legal content") {
    TempDir tmp;
    // densely packed targets guarantee window overlaps
    const Scenario s = generate(params_of(40, 977.95, 0.4, 0.2, 8));
    bool overlap = false;
    for (std::size_t i = 0; i < s.targets.size() && !overlap; ++i) {
        for (std::size_t j = i + 1; j < s.targets.size(); ++j) {
            if (s.targets[i].window.start_s < s.targets[j].window.end_s &&
                s.targets[j].window.start_s < s.targets[i].window.end_s) {
                overlap = true;
                break;
            }
        }
    }
    CHECK(overlap);
    const fs::path file = tmp.path / "dense.json";
    save(s, file.string());
    CHECK(load(file.string()) == s);
}

TEST_CASE("impossible configurations are rejected up front") {
    CHECK_THROWS_AS((void)generate(params_of(0, 600.0, 0.4, 0.2, 1)), std::invalid_argument);
    CHECK_THROWS_AS((void)generate(params_of(5, -1.0, 0.4, 0.2, 1)), std::invalid_argument);
    CHECK_THROWS_AS((void)generate(params_of(5, 600.0, 1.4, 0.2, 1)), std::invalid_argument);
    CHECK_THROWS_AS((void)generate(params_of(5, 600.0, 0.4, -0.1, 1)), std::invalid_argument);
    // period shorter than the minimum window duration cannot host any target
    CHECK_THROWS_AS((void)generate(params_of(1, 10.0, 0.4, 0.2, 1)), std::invalid_argument);
}

} // TEST_SUITE
