// End-to-end checks of the command-line tool, driven as a subprocess. The
// binary's path arrives through the AEOS_CLI_PATH compile definition.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

#include "aeos/agent.hpp"
#include "aeos/scenario.hpp"
#include "aeos/schedulers.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() { return AEOS_CLI_PATH; }

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = "/tmp/aeos_cli_XXXXXX";
        char* made = mkdtemp(tmpl.data());
        REQUIRE(made != nullptr);
        path = made;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
    CHECK(run("--help") == 0);
    CHECK(run("generate --help") == 0);
    CHECK(run("") == 2);                                  // a subcommand is required
    CHECK(run("frobnicate") == 2);                        // unknown subcommand
    CHECK(run("generate --p-clouds 1.5 --count 1") == 2); // fraction out of range
    CHECK(run("generate --n -3") == 2);
}

TEST_CASE("scenario generation writes one file per seed") {
    TempDir dir;
    const int code = run("generate --n 5 --period 300 --count 2 --seed 50 --out-dir " +
                         (dir / ""));
    CHECK(code == 0);
    const fs::path first = dir / "scenario_00000050.json";
    const fs::path second = dir / "scenario_00000051.json";
    REQUIRE(fs::exists(first));
    REQUIRE(fs::exists(second));

    const aeos::Scenario a = aeos::load(first.string());
    CHECK(a.seed == 50);
    CHECK(a.targets.size() == 5);
    const aeos::Scenario b = aeos::load(second.string());
    CHECK(b.seed == 51);

    // rerunning refuses to clobber, then --force rewrites byte-identically
    const std::string before = slurp(first);
    CHECK(run("generate --n 5 --period 300 --count 2 --seed 50 --out-dir " + (dir / "")) == 1);
    CHECK(run("generate --n 5 --period 300 --count 2 --seed 50 --force --out-dir " +
              (dir / "")) == 0);
    CHECK(slurp(first) == before);
}

TEST_CASE("generation count zero is a no-op") {
    TempDir dir;
    CHECK(run("generate --count 0 --out-dir " + (dir / "")) == 0);
    CHECK(fs::is_empty(dir.path));
}

TEST_CASE("the default output directory comes from the environment") {
    TempDir dir;
    const std::string cmd = "AEOS_OUT_DIR=" + (dir / "") + " " + cli() +
                            " generate --n 4 --period 300 --count 1 --seed 7 >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "scenario_00000007.json"));
}

TEST_CASE("training produces a checkpoint and a log, reproducibly") {
    TempDir dir;
    const std::string ckpt = dir / "ck.json";
    const std::string log = dir / "log.csv";
    const std::string args = "train --n 4 --period 300 --episodes 3 --batch-size 4"
                             " --memory-capacity 64 --hidden-dim 8 --seed 9"
                             " --progress-every 0 --checkpoint " +
                             ckpt + " --log " + log;
    REQUIRE(run(args) == 0);
    REQUIRE(fs::exists(ckpt));
    REQUIRE(fs::exists(log));

    const aeos::Checkpoint c = aeos::load_checkpoint(ckpt);
    CHECK(c.episodes_completed == 3);
    CHECK(c.config.seed == 9);

    const std::string ckpt_bytes = slurp(ckpt);
    const std::string log_bytes = slurp(log);
    CHECK(run(args) == 1);  // refuses to overwrite without --force
    REQUIRE(run(args + " --force") == 0);
    CHECK(slurp(ckpt) == ckpt_bytes);
    CHECK(slurp(log) == log_bytes);
}

TEST_CASE("training can resume from a checkpoint") {
    TempDir dir;
    const std::string ckpt = dir / "ck.json";
    const std::string base = "train --n 4 --period 300 --batch-size 4 --memory-capacity 64"
                             " --hidden-dim 8 --seed 9 --progress-every 0 ";
    REQUIRE(run(base + "--episodes 2 --checkpoint " + ckpt + " --log " + (dir / "log1.csv")) ==
            0);
    REQUIRE(run(base + "--episodes 2 --resume " + ckpt + " --checkpoint " + (dir / "ck2.json") +
                " --log " + (dir / "log2.csv")) == 0);
    const aeos::Checkpoint resumed = aeos::load_checkpoint(dir / "ck2.json");
    CHECK(resumed.episodes_completed == 4);
}

TEST_CASE("solver comparison writes deterministic reports") {
    TempDir dir;
    REQUIRE(run("generate --n 5 --period 300 --count 3 --seed 80 --out-dir " + (dir / "")) == 0);
    const std::string report = dir / "report.csv";
    const std::string summary = dir / "summary.json";
    const std::string args = "compare --solvers max-resolution,max-targets,oracle"
                             " --oracle-node-limit 36 --scenarios " +
                             (dir / "") + " --out " + report + " --summary " + summary;
    REQUIRE(run(args) == 0);
    REQUIRE(fs::exists(report));
    REQUIRE(fs::exists(summary));

    const std::string bytes = slurp(report);
    CHECK(bytes.rfind("solver,", 0) == 0);
    CHECK(run(args) == 1);  // existing report without --force
    REQUIRE(run(args + " --force") == 0);
    CHECK(slurp(report) == bytes);

    CHECK(run("compare --solvers warp-drive --scenarios " + (dir / "")) == 2);
    CHECK(run("compare --solvers dqn --scenarios " + (dir / "")) == 2);  // dqn needs --checkpoint
}

TEST_CASE("evaluation needs a real checkpoint and real scenarios") {
    TempDir dir;
    REQUIRE(run("generate --n 4 --period 300 --count 1 --seed 90 --out-dir " + (dir / "")) == 0);
    CHECK(run("evaluate --checkpoint " + (dir / "missing.json") + " --scenarios " + (dir / "")) ==
          1);

    const std::string ckpt = dir / "ck.json";
    REQUIRE(run("train --n 4 --period 300 --episodes 2 --batch-size 4 --memory-capacity 64"
                " --hidden-dim 8 --seed 9 --progress-every 0 --checkpoint " +
                ckpt + " --log " + (dir / "log.csv")) == 0);
    CHECK(run("evaluate --checkpoint " + ckpt + " --scenarios " + (dir / "") + " --out " +
              (dir / "eval.csv")) == 0);
    CHECK(fs::exists(dir / "eval.csv"));
    CHECK(run("evaluate --checkpoint " + ckpt + " --scenarios " + (dir / "nowhere")) == 1);
}

TEST_CASE("schedule validation distinguishes clean from broken") {
    TempDir dir;
    REQUIRE(run("generate --n 6 --period 400 --count 1 --seed 95 --out-dir " + (dir / "")) == 0);
    const std::string scenario_path = dir / "scenario_00000095.json";
    const aeos::Scenario s = aeos::load(scenario_path);
    const std::string sched_path = dir / "schedule.json";
    aeos::save_schedule(aeos::max_targets(s), sched_path);
    CHECK(run("validate --scenario " + scenario_path + " --schedule " + sched_path) == 0);

    // same target twice: structurally valid JSON, infeasible schedule
    const auto& w = s.targets[0].window;
    std::ofstream bad(dir / "bad.json");
    bad << R"({"schema_version":1,"actions":[)"
        << R"({"target_id":0,"slot":"free","time_s":)" << w.start_s << "},"
        << R"({"target_id":0,"slot":"free","time_s":)" << (w.end_s - 1.0) << "}]}";
    bad.close();
    CHECK(run("validate --scenario " + scenario_path + " --schedule " + (dir / "bad.json")) == 1);

    // unparseable schedule file -> operational error, not a violation verdict
    std::ofstream(dir / "garbage.json") << "not json";
    CHECK(run("validate --scenario " + scenario_path + " --schedule " +
              (dir / "garbage.json")) == 1);
}

} // TEST_SUITE
