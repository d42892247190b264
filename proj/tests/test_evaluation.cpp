#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "aeos/evaluation.hpp"
#include "aeos/scenario.hpp"
#include "aeos/schedulers.hpp"
#include "support/builders.hpp"

using namespace aeos;

namespace {

GenerationParams gen_params(int n, double period, std::uint64_t seed) {
    GenerationParams p;
    p.num_targets = n;
    p.observation_period_s = period;
    p.p_clouds = 0.4;
    p.p_cn2 = 0.2;
    p.seed = seed;
    return p;
}

std::vector<Scenario> small_instances(int count, int n, std::uint64_t first_seed) {
    std::vector<Scenario> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(generate(gen_params(n, 600.0, first_seed + static_cast<std::uint64_t>(i))));
    }
    return out;
}

int count_columns(const std::string& line) {
    int commas = 0;
    for (char c : line) {
        if (c == ',') ++commas;
    }
    return commas + 1;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name)
        : path("/tmp/aeos_eval_" + std::to_string(getpid()) + "_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("scoring a perfect single capture") {
    const Scenario s = aeos_test::nadir_scenario();
    const Schedule sched = max_resolution(s);
    const MetricsRow row = score(s, sched, "solo");
    CHECK(row.solver == "solo");
    CHECK(row.scenario_seed == 0);
    CHECK(row.num_targets == 1);
    CHECK(row.observation_period_s == 200.0);
    CHECK(row.p_clouds == 0.0);
    CHECK(row.p_cn2 == 0.0);
    CHECK(row.total_profit == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.n_scheduled == 1);
    CHECK(row.n_positive == 1);
    CHECK(row.discarded_count == 0);
    REQUIRE(row.precision.has_value());
    CHECK(*row.precision == 1.0);
    CHECK(row.energy_total > 0.0);
    CHECK(row.energy_wasted == 0.0);
    CHECK_FALSE(row.runtime_ms.has_value());
}

TEST_CASE("scoring an empty schedule leaves precision unset") {
    const Scenario s = aeos_test::nadir_scenario();
    const MetricsRow row = score(s, Schedule{}, "idle");
    CHECK(row.n_scheduled == 0);
    CHECK(row.n_positive == 0);
    CHECK(row.discarded_count == 0);
    CHECK_FALSE(row.precision.has_value());
}

TEST_CASE("scoring counts discarded captures against precision") {
    const double v = SatelliteConfig{}.ground_speed_km_s;
    const double tc = 350.0 / v;
    const Scenario s = aeos_test::build_scenario({{{350.0, 0.0}, tc - 40.0, tc + 40.0}}, 200.0,
                                                 /*cloudy=*/true);
    const MetricsRow row = score(s, max_resolution(s), "cloud-blind");
    CHECK(row.n_scheduled == 1);
    CHECK(row.n_positive == 0);
    CHECK(row.discarded_count == 1);
    REQUIRE(row.precision.has_value());
    CHECK(*row.precision == 0.0);
    CHECK(row.energy_wasted == doctest::Approx(row.energy_total).epsilon(1e-12));
}

TEST_CASE("scoring refuses infeasible schedules") {
    const Scenario s = aeos_test::nadir_scenario();
    const CandidateCapture a = candidate_at(s, s.targets[0], 15.0, CaptureSlot::Free);
    const CandidateCapture b = candidate_at(s, s.targets[0], 80.0, CaptureSlot::Free);
    CHECK_THROWS_AS((void)score(s, make_schedule(s, {a, b}), "dup"), std::invalid_argument);
}

TEST_CASE("identical solvers produce identical columns") {
    const std::vector<Scenario> instances = small_instances(3, 8, 400);
    const NamedSolver twin_a{"twin", [](const Scenario& s) { return max_targets(s); }};
    const NamedSolver twin_b{"twin", [](const Scenario& s) { return max_targets(s); }};
    const EvaluationReport report = compare({twin_a, twin_b}, instances);

    REQUIRE(report.rows.size() == 6);
    REQUIRE(report.aggregates.size() == 2);
    CHECK(report.failures.empty());
    for (std::size_t i = 0; i < 3; ++i) {
        const MetricsRow& a = report.rows[2 * i];
        const MetricsRow& b = report.rows[2 * i + 1];
        CHECK(a.scenario_seed == instances[i].seed);  // scenario-major ordering
        CHECK(b.scenario_seed == a.scenario_seed);
        CHECK(a.total_profit == b.total_profit);
        CHECK(a.n_scheduled == b.n_scheduled);
        CHECK(a.energy_total == b.energy_total);
    }
    CHECK(report.aggregates[0].mean_profit == report.aggregates[1].mean_profit);
    CHECK(report.aggregates[0].total_scheduled == report.aggregates[1].total_scheduled);
    CHECK(report.aggregates[0].instances == 3);
}

TEST_CASE("fan-out never changes the report") {
    const std::vector<Scenario> instances = small_instances(4, 10, 500);
    const std::vector<NamedSolver> solvers{
        {"best-res", [](const Scenario& s) { return max_resolution(s); }},
        {"earliest", [](const Scenario& s) { return max_targets(s); }},
    };
    const EvaluationReport serial = compare(solvers, instances, {false, 1});
    const EvaluationReport threaded = compare(solvers, instances, {false, 2});
    CHECK(report_csv_string(serial) == report_csv_string(threaded));
    const EvaluationReport again = compare(solvers, instances, {false, 1});
    CHECK(report_csv_string(serial) == report_csv_string(again));
}

TEST_CASE("exhaustive search tops every heuristic column") {
    const std::vector<Scenario> instances = small_instances(5, 6, 600);
    const std::vector<NamedSolver> solvers{
        {"best-res", [](const Scenario& s) { return max_resolution(s); }},
        {"earliest", [](const Scenario& s) { return max_targets(s); }},
        {"optimal", [](const Scenario& s) { return exact_oracle(s); }},
    };
    const EvaluationReport report = compare(solvers, instances);
    REQUIRE(report.failures.empty());
    REQUIRE(report.rows.size() == 15);
    for (std::size_t i = 0; i < 5; ++i) {
        const double optimal = report.rows[3 * i + 2].total_profit;
        CHECK(optimal >= report.rows[3 * i].total_profit - 1e-9);
        CHECK(optimal >= report.rows[3 * i + 1].total_profit - 1e-9);
    }
    // the exact solver never keeps a worthless capture, so its precision is
    // perfect whenever it schedules at all
    const SolverAggregate& optimal_agg = report.aggregates[2];
    if (optimal_agg.total_scheduled > 0) {
        CHECK(*optimal_agg.aggregate_precision == 1.0);
        if (report.aggregates[1].aggregate_precision) {
            CHECK(*optimal_agg.aggregate_precision >=
                  *report.aggregates[1].aggregate_precision);
        }
    }
}

TEST_CASE("per-row accounting invariants hold on generated instances") {
    const std::vector<Scenario> instances = small_instances(4, 20, 700);
    const std::vector<NamedSolver> solvers{
        {"best-res", [](const Scenario& s) { return max_resolution(s); }},
        {"earliest", [](const Scenario& s) { return max_targets(s); }},
    };
    const EvaluationReport report = compare(solvers, instances);
    REQUIRE(report.failures.empty());
    for (const MetricsRow& row : report.rows) {
        CHECK(row.n_positive + row.discarded_count == row.n_scheduled);
        CHECK(row.energy_wasted <= row.energy_total + 1e-12);
        CHECK(row.n_scheduled <= row.num_targets);
        if (row.n_scheduled > 0) {
            CHECK(*row.precision ==
                  doctest::Approx(static_cast<double>(row.n_positive) / row.n_scheduled)
                      .epsilon(1e-15));
        }
    }
}

TEST_CASE("improvement percentages") {
    CHECK(reduction_pct(100.0, 35.0) == doctest::Approx(65.0).epsilon(1e-12));
    CHECK(reduction_pct(50.0, 50.0) == 0.0);
    CHECK(reduction_pct(0.0, 10.0) == 0.0);
    CHECK(reduction_pct(40.0, 50.0) == doctest::Approx(-25.0).epsilon(1e-12));
}

TEST_CASE("csv layout: header, optional columns, blank missing values") {
    const std::vector<Scenario> instances = small_instances(1, 6, 800);
    const std::vector<NamedSolver> solvers{
        {"earliest", [](const Scenario& s) { return max_targets(s); }},
        {"idle", [](const Scenario&) { return Schedule{}; }},
    };
    const EvaluationReport plain = compare(solvers, instances);
    const std::string csv = report_csv_string(plain);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header ==
          "solver,scenario_seed,num_targets,observation_period_s,p_clouds,p_cn2,total_profit,"
          "n_scheduled,n_positive,discarded_count,precision,energy_total,energy_wasted");
    std::string row1;
    std::string row2;
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(count_columns(header) == 13);
    CHECK(count_columns(row1) == 13);
    CHECK(row1.substr(0, 9) == "earliest,");
    CHECK(row2.substr(0, 5) == "idle,");
    // the idle solver schedules nothing: profit 0, counts 0, blank precision
    CHECK(row2.find(",0,0,0,,") != std::string::npos);

    const EvaluationReport timed = compare(solvers, instances, {true, 1});
    const std::string timed_csv = report_csv_string(timed, true);
    std::istringstream timed_lines(timed_csv);
    std::getline(timed_lines, header);
    CHECK(header ==
          "solver,scenario_seed,num_targets,observation_period_s,p_clouds,p_cn2,total_profit,"
          "n_scheduled,n_positive,discarded_count,precision,energy_total,energy_wasted,"
          "runtime_ms");
    std::getline(timed_lines, row1);
    CHECK(count_columns(row1) == 14);
    CHECK(row1.back() != ',');  // a timing value is actually present

    TempFile file("report.csv");
    write_report_csv(plain, file.path);
    std::ifstream in(file.path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == csv);
}

TEST_CASE("summary files mirror the aggregates") {
    const std::vector<Scenario> instances = small_instances(2, 8, 900);
    const std::vector<NamedSolver> solvers{
        {"earliest", [](const Scenario& s) { return max_targets(s); }},
        {"idle", [](const Scenario&) { return Schedule{}; }},
    };
    const EvaluationReport report = compare(solvers, instances);
    TempFile file("summary.json");
    write_summary_json(report, file.path);

    std::ifstream in(file.path);
    const nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.at("schema_version").get<int>() == 1);
    REQUIRE(j.at("aggregates").size() == 2);
    CHECK(j.at("aggregates")[0].at("solver").get<std::string>() == "earliest");
    CHECK(j.at("aggregates")[0].at("instances").get<int>() == 2);
    CHECK(j.at("aggregates")[0].at("mean_profit").get<double>() ==
          report.aggregates[0].mean_profit);
    CHECK(j.at("aggregates")[1].at("aggregate_precision").is_null());
    CHECK(j.at("failures").empty());
}

TEST_CASE("solver failures are recorded without sinking the run") {
    const std::vector<Scenario> instances = small_instances(2, 8, 950);
    const std::vector<NamedSolver> solvers{
        {"earliest", [](const Scenario& s) { return max_targets(s); }},
        {"broken", [](const Scenario&) -> Schedule { throw std::runtime_error("boom"); }},
    };
    const EvaluationReport report = compare(solvers, instances);
    CHECK(report.rows.size() == 2);  // only the working solver contributes
    REQUIRE(report.failures.size() == 2);
    CHECK(report.failures[0].solver == "broken");
    CHECK(report.failures[0].scenario_seed == instances[0].seed);
    CHECK(report.failures[0].message == "boom");
    CHECK(report.aggregates[1].instances == 0);
    CHECK_FALSE(report.aggregates[1].aggregate_precision.has_value());
    CHECK(report.aggregates[1].mean_profit == 0.0);
}

} // TEST_SUITE
