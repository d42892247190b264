#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aeos/scenario.hpp"
#include "aeos/schedulers.hpp"

namespace aeos {

/// Metrics of one solver on one instance. Precision (the fraction of
/// scheduled captures that produced a usable image) is undefined for empty
/// schedules and left unset. runtime_ms is filled only when timing
/// collection is enabled, so reports stay reproducible by default.
struct MetricsRow {
    std::string solver;
    std::uint64_t scenario_seed = 0;
    int num_targets = 0;
    double observation_period_s = 0.0;
    double p_clouds = 0.0;
    double p_cn2 = 0.0;
    double total_profit = 0.0;
    int n_scheduled = 0;
    int n_positive = 0;
    int discarded_count = 0;
    std::optional<double> precision;
    double energy_total = 0.0;
    double energy_wasted = 0.0;
    std::optional<double> runtime_ms;
};

/// Per-solver totals over an instance set. aggregate_precision is the ratio
/// of summed positives to summed scheduled captures (unset if nothing was
/// scheduled anywhere).
struct SolverAggregate {
    std::string solver;
    int instances = 0;
    double mean_profit = 0.0;
    long long total_scheduled = 0;
    long long total_positive = 0;
    long long total_discarded = 0;
    std::optional<double> aggregate_precision;
    double total_energy = 0.0;
    double total_energy_wasted = 0.0;
};

struct SolverFailure {
    std::string solver;
    std::uint64_t scenario_seed = 0;
    std::string message;
};

struct EvaluationReport {
    std::vector<MetricsRow> rows;          // scenario-major, then solver order
    std::vector<SolverAggregate> aggregates;
    std::vector<SolverFailure> failures;   // solver errors recorded, not fatal
};

/// Scores one schedule; the schedule must pass the independent validator
/// (throws std::invalid_argument naming the first violation otherwise).
MetricsRow score(const Scenario& s, const Schedule& schedule, std::string solver_name);

using SolverFn = std::function<Schedule(const Scenario&)>;

struct NamedSolver {
    std::string name;
    SolverFn solve;
};

struct CompareOptions {
    bool collect_timings = false;
    int jobs = 1;  // instance-level fan-out; output is identical for any value
};

/// Runs every solver on every instance and aggregates. Row order and content
/// do not depend on the job count or on timing collection (timings only add
/// the optional column's values).
EvaluationReport compare(const std::vector<NamedSolver>& solvers,
                         const std::vector<Scenario>& instances,
                         const CompareOptions& options = {});

/// Percentage reduction of model_total vs baseline_total:
/// 100 * (1 - model/baseline). Returns 0 when the baseline total is 0.
double reduction_pct(double baseline_total, double model_total);

std::string report_csv_string(const EvaluationReport& report, bool include_timings = false);
void write_report_csv(const EvaluationReport& report, const std::string& path,
                      bool include_timings = false);
void write_summary_json(const EvaluationReport& report, const std::string& path);

} // namespace aeos
