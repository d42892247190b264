#include "aeos/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "text_format.hpp"

namespace aeos {

using ordered_json = nlohmann::ordered_json;

MetricsRow score(const Scenario& s, const Schedule& schedule, std::string solver_name) {
    const auto violations = validate(s, schedule);
    if (!violations.empty()) {
        throw std::invalid_argument("score: schedule violates constraints: " +
                                    violations.front().message);
    }
    MetricsRow row;
    row.solver = std::move(solver_name);
    row.scenario_seed = s.seed;
    row.num_targets = static_cast<int>(s.targets.size());
    row.observation_period_s = s.observation_period_s;
    row.p_clouds = s.clouds.coverage_fraction;
    row.p_cn2 = s.turbulence.exceed_fraction;
    row.total_profit = schedule.total_profit;
    row.n_scheduled = static_cast<int>(schedule.actions.size());
    row.n_positive = static_cast<int>(
        std::count_if(schedule.actions.begin(), schedule.actions.end(),
                      [](const CandidateCapture& a) { return a.profit > 0.0; }));
    row.discarded_count = row.n_scheduled - row.n_positive;
    if (row.n_scheduled > 0) {
        row.precision = static_cast<double>(row.n_positive) / row.n_scheduled;
    }
    row.energy_total = schedule.energy_total;
    row.energy_wasted = schedule.energy_wasted;
    return row;
}

EvaluationReport compare(const std::vector<NamedSolver>& solvers,
                         const std::vector<Scenario>& instances,
                         const CompareOptions& options) {
    const std::size_t num_solvers = solvers.size();
    const std::size_t num_instances = instances.size();
    std::vector<std::optional<MetricsRow>> slots(num_solvers * num_instances);
    std::vector<std::optional<SolverFailure>> failures(num_solvers * num_instances);

    const auto run_instance = [&](std::size_t i) {
        const Scenario& s = instances[i];
        for (std::size_t k = 0; k < num_solvers; ++k) {
            const std::size_t slot = i * num_solvers + k;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const Schedule schedule = solvers[k].solve(s);
                const auto t1 = std::chrono::steady_clock::now();
                MetricsRow row = score(s, schedule, solvers[k].name);
                if (options.collect_timings) {
                    row.runtime_ms =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                }
                slots[slot] = std::move(row);
            } catch (const std::exception& e) {
                failures[slot] = SolverFailure{solvers[k].name, s.seed, e.what()};
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || num_instances <= 1) {
        for (std::size_t i = 0; i < num_instances; ++i) run_instance(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const auto worker_count =
            std::min<std::size_t>(static_cast<std::size_t>(jobs), num_instances);
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < num_instances;
                     i = next.fetch_add(1)) {
                    run_instance(i);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    EvaluationReport report;
    // Aggregate by solver position (not name), so registering the same name
    // twice yields two identical aggregates instead of double-counted ones.
    for (std::size_t k = 0; k < num_solvers; ++k) {
        SolverAggregate agg;
        agg.solver = solvers[k].name;
        double profit_sum = 0.0;
        for (std::size_t i = 0; i < num_instances; ++i) {
            const auto& slot = slots[i * num_solvers + k];
            if (!slot) continue;
            const MetricsRow& row = *slot;
            ++agg.instances;
            profit_sum += row.total_profit;
            agg.total_scheduled += row.n_scheduled;
            agg.total_positive += row.n_positive;
            agg.total_discarded += row.discarded_count;
            agg.total_energy += row.energy_total;
            agg.total_energy_wasted += row.energy_wasted;
        }
        agg.mean_profit = agg.instances > 0 ? profit_sum / agg.instances : 0.0;
        if (agg.total_scheduled > 0) {
            agg.aggregate_precision =
                static_cast<double>(agg.total_positive) / static_cast<double>(agg.total_scheduled);
        }
        report.aggregates.push_back(std::move(agg));
    }

    report.rows.reserve(slots.size());
    for (auto& slot : slots) {
        if (slot) report.rows.push_back(std::move(*slot));
    }
    for (auto& f : failures) {
        if (f) report.failures.push_back(std::move(*f));
    }
    return report;
}

double reduction_pct(double baseline_total, double model_total) {
    if (baseline_total == 0.0) return 0.0;
    return 100.0 * (1.0 - model_total / baseline_total);
}

std::string report_csv_string(const EvaluationReport& report, bool include_timings) {
    std::string text =
        "solver,scenario_seed,num_targets,observation_period_s,p_clouds,p_cn2,total_profit,"
        "n_scheduled,n_positive,discarded_count,precision,energy_total,energy_wasted";
    if (include_timings) text += ",runtime_ms";
    text += '\n';
    for (const MetricsRow& row : report.rows) {
        text += row.solver;
        text += ',';
        text += std::to_string(row.scenario_seed);
        text += ',';
        text += std::to_string(row.num_targets);
        text += ',';
        detail::append_double(text, row.observation_period_s);
        text += ',';
        detail::append_double(text, row.p_clouds);
        text += ',';
        detail::append_double(text, row.p_cn2);
        text += ',';
        detail::append_double(text, row.total_profit);
        text += ',';
        text += std::to_string(row.n_scheduled);
        text += ',';
        text += std::to_string(row.n_positive);
        text += ',';
        text += std::to_string(row.discarded_count);
        text += ',';
        if (row.precision) detail::append_double(text, *row.precision);
        text += ',';
        detail::append_double(text, row.energy_total);
        text += ',';
        detail::append_double(text, row.energy_wasted);
        if (include_timings) {
            text += ',';
            if (row.runtime_ms) detail::append_double(text, *row.runtime_ms);
        }
        text += '\n';
    }
    return text;
}

void write_report_csv(const EvaluationReport& report, const std::string& path,
                      bool include_timings) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << report_csv_string(report, include_timings);
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_summary_json(const EvaluationReport& report, const std::string& path) {
    ordered_json j;
    j["schema_version"] = 1;
    ordered_json aggs = ordered_json::array();
    for (const SolverAggregate& a : report.aggregates) {
        ordered_json aj{{"solver", a.solver},
                        {"instances", a.instances},
                        {"mean_profit", a.mean_profit},
                        {"total_scheduled", a.total_scheduled},
                        {"total_positive", a.total_positive},
                        {"total_discarded", a.total_discarded},
                        {"total_energy", a.total_energy},
                        {"total_energy_wasted", a.total_energy_wasted}};
        if (a.aggregate_precision) {
            aj["aggregate_precision"] = *a.aggregate_precision;
        } else {
            aj["aggregate_precision"] = nullptr;
        }
        aggs.push_back(std::move(aj));
    }
    j["aggregates"] = std::move(aggs);
    ordered_json fails = ordered_json::array();
    for (const SolverFailure& f : report.failures) {
        fails.push_back(ordered_json{{"solver", f.solver},
                                     {"scenario_seed", f.scenario_seed},
                                     {"message", f.message}});
    }
    j["failures"] = std::move(fails);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace aeos
