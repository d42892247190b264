// Command-line front end: generate scenario sets, train the scheduler,
// evaluate and compare solvers, and validate schedule files.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aeos/agent.hpp"
#include "aeos/evaluation.hpp"
#include "aeos/scenario.hpp"
#include "aeos/schedulers.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_out_dir() {
    if (const char* env = std::getenv("AEOS_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

void ensure_writable(const fs::path& path, bool force) {
    if (!force && fs::exists(path)) {
        throw std::runtime_error("refusing to overwrite " + path.string() +
                                 " (pass --force to allow)");
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::string scenario_file_name(std::uint64_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scenario_%08llu.json",
                  static_cast<unsigned long long>(seed));
    return buf;
}

// Accepts scenario files and/or directories. Directories are scanned for
// files following the generate naming convention (scenario_*.json, taken in
// lexicographic order), so reports and checkpoints can live alongside them.
std::vector<aeos::Scenario> collect_scenarios(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const std::string& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                const std::string name = entry.path().filename().string();
                if (entry.is_regular_file() && name.rfind("scenario_", 0) == 0 &&
                    entry.path().extension() == ".json") {
                    found.push_back(entry.path().string());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    if (files.empty()) {
        throw std::runtime_error("no scenario files found under the given paths");
    }
    std::vector<aeos::Scenario> scenarios;
    scenarios.reserve(files.size());
    for (const std::string& f : files) scenarios.push_back(aeos::load(f));
    return scenarios;
}

struct GenerateOpts {
    aeos::GenerationParams params;
    int count = 1;
    std::string out_dir = default_out_dir();
    bool force = false;
};

void run_generate(const GenerateOpts& o) {
    if (o.count == 0) return;  // explicit no-op
    std::vector<fs::path> outputs;
    outputs.reserve(static_cast<std::size_t>(o.count));
    for (int i = 0; i < o.count; ++i) {
        outputs.emplace_back(fs::path(o.out_dir) /
                             scenario_file_name(o.params.seed + static_cast<std::uint64_t>(i)));
    }
    for (const fs::path& p : outputs) ensure_writable(p, o.force);
    for (int i = 0; i < o.count; ++i) {
        aeos::GenerationParams params = o.params;
        params.seed = o.params.seed + static_cast<std::uint64_t>(i);
        aeos::save(aeos::generate(params), outputs[static_cast<std::size_t>(i)].string());
        std::cout << "wrote " << outputs[static_cast<std::size_t>(i)].string() << '\n';
    }
}

struct TrainOpts {
    aeos::GenerationParams gen;
    aeos::TrainingConfig cfg;
    std::string checkpoint_path;
    std::string log_path;
    std::string resume_from;
    bool force = false;
    int progress_every = 100;
};

void run_train(const TrainOpts& o) {
    const fs::path ckpt = o.checkpoint_path.empty()
                              ? fs::path(default_out_dir()) / "checkpoint.json"
                              : fs::path(o.checkpoint_path);
    const fs::path log = o.log_path.empty() ? fs::path(default_out_dir()) / "training_log.csv"
                                            : fs::path(o.log_path);
    ensure_writable(ckpt, o.force);
    ensure_writable(log, o.force);

    const auto on_episode = [&](const aeos::EpisodeLog& row) {
        if (o.progress_every > 0 && (row.episode + 1) % o.progress_every == 0) {
            std::fprintf(stderr, "episode %d  epsilon %.4f  return %.3f  loss %.6f\n",
                         row.episode + 1, row.epsilon, row.episode_return, row.mean_batch_loss);
        }
    };
    const auto on_checkpoint = [&](const aeos::Checkpoint& c) {
        aeos::save_checkpoint(c, ckpt.string());
    };

    aeos::TrainResult result;
    if (!o.resume_from.empty()) {
        aeos::Checkpoint start = aeos::load_checkpoint(o.resume_from);
        result = aeos::train_from(start, o.gen, o.cfg.episodes, on_episode, on_checkpoint);
    } else {
        result = aeos::train(o.gen, o.cfg, on_episode, on_checkpoint);
    }
    aeos::write_training_log_csv(result.log, log.string());
    std::cout << "checkpoint: " << ckpt.string() << '\n';
    std::cout << "log: " << log.string() << '\n';
}

struct CompareOpts {
    std::vector<std::string> solver_names;
    std::string checkpoint_path;
    std::vector<std::string> scenario_paths;
    std::string out_path;
    std::string summary_path;
    double penalty = 1.0;
    int oracle_node_limit = 36;
    bool timings = false;
    int jobs = 1;
    bool force = false;
};

void run_compare(const CompareOpts& o) {
    const fs::path out = o.out_path.empty() ? fs::path(default_out_dir()) / "report.csv"
                                            : fs::path(o.out_path);
    ensure_writable(out, o.force);
    if (!o.summary_path.empty()) ensure_writable(o.summary_path, o.force);

    std::optional<aeos::Checkpoint> ckpt;
    std::vector<aeos::NamedSolver> solvers;
    for (const std::string& name : o.solver_names) {
        if (name == "dqn") {
            if (!ckpt) {
                if (o.checkpoint_path.empty()) {
                    throw CLI::ValidationError("--solvers",
                                               "solver 'dqn' requires --checkpoint");
                }
                ckpt = aeos::load_checkpoint(o.checkpoint_path);
            }
            const double penalty = o.penalty;
            const aeos::QNetwork net = ckpt->net;  // copy for the closure
            solvers.push_back({"dqn", [net, penalty](const aeos::Scenario& s) {
                                   return aeos::evaluate_policy(net, s, penalty);
                               }});
        } else if (name == "max-resolution") {
            solvers.push_back({"max-resolution", aeos::max_resolution});
        } else if (name == "max-targets") {
            solvers.push_back({"max-targets", aeos::max_targets});
        } else if (name == "oracle") {
            const int limit = o.oracle_node_limit;
            solvers.push_back({"oracle", [limit](const aeos::Scenario& s) {
                                   return aeos::exact_oracle(s, limit);
                               }});
        } else {
            throw CLI::ValidationError("--solvers", "unknown solver '" + name + "'");
        }
    }

    const std::vector<aeos::Scenario> scenarios = collect_scenarios(o.scenario_paths);
    aeos::CompareOptions copts;
    copts.collect_timings = o.timings;
    copts.jobs = o.jobs;
    const aeos::EvaluationReport report = aeos::compare(solvers, scenarios, copts);

    aeos::write_report_csv(report, out.string(), o.timings);
    std::cout << "report: " << out.string() << '\n';
    if (!o.summary_path.empty()) {
        aeos::write_summary_json(report, o.summary_path);
        std::cout << "summary: " << o.summary_path << '\n';
    }
    for (const aeos::SolverFailure& f : report.failures) {
        std::fprintf(stderr, "solver %s failed on scenario %llu: %s\n", f.solver.c_str(),
                     static_cast<unsigned long long>(f.scenario_seed), f.message.c_str());
    }
}

struct ValidateOpts {
    std::string scenario_path;
    std::string schedule_path;
};

int run_validate(const ValidateOpts& o) {
    const aeos::Scenario s = aeos::load(o.scenario_path);
    const aeos::Schedule schedule = aeos::load_schedule(s, o.schedule_path);
    const auto violations = aeos::validate(s, schedule);
    if (violations.empty()) {
        std::cout << "OK: schedule satisfies all constraints (" << schedule.actions.size()
                  << " actions)\n";
        return 0;
    }
    for (const aeos::Violation& v : violations) std::cout << v.message << '\n';
    std::cout << violations.size() << " violation(s)\n";
    return 1;
}

void add_generation_flags(CLI::App* cmd, aeos::GenerationParams& p) {
    cmd->add_option("--n", p.num_targets, "Number of targets")->check(CLI::PositiveNumber);
    cmd->add_option("--period", p.observation_period_s, "Observation period, seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--p-clouds", p.p_clouds, "Cloud coverage fraction")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--p-cn2", p.p_cn2, "Turbulence exceedance fraction")
        ->check(CLI::Range(0.0, 1.0));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agile Earth-observation scheduling laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from a config file");

    GenerateOpts gen_opts;
    CLI::App* gen_cmd = app.add_subcommand("generate", "Generate scenario files");
    add_generation_flags(gen_cmd, gen_opts.params);
    gen_cmd->add_option("--count", gen_opts.count, "How many scenarios to write")
        ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen_opts.params.seed, "Seed of the first scenario");
    gen_cmd->add_option("--out-dir", gen_opts.out_dir, "Output directory");
    gen_cmd->add_flag("--force", gen_opts.force, "Overwrite existing files");
    gen_cmd->callback([&] { run_generate(gen_opts); });

    TrainOpts train_opts;
    train_opts.gen.num_targets = 40;
    CLI::App* train_cmd = app.add_subcommand("train", "Train the scheduling network");
    add_generation_flags(train_cmd, train_opts.gen);
    train_cmd->add_option("--episodes", train_opts.cfg.episodes,
                          "Episodes to run (added on top of a resumed checkpoint)")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--epsilon0", train_opts.cfg.epsilon0, "Initial exploration rate")
        ->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--epsilon-decay", train_opts.cfg.epsilon_decay,
                          "Per-episode exploration decay");
    train_cmd->add_option("--epsilon-min", train_opts.cfg.epsilon_min, "Exploration floor")
        ->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--gamma", train_opts.cfg.gamma, "Discount factor");
    train_cmd->add_option("--lr", train_opts.cfg.learning_rate, "SGD learning rate")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch-size", train_opts.cfg.batch_size, "Replay batch size")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--penalty", train_opts.cfg.penalty,
                          "Reward penalty for zero-profit captures");
    train_cmd->add_option("--memory-capacity", train_opts.cfg.memory_capacity,
                          "Replay memory capacity")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--hidden-dim", train_opts.cfg.hidden_dim, "Embedding width")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train_opts.cfg.seed, "Training run seed");
    train_cmd->add_flag("--fixed-instance", train_opts.cfg.fixed_instance,
                        "Train on one fixed scenario instead of resampling per episode");
    train_cmd->add_option("--checkpoint-interval", train_opts.cfg.checkpoint_interval,
                          "Save the checkpoint every K episodes (0 = only at the end)")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--checkpoint", train_opts.checkpoint_path, "Checkpoint output path");
    train_cmd->add_option("--log", train_opts.log_path, "Training log CSV path");
    train_cmd->add_option("--resume", train_opts.resume_from, "Continue from this checkpoint");
    train_cmd->add_option("--progress-every", train_opts.progress_every,
                          "Progress print interval, episodes (0 = quiet)");
    train_cmd->add_flag("--force", train_opts.force, "Overwrite existing outputs");
    train_cmd->callback([&] { run_train(train_opts); });

    CompareOpts eval_opts;
    eval_opts.solver_names = {"dqn"};
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Evaluate a trained checkpoint");
    eval_cmd->add_option("--checkpoint", eval_opts.checkpoint_path, "Trained checkpoint")
        ->required();
    eval_cmd->add_option("--scenarios", eval_opts.scenario_paths,
                         "Scenario files and/or directories")
        ->required();
    eval_cmd->add_option("--out", eval_opts.out_path, "Report CSV path");
    eval_cmd->add_option("--summary", eval_opts.summary_path, "Aggregate summary JSON path");
    eval_cmd->add_option("--penalty", eval_opts.penalty, "Reward penalty for scoring");
    eval_cmd->add_flag("--timings", eval_opts.timings,
                       "Record per-solve wall time (breaks rerun byte-identity)");
    eval_cmd->add_option("--jobs", eval_opts.jobs, "Parallel instance evaluations")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_flag("--force", eval_opts.force, "Overwrite existing outputs");
    eval_cmd->callback([&] { run_compare(eval_opts); });

    CompareOpts cmp_opts;
    cmp_opts.solver_names = {"dqn", "max-resolution", "max-targets"};
    CLI::App* cmp_cmd = app.add_subcommand("compare", "Compare solvers on a scenario set");
    cmp_cmd->add_option("--solvers", cmp_opts.solver_names,
                        "Solvers: dqn, max-resolution, max-targets, oracle")
        ->delimiter(',');
    cmp_cmd->add_option("--checkpoint", cmp_opts.checkpoint_path,
                        "Trained checkpoint (needed for dqn)");
    cmp_cmd->add_option("--scenarios", cmp_opts.scenario_paths,
                        "Scenario files and/or directories")
        ->required();
    cmp_cmd->add_option("--out", cmp_opts.out_path, "Report CSV path");
    cmp_cmd->add_option("--summary", cmp_opts.summary_path, "Aggregate summary JSON path");
    cmp_cmd->add_option("--penalty", cmp_opts.penalty, "Reward penalty for scoring");
    cmp_cmd->add_option("--oracle-node-limit", cmp_opts.oracle_node_limit,
                        "Refuse oracle solves above this node count")
        ->check(CLI::PositiveNumber);
    cmp_cmd->add_flag("--timings", cmp_opts.timings,
                      "Record per-solve wall time (breaks rerun byte-identity)");
    cmp_cmd->add_option("--jobs", cmp_opts.jobs, "Parallel instance evaluations")
        ->check(CLI::PositiveNumber);
    cmp_cmd->add_flag("--force", cmp_opts.force, "Overwrite existing outputs");
    cmp_cmd->callback([&] { run_compare(cmp_opts); });

    ValidateOpts val_opts;
    int validate_result = 0;
    CLI::App* val_cmd = app.add_subcommand("validate", "Check a schedule against a scenario");
    val_cmd->add_option("--scenario", val_opts.scenario_path, "Scenario file")->required();
    val_cmd->add_option("--schedule", val_opts.schedule_path, "Schedule file")->required();
    val_cmd->callback([&] { validate_result = run_validate(val_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // 2 for usage errors; 0 for --help/--version
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return validate_result;
}
