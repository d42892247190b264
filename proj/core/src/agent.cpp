#include "aeos/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "text_format.hpp"

namespace aeos {

using ordered_json = nlohmann::ordered_json;

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayMemory: capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayMemory::push(ReplayTransition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[next_] = std::move(t);
        next_ = (next_ + 1) % capacity_;
    }
}

ScheduleGraph restore_state(const std::shared_ptr<const GraphBase>& base,
                            const GraphSnapshot& snap) {
    return ScheduleGraph(base, snap.active, snap.last);
}

std::int32_t select_action(const QNetwork& net, const ScheduleGraph& state, double epsilon,
                           Rng& rng) {
    const auto& legal = state.legal_actions();
    if (legal.empty()) throw std::invalid_argument("select_action: state is terminal");
    if (rng.uniform() < epsilon) {
        return legal[static_cast<std::size_t>(rng.uniform_int(legal.size()))];
    }
    const std::vector<double> q = q_values(net, state);
    std::size_t best = 0;
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (q[i] > q[best]) best = i;  // strict: ties keep the lowest node id
    }
    return legal[best];
}

double td_target(const ReplayTransition& t, const QNetwork& net, double gamma) {
    if (t.done) return t.reward;
    const ScheduleGraph next = restore_state(t.base, t.next_state);
    const std::vector<double> q = q_values(net, next);
    if (q.empty()) return t.reward;
    return t.reward + gamma * *std::max_element(q.begin(), q.end());
}

double epsilon_after(int episodes, const TrainingConfig& cfg) {
    double eps = cfg.epsilon0;
    for (int i = 0; i < episodes; ++i) eps = std::max(cfg.epsilon_min, eps * cfg.epsilon_decay);
    return eps;
}

namespace {

void check_config(const TrainingConfig& cfg) {
    if (cfg.epsilon_min < 0.0 || cfg.epsilon_min > cfg.epsilon0 || cfg.epsilon0 > 1.0) {
        throw std::invalid_argument("train: need 0 <= epsilon_min <= epsilon0 <= 1");
    }
    if (cfg.epsilon_decay <= 0.0 || cfg.epsilon_decay > 1.0) {
        throw std::invalid_argument("train: epsilon decay must lie in (0, 1]");
    }
    if (cfg.gamma <= 0.0 || cfg.gamma > 1.0) {
        throw std::invalid_argument("train: discount factor must lie in (0, 1]");
    }
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("train: learning rate must be positive");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch size must be positive");
    if (cfg.episodes < 0) throw std::invalid_argument("train: episode count must be non-negative");
    if (cfg.memory_capacity < cfg.batch_size) {
        throw std::invalid_argument("train: memory capacity must hold at least one batch");
    }
    if (cfg.hidden_dim < 1) throw std::invalid_argument("train: hidden width must be positive");
}

// Random-stream layout under the master seed: stream 0 initializes the
// network; streams 2e+2 / 2e+3 drive episode e's scenario and its action /
// batch sampling. Keying by absolute episode index keeps resumed runs on the
// identical stream.
constexpr std::uint64_t kNetInitStream = 0;
std::uint64_t scenario_stream(int episode) { return 2 * static_cast<std::uint64_t>(episode) + 2; }
std::uint64_t action_stream(int episode) { return 2 * static_cast<std::uint64_t>(episode) + 3; }

TrainResult train_range(QNetwork net, const GenerationParams& gen, const TrainingConfig& cfg,
                        int first_episode, int end_episode, double epsilon,
                        const EpisodeCallback& on_episode,
                        const CheckpointCallback& on_checkpoint) {
    const Rng master(cfg.seed);
    ReplayMemory memory(static_cast<std::size_t>(cfg.memory_capacity));

    std::shared_ptr<const GraphBase> fixed_base;
    if (cfg.fixed_instance) fixed_base = build_graph(generate(gen));

    TrainResult result;
    result.log.reserve(static_cast<std::size_t>(end_episode - first_episode));

    for (int ep = first_episode; ep < end_episode; ++ep) {
        Rng ep_rng = master.split(action_stream(ep));
        std::shared_ptr<const GraphBase> base = fixed_base;
        if (!base) {
            GenerationParams p = gen;
            p.seed = master.split(scenario_stream(ep)).seed();
            base = build_graph(generate(p));
        }

        Episode episode(base, cfg.penalty);
        double episode_return = 0.0;
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        int steps = 0;

        while (!episode.done()) {
            GraphSnapshot before{episode.graph().legal_actions(), episode.graph().last_action()};
            const std::int32_t action = select_action(net, episode.graph(), epsilon, ep_rng);
            const StepOutcome outcome = episode.step(action);
            GraphSnapshot after{episode.graph().legal_actions(), episode.graph().last_action()};
            memory.push(ReplayTransition{base, std::move(before), action, outcome.reward,
                                         std::move(after), outcome.done});
            episode_return += outcome.reward;
            ++steps;

            if (memory.size() < static_cast<std::size_t>(cfg.batch_size)) continue;
            for (int b = 0; b < cfg.batch_size; ++b) {
                const ReplayTransition& tr = memory.at(
                    static_cast<std::size_t>(ep_rng.uniform_int(memory.size())));
                const double target = td_target(tr, net, cfg.gamma);
                const ScheduleGraph state = restore_state(tr.base, tr.state);
                const auto& legal = state.legal_actions();
                const auto pos = std::lower_bound(legal.begin(), legal.end(), tr.action);
                const auto action_row =
                    static_cast<int>(pos - legal.begin()) + 1;  // row 0 is the last action
                const double loss = mse_sgd_update(net, to_graph_spec(state.state_view()),
                                                   action_row, target, cfg.learning_rate);
                if (!std::isfinite(loss)) throw std::runtime_error("train: loss went non-finite");
                loss_sum += loss;
                ++loss_count;
            }
        }

        EpisodeLog row;
        row.episode = ep;
        row.epsilon = epsilon;  // the value the episode's action choices used
        row.episode_return = episode_return;
        row.mean_batch_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count)
                                             : std::numeric_limits<double>::quiet_NaN();
        row.schedule_length = steps;
        result.log.push_back(row);
        if (on_episode) on_episode(row);

        epsilon = std::max(cfg.epsilon_min, epsilon * cfg.epsilon_decay);

        if (on_checkpoint && ((cfg.checkpoint_interval > 0 &&
                               (ep + 1 - first_episode) % cfg.checkpoint_interval == 0) ||
                              ep + 1 == end_episode)) {
            on_checkpoint(Checkpoint{net, cfg, ep + 1, epsilon});
        }
    }

    result.net = std::move(net);
    result.final_epsilon = epsilon;
    result.episodes_completed = end_episode;
    return result;
}

} // namespace

TrainResult train(const GenerationParams& gen, const TrainingConfig& cfg,
                  const EpisodeCallback& on_episode, const CheckpointCallback& on_checkpoint) {
    check_config(cfg);
    Rng net_rng = Rng(cfg.seed).split(kNetInitStream);
    QNetwork net = make_q_network(kFeatureDim, cfg.hidden_dim, net_rng);
    return train_range(std::move(net), gen, cfg, 0, cfg.episodes, cfg.epsilon0, on_episode,
                       on_checkpoint);
}

TrainResult train_from(const Checkpoint& start, const GenerationParams& gen,
                       int additional_episodes, const EpisodeCallback& on_episode,
                       const CheckpointCallback& on_checkpoint) {
    check_config(start.config);
    if (additional_episodes < 0) {
        throw std::invalid_argument("train_from: episode count must be non-negative");
    }
    return train_range(start.net, gen, start.config, start.episodes_completed,
                       start.episodes_completed + additional_episodes, start.epsilon, on_episode,
                       on_checkpoint);
}

namespace {

ordered_json config_to_json(const TrainingConfig& cfg) {
    return ordered_json{{"epsilon0", cfg.epsilon0},
                        {"epsilon_decay", cfg.epsilon_decay},
                        {"epsilon_min", cfg.epsilon_min},
                        {"gamma", cfg.gamma},
                        {"learning_rate", cfg.learning_rate},
                        {"batch_size", cfg.batch_size},
                        {"episodes", cfg.episodes},
                        {"penalty", cfg.penalty},
                        {"memory_capacity", cfg.memory_capacity},
                        {"seed", cfg.seed},
                        {"fixed_instance", cfg.fixed_instance},
                        {"hidden_dim", cfg.hidden_dim},
                        {"checkpoint_interval", cfg.checkpoint_interval}};
}

TrainingConfig config_from_json(const ordered_json& j) {
    TrainingConfig cfg;
    cfg.epsilon0 = j.at("epsilon0").get<double>();
    cfg.epsilon_decay = j.at("epsilon_decay").get<double>();
    cfg.epsilon_min = j.at("epsilon_min").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.episodes = j.at("episodes").get<int>();
    cfg.penalty = j.at("penalty").get<double>();
    cfg.memory_capacity = j.at("memory_capacity").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.fixed_instance = j.at("fixed_instance").get<bool>();
    cfg.hidden_dim = j.at("hidden_dim").get<int>();
    cfg.checkpoint_interval = j.at("checkpoint_interval").get<int>();
    return cfg;
}

} // namespace

void save_checkpoint(const Checkpoint& c, const std::string& path) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config"] = config_to_json(c.config);
    j["episodes_completed"] = c.episodes_completed;
    j["epsilon"] = c.epsilon;
    j["network"] = ordered_json{{"in_dim", c.net.gat1.weight.rows},
                                {"hidden_dim", c.net.gat1.weight.cols},
                                {"parameters", flatten_parameters(c.net)}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint file: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != 1) {
            throw SchemaError("checkpoint file: unsupported schema version");
        }
        Checkpoint c;
        c.config = config_from_json(j.at("config"));
        c.episodes_completed = j.at("episodes_completed").get<int>();
        c.epsilon = j.at("epsilon").get<double>();
        const auto& nj = j.at("network");
        const int in_dim = nj.at("in_dim").get<int>();
        const int hidden = nj.at("hidden_dim").get<int>();
        Rng scratch(0);
        c.net = make_q_network(in_dim, hidden, scratch);
        const auto params = nj.at("parameters").get<std::vector<double>>();
        if (params.size() != parameter_count(c.net)) {
            throw SchemaError("checkpoint file: parameter count does not match the shapes");
        }
        unflatten_parameters(c.net, params);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint file: ") + e.what());
    }
}

void write_training_log_csv(const std::vector<EpisodeLog>& log, const std::string& path) {
    std::string text = "episode,epsilon,episode_return,mean_batch_loss,schedule_length\n";
    for (const EpisodeLog& row : log) {
        text += std::to_string(row.episode);
        text += ',';
        detail::append_double(text, row.epsilon);
        text += ',';
        detail::append_double(text, row.episode_return);
        text += ',';
        detail::append_double(text, row.mean_batch_loss);  // blank when no updates ran
        text += ',';
        text += std::to_string(row.schedule_length);
        text += '\n';
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

Schedule evaluate_policy(const QNetwork& net, const Scenario& s, double penalty,
                         const EnergyModel& energy) {
    Episode episode(build_graph(s), penalty);
    while (!episode.done()) {
        const auto& legal = episode.graph().legal_actions();
        const std::vector<double> q = q_values(net, episode.graph());
        std::size_t best = 0;
        for (std::size_t i = 1; i < q.size(); ++i) {
            if (q[i] > q[best]) best = i;
        }
        episode.step(legal[best]);
    }
    std::vector<CandidateCapture> actions;
    actions.reserve(episode.executed().size());
    const GraphBase& base = episode.graph().base();
    for (std::int32_t id : episode.executed()) {
        actions.push_back(base.nodes[static_cast<std::size_t>(id)]);
    }
    return make_schedule(s, std::move(actions), penalty, energy);
}

} // namespace aeos
