#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aeos/graph_env.hpp"
#include "aeos/neural.hpp"
#include "aeos/rng.hpp"
#include "aeos/scenario.hpp"
#include "aeos/schedulers.hpp"

namespace aeos {

/// Q-learning hyperparameters. Defaults follow the standard learning setup;
/// seed selects the whole run's random stream.
struct TrainingConfig {
    double epsilon0 = 1.0;
    double epsilon_decay = 0.999;
    double epsilon_min = 0.01;
    double gamma = 0.999;
    double learning_rate = 5e-5;
    int batch_size = 64;
    int episodes = 5000;
    double penalty = 1.0;
    int memory_capacity = 50000;
    std::uint64_t seed = 0;
    bool fixed_instance = false;  // keep one training scenario instead of resampling per episode
    int hidden_dim = 32;
    int checkpoint_interval = 0;  // episodes between checkpoint callbacks; 0 disables
};

/// Compact episode-state snapshot over a shared graph: the still-feasible
/// node set and the last action.
struct GraphSnapshot {
    std::vector<std::int32_t> active;
    std::int32_t last = kVirtualNode;
};

struct ReplayTransition {
    std::shared_ptr<const GraphBase> base;
    GraphSnapshot state;
    std::int32_t action = 0;
    double reward = 0.0;
    GraphSnapshot next_state;
    bool done = false;
};

/// Fixed-capacity transition store with ring eviction of the oldest entry.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(ReplayTransition t);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    const ReplayTransition& at(std::size_t i) const { return storage_[i]; }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;  // ring write position once full
    std::vector<ReplayTransition> storage_;
};

ScheduleGraph restore_state(const std::shared_ptr<const GraphBase>& base,
                            const GraphSnapshot& snap);

/// Epsilon-greedy action choice: a uniformly random legal action with
/// probability epsilon, otherwise the legal action with the highest Q-value
/// (ties broken toward the lowest node id). Throws std::invalid_argument on
/// terminal states.
std::int32_t select_action(const QNetwork& net, const ScheduleGraph& state, double epsilon,
                           Rng& rng);

/// Bootstrapped regression target: reward for terminal transitions, else
/// reward + gamma * max Q over the next state's legal actions (the same
/// network provides the bootstrap).
double td_target(const ReplayTransition& t, const QNetwork& net, double gamma);

struct EpisodeLog {
    int episode = 0;
    double epsilon = 0.0;
    double episode_return = 0.0;
    double mean_batch_loss = 0.0;  // NaN when no updates ran this episode
    int schedule_length = 0;
};

struct TrainResult {
    QNetwork net;
    std::vector<EpisodeLog> log;
    double final_epsilon = 0.0;
    int episodes_completed = 0;
};

using EpisodeCallback = std::function<void(const EpisodeLog&)>;

/// Persisted training state: network, its config, and schedule position.
struct Checkpoint {
    QNetwork net;
    TrainingConfig config;
    int episodes_completed = 0;
    double epsilon = 0.0;
};

using CheckpointCallback = std::function<void(const Checkpoint&)>;

/// Full Q-learning run: per episode, roll out with epsilon-greedy actions,
/// store every transition, and once the memory holds a full batch apply one
/// squared-error SGD update per sampled transition after every step; epsilon
/// decays multiplicatively per episode down to its floor. Deterministic per
/// config. Throws std::runtime_error if the loss turns non-finite.
/// on_checkpoint fires every cfg.checkpoint_interval episodes (if enabled)
/// and always after the final one.
TrainResult train(const GenerationParams& gen, const TrainingConfig& cfg,
                  const EpisodeCallback& on_episode = {},
                  const CheckpointCallback& on_checkpoint = {});

/// Continues a checkpointed run for additional_episodes. Episode streams are
/// keyed by absolute episode index, so a resumed run is reproducible given
/// the same checkpoint and seeds (replay memory restarts empty).
TrainResult train_from(const Checkpoint& start, const GenerationParams& gen,
                       int additional_episodes, const EpisodeCallback& on_episode = {},
                       const CheckpointCallback& on_checkpoint = {});

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);  // throws SchemaError on mismatch

void write_training_log_csv(const std::vector<EpisodeLog>& log, const std::string& path);

/// Greedy (epsilon = 0) rollout of the network on one scenario.
Schedule evaluate_policy(const QNetwork& net, const Scenario& s, double penalty = 1.0,
                         const EnergyModel& energy = {});

/// Epsilon value after the given number of completed episodes, by the same
/// iterated decay the training loop applies.
double epsilon_after(int episodes, const TrainingConfig& cfg);

} // namespace aeos
