#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "aeos/maneuver.hpp"
#include "aeos/scenario.hpp"

namespace aeos {

/// Node id of the virtual start-of-episode node. It behaves as an already
/// "executed" action at t = 0 with the initial attitude and zero duration.
inline constexpr std::int32_t kVirtualNode = -1;

/// Per-node feature order: normalized resolution (gsd_nadir / gsd),
/// suitability flag, capture time / observation period.
inline constexpr int kFeatureDim = 3;
inline constexpr std::array<double, 3> kVirtualNodeFeatures{1.0, 1.0, 0.0};

/// Immutable per-scenario scheduling graph: one node per initially reachable
/// capture opportunity, and a successor edge i -> j wherever j's capture can
/// directly follow i's (different targets only). Shared by every episode,
/// replay snapshot, and solver working on the same instance.
struct GraphBase {
    std::vector<CandidateCapture> nodes;
    std::vector<std::vector<std::int32_t>> successors;    // ascending ids
    std::vector<std::array<double, kFeatureDim>> features;
    std::vector<double> capture_duration_s;               // d of the node's target
    double observation_period_s = 0.0;
    int num_targets = 0;
    std::uint64_t scenario_seed = 0;
    Attitude initial_attitude;
    TransitionProfile transition;
};

/// Builds the graph for a scenario: candidates unreachable from the initial
/// attitude at t = 0 are dropped, the rest become nodes with normalized
/// features and precomputed successor lists.
std::shared_ptr<const GraphBase> build_graph(const Scenario& s);

/// The node set handed to the Q-network: row 0 is the last executed action
/// (virtual or real), rows 1..k are the currently legal actions in ascending
/// node-id order. Edges are the induced successor edges plus row 0 -> every
/// action row.
struct StateView {
    std::vector<std::array<double, kFeatureDim>> features;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // (src row, dst row)
    std::vector<std::int32_t> node_ids;                        // row -> base node id
};

/// Mutable episode state over a shared GraphBase: the last executed action
/// plus the set of still-feasible nodes, which is exactly the legal action
/// set. Applying an action intersects the set with the action's successors,
/// which removes the acted-on target's other opportunities and everything no
/// longer reachable in time.
class ScheduleGraph {
public:
    explicit ScheduleGraph(std::shared_ptr<const GraphBase> base);
    /// Restores a mid-episode state (replay snapshots).
    ScheduleGraph(std::shared_ptr<const GraphBase> base, std::vector<std::int32_t> active,
                  std::int32_t last);

    const GraphBase& base() const { return *base_; }
    const std::shared_ptr<const GraphBase>& base_ptr() const { return base_; }
    std::int32_t last_action() const { return last_; }
    bool terminal() const { return active_.empty(); }

    /// Currently legal actions, ascending node ids; empty iff terminal.
    const std::vector<std::int32_t>& legal_actions() const { return active_; }

    /// Executes a legal action and returns its reward: the capture's profit
    /// when positive, otherwise -penalty. Throws std::invalid_argument for
    /// actions without an edge from the last action.
    double apply(std::int32_t node_id, double penalty);

    StateView state_view() const;

private:
    std::shared_ptr<const GraphBase> base_;
    std::vector<std::int32_t> active_;
    std::int32_t last_ = kVirtualNode;
};

struct StepOutcome {
    double reward = 0.0;
    bool done = false;
};

/// One scheduling rollout from the virtual node until no actions remain,
/// accumulating the executed sequence and its rewards.
class Episode {
public:
    explicit Episode(std::shared_ptr<const GraphBase> base, double penalty = 1.0);

    const ScheduleGraph& graph() const { return graph_; }
    bool done() const { return graph_.terminal(); }
    double penalty() const { return penalty_; }

    StepOutcome step(std::int32_t node_id);

    const std::vector<std::int32_t>& executed() const { return executed_; }
    const std::vector<double>& rewards() const { return rewards_; }
    double total_reward() const;

private:
    ScheduleGraph graph_;
    double penalty_;
    std::vector<std::int32_t> executed_;
    std::vector<double> rewards_;
};

} // namespace aeos
