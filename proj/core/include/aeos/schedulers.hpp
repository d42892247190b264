#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "aeos/graph_env.hpp"
#include "aeos/maneuver.hpp"
#include "aeos/scenario.hpp"

namespace aeos {

/// Solver output: the executed capture sequence with its value and maneuver
/// cost accounting. A maneuver leading into a zero-profit capture counts as
/// wasted energy (the image is discarded).
struct Schedule {
    std::vector<CandidateCapture> actions;
    double total_profit = 0.0;           // sum of capture profits
    double total_reward = 0.0;           // profits with zero-profit captures as -penalty
    std::vector<double> maneuver_times_s;  // per action, slew from the previous pose
    double energy_total = 0.0;
    double energy_wasted = 0.0;
};

/// Fills in every derived Schedule field for an action sequence (attitude
/// chain starts at the scenario's initial attitude at t = 0).
Schedule make_schedule(const Scenario& s, std::vector<CandidateCapture> actions,
                       double penalty = 1.0, const EnergyModel& energy = {});

/// Baseline: considers every target only at its mid-window capture time (the
/// best-resolution moment) and greedily appends targets in ascending
/// mid-window time when the slew fits; atmospheric conditions are ignored
/// when choosing.
Schedule max_resolution(const Scenario& s);

/// Baseline: targets in ascending window-start order, each captured at the
/// earliest in-window time reachable from the previous action; infeasible
/// targets are skipped. Capture times are continuous, not slot-restricted.
Schedule max_targets(const Scenario& s);

/// Thrown when an instance is too large for exhaustive optimal search.
class OracleLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact profit-maximal schedule by depth-first search over the scheduling
/// graph with memoization and an upper-bound prune. Refuses instances with
/// more than node_limit graph nodes (throws OracleLimitExceeded).
Schedule exact_oracle(const Scenario& s, int node_limit = 36);

enum class ViolationKind {
    Window,          // capture interval not inside the target's window
    TransitionTime,  // consecutive captures closer than the required slew
    DuplicateTarget, // same target captured more than once
};

struct Violation {
    ViolationKind kind;
    int first_index = -1;   // offending action index
    int second_index = -1;  // partner action for pairwise violations
    std::string message;
};

/// Independent feasibility check of a schedule against its scenario: window
/// containment, slew-time separation (recomputing attitudes from target
/// geometry), and one-capture-per-target. Empty result iff feasible. Shares
/// no logic with the graph environment.
std::vector<Violation> validate(const Scenario& s, const Schedule& schedule);

/// Schedule files store (target_id, slot, time_s) triples; loading re-derives
/// attitudes, quality, and profits from the scenario. Throws SchemaError on
/// malformed content.
void save_schedule(const Schedule& schedule, const std::string& path);
Schedule load_schedule(const Scenario& s, const std::string& path);

} // namespace aeos
