#include "aeos/graph_env.hpp"

#include <algorithm>
#include <stdexcept>

namespace aeos {

std::shared_ptr<const GraphBase> build_graph(const Scenario& s) {
    auto base = std::make_shared<GraphBase>();
    base->observation_period_s = s.observation_period_s;
    base->num_targets = static_cast<int>(s.targets.size());
    base->scenario_seed = s.seed;
    base->initial_attitude = s.initial_attitude;

    // Only opportunities reachable from the start pose become nodes; the
    // virtual start behaves as a zero-duration action at t = 0.
    for (const CandidateCapture& cand : enumerate_candidates(s)) {
        if (!can_follow(0.0, s.initial_attitude, 0.0, cand.time_s, cand.attitude,
                        base->transition)) {
            continue;
        }
        base->nodes.push_back(cand);
        base->capture_duration_s.push_back(s.targets[static_cast<std::size_t>(cand.target_id)]
                                               .duration_s);
        base->features.push_back({s.satellite.gsd_nadir_m_per_px / cand.gsd,
                                  static_cast<double>(cand.suitable),
                                  cand.time_s / s.observation_period_s});
    }

    const auto n = static_cast<std::int32_t>(base->nodes.size());
    base->successors.resize(static_cast<std::size_t>(n));
    for (std::int32_t i = 0; i < n; ++i) {
        const CandidateCapture& a = base->nodes[static_cast<std::size_t>(i)];
        auto& succ = base->successors[static_cast<std::size_t>(i)];
        for (std::int32_t j = 0; j < n; ++j) {
            const CandidateCapture& b = base->nodes[static_cast<std::size_t>(j)];
            if (a.target_id == b.target_id) continue;
            if (can_follow(a, b, base->capture_duration_s[static_cast<std::size_t>(i)],
                           base->transition)) {
                succ.push_back(j);
            }
        }
    }
    return base;
}

ScheduleGraph::ScheduleGraph(std::shared_ptr<const GraphBase> base) : base_(std::move(base)) {
    active_.resize(base_->nodes.size());
    for (std::size_t i = 0; i < active_.size(); ++i) active_[i] = static_cast<std::int32_t>(i);
}

ScheduleGraph::ScheduleGraph(std::shared_ptr<const GraphBase> base,
                             std::vector<std::int32_t> active, std::int32_t last)
    : base_(std::move(base)), active_(std::move(active)), last_(last) {}

double ScheduleGraph::apply(std::int32_t node_id, double penalty) {
    const auto it = std::lower_bound(active_.begin(), active_.end(), node_id);
    if (it == active_.end() || *it != node_id) {
        throw std::invalid_argument("ScheduleGraph::apply: action is not currently legal");
    }
    const auto& succ = base_->successors[static_cast<std::size_t>(node_id)];

    // New action set = still-feasible nodes that can also follow the action
    // just taken; both lists are ascending, so intersect linearly.
    std::vector<std::int32_t> next;
    next.reserve(std::min(active_.size(), succ.size()));
    std::set_intersection(active_.begin(), active_.end(), succ.begin(), succ.end(),
                          std::back_inserter(next));
    active_ = std::move(next);
    last_ = node_id;

    const double profit = base_->nodes[static_cast<std::size_t>(node_id)].profit;
    return profit > 0.0 ? profit : -penalty;
}

StateView ScheduleGraph::state_view() const {
    StateView view;
    const std::size_t count = active_.size() + 1;
    view.features.reserve(count);
    view.node_ids.reserve(count);

    view.node_ids.push_back(last_);
    view.features.push_back(last_ == kVirtualNode
                                ? kVirtualNodeFeatures
                                : base_->features[static_cast<std::size_t>(last_)]);
    for (std::int32_t id : active_) {
        view.node_ids.push_back(id);
        view.features.push_back(base_->features[static_cast<std::size_t>(id)]);
    }

    // Row 0 (the last action) connects to every legal action by construction.
    const auto rows = static_cast<std::int32_t>(count);
    for (std::int32_t r = 1; r < rows; ++r) view.edges.emplace_back(0, r);

    // Induced successor edges among the legal actions.
    for (std::int32_t r = 1; r < rows; ++r) {
        const auto id = static_cast<std::size_t>(view.node_ids[static_cast<std::size_t>(r)]);
        const auto& succ = base_->successors[id];
        std::size_t a = 0;
        std::size_t b = 0;
        // active_ and succ are both ascending; walk them together.
        while (a < active_.size() && b < succ.size()) {
            if (active_[a] < succ[b]) {
                ++a;
            } else if (succ[b] < active_[a]) {
                ++b;
            } else {
                view.edges.emplace_back(r, static_cast<std::int32_t>(a) + 1);
                ++a;
                ++b;
            }
        }
    }
    return view;
}

Episode::Episode(std::shared_ptr<const GraphBase> base, double penalty)
    : graph_(std::move(base)), penalty_(penalty) {}

StepOutcome Episode::step(std::int32_t node_id) {
    const double reward = graph_.apply(node_id, penalty_);
    executed_.push_back(node_id);
    rewards_.push_back(reward);
    return StepOutcome{reward, graph_.terminal()};
}

double Episode::total_reward() const {
    double sum = 0.0;
    for (double r : rewards_) sum += r;
    return sum;
}

} // namespace aeos
