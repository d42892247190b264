#include "aeos/schedulers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <unordered_map>

#include "json.hpp"

namespace aeos {

using ordered_json = nlohmann::ordered_json;

Schedule make_schedule(const Scenario& s, std::vector<CandidateCapture> actions, double penalty,
                       const EnergyModel& energy) {
    Schedule sched;
    sched.actions = std::move(actions);
    sched.maneuver_times_s.reserve(sched.actions.size());

    Attitude prev_att = s.initial_attitude;
    for (const CandidateCapture& a : sched.actions) {
        const double alpha = displacement_deg(prev_att, a.attitude);
        const double slew = transition_time_s(alpha);
        const double joules = maneuver_energy(alpha, energy);
        sched.maneuver_times_s.push_back(slew);
        sched.energy_total += joules;
        if (a.profit <= 0.0) sched.energy_wasted += joules;
        sched.total_profit += a.profit;
        sched.total_reward += a.profit > 0.0 ? a.profit : -penalty;
        prev_att = a.attitude;
    }
    return sched;
}

Schedule max_resolution(const Scenario& s) {
    // One opportunity per target, at the best-resolution moment.
    std::vector<CandidateCapture> middles;
    middles.reserve(s.targets.size());
    for (const Target& t : s.targets) {
        middles.push_back(
            candidate_at(s, t, (t.window.start_s + t.window.end_s) / 2.0, CaptureSlot::Middle));
    }
    std::stable_sort(middles.begin(), middles.end(),
                     [](const CandidateCapture& a, const CandidateCapture& b) {
                         return a.time_s < b.time_s;
                     });

    std::vector<CandidateCapture> picked;
    double prev_t = 0.0;
    double prev_d = 0.0;
    Attitude prev_att = s.initial_attitude;
    for (const CandidateCapture& c : middles) {
        if (!can_follow(prev_t, prev_att, prev_d, c.time_s, c.attitude)) continue;
        picked.push_back(c);
        prev_t = c.time_s;
        prev_d = s.targets[static_cast<std::size_t>(c.target_id)].duration_s;
        prev_att = c.attitude;
    }
    return make_schedule(s, std::move(picked));
}

namespace {

// Earliest time in [t_lo, t_hi] at which the target can be captured after the
// previous action, or nullopt. The slack
//   g(t) = t - (t_prev + d_prev + slew(t))
// is strictly increasing in t (the slew time changes slower than wall time),
// so a bisection bracket is valid; the returned right endpoint satisfies
// g >= 0 exactly.
std::optional<double> earliest_feasible_time(const Scenario& s, const Target& target, double t_lo,
                                             double t_hi, double t_prev, double d_prev,
                                             const Attitude& att_prev) {
    const auto slack = [&](double t) {
        const Attitude att = attitude_at(s.satellite, target.position, t);
        return t - (t_prev + d_prev + transition_time_s(displacement_deg(att_prev, att)));
    };
    if (slack(t_lo) >= 0.0) return t_lo;
    if (slack(t_hi) < 0.0) return std::nullopt;
    double lo = t_lo;  // slack < 0
    double hi = t_hi;  // slack >= 0
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        (slack(mid) >= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

} // namespace

Schedule max_targets(const Scenario& s) {
    std::vector<const Target*> order;
    order.reserve(s.targets.size());
    for (const Target& t : s.targets) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(), [](const Target* a, const Target* b) {
        return a->window.start_s < b->window.start_s;
    });

    std::vector<CandidateCapture> picked;
    double prev_t = 0.0;
    double prev_d = 0.0;
    Attitude prev_att = s.initial_attitude;
    for (const Target* t : order) {
        const auto when = earliest_feasible_time(s, *t, t->window.start_s,
                                                 t->window.end_s - t->duration_s, prev_t, prev_d,
                                                 prev_att);
        if (!when) continue;
        picked.push_back(candidate_at(s, *t, *when, CaptureSlot::Free));
        prev_t = *when;
        prev_d = t->duration_s;
        prev_att = picked.back().attitude;
    }
    return make_schedule(s, std::move(picked));
}

namespace {

struct OracleSearch {
    const GraphBase& base;
    std::vector<std::uint64_t> succ_mask;
    std::vector<double> profit;
    std::vector<int> target_of;
    int num_targets;
    // key: (last + 1) in the top bits, the feasible-set mask below
    std::unordered_map<std::uint64_t, double> memo;
    std::unordered_map<std::uint64_t, int> choice;

    std::uint64_t key(int last, std::uint64_t mask) const {
        return (static_cast<std::uint64_t>(last + 1) << base.nodes.size()) | mask;
    }

    // Upper bound on any feasible completion: each target contributes at most
    // its best remaining opportunity.
    double upper_bound(std::uint64_t mask) const {
        thread_local std::vector<double> best;
        best.assign(static_cast<std::size_t>(num_targets), 0.0);
        double total = 0.0;
        for (std::uint64_t m = mask; m != 0; m &= m - 1) {
            const int j = std::countr_zero(m);
            auto& slot = best[static_cast<std::size_t>(target_of[static_cast<std::size_t>(j)])];
            const double p = profit[static_cast<std::size_t>(j)];
            if (p > slot) {
                total += p - slot;
                slot = p;
            }
        }
        return total;
    }

    double solve(int last, std::uint64_t mask) {
        if (mask == 0) return 0.0;
        const std::uint64_t k = key(last, mask);
        if (const auto it = memo.find(k); it != memo.end()) return it->second;

        // Stopping (value 0) is always available; an action is explored only
        // if its profit plus an optimistic completion could strictly beat the
        // best option found so far. Ties keep the earliest action, so the
        // result is deterministic. Zero-profit actions are skipped outright:
        // slew time is subadditive in angular displacement, so removing an
        // intermediate capture never breaks the rest of a chain, and a
        // worthless capture therefore can never be required for the optimum.
        double best_value = 0.0;
        int best_action = -1;
        for (std::uint64_t m = mask; m != 0; m &= m - 1) {
            const int j = std::countr_zero(m);
            const double p = profit[static_cast<std::size_t>(j)];
            if (p <= 0.0) continue;
            const std::uint64_t next = mask & succ_mask[static_cast<std::size_t>(j)];
            if (p + upper_bound(next) <= best_value) continue;
            const double value = p + solve(j, next);
            if (value > best_value) {
                best_value = value;
                best_action = j;
            }
        }
        memo.emplace(k, best_value);
        choice.emplace(k, best_action);
        return best_value;
    }
};

} // namespace

Schedule exact_oracle(const Scenario& s, int node_limit) {
    if (node_limit < 1 || node_limit > 56) {
        throw std::invalid_argument("exact_oracle: node_limit must lie in [1, 56]");
    }
    const auto base = build_graph(s);
    const auto n = static_cast<int>(base->nodes.size());
    if (n > node_limit) {
        throw OracleLimitExceeded("exact_oracle: instance has " + std::to_string(n) +
                                  " graph nodes, above the limit of " +
                                  std::to_string(node_limit));
    }

    OracleSearch search{*base, {}, {}, {}, base->num_targets, {}, {}};
    search.succ_mask.resize(static_cast<std::size_t>(n), 0);
    search.profit.resize(static_cast<std::size_t>(n));
    search.target_of.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        search.profit[static_cast<std::size_t>(i)] = base->nodes[static_cast<std::size_t>(i)].profit;
        search.target_of[static_cast<std::size_t>(i)] =
            base->nodes[static_cast<std::size_t>(i)].target_id;
        for (std::int32_t j : base->successors[static_cast<std::size_t>(i)]) {
            search.succ_mask[static_cast<std::size_t>(i)] |= std::uint64_t{1}
                                                             << static_cast<unsigned>(j);
        }
    }

    const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    search.solve(-1, all);

    // Rebuild the optimal sequence from the per-state choices.
    std::vector<CandidateCapture> picked;
    int last = -1;
    std::uint64_t mask = all;
    while (mask != 0) {
        const int j = search.choice.at(search.key(last, mask));
        if (j < 0) break;  // stopping beats every continuation (all profits zero)
        picked.push_back(base->nodes[static_cast<std::size_t>(j)]);
        mask &= search.succ_mask[static_cast<std::size_t>(j)];
        last = j;
    }
    return make_schedule(s, std::move(picked));
}

std::vector<Violation> validate(const Scenario& s, const Schedule& schedule) {
    std::vector<Violation> out;
    const auto& actions = schedule.actions;

    std::unordered_map<int, int> seen;  // target id -> first action index
    for (int k = 0; k < static_cast<int>(actions.size()); ++k) {
        const auto [it, inserted] = seen.emplace(actions[static_cast<std::size_t>(k)].target_id, k);
        if (!inserted) {
            out.push_back({ViolationKind::DuplicateTarget, it->second, k,
                           "duplicate-target: target " +
                               std::to_string(actions[static_cast<std::size_t>(k)].target_id) +
                               " captured at actions " + std::to_string(it->second) + " and " +
                               std::to_string(k)});
        }
    }

    double prev_t = 0.0;
    double prev_d = 0.0;
    Attitude prev_att = s.initial_attitude;
    for (int k = 0; k < static_cast<int>(actions.size()); ++k) {
        const CandidateCapture& a = actions[static_cast<std::size_t>(k)];
        if (a.target_id < 0 || a.target_id >= static_cast<int>(s.targets.size())) {
            out.push_back({ViolationKind::Window, k, -1,
                           "window: action " + std::to_string(k) + " names unknown target " +
                               std::to_string(a.target_id)});
            continue;
        }
        const Target& t = s.targets[static_cast<std::size_t>(a.target_id)];
        // The capture interval [time, time + d] must sit inside the window;
        // the upper bound compares against end - d, the exact latest start.
        if (a.time_s < t.window.start_s || a.time_s > t.window.end_s - t.duration_s) {
            out.push_back({ViolationKind::Window, k, -1,
                           "window: action " + std::to_string(k) + " at t=" +
                               std::to_string(a.time_s) + " s lies outside [" +
                               std::to_string(t.window.start_s) + ", " +
                               std::to_string(t.window.end_s - t.duration_s) + "] for target " +
                               std::to_string(a.target_id)});
        }

        // Slew feasibility from the previous pose, with the attitude
        // recomputed from target geometry rather than taken from the action.
        const Attitude att = attitude_at(s.satellite, t.position, a.time_s);
        const double required =
            prev_t + prev_d + transition_time_s(displacement_deg(prev_att, att));
        if (a.time_s < required) {
            out.push_back({ViolationKind::TransitionTime, k - 1, k,
                           "transition-time: action " + std::to_string(k) + " at t=" +
                               std::to_string(a.time_s) + " s needs t >= " +
                               std::to_string(required) + " s after the previous pose"});
        }
        prev_t = a.time_s;
        prev_d = t.duration_s;
        prev_att = att;
    }
    return out;
}

void save_schedule(const Schedule& schedule, const std::string& path) {
    ordered_json j;
    j["schema_version"] = 1;
    ordered_json actions = ordered_json::array();
    for (const CandidateCapture& a : schedule.actions) {
        actions.push_back(ordered_json{{"target_id", a.target_id},
                                       {"slot", to_string(a.slot)},
                                       {"time_s", a.time_s}});
    }
    j["actions"] = std::move(actions);
    j["total_profit"] = schedule.total_profit;
    j["total_reward"] = schedule.total_reward;
    j["energy_total"] = schedule.energy_total;
    j["energy_wasted"] = schedule.energy_wasted;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Schedule load_schedule(const Scenario& s, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("schedule file: ") + e.what());
    }

    std::vector<CandidateCapture> actions;
    try {
        if (j.at("schema_version").get<int>() != 1) {
            throw SchemaError("schedule file: unsupported schema version");
        }
        for (const auto& aj : j.at("actions")) {
            const int id = aj.at("target_id").get<int>();
            if (id < 0 || id >= static_cast<int>(s.targets.size())) {
                throw SchemaError("schedule file: unknown target id " + std::to_string(id));
            }
            actions.push_back(candidate_at(s, s.targets[static_cast<std::size_t>(id)],
                                           aj.at("time_s").get<double>(),
                                           slot_from_string(aj.at("slot").get<std::string>())));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("schedule file: ") + e.what());
    }
    return make_schedule(s, std::move(actions));
}

} // namespace aeos
