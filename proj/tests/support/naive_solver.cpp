#include "support/naive_solver.hpp"

#include <vector>

#include "aeos/maneuver.hpp"

namespace aeos_test {

namespace {

struct SearchState {
    const std::vector<aeos::CandidateCapture>* candidates;
    const aeos::Scenario* scenario;
    std::vector<bool> target_used;
    double best = 0.0;
};

void dfs(SearchState& st, double time, const aeos::Attitude& attitude, double duration,
         double profit_so_far) {
    if (profit_so_far > st.best) st.best = profit_so_far;
    for (const aeos::CandidateCapture& c : *st.candidates) {
        if (st.target_used[static_cast<std::size_t>(c.target_id)]) continue;
        const double alpha = aeos::displacement_deg(attitude, c.attitude);
        if (time + duration + aeos::transition_time_s(alpha) > c.time_s) continue;
        st.target_used[static_cast<std::size_t>(c.target_id)] = true;
        dfs(st, c.time_s, c.attitude, st.scenario->targets[static_cast<std::size_t>(c.target_id)].duration_s,
            profit_so_far + c.profit);
        st.target_used[static_cast<std::size_t>(c.target_id)] = false;
    }
}

} // namespace

double naive_best_profit(const aeos::Scenario& s) {
    const std::vector<aeos::CandidateCapture> candidates = aeos::enumerate_candidates(s);
    SearchState st;
    st.candidates = &candidates;
    st.scenario = &s;
    st.target_used.assign(s.targets.size(), false);
    dfs(st, 0.0, s.initial_attitude, 0.0, 0.0);
    return st.best;
}

} // namespace aeos_test
