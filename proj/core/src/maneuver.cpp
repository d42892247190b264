#include "aeos/maneuver.hpp"

#include <cmath>
#include <stdexcept>

namespace aeos {

double displacement_deg(const Attitude& a, const Attitude& b) {
    return std::abs(a.roll_deg - b.roll_deg) + std::abs(a.pitch_deg - b.pitch_deg) +
           std::abs(a.yaw_deg - b.yaw_deg);
}

double transition_time_s(double alpha_deg, const TransitionProfile& profile) {
    if (alpha_deg < 0.0) {
        throw std::invalid_argument("transition_time_s: displacement must be non-negative");
    }
    std::size_t branch = profile.breakpoints_deg.size();
    for (std::size_t i = 0; i < profile.breakpoints_deg.size(); ++i) {
        if (alpha_deg <= profile.breakpoints_deg[i]) {
            branch = i;
            break;
        }
    }
    return profile.base_s[branch] + profile.slope_s_per_deg[branch] * alpha_deg;
}

double maneuver_energy(double alpha_deg, const EnergyModel& em, const TransitionProfile& profile) {
    if (em.energy_per_second <= 0.0) {
        throw std::invalid_argument("maneuver_energy: energy unit cost must be positive");
    }
    return em.energy_per_second * transition_time_s(alpha_deg, profile);
}

bool can_follow(double t_prev_s, const Attitude& att_prev, double d_prev_s, double t_next_s,
                const Attitude& att_next, const TransitionProfile& profile) {
    const double slew = transition_time_s(displacement_deg(att_prev, att_next), profile);
    return t_prev_s + d_prev_s + slew <= t_next_s;
}

bool can_follow(const CandidateCapture& prev, const CandidateCapture& next, double d_prev_s,
                const TransitionProfile& profile) {
    return can_follow(prev.time_s, prev.attitude, d_prev_s, next.time_s, next.attitude, profile);
}

} // namespace aeos
