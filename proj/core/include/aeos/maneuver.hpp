#pragma once

#include <array>

#include "aeos/geometry.hpp"
#include "aeos/scenario.hpp"

namespace aeos {

/// Piecewise-linear attitude transition time as a function of the total
/// angular displacement alpha (degrees):
///
///   alpha <= 10        -> 11.66
///   10 < alpha <= 30   -> 5 + alpha / 1.5
///   30 < alpha <= 60   -> 10 + alpha / 2
///   60 < alpha <= 90   -> 16 + alpha / 2.5
///   alpha > 90         -> 22 + alpha / 3
///
/// Continuous at 30/60/90 deg (25, 40, 52 s); the 10 deg boundary has a
/// 0.007 s jump (11.66 vs 11.6667) which is kept as written.
struct TransitionProfile {
    std::array<double, 4> breakpoints_deg{10.0, 30.0, 60.0, 90.0};
    std::array<double, 5> base_s{11.66, 5.0, 10.0, 16.0, 22.0};
    std::array<double, 5> slope_s_per_deg{0.0, 1.0 / 1.5, 1.0 / 2.0, 1.0 / 2.5, 1.0 / 3.0};
};

/// Maneuver energy is proportional to transition time.
struct EnergyModel {
    double energy_per_second = 1.0;
};

/// Total angular displacement between two attitudes: the L1 sum
/// |d_roll| + |d_pitch| + |d_yaw|, in degrees. Symmetric.
double displacement_deg(const Attitude& a, const Attitude& b);

/// Seconds needed to slew through alpha_deg. Throws std::invalid_argument
/// for negative angles. Non-decreasing in alpha_deg.
double transition_time_s(double alpha_deg, const TransitionProfile& profile = {});

/// Energy spent slewing through alpha_deg. Throws std::invalid_argument if
/// the energy model's unit cost is not positive.
double maneuver_energy(double alpha_deg, const EnergyModel& em,
                       const TransitionProfile& profile = {});

/// True iff a capture at t_next with attitude att_next can directly follow
/// one that started at t_prev with attitude att_prev and held for d_prev_s:
/// t_prev + d_prev_s + transition_time <= t_next.
bool can_follow(double t_prev_s, const Attitude& att_prev, double d_prev_s, double t_next_s,
                const Attitude& att_next, const TransitionProfile& profile = {});

/// Same feasibility test between two capture opportunities, with d_prev_s the
/// capture duration of prev's target.
bool can_follow(const CandidateCapture& prev, const CandidateCapture& next, double d_prev_s,
                const TransitionProfile& profile = {});

} // namespace aeos
