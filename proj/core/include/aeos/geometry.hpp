#pragma once

#include <optional>

namespace aeos {

// Platform constants shared by every computation in one scenario.
struct SatelliteConfig {
    double altitude_km = 600.0;
    double inclination_deg = 98.6; // orients the observation area; kinematics are track-relative
    double max_roll_deg = 45.0;
    double max_pitch_deg = 45.0;
    double max_yaw_deg = 90.0;
    double gsd_nadir_m_per_px = 0.5;
    double ground_speed_km_s = 7.0; // sub-satellite point speed along the track
};

// Boresight orientation, degrees.
struct Attitude {
    double roll_deg = 0.0;
    double pitch_deg = 0.0;
    double yaw_deg = 0.0;
};

// Flat ground frame: x along the ground track with origin at the
// sub-satellite point when the observation period starts, y across it.
struct GroundPoint {
    double along_track_km = 0.0;
    double cross_track_km = 0.0;
};

struct VisibleTimeWindow {
    double start_s = 0.0;
    double end_s = 0.0;

    double duration_s() const { return end_s - start_s; }
};

/// Pointing solution for observing `target` at time `t_s`: roll covers the
/// cross-track offset, pitch the along-track lead/lag, yaw stays zero.
Attitude attitude_at(const SatelliteConfig& sat, const GroundPoint& target, double t_s);

/// Total boresight deviation from nadir, degrees in [0, 180].
double off_nadir_angle_deg(const Attitude& att);

/// Ground sampling distance at the given attitude, m/px. Minimal at nadir and
/// strictly increasing with the off-nadir angle. Throws std::invalid_argument
/// for off-nadir angles of 90 degrees or more.
double gsd_at(const SatelliteConfig& sat, const Attitude& att);

/// Largest contiguous interval during which the target can be pointed at
/// within the per-axis limits and the boresight cone bound
/// (off-nadir <= min(max_roll, max_pitch)). Empty or shorter than
/// `min_duration_s` yields nullopt.
std::optional<VisibleTimeWindow> visibility_window(const SatelliteConfig& sat,
                                                   const GroundPoint& target,
                                                   double min_duration_s = 0.0);

/// Cross-track distance beyond which visibility windows fall under
/// `min_duration_s`. Returns 0 when no offset yields such a window.
double visibility_cross_track_limit_km(const SatelliteConfig& sat, double min_duration_s);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

} // namespace aeos
