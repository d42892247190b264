#include "aeos/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aeos {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Attitude attitude_at(const SatelliteConfig& sat, const GroundPoint& target, double t_s) {
    const double h = sat.altitude_km;
    const double along_offset = target.along_track_km - sat.ground_speed_km_s * t_s;
    return Attitude{
        rad_to_deg(std::atan(target.cross_track_km / h)),
        rad_to_deg(std::atan(along_offset / h)),
        0.0,
    };
}

double off_nadir_angle_deg(const Attitude& att) {
    const double c = std::cos(deg_to_rad(att.roll_deg)) * std::cos(deg_to_rad(att.pitch_deg));
    return rad_to_deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

double gsd_at(const SatelliteConfig& sat, const Attitude& att) {
    const double eta = off_nadir_angle_deg(att);
    if (eta >= 90.0) {
        throw std::invalid_argument("gsd_at: off-nadir angle must be below 90 degrees");
    }
    const double c = std::cos(deg_to_rad(eta));
    return sat.gsd_nadir_m_per_px / (c * c);
}

namespace {

// Pitch magnitude (radians) admitted by the boresight cone at a fixed roll.
// Negative result means the roll alone already exceeds the cone.
double cone_pitch_limit_rad(const SatelliteConfig& sat, double roll_rad) {
    const double eta_max = deg_to_rad(std::min(sat.max_roll_deg, sat.max_pitch_deg));
    const double ratio = std::cos(eta_max) / std::cos(roll_rad);
    if (ratio > 1.0) return -1.0;
    return std::acos(ratio);
}

} // namespace

std::optional<VisibleTimeWindow> visibility_window(const SatelliteConfig& sat,
                                                   const GroundPoint& target,
                                                   double min_duration_s) {
    const double h = sat.altitude_km;
    const double roll_rad = std::atan(std::abs(target.cross_track_km) / h);
    if (rad_to_deg(roll_rad) > sat.max_roll_deg) return std::nullopt;

    const double pitch_limit = cone_pitch_limit_rad(sat, roll_rad);
    if (pitch_limit < 0.0) return std::nullopt;

    // |along_track - v t| <= h tan(pitch_limit)
    const double half_extent_km = h * std::tan(pitch_limit);
    const double v = sat.ground_speed_km_s;
    VisibleTimeWindow w{(target.along_track_km - half_extent_km) / v,
                        (target.along_track_km + half_extent_km) / v};
    if (w.duration_s() < min_duration_s) return std::nullopt;
    return w;
}

double visibility_cross_track_limit_km(const SatelliteConfig& sat, double min_duration_s) {
    const double h = sat.altitude_km;
    const double eta_max = deg_to_rad(std::min(sat.max_roll_deg, sat.max_pitch_deg));
    // duration >= min  <=>  tan(pitch_limit) >= v*min/(2h)
    const double pitch_needed = std::atan(sat.ground_speed_km_s * min_duration_s / (2.0 * h));
    if (pitch_needed >= eta_max) return 0.0;
    const double cos_roll_needed = std::cos(eta_max) / std::cos(pitch_needed);
    if (cos_roll_needed > 1.0) return 0.0;
    return h * std::tan(std::acos(cos_roll_needed));
}

} // namespace aeos
