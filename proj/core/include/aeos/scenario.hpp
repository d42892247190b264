#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aeos/atmosphere.hpp"
#include "aeos/geometry.hpp"

namespace aeos {

/// A square ground area to be imaged once, observable within its window.
struct Target {
    int id = 0;                // dense 0..N-1, ascending window start
    GroundPoint position;      // center of the square footprint
    double size_km = 5.0;      // footprint side length
    VisibleTimeWindow window;  // interval during which the target is observable
    double duration_s = 0.15;  // capture duration d_i
};

/// Which of a target's candidate capture times a capture uses. Free marks a
/// capture at an arbitrary in-window time (used by the earliest-start
/// baseline), not one of the three enumerated slots.
enum class CaptureSlot : std::uint8_t { Start, Middle, End, Free };

const char* to_string(CaptureSlot slot);
CaptureSlot slot_from_string(const std::string& name);  // throws SchemaError on unknown names

/// One concrete capture opportunity: a target at a specific time, with the
/// attitude the satellite needs then and the resulting image value.
struct CandidateCapture {
    int target_id = 0;
    CaptureSlot slot = CaptureSlot::Middle;
    double time_s = 0.0;   // capture start time, within [start, end - duration]
    Attitude attitude;     // pointing required at time_s
    double gsd = 0.0;      // ground sampling distance achieved (m/px)
    int suitable = 0;      // binary atmospheric-quality flag
    double profit = 0.0;   // (gsd_nadir / gsd) * suitable, in [0, 1]
};

/// A complete problem instance: targets, atmosphere, and all constants.
struct Scenario {
    SatelliteConfig satellite;
    std::vector<Target> targets;
    CloudGrid clouds;
    TurbulenceGrid turbulence;
    QualityThresholds thresholds;
    int capture_times_per_target = 3;
    double observation_period_s = 0.0;
    std::uint64_t seed = 0;
    Attitude initial_attitude;  // (0, 0, 0) by default
};

/// Knobs for random instance generation. Geometry and thresholds default to
/// the standard simulation constants.
struct GenerationParams {
    int num_targets = 40;
    double observation_period_s = 1623.79;
    double p_clouds = 0.4;
    double p_cn2 = 0.2;
    std::uint64_t seed = 0;
    SatelliteConfig satellite;
    QualityThresholds thresholds;
    double target_size_km = 5.0;
    double capture_duration_s = 0.15;
    double min_window_s = 18.0;
    double max_window_s = 185.0;
    double cloud_cell_km = 2.0;
    double cloud_altitude_km = 10.0;
    double cn2_cell_km = 10.0;
    double cn2_altitude_km = 20.0;
};

/// Raised when a scenario file cannot be parsed or violates the format's
/// invariants (not for plain I/O failures, which use std::runtime_error).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Randomly places num_targets within the cross-track band where windows of
/// at least min_window_s exist, spreads the windows across the observation
/// period, and lays atmosphere grids over the whole area. Pure function of
/// params (same params -> identical scenario). Throws std::invalid_argument
/// for infeasible or out-of-range parameters.
Scenario generate(const GenerationParams& params);

/// The capture opportunity for a target at an arbitrary in-window time,
/// fully populated (attitude, GSD, suitability, profit).
CandidateCapture candidate_at(const Scenario& s, const Target& target, double time_s,
                              CaptureSlot slot);

/// The three candidate captures per target, at window start, midpoint, and
/// end - duration, in target order.
std::vector<CandidateCapture> enumerate_candidates(const Scenario& s);

/// Serializes to a schema-versioned JSON document. Throws std::runtime_error
/// on I/O failure.
void save(const Scenario& s, const std::string& path);

/// Loads and validates a scenario file; throws SchemaError on malformed or
/// invariant-violating content.
Scenario load(const std::string& path);

bool operator==(const Scenario& a, const Scenario& b);

} // namespace aeos
