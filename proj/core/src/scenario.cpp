#include "aeos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "aeos/rng.hpp"
#include "json.hpp"

namespace aeos {

using ordered_json = nlohmann::ordered_json;

const char* to_string(CaptureSlot slot) {
    switch (slot) {
        case CaptureSlot::Start: return "start";
        case CaptureSlot::Middle: return "middle";
        case CaptureSlot::End: return "end";
        case CaptureSlot::Free: return "free";
    }
    return "unknown";
}

CaptureSlot slot_from_string(const std::string& name) {
    if (name == "start") return CaptureSlot::Start;
    if (name == "middle") return CaptureSlot::Middle;
    if (name == "end") return CaptureSlot::End;
    if (name == "free") return CaptureSlot::Free;
    throw SchemaError("unknown capture slot name: " + name);
}

namespace {

constexpr int kSchemaVersion = 1;
// Keeps sampled windows a hair inside [0, period] so containment holds under
// floating-point rounding.
constexpr double kPlacementMargin_s = 1e-6;
// Ground margin around the target area covered by the atmosphere grids.
constexpr double kGridMargin_km = 10.0;

void check_params(const GenerationParams& p) {
    if (p.num_targets < 1) throw std::invalid_argument("generate: need at least one target");
    if (p.observation_period_s <= 0.0) {
        throw std::invalid_argument("generate: observation period must be positive");
    }
    if (p.p_clouds < 0.0 || p.p_clouds > 1.0 || p.p_cn2 < 0.0 || p.p_cn2 > 1.0) {
        throw std::invalid_argument("generate: coverage fractions must lie in [0, 1]");
    }
    if (p.capture_duration_s <= 0.0) {
        throw std::invalid_argument("generate: capture duration must be positive");
    }
    if (p.min_window_s < 2.0 * p.capture_duration_s) {
        throw std::invalid_argument("generate: minimum window must fit two capture durations");
    }
    if (p.max_window_s <= p.min_window_s) {
        throw std::invalid_argument("generate: window duration range is empty");
    }
    if (p.target_size_km <= 0.0) {
        throw std::invalid_argument("generate: target size must be positive");
    }
    if (p.cloud_cell_km <= 0.0 || p.cn2_cell_km <= 0.0) {
        throw std::invalid_argument("generate: grid cell sizes must be positive");
    }
}

Target sample_target(const GenerationParams& p, double y_lo, double y_hi, double eff_max_s,
                     Rng& rng) {
    const auto& sat = p.satellite;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double sign = (rng.next_u64() & 1) ? 1.0 : -1.0;
        const double y = sign * rng.uniform(y_lo, y_hi);
        const auto probe = visibility_window(sat, GroundPoint{0.0, y}, p.min_window_s);
        if (!probe || probe->duration_s() > eff_max_s) continue;

        const double half = probe->duration_s() / 2.0;
        const double lo = half + kPlacementMargin_s;
        const double hi = p.observation_period_s - half - kPlacementMargin_s;
        if (hi <= lo) continue;
        const double center_t = rng.uniform(lo, hi);

        const GroundPoint pos{sat.ground_speed_km_s * center_t, y};
        const auto window = visibility_window(sat, pos, p.min_window_s);
        if (!window || window->start_s < 0.0 || window->end_s > p.observation_period_s ||
            window->duration_s() > p.max_window_s) {
            continue;
        }
        return Target{0, pos, p.target_size_km, *window, p.capture_duration_s};
    }
    throw std::invalid_argument(
        "generate: could not place a target; the parameters leave almost no feasible window band");
}

} // namespace

Scenario generate(const GenerationParams& p) {
    check_params(p);
    const auto& sat = p.satellite;

    const double eff_max_s = std::min(p.max_window_s, p.observation_period_s);
    if (eff_max_s < p.min_window_s) {
        throw std::invalid_argument(
            "generate: observation period is shorter than the minimum window duration");
    }
    const double y_hi = visibility_cross_track_limit_km(sat, p.min_window_s);
    if (y_hi <= 0.0) {
        throw std::invalid_argument(
            "generate: the satellite's pointing limits admit no window of the minimum duration");
    }
    const double eta_max = std::min(sat.max_roll_deg, sat.max_pitch_deg);
    const double center_duration_s =
        2.0 * sat.altitude_km * std::tan(deg_to_rad(eta_max)) / sat.ground_speed_km_s;
    const double y_lo =
        center_duration_s > eff_max_s ? visibility_cross_track_limit_km(sat, eff_max_s) : 0.0;
    if (y_lo >= y_hi) {
        throw std::invalid_argument("generate: no cross-track band yields admissible windows");
    }

    Rng master(p.seed);
    Rng target_rng = master.split(0);
    Rng cloud_rng = master.split(1);
    Rng turb_rng = master.split(2);

    Scenario s;
    s.satellite = sat;
    s.thresholds = p.thresholds;
    s.observation_period_s = p.observation_period_s;
    s.seed = p.seed;
    s.capture_times_per_target = 3;

    s.targets.reserve(static_cast<std::size_t>(p.num_targets));
    for (int i = 0; i < p.num_targets; ++i) {
        s.targets.push_back(sample_target(p, y_lo, y_hi, eff_max_s, target_rng));
    }
    std::stable_sort(s.targets.begin(), s.targets.end(), [](const Target& a, const Target& b) {
        return std::tie(a.window.start_s, a.position.along_track_km, a.position.cross_track_km) <
               std::tie(b.window.start_s, b.position.along_track_km, b.position.cross_track_km);
    });
    for (std::size_t i = 0; i < s.targets.size(); ++i) s.targets[i].id = static_cast<int>(i);

    const double x0 = -kGridMargin_km;
    const double x1 = sat.ground_speed_km_s * p.observation_period_s + kGridMargin_km;
    const double y_extent = y_hi + kGridMargin_km;
    const GroundPoint origin{x0, -y_extent};
    const auto grid_dim = [](double extent, double cell) {
        return std::max(1, static_cast<int>(std::ceil(extent / cell)));
    };
    s.clouds = generate_cloud_grid(grid_dim(2.0 * y_extent, p.cloud_cell_km),
                                   grid_dim(x1 - x0, p.cloud_cell_km), p.cloud_cell_km, origin,
                                   p.p_clouds, cloud_rng, p.cloud_altitude_km);
    s.turbulence = generate_turbulence_grid(grid_dim(2.0 * y_extent, p.cn2_cell_km),
                                            grid_dim(x1 - x0, p.cn2_cell_km), p.cn2_cell_km,
                                            origin, p.p_cn2, p.thresholds.cn2_max, turb_rng,
                                            p.cn2_altitude_km);
    return s;
}

CandidateCapture candidate_at(const Scenario& s, const Target& target, double time_s,
                              CaptureSlot slot) {
    CandidateCapture c;
    c.target_id = target.id;
    c.slot = slot;
    c.time_s = time_s;
    c.attitude = attitude_at(s.satellite, target.position, time_s);
    c.gsd = gsd_at(s.satellite, c.attitude);
    const double delta = cloud_fraction(s.clouds, target.position, target.size_km);
    const double cn2 = cn2_at(s.turbulence, target.position);
    c.suitable = suitability(cn2, delta, s.thresholds);
    c.profit = (s.satellite.gsd_nadir_m_per_px / c.gsd) * c.suitable;
    return c;
}

std::vector<CandidateCapture> enumerate_candidates(const Scenario& s) {
    std::vector<CandidateCapture> out;
    out.reserve(s.targets.size() * 3);
    for (const Target& t : s.targets) {
        const double sw = t.window.start_s;
        const double ew = t.window.end_s;
        out.push_back(candidate_at(s, t, sw, CaptureSlot::Start));
        out.push_back(candidate_at(s, t, (sw + ew) / 2.0, CaptureSlot::Middle));
        out.push_back(candidate_at(s, t, ew - t.duration_s, CaptureSlot::End));
    }
    return out;
}

namespace {

ordered_json satellite_to_json(const SatelliteConfig& sat) {
    return ordered_json{{"altitude_km", sat.altitude_km},
                        {"inclination_deg", sat.inclination_deg},
                        {"max_roll_deg", sat.max_roll_deg},
                        {"max_pitch_deg", sat.max_pitch_deg},
                        {"max_yaw_deg", sat.max_yaw_deg},
                        {"gsd_nadir_m_per_px", sat.gsd_nadir_m_per_px},
                        {"ground_speed_km_s", sat.ground_speed_km_s}};
}

SatelliteConfig satellite_from_json(const ordered_json& j) {
    SatelliteConfig sat;
    sat.altitude_km = j.at("altitude_km").get<double>();
    sat.inclination_deg = j.at("inclination_deg").get<double>();
    sat.max_roll_deg = j.at("max_roll_deg").get<double>();
    sat.max_pitch_deg = j.at("max_pitch_deg").get<double>();
    sat.max_yaw_deg = j.at("max_yaw_deg").get<double>();
    sat.gsd_nadir_m_per_px = j.at("gsd_nadir_m_per_px").get<double>();
    sat.ground_speed_km_s = j.at("ground_speed_km_s").get<double>();
    return sat;
}

ordered_json scenario_to_json(const Scenario& s) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = s.seed;
    j["observation_period_s"] = s.observation_period_s;
    j["capture_times_per_target"] = s.capture_times_per_target;
    j["satellite"] = satellite_to_json(s.satellite);
    j["thresholds"] =
        ordered_json{{"delta_max", s.thresholds.delta_max}, {"cn2_max", s.thresholds.cn2_max}};
    j["initial_attitude"] = ordered_json{{"roll_deg", s.initial_attitude.roll_deg},
                                         {"pitch_deg", s.initial_attitude.pitch_deg},
                                         {"yaw_deg", s.initial_attitude.yaw_deg}};

    ordered_json targets = ordered_json::array();
    for (const Target& t : s.targets) {
        targets.push_back(ordered_json{{"id", t.id},
                                       {"along_track_km", t.position.along_track_km},
                                       {"cross_track_km", t.position.cross_track_km},
                                       {"size_km", t.size_km},
                                       {"duration_s", t.duration_s},
                                       {"window_start_s", t.window.start_s},
                                       {"window_end_s", t.window.end_s}});
    }
    j["targets"] = std::move(targets);

    ordered_json clouds;
    clouds["cell_size_km"] = s.clouds.cell_size_km;
    clouds["altitude_km"] = s.clouds.altitude_km;
    clouds["origin_along_km"] = s.clouds.origin.along_track_km;
    clouds["origin_cross_km"] = s.clouds.origin.cross_track_km;
    clouds["rows"] = s.clouds.rows;
    clouds["cols"] = s.clouds.cols;
    clouds["coverage_fraction"] = s.clouds.coverage_fraction;
    ordered_json cell_rows = ordered_json::array();
    for (int r = 0; r < s.clouds.rows; ++r) {
        std::string row(static_cast<std::size_t>(s.clouds.cols), '0');
        for (int c = 0; c < s.clouds.cols; ++c) {
            if (s.clouds.cloudy(r, c)) row[static_cast<std::size_t>(c)] = '1';
        }
        cell_rows.push_back(std::move(row));
    }
    clouds["cells"] = std::move(cell_rows);
    j["cloud_grid"] = std::move(clouds);

    ordered_json turb;
    turb["cell_size_km"] = s.turbulence.cell_size_km;
    turb["altitude_km"] = s.turbulence.altitude_km;
    turb["origin_along_km"] = s.turbulence.origin.along_track_km;
    turb["origin_cross_km"] = s.turbulence.origin.cross_track_km;
    turb["rows"] = s.turbulence.rows;
    turb["cols"] = s.turbulence.cols;
    turb["exceed_fraction"] = s.turbulence.exceed_fraction;
    turb["values"] = s.turbulence.values;
    j["turbulence_grid"] = std::move(turb);
    return j;
}

[[noreturn]] void schema_fail(const std::string& msg) { throw SchemaError("scenario file: " + msg); }

Scenario scenario_from_json(const ordered_json& j) {
    Scenario s;
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
        schema_fail("unsupported schema version");
    }
    s.seed = j.at("seed").get<std::uint64_t>();
    s.observation_period_s = j.at("observation_period_s").get<double>();
    s.capture_times_per_target = j.at("capture_times_per_target").get<int>();
    s.satellite = satellite_from_json(j.at("satellite"));
    s.thresholds.delta_max = j.at("thresholds").at("delta_max").get<double>();
    s.thresholds.cn2_max = j.at("thresholds").at("cn2_max").get<double>();
    const auto& att = j.at("initial_attitude");
    s.initial_attitude = Attitude{att.at("roll_deg").get<double>(),
                                  att.at("pitch_deg").get<double>(),
                                  att.at("yaw_deg").get<double>()};

    for (const auto& tj : j.at("targets")) {
        Target t;
        t.id = tj.at("id").get<int>();
        t.position.along_track_km = tj.at("along_track_km").get<double>();
        t.position.cross_track_km = tj.at("cross_track_km").get<double>();
        t.size_km = tj.at("size_km").get<double>();
        t.duration_s = tj.at("duration_s").get<double>();
        t.window.start_s = tj.at("window_start_s").get<double>();
        t.window.end_s = tj.at("window_end_s").get<double>();
        s.targets.push_back(t);
    }

    const auto& cj = j.at("cloud_grid");
    s.clouds.cell_size_km = cj.at("cell_size_km").get<double>();
    s.clouds.altitude_km = cj.at("altitude_km").get<double>();
    s.clouds.origin.along_track_km = cj.at("origin_along_km").get<double>();
    s.clouds.origin.cross_track_km = cj.at("origin_cross_km").get<double>();
    s.clouds.rows = cj.at("rows").get<int>();
    s.clouds.cols = cj.at("cols").get<int>();
    s.clouds.coverage_fraction = cj.at("coverage_fraction").get<double>();
    const auto& rows = cj.at("cells");
    if (!rows.is_array() || static_cast<int>(rows.size()) != s.clouds.rows) {
        schema_fail("cloud grid row count mismatch");
    }
    s.clouds.cells.reserve(static_cast<std::size_t>(s.clouds.rows) * s.clouds.cols);
    for (const auto& rj : rows) {
        const std::string row = rj.get<std::string>();
        if (static_cast<int>(row.size()) != s.clouds.cols) {
            schema_fail("cloud grid column count mismatch");
        }
        for (char ch : row) {
            if (ch != '0' && ch != '1') schema_fail("cloud cell must be '0' or '1'");
            s.clouds.cells.push_back(ch == '1' ? 1 : 0);
        }
    }

    const auto& tj = j.at("turbulence_grid");
    s.turbulence.cell_size_km = tj.at("cell_size_km").get<double>();
    s.turbulence.altitude_km = tj.at("altitude_km").get<double>();
    s.turbulence.origin.along_track_km = tj.at("origin_along_km").get<double>();
    s.turbulence.origin.cross_track_km = tj.at("origin_cross_km").get<double>();
    s.turbulence.rows = tj.at("rows").get<int>();
    s.turbulence.cols = tj.at("cols").get<int>();
    s.turbulence.exceed_fraction = tj.at("exceed_fraction").get<double>();
    s.turbulence.values = tj.at("values").get<std::vector<double>>();
    return s;
}

void check_loaded(const Scenario& s) {
    if (s.observation_period_s <= 0.0) schema_fail("observation period must be positive");
    if (s.capture_times_per_target != 3) schema_fail("exactly three capture times are supported");
    if (s.thresholds.delta_max <= 0.0 || s.thresholds.delta_max > 1.0) {
        schema_fail("delta_max must lie in (0, 1]");
    }
    if (s.thresholds.cn2_max <= 0.0) schema_fail("cn2_max must be positive");
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
        const Target& t = s.targets[i];
        if (t.id != static_cast<int>(i)) schema_fail("target ids must be dense and ascending");
        if (t.window.duration_s() < t.duration_s) {
            schema_fail("target window shorter than its capture duration");
        }
        if (t.window.start_s < 0.0 || t.window.end_s > s.observation_period_s) {
            schema_fail("target window outside the observation period");
        }
        if (t.duration_s <= 0.0 || t.size_km <= 0.0) {
            schema_fail("target duration and size must be positive");
        }
    }
    if (s.clouds.rows <= 0 || s.clouds.cols <= 0 ||
        s.clouds.cells.size() !=
            static_cast<std::size_t>(s.clouds.rows) * static_cast<std::size_t>(s.clouds.cols)) {
        schema_fail("cloud grid shape mismatch");
    }
    if (s.turbulence.rows <= 0 || s.turbulence.cols <= 0 ||
        s.turbulence.values.size() != static_cast<std::size_t>(s.turbulence.rows) *
                                          static_cast<std::size_t>(s.turbulence.cols)) {
        schema_fail("turbulence grid shape mismatch");
    }
}

} // namespace

void save(const Scenario& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << scenario_to_json(s).dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Scenario load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        schema_fail(e.what());
    }
    Scenario s;
    try {
        s = scenario_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        schema_fail(e.what());
    }
    check_loaded(s);
    return s;
}

namespace {

bool operator_eq(const Attitude& a, const Attitude& b) {
    return a.roll_deg == b.roll_deg && a.pitch_deg == b.pitch_deg && a.yaw_deg == b.yaw_deg;
}

} // namespace

bool operator==(const Scenario& a, const Scenario& b) {
    const auto sat_eq = [](const SatelliteConfig& x, const SatelliteConfig& y) {
        return x.altitude_km == y.altitude_km && x.inclination_deg == y.inclination_deg &&
               x.max_roll_deg == y.max_roll_deg && x.max_pitch_deg == y.max_pitch_deg &&
               x.max_yaw_deg == y.max_yaw_deg && x.gsd_nadir_m_per_px == y.gsd_nadir_m_per_px &&
               x.ground_speed_km_s == y.ground_speed_km_s;
    };
    const auto target_eq = [](const Target& x, const Target& y) {
        return x.id == y.id && x.position.along_track_km == y.position.along_track_km &&
               x.position.cross_track_km == y.position.cross_track_km && x.size_km == y.size_km &&
               x.window.start_s == y.window.start_s && x.window.end_s == y.window.end_s &&
               x.duration_s == y.duration_s;
    };
    if (!sat_eq(a.satellite, b.satellite)) return false;
    if (a.targets.size() != b.targets.size()) return false;
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
        if (!target_eq(a.targets[i], b.targets[i])) return false;
    }
    const auto& ca = a.clouds;
    const auto& cb = b.clouds;
    if (!(ca.cell_size_km == cb.cell_size_km && ca.altitude_km == cb.altitude_km &&
          ca.origin.along_track_km == cb.origin.along_track_km &&
          ca.origin.cross_track_km == cb.origin.cross_track_km && ca.rows == cb.rows &&
          ca.cols == cb.cols && ca.coverage_fraction == cb.coverage_fraction &&
          ca.cells == cb.cells)) {
        return false;
    }
    const auto& ta = a.turbulence;
    const auto& tb = b.turbulence;
    if (!(ta.cell_size_km == tb.cell_size_km && ta.altitude_km == tb.altitude_km &&
          ta.origin.along_track_km == tb.origin.along_track_km &&
          ta.origin.cross_track_km == tb.origin.cross_track_km && ta.rows == tb.rows &&
          ta.cols == tb.cols && ta.exceed_fraction == tb.exceed_fraction &&
          ta.values == tb.values)) {
        return false;
    }
    return a.thresholds.delta_max == b.thresholds.delta_max &&
           a.thresholds.cn2_max == b.thresholds.cn2_max &&
           a.capture_times_per_target == b.capture_times_per_target &&
           a.observation_period_s == b.observation_period_s && a.seed == b.seed &&
           operator_eq(a.initial_attitude, b.initial_attitude);
}

} // namespace aeos
