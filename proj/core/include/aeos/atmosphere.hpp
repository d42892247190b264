#pragma once

#include <cstdint>
#include <vector>

#include "aeos/geometry.hpp"
#include "aeos/rng.hpp"

namespace aeos {

/// Binary cloud-presence grid over the observation area.
///
/// The grid lies in the ground plane (vertical projection; the layer altitude
/// is kept for bookkeeping only). Cell (row, col) covers
/// [origin.along + col*s, origin.along + (col+1)*s) along-track and
/// [origin.cross + row*s, origin.cross + (row+1)*s) cross-track, with
/// s = cell_size_km.
struct CloudGrid {
    double cell_size_km = 2.0;
    GroundPoint origin;         // min corner of the grid domain
    double altitude_km = 10.0;  // cloud layer height
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> cells;  // row-major, 1 = cloudy
    double coverage_fraction = 0.0;   // requested cloudy fraction

    bool cloudy(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col] != 0; }
    /// Fraction of cells actually set, recomputed from the cell array.
    double measured_coverage() const;
};

/// Grid of refractive-index structure parameter values (m^-2/3).
struct TurbulenceGrid {
    double cell_size_km = 10.0;
    GroundPoint origin;
    double altitude_km = 20.0;  // turbulence layer height
    int rows = 0;
    int cols = 0;
    std::vector<double> values;   // row-major
    double exceed_fraction = 0.0; // requested fraction of cells above cn2_max

    double value(int row, int col) const { return values[static_cast<std::size_t>(row) * cols + col]; }
};

/// Image-quality acceptance thresholds.
struct QualityThresholds {
    double delta_max = 0.25;  // max tolerated cloud-cover fraction (strict)
    double cn2_max = 5e-15;   // max tolerated turbulence (inclusive)
};

/// Lower/upper bounds of the log-uniform turbulence value distribution.
inline constexpr double kCn2DistributionMin = 1e-17;
inline constexpr double kCn2DistributionMax = 1e-13;

/// Builds a cloud grid whose cloudy-cell count is round(p_clouds * rows * cols),
/// grown as connected clusters from randomly placed seeds.
CloudGrid generate_cloud_grid(int rows, int cols, double cell_size_km, GroundPoint origin,
                              double p_clouds, Rng& rng, double altitude_km = 10.0);

/// Builds a turbulence grid where exactly round(p_exceed * rows * cols) cells
/// hold values above cn2_max; values are log-uniform within each side of the
/// threshold.
TurbulenceGrid generate_turbulence_grid(int rows, int cols, double cell_size_km, GroundPoint origin,
                                        double p_exceed, double cn2_max, Rng& rng,
                                        double altitude_km = 20.0);

/// Area fraction of the square footprint (side target_size_km, centered on
/// target) that lies under cloudy cells. Throws std::out_of_range if the
/// footprint falls entirely outside the grid domain.
double cloud_fraction(const CloudGrid& grid, const GroundPoint& target, double target_size_km);

/// Value of the cell containing the point (floor indexing on shared edges).
/// Throws std::out_of_range for points outside the grid domain.
double cn2_at(const TurbulenceGrid& grid, const GroundPoint& point);

/// Binary capture-suitability flag: 1 iff the turbulence value is at most
/// cn2_max and the cloud fraction is strictly below delta_max.
int suitability(double cn2, double delta, const QualityThresholds& thr);

} // namespace aeos
