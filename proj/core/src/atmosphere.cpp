#include "aeos/atmosphere.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aeos {

double CloudGrid::measured_coverage() const {
    if (cells.empty()) return 0.0;
    const auto set = std::count(cells.begin(), cells.end(), std::uint8_t{1});
    return static_cast<double>(set) / static_cast<double>(cells.size());
}

namespace {

void check_grid_shape(int rows, int cols, double cell_size_km, double p, const char* what) {
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument(std::string(what) + ": grid must have positive dimensions");
    }
    if (cell_size_km <= 0.0) {
        throw std::invalid_argument(std::string(what) + ": cell size must be positive");
    }
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument(std::string(what) + ": fraction must lie in [0, 1]");
    }
}

// Expected cells per cloud cluster; sets how many growth seeds are planted.
constexpr int kMeanClusterCells = 8;

} // namespace

CloudGrid generate_cloud_grid(int rows, int cols, double cell_size_km, GroundPoint origin,
                              double p_clouds, Rng& rng, double altitude_km) {
    check_grid_shape(rows, cols, cell_size_km, p_clouds, "generate_cloud_grid");

    CloudGrid grid;
    grid.cell_size_km = cell_size_km;
    grid.origin = origin;
    grid.altitude_km = altitude_km;
    grid.rows = rows;
    grid.cols = cols;
    grid.coverage_fraction = p_clouds;

    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    grid.cells.assign(n, 0);
    const auto want = static_cast<std::size_t>(std::llround(p_clouds * static_cast<double>(n)));
    if (want == 0) return grid;

    // Plant seeds, then accrete random frontier cells until the exact count is
    // reached; every cloudy cell stays 4-adjacent to some other one in its
    // cluster, matching clustered real cloud fields.
    const std::size_t num_seeds =
        std::max<std::size_t>(1, want / static_cast<std::size_t>(kMeanClusterCells));
    std::size_t placed = 0;
    std::vector<std::size_t> frontier;

    auto add_frontier_neighbors = [&](std::size_t idx) {
        const int r = static_cast<int>(idx) / cols;
        const int c = static_cast<int>(idx) % cols;
        const int dr[4] = {-1, 1, 0, 0};
        const int dc[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            const int nr = r + dr[k];
            const int nc = c + dc[k];
            if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
            const std::size_t ni = static_cast<std::size_t>(nr) * cols + nc;
            if (grid.cells[ni] == 0) frontier.push_back(ni);
        }
    };
    auto mark = [&](std::size_t idx) {
        grid.cells[idx] = 1;
        ++placed;
        add_frontier_neighbors(idx);
    };

    for (std::size_t s = 0; s < num_seeds && placed < want; ++s) {
        std::size_t idx = rng.uniform_int(n);
        while (grid.cells[idx] != 0) idx = rng.uniform_int(n);
        mark(idx);
    }
    while (placed < want) {
        if (frontier.empty()) {
            // All current clusters are saturated; start a fresh one.
            std::size_t idx = rng.uniform_int(n);
            while (grid.cells[idx] != 0) idx = rng.uniform_int(n);
            mark(idx);
            continue;
        }
        const std::size_t pick = rng.uniform_int(frontier.size());
        const std::size_t idx = frontier[pick];
        frontier[pick] = frontier.back();
        frontier.pop_back();
        if (grid.cells[idx] != 0) continue;  // stale frontier entry
        mark(idx);
    }
    return grid;
}

TurbulenceGrid generate_turbulence_grid(int rows, int cols, double cell_size_km,
                                        GroundPoint origin, double p_exceed, double cn2_max,
                                        Rng& rng, double altitude_km) {
    check_grid_shape(rows, cols, cell_size_km, p_exceed, "generate_turbulence_grid");
    if (cn2_max <= kCn2DistributionMin || cn2_max >= kCn2DistributionMax) {
        throw std::invalid_argument(
            "generate_turbulence_grid: threshold must lie inside the value distribution");
    }

    TurbulenceGrid grid;
    grid.cell_size_km = cell_size_km;
    grid.origin = origin;
    grid.altitude_km = altitude_km;
    grid.rows = rows;
    grid.cols = cols;
    grid.exceed_fraction = p_exceed;

    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    const auto exceed_count =
        static_cast<std::size_t>(std::llround(p_exceed * static_cast<double>(n)));

    // Choose exactly exceed_count cells by a partial shuffle, then draw each
    // cell's value log-uniformly on its side of the threshold. Values end up
    // in (min, cn2_max] below and (cn2_max, max] above, so the threshold
    // comparison is never ambiguous.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < exceed_count; ++i) {
        const std::size_t j = i + rng.uniform_int(n - i);
        std::swap(order[i], order[j]);
    }
    std::vector<std::uint8_t> exceeds(n, 0);
    for (std::size_t i = 0; i < exceed_count; ++i) exceeds[order[i]] = 1;

    const double log_min = std::log(kCn2DistributionMin);
    const double log_thr = std::log(cn2_max);
    const double log_max = std::log(kCn2DistributionMax);
    grid.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform_pos();
        grid.values[i] = exceeds[i] ? std::exp(log_thr + u * (log_max - log_thr))
                                    : std::exp(log_min + u * (log_thr - log_min));
    }
    return grid;
}

namespace {

struct GridFrame {
    double x0, y0, x1, y1;  // domain corners
    double cell;
    int rows, cols;
};

template <typename Grid>
GridFrame frame_of(const Grid& g) {
    return GridFrame{g.origin.along_track_km,
                     g.origin.cross_track_km,
                     g.origin.along_track_km + g.cols * g.cell_size_km,
                     g.origin.cross_track_km + g.rows * g.cell_size_km,
                     g.cell_size_km,
                     g.rows,
                     g.cols};
}

} // namespace

double cloud_fraction(const CloudGrid& grid, const GroundPoint& target, double target_size_km) {
    if (target_size_km <= 0.0) {
        throw std::invalid_argument("cloud_fraction: footprint side must be positive");
    }
    const GridFrame f = frame_of(grid);
    const double half = target_size_km / 2.0;
    const double fx0 = target.along_track_km - half;
    const double fx1 = target.along_track_km + half;
    const double fy0 = target.cross_track_km - half;
    const double fy1 = target.cross_track_km + half;
    if (fx1 <= f.x0 || fx0 >= f.x1 || fy1 <= f.y0 || fy0 >= f.y1) {
        throw std::out_of_range("cloud_fraction: footprint outside the cloud grid domain");
    }

    // Sum exact rectangle overlaps of the footprint with every cloudy cell it
    // touches; grid cells outside the domain count as clear.
    const int c0 = std::max(0, static_cast<int>(std::floor((fx0 - f.x0) / f.cell)));
    const int c1 = std::min(f.cols - 1, static_cast<int>(std::floor((fx1 - f.x0) / f.cell)));
    const int r0 = std::max(0, static_cast<int>(std::floor((fy0 - f.y0) / f.cell)));
    const int r1 = std::min(f.rows - 1, static_cast<int>(std::floor((fy1 - f.y0) / f.cell)));

    double cloudy_area = 0.0;
    for (int r = r0; r <= r1; ++r) {
        const double cy0 = f.y0 + r * f.cell;
        const double oy = std::min(fy1, cy0 + f.cell) - std::max(fy0, cy0);
        if (oy <= 0.0) continue;
        for (int c = c0; c <= c1; ++c) {
            if (!grid.cloudy(r, c)) continue;
            const double cx0 = f.x0 + c * f.cell;
            const double ox = std::min(fx1, cx0 + f.cell) - std::max(fx0, cx0);
            if (ox > 0.0) cloudy_area += ox * oy;
        }
    }
    return std::clamp(cloudy_area / (target_size_km * target_size_km), 0.0, 1.0);
}

double cn2_at(const TurbulenceGrid& grid, const GroundPoint& point) {
    const GridFrame f = frame_of(grid);
    const int c = static_cast<int>(std::floor((point.along_track_km - f.x0) / f.cell));
    const int r = static_cast<int>(std::floor((point.cross_track_km - f.y0) / f.cell));
    if (r < 0 || r >= f.rows || c < 0 || c >= f.cols) {
        throw std::out_of_range("cn2_at: point outside the turbulence grid domain");
    }
    return grid.value(r, c);
}

int suitability(double cn2, double delta, const QualityThresholds& thr) {
    return (cn2 <= thr.cn2_max && delta < thr.delta_max) ? 1 : 0;
}

} // namespace aeos
