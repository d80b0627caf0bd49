// Probabilistic target search: 3D belief grid over target position, a
// Gaussian target-dynamics propagation (3D convolution), a camera-frustum
// sensor model, and the receding-horizon path planner with its max-belief
// fallback.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chaser/geo.hpp"
#include "chaser/vec3.hpp"

namespace chaser {

struct GridIndex {
    int ix = 0;
    int iy = 0;
    int iz = 0;
    bool operator==(const GridIndex&) const = default;
};

/// Uniform 3D lattice of target-occupancy probabilities. Cell (0,0,0) is
/// centered at `origin`; the z = 0 layer is the grid floor (no probability
/// mass and no waypoints below it). Values are kept normalized to total
/// mass 1 by every mutating operation.
class BeliefGrid {
public:
    BeliefGrid(const Vec3& origin, double spacing_m, int nx, int ny, int nz)
        : origin_(origin), spacing_(spacing_m), nx_(nx), ny_(ny), nz_(nz),
          values_(static_cast<std::size_t>(nx) * ny * nz, 0.0) {
        if (!(spacing_m > 0.0)) throw std::invalid_argument("BeliefGrid: spacing must be > 0");
        if (nx < 1 || ny < 1 || nz < 1)
            throw std::invalid_argument("BeliefGrid: dims must be >= 1");
    }

    const Vec3& origin() const { return origin_; }
    double spacing() const { return spacing_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    std::size_t size() const { return values_.size(); }

    int linear(const GridIndex& i) const { return (i.iz * ny_ + i.iy) * nx_ + i.ix; }
    GridIndex index_of(int linear_idx) const {
        GridIndex i;
        i.ix = linear_idx % nx_;
        i.iy = (linear_idx / nx_) % ny_;
        i.iz = linear_idx / (nx_ * ny_);
        return i;
    }

    bool contains(const GridIndex& i) const {
        return i.ix >= 0 && i.ix < nx_ && i.iy >= 0 && i.iy < ny_ && i.iz >= 0 && i.iz < nz_;
    }

    Vec3 cell_center(const GridIndex& i) const {
        return origin_ + Vec3{i.ix * spacing_, i.iy * spacing_, i.iz * spacing_};
    }

    /// Nearest cell to an ENU position (clamped to the grid).
    GridIndex nearest_cell(const Vec3& p) const {
        auto clampi = [](double v, int n) {
            return std::clamp(static_cast<int>(std::lround(v)), 0, n - 1);
        };
        const Vec3 rel = (p - origin_) / spacing_;
        return {clampi(rel.x, nx_), clampi(rel.y, ny_), clampi(rel.z, nz_)};
    }

    bool position_in_bounds(const Vec3& p) const {
        const Vec3 rel = (p - origin_) / spacing_;
        const double half = 0.5;
        return rel.x >= -half && rel.x <= nx_ - 1 + half && rel.y >= -half &&
               rel.y <= ny_ - 1 + half && rel.z >= -half && rel.z <= nz_ - 1 + half;
    }

    double& at(const GridIndex& i) { return values_[linear(i)]; }
    double at(const GridIndex& i) const { return values_[linear(i)]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double total_mass() const {
        double s = 0.0;
        for (double v : values_) s += v;
        return s;
    }

    /// Scale to total mass 1. A fully suppressed grid (all mass observed
    /// away) resets to uniform: the target is still somewhere.
    void normalize() {
        const double m = total_mass();
        if (m > 1e-300) {
            for (double& v : values_) v /= m;
        } else {
            std::fill(values_.begin(), values_.end(), 1.0 / values_.size());
        }
    }

    bool operator==(const BeliefGrid&) const = default;

private:
    Vec3 origin_;
    double spacing_;
    int nx_, ny_, nz_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Belief initialization
// ---------------------------------------------------------------------------

/// Initial belief: a normalized Gaussian in the sensor's (range, azimuth,
/// elevation) coordinates about the last detection, evaluated at cell
/// centers. `sensor_position` anchors the spherical frame.
inline BeliefGrid init_belief(const Vec3& detection, const Vec3& sensor_position,
                              double sigma_range_m, double sigma_az_deg, double sigma_el_deg,
                              const Vec3& grid_origin, double spacing_m, int nx, int ny, int nz) {
    if (!(sigma_range_m > 0.0 && sigma_az_deg > 0.0 && sigma_el_deg > 0.0))
        throw std::invalid_argument("init_belief: sigmas must be > 0");
    BeliefGrid grid(grid_origin, spacing_m, nx, ny, nz);
    if (!grid.position_in_bounds(detection))
        throw std::invalid_argument("init_belief: detection outside grid");

    auto spherical = [&](const Vec3& p, double* r, double* az, double* el) {
        const Vec3 d = p - sensor_position;
        *r = d.norm();
        *az = std::atan2(d.x, d.y);  // from north, clockwise positive
        const double horiz = std::hypot(d.x, d.y);
        *el = std::atan2(d.z, horiz);
    };

    double r0, az0, el0;
    spherical(detection, &r0, &az0, &el0);
    const double s_az = deg_to_rad(sigma_az_deg);
    const double s_el = deg_to_rad(sigma_el_deg);

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec3 c = grid.cell_center(grid.index_of(static_cast<int>(k)));
        double r, az, el;
        spherical(c, &r, &az, &el);
        const double dr = (r - r0) / sigma_range_m;
        double daz = az - az0;
        while (daz > kPi) daz -= 2.0 * kPi;
        while (daz < -kPi) daz += 2.0 * kPi;
        daz /= s_az;
        const double del = (el - el0) / s_el;
        grid.values()[k] = std::exp(-0.5 * (dr * dr + daz * daz + del * del));
    }
    grid.normalize();
    return grid;
}

// ---------------------------------------------------------------------------
// Target dynamics
// ---------------------------------------------------------------------------

struct TargetDynamics {
    double v_h_mps = 10.0;  // max horizontal speed
    double v_v_mps = 5.0;   // max vertical speed

    void validate() const {
        if (!(v_h_mps > 0.0 && v_v_mps > 0.0))
            throw std::invalid_argument("TargetDynamics: speeds must be > 0");
    }
};

namespace detail {

/// 1D Gaussian kernel sampled at grid offsets, truncated at 3 sigma and
/// normalized to sum 1. Always has at least the center tap.
inline std::vector<double> gaussian_taps(double sigma_m, double spacing_m, int* half_width) {
    const int hw = std::max(0, static_cast<int>(std::ceil(3.0 * sigma_m / spacing_m)) );
    std::vector<double> taps(2 * hw + 1);
    double sum = 0.0;
    for (int o = -hw; o <= hw; ++o) {
        const double d = o * spacing_m;
        taps[o + hw] = std::exp(-0.5 * d * d / (sigma_m * sigma_m));
        sum += taps[o + hw];
    }
    for (double& t : taps) t /= sum;
    *half_width = hw;
    return taps;
}

/// Mirror an index into [0, n) (symmetric reflection at the edges). Mass
/// that would leave the grid folds back in, so the operator is doubly
/// stochastic: total mass is conserved and a uniform field is a fixed point.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i = ((i % period) + period) % period;
    return i < n ? i : period - 1 - i;
}

/// Separable 1D convolution pass along one axis with reflecting boundaries.
inline void convolve_axis(std::vector<double>& values, int nx, int ny, int nz, int axis,
                          const std::vector<double>& taps, int hw) {
    if (hw == 0) return;
    const int n = axis == 0 ? nx : (axis == 1 ? ny : nz);
    const int stride = axis == 0 ? 1 : (axis == 1 ? nx : nx * ny);
    const int outer0 = axis == 0 ? ny : nx;
    const int outer1 = axis == 2 ? ny : nz;
    const int ostride0 = axis == 0 ? nx : 1;
    const int ostride1 = axis == 2 ? nx : nx * ny;
    std::vector<double> line(n);
    for (int a = 0; a < outer0; ++a) {
        for (int b = 0; b < outer1; ++b) {
            const int base = a * ostride0 + b * ostride1;
            for (int i = 0; i < n; ++i) line[i] = values[base + i * stride];
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int o = -hw; o <= hw; ++o)
                    acc += taps[o + hw] * line[reflect_index(i + o, n)];
                values[base + i * stride] = acc;
            }
        }
    }
}

}  // namespace detail

/// Target-dynamics update: 3D Gaussian convolution with sigma_x = sigma_y =
/// v_h*dt and sigma_z = v_v*dt, kernel truncated at 3 sigma, reflecting
/// boundaries, followed by a renormalization guard.
inline void propagate(BeliefGrid& b, const TargetDynamics& dyn, double dt_s) {
    dyn.validate();
    if (!(dt_s > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
    int hw_h = 0, hw_v = 0;
    const auto taps_h = detail::gaussian_taps(dyn.v_h_mps * dt_s, b.spacing(), &hw_h);
    const auto taps_v = detail::gaussian_taps(dyn.v_v_mps * dt_s, b.spacing(), &hw_v);
    detail::convolve_axis(b.values(), b.nx(), b.ny(), b.nz(), 0, taps_h, hw_h);
    detail::convolve_axis(b.values(), b.nx(), b.ny(), b.nz(), 1, taps_h, hw_h);
    detail::convolve_axis(b.values(), b.nx(), b.ny(), b.nz(), 2, taps_v, hw_v);
    b.normalize();
}

// ---------------------------------------------------------------------------
// Sensor model
// ---------------------------------------------------------------------------

struct SensorFootprint {
    std::vector<std::pair<int, double>> cells;  // (linear index, detection confidence)
    bool empty() const { return cells.empty(); }
};

struct SensorModelConfig {
    CameraModel camera;
    double confidence_full_range_m = 60.0;  // confidence 1 inside, tapering to 0 at max range
};

/// Camera-frustum observability model over the grid. Footprints depend only
/// on position and yaw (tilt is fixed in the camera mount), so repeated
/// queries at cell centers are cached.
class SensorModel {
public:
    explicit SensorModel(SensorModelConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.camera.validate();
    }

    double confidence_at_range(double range_m) const {
        const double rmax = cfg_.camera.max_detection_range_m;
        if (range_m > rmax) return 0.0;
        const double full = std::min(cfg_.confidence_full_range_m, rmax);
        if (range_m <= full) return 1.0;
        return (rmax - range_m) / (rmax - full);
    }

    /// Grid cells inside the camera frustum and detection range for a given
    /// position and yaw, with their per-cell detection confidence.
    SensorFootprint footprint(const BeliefGrid& grid, const Vec3& position, double yaw_deg) const {
        SensorFootprint fp;
        OwnshipPose pose;
        pose.position = EnuPoint{position.x, position.y, position.z, {}};
        pose.orientation = quat_from_yaw_pitch_roll(yaw_deg, 0.0, 0.0);

        // restrict the scan to the bounding box of the detection range
        const double r = cfg_.camera.max_detection_range_m;
        auto lo = grid.nearest_cell(position - Vec3{r, r, r});
        auto hi = grid.nearest_cell(position + Vec3{r, r, r});
        for (int iz = lo.iz; iz <= hi.iz; ++iz)
            for (int iy = lo.iy; iy <= hi.iy; ++iy)
                for (int ix = lo.ix; ix <= hi.ix; ++ix) {
                    const GridIndex gi{ix, iy, iz};
                    const Vec3 c = grid.cell_center(gi);
                    double px, py, range;
                    if (!project_to_pixel(c, cfg_.camera, pose, &px, &py, &range)) continue;
                    if (px < 0.0 || px > cfg_.camera.width_px || py < 0.0 ||
                        py > cfg_.camera.height_px)
                        continue;
                    if (range > r) continue;
                    fp.cells.emplace_back(grid.linear(gi), confidence_at_range(range));
                }
        return fp;
    }

    /// Cached variant keyed on (cell, quantized yaw); used by the planner.
    const SensorFootprint& footprint_cached(const BeliefGrid& grid, const GridIndex& cell,
                                            double yaw_deg) const {
        const int yaw_key = static_cast<int>(std::lround(wrap_deg(yaw_deg)));
        const auto key = std::make_pair(grid.linear(cell), yaw_key);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, footprint(grid, grid.cell_center(cell), yaw_deg)).first;
        return it->second;
    }

    void clear_cache() { cache_.clear(); }
    const SensorModelConfig& config() const { return cfg_; }

private:
    SensorModelConfig cfg_;
    mutable std::map<std::pair<int, int>, SensorFootprint> cache_;
};

/// Observation update: suppress belief inside the footprint by the per-cell
/// detection confidence, then renormalize.
inline void apply_sensor(BeliefGrid& b, const SensorFootprint& fp) {
    if (fp.empty()) return;
    for (const auto& [idx, conf] : fp.cells) b.values()[idx] *= (1.0 - conf);
    b.normalize();
}

/// Instantaneous probability of capturing the target: sum of belief times
/// detection confidence over the footprint.
inline double belief_gain(const BeliefGrid& b, const SensorFootprint& fp) {
    double g = 0.0;
    for (const auto& [idx, conf] : fp.cells) g += b.values()[idx] * conf;
    return g;
}

/// Argmax cell of the belief; ties break to the lowest linear index.
inline GridIndex max_belief_point(const BeliefGrid& b) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < b.size(); ++k)
        if (b.values()[k] > b.values()[best]) best = k;
    return b.index_of(static_cast<int>(best));
}

// ---------------------------------------------------------------------------
// Receding-horizon planner
// ---------------------------------------------------------------------------

struct PlannedPath {
    std::vector<GridIndex> waypoints;  // {x_0, x_1, ..., x_k}, k <= horizon
    double gain = 0.0;
    bool found = false;  // false: nothing beat the gain threshold, use fallback
};

struct RhcConfig {
    int horizon = 3;
    double discount = 0.9;
    double gain_threshold = 0.001;  // paths must exceed this to survive
    long max_expansions = 0;        // 0 = unbounded; safety valve for deep horizons
};

namespace detail {

/// The 27 moves (26 neighbors + stay) in a fixed enumeration order; the
/// order is part of the planner's determinism contract.
inline const std::vector<GridIndex>& planner_moves() {
    static const std::vector<GridIndex> moves = [] {
        std::vector<GridIndex> m;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) m.push_back({dx, dy, dz});
        return m;
    }();
    return moves;
}

/// Yaw implied by a horizontal move; vertical-only moves and "stay" keep the
/// previous yaw.
inline double move_yaw(const GridIndex& move, double previous_yaw_deg) {
    if (move.ix == 0 && move.iy == 0) return previous_yaw_deg;
    return rad_to_deg(std::atan2(static_cast<double>(move.ix), static_cast<double>(move.iy)));
}

/// Candidate ordering for ties: higher gain wins; on equal gain the shorter
/// path, then the lexicographically smaller move sequence. Makes the result
/// independent of enumeration strategy.
inline bool candidate_better(double gain_a, const std::vector<GridIndex>& path_a,
                             double gain_b, const std::vector<GridIndex>& path_b) {
    if (gain_a != gain_b) return gain_a > gain_b;
    if (path_a.size() != path_b.size()) return path_a.size() < path_b.size();
    for (std::size_t i = 0; i < path_a.size(); ++i) {
        const auto& a = path_a[i];
        const auto& b = path_b[i];
        if (!(a == b)) {
            if (a.iz != b.iz) return a.iz < b.iz;
            if (a.iy != b.iy) return a.iy < b.iy;
            return a.ix < b.ix;
        }
    }
    return false;
}

}  // namespace detail

/// Enumerate adjacency-expanded paths up to the horizon, accumulating
/// discounted belief gain with the sensor model applied along the path (so
/// revisited cells earn nothing new), and return the best (path, gain).
/// Depth-first with suppress/undo on a working belief copy; visit order per
/// `planner_moves` and tie-breaks per `candidate_better`, so the output is
/// deterministic and matches exhaustive enumeration.
inline PlannedPath plan_rhc(const BeliefGrid& belief, const GridIndex& start,
                            double start_yaw_deg, const SensorModel& sensor,
                            const RhcConfig& cfg) {
    if (cfg.horizon < 1) throw std::invalid_argument("plan_rhc: horizon must be >= 1");
    if (!(cfg.discount > 0.0 && cfg.discount <= 1.0))
        throw std::invalid_argument("plan_rhc: discount must be in (0, 1]");
    if (!belief.contains(start)) throw std::invalid_argument("plan_rhc: start outside grid");

    BeliefGrid work = belief;  // suppressed in place along the current path
    PlannedPath best;
    std::vector<GridIndex> path{start};
    long expansions = 0;

    struct Undo {
        int idx;
        double value;
    };

    auto dfs = [&](auto&& self, const GridIndex& cell, double yaw_deg, int depth,
                   double gain) -> void {
        if (depth >= cfg.horizon) return;
        if (cfg.max_expansions > 0 && expansions >= cfg.max_expansions) return;
        for (const GridIndex& move : detail::planner_moves()) {
            const GridIndex next{cell.ix + move.ix, cell.iy + move.iy, cell.iz + move.iz};
            if (!belief.contains(next)) continue;
            ++expansions;
            const double next_yaw = detail::move_yaw(move, yaw_deg);
            const SensorFootprint& fp = sensor.footprint_cached(work, next, next_yaw);

            double step_gain = 0.0;
            for (const auto& [idx, conf] : fp.cells) step_gain += work.values()[idx] * conf;
            const double g_new = gain + std::pow(cfg.discount, depth + 1) * step_gain;
            if (!(g_new > cfg.gain_threshold)) continue;

            std::vector<Undo> undo;
            undo.reserve(fp.cells.size());
            for (const auto& [idx, conf] : fp.cells) {
                undo.push_back({idx, work.values()[idx]});
                work.values()[idx] *= (1.0 - conf);
            }
            path.push_back(next);

            if (!best.found ||
                detail::candidate_better(g_new, path, best.gain, best.waypoints)) {
                best.waypoints = path;
                best.gain = g_new;
                best.found = true;
            }
            self(self, next, next_yaw, depth + 1, g_new);

            path.pop_back();
            for (auto it = undo.rbegin(); it != undo.rend(); ++it)
                work.values()[it->idx] = it->value;
        }
    };
    dfs(dfs, start, start_yaw_deg, 0, 0.0);
    return best;
}

}  // namespace chaser
