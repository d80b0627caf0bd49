// Relative-position follow control: three PID loops (yaw rate on azimuth,
// pitch on ground range, climb rate on relative height) with median
// pre-filtering, staleness fallback to hover, and the chase-geometry
// analysis used to pick the operating point.
//
// Sign conventions:
//  - azimuth: body-relative bearing to target, positive right of boresight
//  - pitch command: positive pitches forward (nose down, accelerate)
//  - climb command: positive climbs
//  - relative height: ownship altitude minus target altitude (positive when
//    flying above the target, which is the commanded geometry)
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chaser/filters.hpp"
#include "chaser/geo.hpp"

namespace chaser {

// ---------------------------------------------------------------------------
// PID
// ---------------------------------------------------------------------------

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
};

/// Plain PID on e = setpoint - process_value, derivative on error with the
/// first-step derivative defined as zero. Output is clamped; the integral is
/// frozen on the step where the clamp engages and is itself clamped to the
/// band that ki alone cannot push past the output limits.
class PidLoop {
public:
    PidLoop(PidGains gains, double setpoint, double out_min, double out_max)
        : gains_(gains), setpoint_(setpoint), out_min_(out_min), out_max_(out_max) {
        if (!(out_min < out_max)) throw std::invalid_argument("PidLoop: empty output range");
    }

    double step(double process_value, double dt_s) {
        if (!(dt_s > 0.0)) throw std::invalid_argument("PidLoop: dt must be > 0");
        const double e = setpoint_ - process_value;
        const double derivative = has_previous_ ? (e - previous_error_) / dt_s : 0.0;
        const double candidate_integral = clamp_integral(integral_ + e * dt_s);
        double out = gains_.kp * e + gains_.ki * candidate_integral + gains_.kd * derivative;
        if (out > out_max_ || out < out_min_) {
            // anti-windup: keep the old integral while saturated
            out = gains_.kp * e + gains_.ki * integral_ + gains_.kd * derivative;
            out = std::clamp(out, out_min_, out_max_);
        } else {
            integral_ = candidate_integral;
        }
        previous_error_ = e;
        has_previous_ = true;
        return out;
    }

    void reset() {
        integral_ = 0.0;
        previous_error_ = 0.0;
        has_previous_ = false;
    }

    void set_setpoint(double sp) { setpoint_ = sp; }
    void set_kd(double kd) { gains_.kd = kd; }
    double setpoint() const { return setpoint_; }
    const PidGains& gains() const { return gains_; }
    double integral() const { return integral_; }

private:
    double clamp_integral(double integral) const {
        if (gains_.ki == 0.0) return integral;
        const double hi = out_max_ / gains_.ki;
        const double lo = out_min_ / gains_.ki;
        return std::clamp(integral, std::min(lo, hi), std::max(lo, hi));
    }

    PidGains gains_;
    double setpoint_;
    double out_min_;
    double out_max_;
    double integral_ = 0.0;
    double previous_error_ = 0.0;
    bool has_previous_ = false;
};

/// Range-scheduled derivative gain for the yaw-rate loop.
inline double yaw_kd(double ground_range_m) {
    if (ground_range_m < 0.0) throw std::invalid_argument("yaw_kd: ground range must be >= 0");
    return 0.0003 * ground_range_m;
}

// ---------------------------------------------------------------------------
// Follow controller
// ---------------------------------------------------------------------------

struct RelativeTargetState {
    double azimuth_deg = 0.0;        // positive right of boresight
    double ground_range_m = 0.0;     // horizontal separation R
    double relative_height_m = 0.0;  // ownship above target, positive
    double timestamp_s = 0.0;
};

struct FollowCommand {
    double yaw_rate_dps = 0.0;
    double pitch_deg = 0.0;
    double climb_rate_mps = 0.0;
    bool hover = false;

    static FollowCommand hover_command() { return {0.0, 0.0, 0.0, true}; }
};

struct FollowConfig {
    PidGains yaw_gains{0.25, 0.002, 0.0};   // kd is range-scheduled
    PidGains pitch_gains{0.4, 0.01, 0.2};
    PidGains climb_gains{0.6, 0.01, 0.02};
    double azimuth_setpoint_deg = 0.0;
    double ground_range_setpoint_m = 30.6;
    double relative_height_setpoint_m = 25.7;
    double yaw_rate_limit_dps = 45.0;
    double pitch_limit_deg = 20.0;
    double climb_limit_mps = 3.0;
    double staleness_s = 2.0;
    std::size_t median_window = 5;
};

/// Three-loop relative-position controller. Cadence-agnostic (consumes dt),
/// designed around a 5 Hz update.
class FollowController {
public:
    explicit FollowController(FollowConfig cfg = {})
        : cfg_(cfg),
          yaw_pid_(cfg.yaw_gains, cfg.azimuth_setpoint_deg, -cfg.yaw_rate_limit_dps,
                   cfg.yaw_rate_limit_dps),
          pitch_pid_(cfg.pitch_gains, cfg.ground_range_setpoint_m, -cfg.pitch_limit_deg,
                     cfg.pitch_limit_deg),
          climb_pid_(cfg.climb_gains, cfg.relative_height_setpoint_m, -cfg.climb_limit_mps,
                     cfg.climb_limit_mps),
          az_filter_(cfg.median_window),
          range_filter_(cfg.median_window),
          height_filter_(cfg.median_window) {}

    /// Consume a target observation and produce the command triple.
    FollowCommand step(const RelativeTargetState& target, double now_s) {
        const double dt = last_update_s_ ? now_s - *last_update_s_ : 0.2;
        if (!(dt > 0.0)) throw std::invalid_argument("FollowController: time must advance");
        last_update_s_ = now_s;
        last_target_s_ = target.timestamp_s;

        const double az = az_filter_.push(wrap_deg(target.azimuth_deg));
        const double range = range_filter_.push(target.ground_range_m);
        const double height = height_filter_.push(target.relative_height_m);

        yaw_pid_.set_kd(yaw_kd(std::max(0.0, range)));

        FollowCommand cmd;
        // e = 0 - az; target right of boresight needs positive yaw rate
        cmd.yaw_rate_dps = -yaw_pid_.step(az, dt);
        // e = setpoint - range; target beyond setpoint needs forward pitch
        cmd.pitch_deg = -pitch_pid_.step(range, dt);
        // e = setpoint - height; flying too high above target -> descend
        cmd.climb_rate_mps = climb_pid_.step(height, dt);
        return cmd;
    }

    /// Hover fallback once target updates go stale (> staleness_s), with
    /// integrator reset. Returns nothing while the target is fresh.
    std::optional<FollowCommand> staleness_guard(double now_s) {
        if (last_target_s_ && now_s - *last_target_s_ > cfg_.staleness_s) {
            reset();
            return FollowCommand::hover_command();
        }
        return std::nullopt;
    }

    /// Exit path: always a hover command, regardless of state.
    FollowCommand shutdown() {
        reset();
        return FollowCommand::hover_command();
    }

    void reset() {
        yaw_pid_.reset();
        pitch_pid_.reset();
        climb_pid_.reset();
        az_filter_.clear();
        range_filter_.clear();
        height_filter_.clear();
        last_update_s_.reset();
        last_target_s_.reset();
    }

    const FollowConfig& config() const { return cfg_; }

private:
    FollowConfig cfg_;
    PidLoop yaw_pid_;
    PidLoop pitch_pid_;
    PidLoop climb_pid_;
    MedianWindow az_filter_;
    MedianWindow range_filter_;
    MedianWindow height_filter_;
    std::optional<double> last_update_s_;
    std::optional<double> last_target_s_;
};

// ---------------------------------------------------------------------------
// Chase geometry
// ---------------------------------------------------------------------------

struct ChaseGeometry {
    double slant_range_m = 40.0;
    double elevation_deg = 40.0;

    double ground_range_setpoint_m() const {
        return slant_range_m * std::cos(deg_to_rad(elevation_deg));
    }
    double relative_height_setpoint_m() const {
        return slant_range_m * std::sin(deg_to_rad(elevation_deg));
    }
};

struct ChaseCandidate {
    double slant_range_m = 0.0;
    double elevation_deg = 0.0;
    double pixels_on_target = 0.0;       // critical dimension, pixels
    double vertical_reaction_s = 0.0;    // time to cross the horizon line
    double horizontal_reaction_s = 0.0;  // time to exit the vertical FOV
    bool acceptable = false;             // meets the pixel requirement
};

/// Per-pixel angle of the camera along the horizontal axis, radians.
inline double rad_per_pixel(const CameraModel& cam) {
    return deg_to_rad(cam.horizontal_fov_deg) / cam.width_px;
}

/// Critical-dimension pixels of a target of given size at a slant range,
/// under the pinhole per-pixel angle.
inline double pixels_on_target(double target_size_m, double slant_range_m,
                               const CameraModel& cam) {
    const double angular_size = 2.0 * std::atan(0.5 * target_size_m / slant_range_m);
    return angular_size / rad_per_pixel(cam);
}

/// Time for a target at max vertical speed to climb from the chase elevation
/// to the horizon line. Infinite when the target sits directly below.
inline double horizon_crossing_time_s(double slant_range_m, double elevation_deg,
                                      double target_vmax_v_mps) {
    const double d = slant_range_m * std::cos(deg_to_rad(elevation_deg));
    if (d < 1e-9) return std::numeric_limits<double>::infinity();
    return slant_range_m * std::sin(deg_to_rad(elevation_deg)) / target_vmax_v_mps;
}

/// Time for a target at max horizontal speed to leave the vertical FOV,
/// starting from the boresight with the camera tilted at the chase elevation.
/// The worse (faster-exiting) of the toward / away directions is reported.
inline double vertical_fov_exit_time_s(double slant_range_m, double elevation_deg,
                                       double target_vmax_h_mps, const CameraModel& cam) {
    const double h = slant_range_m * std::sin(deg_to_rad(elevation_deg));
    const double d0 = slant_range_m * std::cos(deg_to_rad(elevation_deg));
    const double half_vfov = 0.5 * cam.vertical_fov_deg;
    double t_min = std::numeric_limits<double>::infinity();
    // toward the chaser: elevation angle grows to the bottom FOV edge
    const double bottom = elevation_deg + half_vfov;
    if (bottom < 90.0) {
        const double d_exit = h / std::tan(deg_to_rad(bottom));
        if (d_exit < d0) t_min = std::min(t_min, (d0 - d_exit) / target_vmax_h_mps);
    } else if (d0 > 0.0) {
        t_min = std::min(t_min, d0 / target_vmax_h_mps);  // exits past the nadir edge
    }
    // away: elevation angle shrinks to the top FOV edge
    const double top = elevation_deg - half_vfov;
    if (top > 1e-9) {
        const double d_exit = h / std::tan(deg_to_rad(top));
        t_min = std::min(t_min, (d_exit - d0) / target_vmax_h_mps);
    }
    return t_min;
}

struct ChaseAnalysisConfig {
    double target_size_m = 0.35;
    double target_vmax_h_mps = 10.0;
    double target_vmax_v_mps = 5.0;
    double min_pixels = 15.0;
    double range_min_m = 10.0;
    double range_max_m = 80.0;
    double range_step_m = 5.0;
    double elevation_min_deg = 10.0;
    double elevation_max_deg = 80.0;
    double elevation_step_deg = 5.0;
};

/// Sweep candidate chase positions and answer the three guiding questions
/// for each: pixels on target, vertical reaction time, horizontal reaction
/// time. Candidates meeting the pixel floor are flagged acceptable.
inline std::vector<ChaseCandidate> chase_geometry_analysis(const ChaseAnalysisConfig& cfg,
                                                           const CameraModel& cam) {
    if (!(cfg.target_size_m > 0.0 && cfg.target_vmax_h_mps > 0.0 && cfg.target_vmax_v_mps > 0.0))
        throw std::invalid_argument("chase_geometry_analysis: parameters must be positive");
    std::vector<ChaseCandidate> out;
    for (double r = cfg.range_min_m; r <= cfg.range_max_m + 1e-9; r += cfg.range_step_m) {
        for (double el = cfg.elevation_min_deg; el <= cfg.elevation_max_deg + 1e-9;
             el += cfg.elevation_step_deg) {
            ChaseCandidate c;
            c.slant_range_m = r;
            c.elevation_deg = el;
            c.pixels_on_target = pixels_on_target(cfg.target_size_m, r, cam);
            c.vertical_reaction_s = horizon_crossing_time_s(r, el, cfg.target_vmax_v_mps);
            c.horizontal_reaction_s = vertical_fov_exit_time_s(r, el, cfg.target_vmax_h_mps, cam);
            c.acceptable = c.pixels_on_target >= cfg.min_pixels;
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace chaser
