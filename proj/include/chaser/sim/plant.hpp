// Chase-vehicle plant: a smooth kinematic model with altitude-hold command
// semantics. Commands are yaw rate, pitch angle, and vertical climb rate;
// pitch and climb pass through a first-order lag, pitch maps to forward
// acceleration with speed-proportional drag, and a zero climb command holds
// altitude exactly.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chaser/follow.hpp"
#include "chaser/geo.hpp"
#include "chaser/vec3.hpp"

namespace chaser::sim {

struct PlantConfig {
    double max_speed_mps = 18.0;
    double pitch_to_accel_gain = 0.5;  // (m/s^2) per degree of pitch
    double drag_per_s = 2.0 / 3.0;     // terminal ~15 m/s at 20 degrees pitch
    double command_lag_s = 0.5;

    void validate() const {
        if (!(max_speed_mps > 0.0)) throw std::invalid_argument("PlantConfig: max_speed must be > 0");
        if (!(pitch_to_accel_gain > 0.0))
            throw std::invalid_argument("PlantConfig: pitch_to_accel_gain must be > 0");
        if (!(drag_per_s > 0.0)) throw std::invalid_argument("PlantConfig: drag must be > 0");
        if (!(command_lag_s > 0.0)) throw std::invalid_argument("PlantConfig: command_lag must be > 0");
    }
};

struct ChasePlant {
    Vec3 position;        // scenario ENU, meters
    Vec3 velocity;        // m/s
    double yaw_deg = 0.0;      // compass heading
    double pitch_deg = 0.0;    // achieved pitch (lags the command)
    PlantConfig config;

    Vec3 heading() const {
        return {std::sin(deg_to_rad(yaw_deg)), std::cos(deg_to_rad(yaw_deg)), 0.0};
    }

    OwnshipPose pose(double t) const {
        OwnshipPose p;
        p.position = EnuPoint{position.x, position.y, position.z, {}};
        p.orientation = quat_from_yaw_pitch_roll(yaw_deg, pitch_deg, 0.0);
        p.timestamp_s = t;
        return p;
    }
};

/// One physics step. Semi-implicit Euler: velocity first, then position.
/// Altitude-hold contract: a zero (or hover) climb command zeroes vertical
/// velocity, so altitude drift is exactly 0 without climb commands.
inline ChasePlant plant_step(const ChasePlant& p, const FollowCommand& cmd, double dt_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("plant_step: dt must be > 0");
    p.config.validate();
    ChasePlant n = p;
    const double yaw_rate = cmd.hover ? 0.0 : cmd.yaw_rate_dps;
    const double pitch_cmd = cmd.hover ? 0.0 : cmd.pitch_deg;
    const double climb_cmd = cmd.hover ? 0.0 : cmd.climb_rate_mps;

    n.yaw_deg = wrap_deg(n.yaw_deg + yaw_rate * dt_s);
    const double lag = std::min(1.0, dt_s / p.config.command_lag_s);
    n.pitch_deg += (pitch_cmd - n.pitch_deg) * lag;

    const Vec3 fwd = n.heading();
    Vec3 v_h{n.velocity.x, n.velocity.y, 0.0};
    v_h += (fwd * (p.config.pitch_to_accel_gain * n.pitch_deg) - v_h * p.config.drag_per_s) * dt_s;

    double vz;
    if (climb_cmd == 0.0) {
        vz = 0.0;  // altitude hold
    } else {
        vz = n.velocity.z + (climb_cmd - n.velocity.z) * lag;
    }

    n.velocity = {v_h.x, v_h.y, vz};
    const double speed = n.velocity.norm();
    if (speed > p.config.max_speed_mps) n.velocity *= p.config.max_speed_mps / speed;

    n.position += n.velocity * dt_s;
    if (n.position.z < 0.0) {
        n.position.z = 0.0;
        if (n.velocity.z < 0.0) n.velocity.z = 0.0;
    }
    return n;
}

}  // namespace chaser::sim
