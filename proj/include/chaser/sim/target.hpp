// Scripted target trajectories: closed-form position as a function of time,
// so target motion is exactly reproducible and independent of step size.
// Shapes: hold, waypoint polyline, rectangle with corner pauses, circle.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaser/vec3.hpp"

namespace chaser::sim {

enum class TargetShape {
    Hold,
    WaypointLine,
    RectangleWithPauses,
    Circle,
};

struct TargetSegment {
    TargetShape shape = TargetShape::Hold;
    double duration_s = 0.0;  // 0 = runs to the end of the scenario
    double speed_mps = 5.0;

    // Hold / WaypointLine
    std::vector<Vec3> waypoints;  // Hold uses waypoints[0]

    // RectangleWithPauses: corner is the south-west corner at altitude corner.z
    Vec3 corner;
    double east_extent_m = 0.0;
    double north_extent_m = 0.0;
    double pause_s = 0.0;

    // Circle
    Vec3 center;
    double radius_m = 0.0;

    void validate() const {
        if (duration_s < 0.0) throw std::invalid_argument("TargetSegment: duration must be >= 0");
        switch (shape) {
            case TargetShape::Hold:
                if (waypoints.size() != 1)
                    throw std::invalid_argument("TargetSegment: hold needs exactly one waypoint");
                break;
            case TargetShape::WaypointLine:
                if (waypoints.size() < 2)
                    throw std::invalid_argument("TargetSegment: polyline needs >= 2 waypoints");
                if (!(speed_mps > 0.0))
                    throw std::invalid_argument("TargetSegment: speed must be > 0");
                break;
            case TargetShape::RectangleWithPauses:
                if (!(east_extent_m > 0.0 && north_extent_m > 0.0))
                    throw std::invalid_argument("TargetSegment: rectangle extents must be > 0");
                if (!(speed_mps > 0.0))
                    throw std::invalid_argument("TargetSegment: speed must be > 0");
                if (pause_s < 0.0) throw std::invalid_argument("TargetSegment: pause must be >= 0");
                break;
            case TargetShape::Circle:
                if (!(radius_m > 0.0))
                    throw std::invalid_argument("TargetSegment: radius must be > 0");
                if (!(speed_mps > 0.0))
                    throw std::invalid_argument("TargetSegment: speed must be > 0");
                break;
        }
    }
};

namespace detail {

inline Vec3 polyline_position(const std::vector<Vec3>& pts, double speed, double t_local) {
    double travelled = speed * t_local;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double leg = (pts[i + 1] - pts[i]).norm();
        if (travelled <= leg || leg <= 0.0) {
            if (leg <= 0.0) continue;
            return pts[i] + (pts[i + 1] - pts[i]) * (travelled / leg);
        }
        travelled -= leg;
    }
    return pts.back();  // finished: hold at the last waypoint
}

inline Vec3 rectangle_position(const TargetSegment& s, double t_local) {
    const Vec3 c0 = s.corner;
    const Vec3 c1 = c0 + Vec3{s.east_extent_m, 0.0, 0.0};
    const Vec3 c2 = c0 + Vec3{s.east_extent_m, s.north_extent_m, 0.0};
    const Vec3 c3 = c0 + Vec3{0.0, s.north_extent_m, 0.0};
    const Vec3 corners[4] = {c0, c1, c2, c3};
    const double legs[4] = {s.east_extent_m, s.north_extent_m, s.east_extent_m, s.north_extent_m};
    const double cycle =
        2.0 * (s.east_extent_m + s.north_extent_m) / s.speed_mps + 4.0 * s.pause_s;
    double phase = std::fmod(t_local, cycle);
    for (int i = 0; i < 4; ++i) {
        if (phase < s.pause_s) return corners[i];  // paused at this corner
        phase -= s.pause_s;
        const double leg_time = legs[i] / s.speed_mps;
        if (phase < leg_time) {
            const Vec3 next = corners[(i + 1) % 4];
            return corners[i] + (next - corners[i]) * (phase / leg_time);
        }
        phase -= leg_time;
    }
    return c0;
}

inline Vec3 circle_position(const TargetSegment& s, double t_local) {
    // starts due north of the center, travelling clockwise (east first)
    const double phase = s.speed_mps * t_local / s.radius_m;
    return s.center + Vec3{s.radius_m * std::sin(phase), s.radius_m * std::cos(phase), 0.0};
}

}  // namespace detail

/// Sequential segments; the last (or any zero-duration) segment extends to
/// the end of time.
class TargetScript {
public:
    explicit TargetScript(std::vector<TargetSegment> segments)
        : segments_(std::move(segments)) {
        if (segments_.empty()) throw std::invalid_argument("TargetScript: no segments");
        for (const auto& s : segments_) s.validate();
    }

    Vec3 position_at(double t) const {
        double t0 = 0.0;
        for (std::size_t i = 0; i < segments_.size(); ++i) {
            const TargetSegment& s = segments_[i];
            const bool open_ended = s.duration_s == 0.0 || i + 1 == segments_.size();
            if (open_ended || t < t0 + s.duration_s) return segment_position(s, std::max(0.0, t - t0));
            t0 += s.duration_s;
        }
        return segment_position(segments_.back(), std::max(0.0, t - t0));
    }

    const std::vector<TargetSegment>& segments() const { return segments_; }

private:
    static Vec3 segment_position(const TargetSegment& s, double t_local) {
        switch (s.shape) {
            case TargetShape::Hold: return s.waypoints[0];
            case TargetShape::WaypointLine:
                return detail::polyline_position(s.waypoints, s.speed_mps, t_local);
            case TargetShape::RectangleWithPauses: return detail::rectangle_position(s, t_local);
            case TargetShape::Circle: return detail::circle_position(s, t_local);
        }
        return s.waypoints.empty() ? Vec3{} : s.waypoints[0];
    }

    std::vector<TargetSegment> segments_;
};

}  // namespace chaser::sim
