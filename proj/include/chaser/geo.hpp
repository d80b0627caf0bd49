// Coordinate types and transforms: geodetic <-> local ENU, quaternion
// attitude, and the camera projection chain (pixel <-> ENU direction).
//
// Conventions, fixed here once:
//  - ENU: east-north-up tangent plane anchored at a geodetic origin.
//    WGS84 linearization about the origin (meridian / prime-vertical radii);
//    valid for offsets well under ~5 km, round-trip error < 1e-6 m there.
//  - Body frame: x forward, y left, z up (FLU). Yaw is compass heading
//    (degrees clockwise from north), pitch positive nose-up, roll positive
//    right-wing-down. Euler order is intrinsic Z-Y-X; quaternions internally.
//  - Camera frame: +z boresight, +x image-right, +y image-down.
//  - Image coordinates: origin top-left, x right, y down, continuous pixels
//    spanning [0, width] x [0, height].
//  - Pixel-angle mapping is pinhole (tangent), not equiangular.
#pragma once

#include <cmath>
#include <stdexcept>

#include "chaser/vec3.hpp"

namespace chaser {

// ---------------------------------------------------------------------------
// Geodetic / ENU
// ---------------------------------------------------------------------------

struct GeodeticPoint {
    double latitude_deg = 0.0;   // WGS84, [-90, 90]
    double longitude_deg = 0.0;  // WGS84, [-180, 180]
    double altitude_m = 0.0;     // above reference ellipsoid / datum

    void validate() const {
        if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0))
            throw std::invalid_argument("GeodeticPoint: latitude out of [-90, 90]");
        if (!(longitude_deg >= -180.0 && longitude_deg <= 180.0))
            throw std::invalid_argument("GeodeticPoint: longitude out of [-180, 180]");
    }

    bool operator==(const GeodeticPoint&) const = default;
};

/// Position in a local east-north-up tangent plane, tagged with its origin.
/// Two EnuPoints are comparable only when their origins match exactly.
struct EnuPoint {
    double east_m = 0.0;
    double north_m = 0.0;
    double up_m = 0.0;
    GeodeticPoint origin;

    Vec3 vec() const { return {east_m, north_m, up_m}; }

    EnuPoint with_vec(const Vec3& v) const { return {v.x, v.y, v.z, origin}; }

    /// Difference vector; throws when the frames are anchored differently.
    Vec3 operator-(const EnuPoint& o) const {
        if (!(origin == o.origin))
            throw std::invalid_argument("EnuPoint: mixing points with different origins");
        return vec() - o.vec();
    }
};

namespace wgs84 {
inline constexpr double kSemiMajorAxis = 6378137.0;
inline constexpr double kFlattening = 1.0 / 298.257223563;
inline constexpr double kEccSq = kFlattening * (2.0 - kFlattening);

/// Meridian radius of curvature at latitude (radians).
inline double meridian_radius(double lat_rad) {
    const double s = std::sin(lat_rad);
    const double w = 1.0 - kEccSq * s * s;
    return kSemiMajorAxis * (1.0 - kEccSq) / (w * std::sqrt(w));
}

/// Prime-vertical radius of curvature at latitude (radians).
inline double prime_vertical_radius(double lat_rad) {
    const double s = std::sin(lat_rad);
    return kSemiMajorAxis / std::sqrt(1.0 - kEccSq * s * s);
}
}  // namespace wgs84

inline void check_not_polar(const GeodeticPoint& p) {
    if (std::abs(p.latitude_deg) >= 90.0 - 1e-9)
        throw std::invalid_argument("geodetic/ENU transform undefined at the poles");
}

/// Local tangent-plane coordinates of `p` relative to `origin`.
inline EnuPoint geodetic_to_enu(const GeodeticPoint& p, const GeodeticPoint& origin) {
    p.validate();
    origin.validate();
    check_not_polar(p);
    check_not_polar(origin);
    const double lat0 = deg_to_rad(origin.latitude_deg);
    const double rm = wgs84::meridian_radius(lat0);
    const double rn = wgs84::prime_vertical_radius(lat0);
    EnuPoint out;
    out.east_m = deg_to_rad(p.longitude_deg - origin.longitude_deg) * rn * std::cos(lat0);
    out.north_m = deg_to_rad(p.latitude_deg - origin.latitude_deg) * rm;
    out.up_m = p.altitude_m - origin.altitude_m;
    out.origin = origin;
    return out;
}

/// Inverse of geodetic_to_enu under the same tangent-plane model.
inline GeodeticPoint enu_to_geodetic(const EnuPoint& p) {
    p.origin.validate();
    check_not_polar(p.origin);
    const double lat0 = deg_to_rad(p.origin.latitude_deg);
    const double rm = wgs84::meridian_radius(lat0);
    const double rn = wgs84::prime_vertical_radius(lat0);
    GeodeticPoint out;
    out.latitude_deg = p.origin.latitude_deg + rad_to_deg(p.north_m / rm);
    out.longitude_deg = p.origin.longitude_deg + rad_to_deg(p.east_m / (rn * std::cos(lat0)));
    out.altitude_m = p.origin.altitude_m + p.up_m;
    return out;
}

// ---------------------------------------------------------------------------
// Quaternion
// ---------------------------------------------------------------------------

struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Quaternion identity() { return {}; }

    static Quaternion from_axis_angle(const Vec3& axis, double angle_rad) {
        const Vec3 a = axis.normalized();
        const double h = 0.5 * angle_rad;
        const double s = std::sin(h);
        return {std::cos(h), a.x * s, a.y * s, a.z * s};
    }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    Quaternion normalized() const {
        const double n = norm();
        if (n <= 0.0) throw std::invalid_argument("Quaternion: zero norm");
        return {w / n, x / n, y / n, z / n};
    }

    Quaternion conjugate() const { return {w, -x, -y, -z}; }

    /// Hamilton product; (a * b) rotates by b first, then a.
    Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    bool operator==(const Quaternion&) const = default;
};

/// Rotate a vector by a unit quaternion. Throws when q is not unit-norm
/// within 1e-6.
inline Vec3 rotate(const Quaternion& q, const Vec3& v) {
    if (std::abs(q.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("rotate: quaternion is not unit-norm");
    const Vec3 u{q.x, q.y, q.z};
    const Vec3 t = 2.0 * u.cross(v);
    return v + q.w * t + u.cross(t);
}

/// Body->ENU attitude from compass yaw / pitch-up / roll-right, degrees,
/// intrinsic Z-Y-X. Yaw 0 faces north.
inline Quaternion quat_from_yaw_pitch_roll(double yaw_deg, double pitch_deg, double roll_deg) {
    const Quaternion qz =
        Quaternion::from_axis_angle({0, 0, 1}, deg_to_rad(90.0 - yaw_deg));
    const Quaternion qy = Quaternion::from_axis_angle({0, 1, 0}, deg_to_rad(-pitch_deg));
    const Quaternion qx = Quaternion::from_axis_angle({1, 0, 0}, deg_to_rad(roll_deg));
    return (qz * qy * qx).normalized();
}

/// Rotation-vector (axis * angle, radians) for the small-angle residual
/// between two unit quaternions: r such that exp(r) * a = b.
inline Vec3 rotation_vector_between(const Quaternion& a, const Quaternion& b) {
    Quaternion d = b * a.conjugate();
    if (d.w < 0.0) d = {-d.w, -d.x, -d.y, -d.z};  // shorter arc
    const Vec3 axis{d.x, d.y, d.z};
    const double s = axis.norm();
    if (s < 1e-12) return {0, 0, 0};
    const double angle = 2.0 * std::atan2(s, d.w);
    return axis * (angle / s);
}

inline Quaternion quat_from_rotation_vector(const Vec3& r) {
    const double angle = r.norm();
    if (angle < 1e-12) return Quaternion::identity();
    return Quaternion::from_axis_angle(r, angle);
}

// ---------------------------------------------------------------------------
// Camera
// ---------------------------------------------------------------------------

struct OwnshipPose {
    EnuPoint position;
    Quaternion orientation;  // body -> ENU
    double timestamp_s = 0.0;
};

struct CameraModel {
    double horizontal_fov_deg = 90.0;
    double vertical_fov_deg = 60.0;
    int width_px = 3840;
    int height_px = 2160;
    Vec3 mount_translation_m{};      // camera position in body frame
    Quaternion mount_orientation{};  // camera -> body
    double max_detection_range_m = 100.0;

    void validate() const {
        if (!(horizontal_fov_deg > 0.0 && horizontal_fov_deg < 180.0) ||
            !(vertical_fov_deg > 0.0 && vertical_fov_deg < 180.0))
            throw std::invalid_argument("CameraModel: FOV must be in (0, 180)");
        if (width_px < 1 || height_px < 1)
            throw std::invalid_argument("CameraModel: resolution must be >= 1 px");
        if (!(max_detection_range_m > 0.0))
            throw std::invalid_argument("CameraModel: max_detection_range must be > 0");
    }

    /// Camera->body mount for a forward-looking camera tilted down.
    static Quaternion mount_for_tilt_down(double tilt_down_deg) {
        // boresight (+z cam) -> body x, image-right -> -body y, image-down -> -body z
        const Quaternion level =
            Quaternion::from_axis_angle({1, 0, 0}, deg_to_rad(-90.0)) *
            Quaternion::from_axis_angle({0, 1, 0}, deg_to_rad(90.0));
        return (Quaternion::from_axis_angle({0, 1, 0}, deg_to_rad(tilt_down_deg)) * level)
            .normalized();
    }
};

struct BoundingBox {
    double center_x_px = 0.0;
    double center_y_px = 0.0;
    double width_px = 0.0;   // bbox_w
    double height_px = 0.0;  // bbox_h
    double confidence = 1.0;

    /// sqrt(bbox_w * bbox_h)
    double critical_dimension_px() const { return std::sqrt(width_px * height_px); }
};

/// Unit direction in camera frame through a continuous pixel coordinate.
inline Vec3 pixel_to_camera_ray(double px, double py, const CameraModel& cam) {
    if (px < 0.0 || px > cam.width_px || py < 0.0 || py > cam.height_px)
        throw std::invalid_argument("pixel outside image bounds");
    const double tx = std::tan(0.5 * deg_to_rad(cam.horizontal_fov_deg));
    const double ty = std::tan(0.5 * deg_to_rad(cam.vertical_fov_deg));
    const Vec3 ray{tx * (2.0 * px / cam.width_px - 1.0),
                   ty * (2.0 * py / cam.height_px - 1.0), 1.0};
    return ray.normalized();
}

/// Unit vector in ENU pointing from the camera through the given pixel.
inline Vec3 pixel_to_direction(const BoundingBox& b, const CameraModel& cam,
                               const OwnshipPose& pose) {
    cam.validate();
    const Vec3 cam_ray = pixel_to_camera_ray(b.center_x_px, b.center_y_px, cam);
    const Vec3 body_ray = rotate(cam.mount_orientation, cam_ray);
    return rotate(pose.orientation, body_ray).normalized();
}

/// World position of the camera's optical center.
inline EnuPoint camera_position(const CameraModel& cam, const OwnshipPose& pose) {
    return pose.position.with_vec(pose.position.vec() +
                                  rotate(pose.orientation, cam.mount_translation_m));
}

/// Target ENU position from a bounding-box center and an externally supplied
/// slant range (meters from the camera).
inline EnuPoint target_enu_from_bbox(const BoundingBox& b, const CameraModel& cam,
                                     const OwnshipPose& pose, double range_m) {
    if (!(range_m > 0.0)) throw std::invalid_argument("target_enu_from_bbox: range must be > 0");
    const Vec3 dir = pixel_to_direction(b, cam, pose);
    const EnuPoint cam_pos = camera_position(cam, pose);
    return cam_pos.with_vec(cam_pos.vec() + dir * range_m);
}

/// Forward projection of an ENU point into pixel coordinates.
/// Returns false when the point is behind the image plane.
inline bool project_to_pixel(const Vec3& point_enu, const CameraModel& cam,
                             const OwnshipPose& pose, double* px, double* py,
                             double* range = nullptr) {
    const EnuPoint cam_pos = camera_position(cam, pose);
    const Vec3 rel = point_enu - cam_pos.vec();
    const Vec3 body = rotate(pose.orientation.conjugate(), rel);
    const Vec3 c = rotate(cam.mount_orientation.conjugate(), body);
    if (c.z <= 1e-12) return false;
    const double tx = std::tan(0.5 * deg_to_rad(cam.horizontal_fov_deg));
    const double ty = std::tan(0.5 * deg_to_rad(cam.vertical_fov_deg));
    *px = (c.x / c.z / tx + 1.0) * 0.5 * cam.width_px;
    *py = (c.y / c.z / ty + 1.0) * 0.5 * cam.height_px;
    if (range) *range = rel.norm();
    return true;
}

/// True when an ENU point falls inside the camera frustum and detection range.
inline bool in_frustum(const Vec3& point_enu, const CameraModel& cam, const OwnshipPose& pose) {
    double px = 0.0, py = 0.0, range = 0.0;
    if (!project_to_pixel(point_enu, cam, pose, &px, &py, &range)) return false;
    return px >= 0.0 && px <= cam.width_px && py >= 0.0 && py <= cam.height_px &&
           range <= cam.max_detection_range_m;
}

}  // namespace chaser
