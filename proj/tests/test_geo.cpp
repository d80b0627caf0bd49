#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "chaser/geo.hpp"

using namespace chaser;

namespace {

// Independent WGS84 curvature oracle for the tangent-plane checks.
double oracle_meridian_radius_m(double lat_deg) {
    const double a = 6378137.0;
    const double f = 1.0 / 298.257223563;
    const double e2 = f * (2.0 - f);
    const double s = std::sin(lat_deg * kPi / 180.0);
    return a * (1.0 - e2) / std::pow(1.0 - e2 * s * s, 1.5);
}

// Independent pinhole oracle: off-boresight angle for a horizontal pixel.
double oracle_pinhole_azimuth_deg(double px, double width, double hfov_deg) {
    const double half = std::tan(0.5 * hfov_deg * kPi / 180.0);
    return std::atan(half * (2.0 * px / width - 1.0)) * 180.0 / kPi;
}

}  // namespace

TEST_CASE("geodetic_to_enu identity and altitude") {
    const GeodeticPoint origin{42.0, -71.0, 100.0};
    const EnuPoint at_origin = geodetic_to_enu(origin, origin);
    CHECK(at_origin.east_m == Catch::Approx(0.0).margin(1e-12));
    CHECK(at_origin.north_m == Catch::Approx(0.0).margin(1e-12));
    CHECK(at_origin.up_m == Catch::Approx(0.0).margin(1e-12));

    GeodeticPoint up10 = origin;
    up10.altitude_m += 10.0;
    const EnuPoint e = geodetic_to_enu(up10, origin);
    CHECK(e.east_m == Catch::Approx(0.0).margin(1e-12));
    CHECK(e.north_m == Catch::Approx(0.0).margin(1e-12));
    CHECK(e.up_m == Catch::Approx(10.0));
}

TEST_CASE("geodetic_to_enu matches meridian-radius oracle at the equator") {
    const GeodeticPoint origin{0.0, 10.0, 0.0};
    const GeodeticPoint north{1e-4, 10.0, 0.0};
    const EnuPoint e = geodetic_to_enu(north, origin);
    const double expected_north = oracle_meridian_radius_m(0.0) * 1e-4 * kPi / 180.0;
    CHECK(expected_north == Catch::Approx(11.06).margin(0.05));
    CHECK(e.north_m == Catch::Approx(expected_north).margin(0.1));
    CHECK(e.east_m == Catch::Approx(0.0).margin(1e-9));
    CHECK(e.up_m == Catch::Approx(0.0).margin(1e-12));

    // inverse direction
    const GeodeticPoint back = enu_to_geodetic(EnuPoint{0.0, expected_north, 0.0, origin});
    CHECK(back.latitude_deg == Catch::Approx(1e-4).margin(1e-9));
}

TEST_CASE("geodetic/ENU round trip under 5 km") {
    const GeodeticPoint origin{42.46, -71.29, 40.0};
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> off(-4500.0, 4500.0);
    for (int i = 0; i < 50; ++i) {
        const EnuPoint p{off(rng), off(rng), off(rng) / 20.0, origin};
        const EnuPoint rt = geodetic_to_enu(enu_to_geodetic(p), origin);
        CHECK(rt.east_m == Catch::Approx(p.east_m).margin(1e-6));
        CHECK(rt.north_m == Catch::Approx(p.north_m).margin(1e-6));
        CHECK(rt.up_m == Catch::Approx(p.up_m).margin(1e-6));
    }
}

TEST_CASE("geodetic transforms reject poles") {
    const GeodeticPoint pole{90.0, 0.0, 0.0};
    const GeodeticPoint origin{45.0, 0.0, 0.0};
    CHECK_THROWS_AS(geodetic_to_enu(pole, origin), std::invalid_argument);
    CHECK_THROWS_AS(geodetic_to_enu(origin, pole), std::invalid_argument);
}

TEST_CASE("EnuPoint origin mixing is rejected") {
    const GeodeticPoint a{42.0, -71.0, 0.0};
    const GeodeticPoint b{42.1, -71.0, 0.0};
    const EnuPoint pa{1.0, 2.0, 3.0, a};
    const EnuPoint pb{1.0, 2.0, 3.0, b};
    CHECK_THROWS_AS(pa - pb, std::invalid_argument);
    CHECK_NOTHROW(pa - pa);
}

TEST_CASE("quaternion rotate basics") {
    const Vec3 v{1.0, 2.0, 3.0};
    CHECK(rotate(Quaternion::identity(), v) == v);

    // 90 degree yaw about up: east -> north
    const Quaternion q = Quaternion::from_axis_angle({0, 0, 1}, kPi / 2.0);
    const Vec3 r = rotate(q, {1, 0, 0});
    CHECK(r.x == Catch::Approx(0.0).margin(1e-9));
    CHECK(r.y == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.z == Catch::Approx(0.0).margin(1e-9));

    CHECK_THROWS_AS(rotate(Quaternion{0.5, 0.5, 0.0, 0.0}, v), std::invalid_argument);
}

TEST_CASE("rotation composition is a homomorphism and preserves norm") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Quaternion q1 =
            Quaternion::from_axis_angle({u(rng), u(rng), u(rng) + 1.5}, u(rng) * 3.0);
        const Quaternion q2 =
            Quaternion::from_axis_angle({u(rng) + 1.5, u(rng), u(rng)}, u(rng) * 3.0);
        const Vec3 v{u(rng) * 10, u(rng) * 10, u(rng) * 10};
        const Vec3 a = rotate((q2 * q1).normalized(), v);
        const Vec3 b = rotate(q2, rotate(q1, v));
        CHECK((a - b).norm() < 1e-9);
        CHECK(rotate(q1, v).norm() == Catch::Approx(v.norm()).margin(1e-9));
    }
}

TEST_CASE("yaw convention: compass heading") {
    // yaw 0 faces north, yaw 90 faces east
    const Vec3 fwd_n = rotate(quat_from_yaw_pitch_roll(0, 0, 0), {1, 0, 0});
    CHECK(fwd_n.y == Catch::Approx(1.0).margin(1e-9));
    const Vec3 fwd_e = rotate(quat_from_yaw_pitch_roll(90, 0, 0), {1, 0, 0});
    CHECK(fwd_e.x == Catch::Approx(1.0).margin(1e-9));
    // pitch up raises the nose
    const Vec3 fwd_up = rotate(quat_from_yaw_pitch_roll(0, 30, 0), {1, 0, 0});
    CHECK(fwd_up.z == Catch::Approx(std::sin(deg_to_rad(30.0))).margin(1e-9));
}

namespace {

CameraModel test_camera(double tilt_down_deg = 0.0) {
    CameraModel cam;
    cam.horizontal_fov_deg = 90.0;
    cam.vertical_fov_deg = 60.0;
    cam.width_px = 3840;
    cam.height_px = 2160;
    cam.mount_orientation = CameraModel::mount_for_tilt_down(tilt_down_deg);
    cam.max_detection_range_m = 100.0;
    return cam;
}

OwnshipPose pose_at(const Vec3& p, double yaw_deg, double pitch_deg = 0.0) {
    OwnshipPose pose;
    pose.position = EnuPoint{p.x, p.y, p.z, {}};
    pose.orientation = quat_from_yaw_pitch_roll(yaw_deg, pitch_deg, 0.0);
    return pose;
}

}  // namespace

TEST_CASE("pixel_to_direction center pixel is the boresight") {
    const CameraModel cam = test_camera();
    const OwnshipPose pose = pose_at({0, 0, 0}, 0.0);  // facing north, level camera
    BoundingBox b;
    b.center_x_px = cam.width_px / 2.0;
    b.center_y_px = cam.height_px / 2.0;
    const Vec3 d = pixel_to_direction(b, cam, pose);
    CHECK(d.x == Catch::Approx(0.0).margin(1e-9));
    CHECK(d.y == Catch::Approx(1.0).margin(1e-9));
    CHECK(d.z == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("pixel_to_direction rightmost column matches pinhole oracle") {
    const CameraModel cam = test_camera();
    const OwnshipPose pose = pose_at({0, 0, 0}, 0.0);
    BoundingBox b;
    b.center_x_px = cam.width_px;  // rightmost edge
    b.center_y_px = cam.height_px / 2.0;
    const Vec3 d = pixel_to_direction(b, cam, pose);
    const double az = rad_to_deg(std::atan2(d.x, d.y));
    const double oracle = oracle_pinhole_azimuth_deg(cam.width_px, cam.width_px, 90.0);
    CHECK(oracle == Catch::Approx(45.0).margin(1e-9));
    CHECK(az == Catch::Approx(oracle).margin(1e-6));

    // equivariance: a 90-degree yawed pose rotates the azimuth by 90
    const Vec3 d2 = pixel_to_direction(b, cam, pose_at({0, 0, 0}, 90.0));
    const double az2 = rad_to_deg(std::atan2(d2.x, d2.y));
    CHECK(az2 == Catch::Approx(az + 90.0).margin(1e-6));
}

TEST_CASE("pixel_to_direction rejects out-of-image pixels") {
    const CameraModel cam = test_camera();
    BoundingBox b;
    b.center_x_px = -1.0;
    b.center_y_px = 10.0;
    CHECK_THROWS_AS(pixel_to_direction(b, cam, pose_at({0, 0, 0}, 0.0)), std::invalid_argument);
}

TEST_CASE("target_enu_from_bbox center pixel, level boresight north") {
    const CameraModel cam = test_camera();
    const OwnshipPose pose = pose_at({0, 0, 50}, 0.0);
    BoundingBox b;
    b.center_x_px = cam.width_px / 2.0;
    b.center_y_px = cam.height_px / 2.0;
    const EnuPoint t = target_enu_from_bbox(b, cam, pose, 40.0);
    CHECK(t.east_m == Catch::Approx(0.0).margin(1e-9));
    CHECK(t.north_m == Catch::Approx(40.0).margin(1e-9));
    CHECK(t.up_m == Catch::Approx(50.0).margin(1e-9));

    CHECK_THROWS_AS(target_enu_from_bbox(b, cam, pose, 0.0), std::invalid_argument);
}

TEST_CASE("camera tilted down 40 degrees reproduces the setpoint geometry") {
    const CameraModel cam = test_camera(40.0);
    const OwnshipPose pose = pose_at({0, 0, 0}, 0.0);
    BoundingBox b;
    b.center_x_px = cam.width_px / 2.0;
    b.center_y_px = cam.height_px / 2.0;
    const EnuPoint t = target_enu_from_bbox(b, cam, pose, 40.0);
    // spherical-to-cartesian oracle: 40 cos 40 ahead, 40 sin 40 below
    CHECK(t.north_m == Catch::Approx(40.0 * std::cos(deg_to_rad(40.0))).margin(1e-9));
    CHECK(t.up_m == Catch::Approx(-40.0 * std::sin(deg_to_rad(40.0))).margin(1e-9));
    CHECK(t.north_m == Catch::Approx(30.6).margin(0.1));
    CHECK(-t.up_m == Catch::Approx(25.7).margin(0.1));
}

TEST_CASE("projection round trip within half a pixel for random in-FOV targets") {
    const CameraModel cam = test_camera(25.0);
    const OwnshipPose pose = pose_at({10, -20, 60}, 135.0, -3.0);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ux(0.02, 0.98);
    std::uniform_real_distribution<double> ur(5.0, 95.0);
    for (int i = 0; i < 100; ++i) {
        BoundingBox b;
        b.center_x_px = ux(rng) * cam.width_px;
        b.center_y_px = ux(rng) * cam.height_px;
        const double range = ur(rng);
        const EnuPoint t = target_enu_from_bbox(b, cam, pose, range);
        double px = 0, py = 0;
        REQUIRE(project_to_pixel(t.vec(), cam, pose, &px, &py));
        CHECK(std::abs(px - b.center_x_px) < 0.5);
        CHECK(std::abs(py - b.center_y_px) < 0.5);
    }
}
