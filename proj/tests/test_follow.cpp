#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "chaser/follow.hpp"

using namespace chaser;

TEST_CASE("pid zero error yields zero output") {
    PidLoop pid({0.4, 0.01, 0.2}, 30.6, -20.0, 20.0);
    CHECK(pid.step(30.6, 0.2) == Catch::Approx(0.0).margin(1e-12));
    CHECK(pid.step(30.6, 0.2) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pid first step matches the formula oracle") {
    // pitch loop gains, e = +5 m, dt = 0.2 s: P = 2.0, I = 0.01*5*0.2 = 0.01,
    // D = 0 by the first-step convention
    PidLoop pid({0.4, 0.01, 0.2}, 30.6, -20.0, 20.0);
    const double out = pid.step(30.6 - 5.0, 0.2);
    CHECK(out == Catch::Approx(0.4 * 5.0 + 0.01 * 5.0 * 0.2).margin(1e-12));
    CHECK(out == Catch::Approx(2.01).margin(1e-12));
}

TEST_CASE("pid clamps output and freezes the integral while saturated") {
    PidLoop pid({1.0, 0.5, 0.0}, 0.0, -1.0, 1.0);
    CHECK(pid.step(-100.0, 0.1) == 1.0);
    const double frozen = pid.integral();
    CHECK(pid.step(-100.0, 0.1) == 1.0);
    CHECK(pid.integral() == frozen);
    // after the error collapses, output leaves the rail
    CHECK(pid.step(0.0, 0.1) < 1.0);
}

TEST_CASE("pid rejects non-positive dt") {
    PidLoop pid({1.0, 0.0, 0.0}, 0.0, -1.0, 1.0);
    CHECK_THROWS_AS(pid.step(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pid.step(0.0, -0.1), std::invalid_argument);
}

TEST_CASE("yaw kd varies linearly with ground range") {
    CHECK(yaw_kd(100.0) == Catch::Approx(0.03));
    CHECK(yaw_kd(0.0) == 0.0);
    CHECK(yaw_kd(30.6) == Catch::Approx(0.00918));
    CHECK_THROWS_AS(yaw_kd(-1.0), std::invalid_argument);
}

TEST_CASE("setpoints are consistent with 40 m / 40 degree chase geometry") {
    const ChaseGeometry g{40.0, 40.0};
    CHECK(g.ground_range_setpoint_m() == Catch::Approx(30.6).margin(0.1));
    CHECK(g.relative_height_setpoint_m() == Catch::Approx(25.7).margin(0.1));
}

namespace {
RelativeTargetState target_state(double az, double range, double height, double t) {
    return {az, range, height, t};
}
}  // namespace

TEST_CASE("follow at setpoint with quiescent history commands nothing") {
    FollowController fc;
    FollowCommand cmd;
    for (int i = 0; i < 10; ++i)
        cmd = fc.step(target_state(0.0, 30.6, 25.7, 0.2 * i), 0.2 * i);
    CHECK(cmd.yaw_rate_dps == Catch::Approx(0.0).margin(1e-12));
    CHECK(cmd.pitch_deg == Catch::Approx(0.0).margin(1e-12));
    CHECK(cmd.climb_rate_mps == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("target beyond the range setpoint pitches forward") {
    FollowController fc;
    // warm the median windows at the setpoint so the step is clean
    double t = 0.0;
    for (int i = 0; i < 5; ++i, t += 0.2) fc.step(target_state(0, 30.6, 25.7, t), t);
    // 10 m beyond: window of 5 takes the median, so push 3 to move it
    FollowCommand cmd;
    for (int i = 0; i < 3; ++i, t += 0.2) cmd = fc.step(target_state(0, 40.6, 25.7, t), t);
    // formula oracle at the step where the filtered range first jumps:
    // e = -10, P = -4, I decrement 0.01*(-10)*0.2, D = (-10-0)/0.2 * 0.2
    CHECK(cmd.pitch_deg > 0.0);
    FollowController fresh;
    const FollowCommand first = fresh.step(target_state(0, 40.6, 25.7, 0.0), 0.0);
    CHECK(first.pitch_deg ==
          Catch::Approx(-(0.4 * -10.0 + 0.01 * (-10.0 * 0.2))).margin(1e-9));
}

TEST_CASE("azimuth offset commands a positive yaw rate with range-scheduled kd") {
    FollowController fc;
    const FollowCommand cmd = fc.step(target_state(10.0, 50.0, 25.7, 0.0), 0.0);
    // first step: e = -10, P = 0.25*(-10), I = 0.002*(-10*0.2), D = 0
    const double expected = -(0.25 * -10.0 + 0.002 * (-10.0 * 0.2));
    CHECK(cmd.yaw_rate_dps == Catch::Approx(expected).margin(1e-9));
    CHECK(cmd.yaw_rate_dps > 0.0);
}

TEST_CASE("sign conventions on a static geometry table") {
    struct Case {
        double az, range, height;
        int yaw_sign, pitch_sign, climb_sign;
    };
    const Case cases[] = {
        {10.0, 30.6, 25.7, +1, 0, 0},   // target right -> yaw right
        {-10.0, 30.6, 25.7, -1, 0, 0},  // target left -> yaw left
        {0.0, 40.6, 25.7, 0, +1, 0},    // beyond setpoint -> pitch toward target
        {0.0, 20.6, 25.7, 0, -1, 0},    // inside setpoint -> back off
        {0.0, 30.6, 35.7, 0, 0, -1},    // flying too high above target -> descend
        {0.0, 30.6, 15.7, 0, 0, +1},    // not high enough above -> climb
    };
    for (const auto& c : cases) {
        FollowController fc;
        const FollowCommand cmd = fc.step(target_state(c.az, c.range, c.height, 0.0), 0.0);
        auto sign = [](double v) { return v > 1e-9 ? 1 : (v < -1e-9 ? -1 : 0); };
        CHECK(sign(cmd.yaw_rate_dps) == c.yaw_sign);
        CHECK(sign(cmd.pitch_deg) == c.pitch_sign);
        CHECK(sign(cmd.climb_rate_mps) == c.climb_sign);
    }
}

TEST_CASE("commands stay inside configured limits for arbitrary inputs") {
    FollowController fc;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> az(-180.0, 180.0);
    std::uniform_real_distribution<double> range(0.0, 500.0);
    std::uniform_real_distribution<double> height(-100.0, 100.0);
    const auto& cfg = fc.config();
    for (int i = 0; i < 2000; ++i) {
        const double t = 0.2 * i;
        const FollowCommand cmd = fc.step(target_state(az(rng), range(rng), height(rng), t), t);
        CHECK(std::abs(cmd.yaw_rate_dps) <= cfg.yaw_rate_limit_dps + 1e-9);
        CHECK(std::abs(cmd.pitch_deg) <= cfg.pitch_limit_deg + 1e-9);
        CHECK(std::abs(cmd.climb_rate_mps) <= cfg.climb_limit_mps + 1e-9);
    }
}

TEST_CASE("a single-sample spike is absorbed by the median pre-filter") {
    auto run = [](bool with_spike) {
        FollowController fc;
        std::vector<double> pitches;
        for (int i = 0; i < 20; ++i) {
            const double t = 0.2 * i;
            double range = 35.0;
            if (with_spike && i == 10) range = 300.0;
            const FollowCommand cmd = fc.step(target_state(0, range, 25.7, t), t);
            pitches.push_back(cmd.pitch_deg);
        }
        return pitches;
    };
    const auto clean = run(false);
    const auto spiked = run(true);
    for (std::size_t i = 0; i < clean.size(); ++i)
        CHECK(spiked[i] == Catch::Approx(clean[i]).margin(1e-9));
}

TEST_CASE("staleness guard hovers after 2 seconds without target updates") {
    FollowController fc;
    fc.step(target_state(5.0, 40.0, 20.0, 0.0), 0.0);
    CHECK(!fc.staleness_guard(0.5));
    CHECK(!fc.staleness_guard(2.0));
    const auto hover = fc.staleness_guard(2.1);
    REQUIRE(hover);
    CHECK(hover->hover);
    CHECK(hover->yaw_rate_dps == 0.0);
    CHECK(hover->pitch_deg == 0.0);
    CHECK(hover->climb_rate_mps == 0.0);
}

TEST_CASE("shutdown always hovers, even mid-maneuver") {
    FollowController fc;
    fc.step(target_state(45.0, 100.0, 5.0, 0.0), 0.0);
    const FollowCommand cmd = fc.shutdown();
    CHECK(cmd.hover);
    CHECK(cmd.yaw_rate_dps == 0.0);
    CHECK(cmd.pitch_deg == 0.0);
    CHECK(cmd.climb_rate_mps == 0.0);
}

TEST_CASE("chase geometry analysis answers the three questions") {
    CameraModel cam;
    cam.horizontal_fov_deg = 90.0;
    cam.vertical_fov_deg = 60.0;
    cam.width_px = 3840;
    cam.height_px = 2160;

    SECTION("pixels on target match the pinhole oracle") {
        const double px = pixels_on_target(0.35, 40.0, cam);
        const double oracle =
            2.0 * std::atan(0.175 / 40.0) / (deg_to_rad(90.0) / 3840.0);
        CHECK(px == Catch::Approx(oracle).margin(1e-9));
        CHECK(px == Catch::Approx(21.39).margin(0.2));
    }
    SECTION("recommended 40 m / 40 deg operating point is acceptable") {
        ChaseAnalysisConfig cfg;
        const auto table = chase_geometry_analysis(cfg, cam);
        bool found = false;
        for (const auto& c : table) {
            if (c.slant_range_m == 40.0 && c.elevation_deg == 40.0) {
                found = true;
                CHECK(c.acceptable);
                CHECK(c.pixels_on_target >= cfg.min_pixels);
                CHECK(c.vertical_reaction_s > 0.0);
                CHECK(c.horizontal_reaction_s > 0.0);
            }
        }
        CHECK(found);
    }
    SECTION("directly overhead never crosses the horizon") {
        CHECK(std::isinf(horizon_crossing_time_s(40.0, 90.0, 5.0)));
        CHECK(horizon_crossing_time_s(40.0, 40.0, 5.0) ==
              Catch::Approx(40.0 * std::sin(deg_to_rad(40.0)) / 5.0));
    }
}
