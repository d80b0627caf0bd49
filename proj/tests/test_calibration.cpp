#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "chaser/calibration.hpp"

using namespace chaser;

namespace {

// Forward model: a flight path in ENU, sampled as GPS and as radar-frame
// measurements generated with a known radar orientation (the inverse of the
// fitted rotation), plus optional noise.
struct SyntheticCalibration {
    std::vector<RadarTrack> tracks;
    GpsTrack gps;
};

Vec3 enu_to_radar_frame(double yaw, double pitch, double roll, const Vec3& enu) {
    // invert radar_to_enu: ENU -> FLU -> radar cartesian
    const Quaternion q = quat_from_yaw_pitch_roll(yaw, pitch, roll);
    const Vec3 flu = rotate(q.conjugate(), enu);
    return {-flu.y, flu.x, flu.z};
}

/// Circles plus vertical passes in front of the radar: a diverse geometry.
SyntheticCalibration make_flight(double yaw, double pitch, double roll, double duration_s,
                                 double rate_hz, double noise_h, double noise_v, unsigned seed,
                                 int64_t track_id = 1) {
    SyntheticCalibration out;
    RadarTrack track;
    track.track_id = track_id;
    std::mt19937 rng(seed);
    std::normal_distribution<double> nh(0.0, noise_h);
    std::normal_distribution<double> nv(0.0, noise_v);
    const double dt = 1.0 / rate_hz;
    for (double t = 0.0; t <= duration_s + 1e-9; t += dt) {
        const double phase = 2.0 * kPi * t / 60.0;
        // circle 150 m north of the radar plus a slow vertical sweep
        const Vec3 truth{60.0 * std::sin(phase), 150.0 + 40.0 * std::cos(phase),
                         40.0 + 30.0 * std::sin(2.0 * kPi * t / 90.0)};
        const Vec3 gps_meas = noise_h > 0.0 || noise_v > 0.0
                                  ? truth + Vec3{nh(rng), nh(rng), nv(rng)}
                                  : truth;
        out.gps.append(t, gps_meas);
        track.append(t, enu_to_radar_frame(yaw, pitch, roll, truth));
    }
    out.tracks.push_back(std::move(track));
    return out;
}

}  // namespace

TEST_CASE("select_longest_track") {
    auto make = [](int64_t id, double t0, double t1) {
        RadarTrack t;
        t.track_id = id;
        t.append(t0, {0, 0, 0});
        t.append(t1, {1, 0, 0});
        return t;
    };
    SECTION("longest lifetime wins") {
        const std::vector<RadarTrack> tracks{make(1, 0, 12), make(2, 0, 64), make(3, 0, 3)};
        CHECK(select_longest_track(tracks).track_id == 2);
    }
    SECTION("single track returns itself") {
        const std::vector<RadarTrack> tracks{make(9, 0, 5)};
        CHECK(select_longest_track(tracks).track_id == 9);
    }
    SECTION("22 tracks with lifetimes up to 29.9% of a 216 s flight") {
        std::vector<RadarTrack> tracks;
        for (int i = 0; i < 22; ++i) {
            const double frac = 0.005 + (0.299 - 0.005) * i / 21.0;
            tracks.push_back(make(100 + i, 0.0, frac * 216.0));
        }
        CHECK(select_longest_track(tracks).track_id == 121);  // the 29.9% track
    }
    SECTION("empty list throws") {
        CHECK_THROWS_AS(select_longest_track({}), std::invalid_argument);
    }
}

TEST_CASE("window_pairs") {
    SECTION("constant positions produce constant pairs") {
        RadarTrack r;
        r.track_id = 1;
        GpsTrack g;
        for (double t = 0.0; t < 5.0; t += 0.1) {
            r.append(t, {1, 2, 3});
            g.append(t + 0.01, {4, 5, 6});
        }
        const auto pairs = window_pairs(r, g, 0.5);
        CHECK(pairs.size() == 10);
        for (const auto& p : pairs) {
            CHECK((p.radar_mean - Vec3{1, 2, 3}).norm() < 1e-12);
            CHECK((p.gps_mean - Vec3{4, 5, 6}).norm() < 1e-12);
        }
    }
    SECTION("windows missing one source are dropped") {
        RadarTrack r;
        r.track_id = 1;
        GpsTrack g;
        for (double t = 0.0; t < 4.0; t += 0.1) r.append(t, {1, 0, 0});
        for (double t = 0.0; t < 2.0; t += 0.1) g.append(t + 0.001, {2, 0, 0});
        CHECK(window_pairs(r, g, 0.5).size() == 4);
    }
    SECTION("a 3.6 minute flight at 10 Hz yields about 432 windows") {
        const auto flight = make_flight(0, 0, 0, 216.0, 10.0, 0.0, 0.0, 1);
        const auto pairs = window_pairs(flight.tracks[0], flight.gps, 0.5);
        CHECK(pairs.size() >= 432);
        CHECK(pairs.size() <= 434);
    }
    SECTION("disjoint traces throw") {
        RadarTrack r;
        r.track_id = 1;
        r.append(0.0, {1, 0, 0});
        GpsTrack g;
        g.append(100.0, {1, 0, 0});
        CHECK_THROWS_AS(window_pairs(r, g, 0.5), std::invalid_argument);
    }
}

TEST_CASE("fit_orientation recovers a synthetic pose") {
    SECTION("yaw 10 degrees, zero noise") {
        const auto flight = make_flight(10.0, 0.0, 0.0, 120.0, 10.0, 0.0, 0.0, 2);
        const auto pairs = window_pairs(flight.tracks[0], flight.gps);
        RadarPose initial;
        initial.yaw_deg = 0.0;  // deliberately wrong
        const CalibrationResult r = fit_orientation(pairs, initial);
        CHECK(r.converged);
        CHECK(r.yaw_deg == Catch::Approx(10.0).margin(0.05));
        CHECK(std::abs(r.pitch_deg) < 0.05);
        CHECK(std::abs(r.roll_deg) < 0.05);
        CHECK(r.total_residual() < 1e-5);
        CHECK(!r.low_confidence);
    }
    SECTION("identity truth with identity initial guess") {
        const auto flight = make_flight(0.0, 0.0, 0.0, 60.0, 10.0, 0.0, 0.0, 3);
        const auto pairs = window_pairs(flight.tracks[0], flight.gps);
        const CalibrationResult r = fit_orientation(pairs, RadarPose{});
        CHECK(std::abs(wrap_deg(r.yaw_deg)) < 1e-3);
        CHECK(std::abs(r.pitch_deg) < 1e-3);
        CHECK(std::abs(r.roll_deg) < 1e-3);
    }
    SECTION("field-like noise produces same-order residuals") {
        // sigma = 1 m horizontal / 2 m vertical, like the field envelope
        const auto flight = make_flight(10.0, 2.0, 1.0, 216.0, 10.0, 1.0, 2.0, 4);
        const auto pairs = window_pairs(flight.tracks[0], flight.gps);
        RadarPose initial;
        initial.yaw_deg = 8.0;
        const CalibrationResult r = fit_orientation(pairs, initial);
        CHECK(r.residual_sd_enu.x < 2.5);
        CHECK(r.residual_sd_enu.y < 2.5);
        CHECK(r.residual_sd_enu.z < 2.5);
        CHECK(r.yaw_deg == Catch::Approx(10.0).margin(0.5));
    }
    SECTION("noise-free recovery accuracy over random poses") {
        std::mt19937 rng(6);
        std::uniform_real_distribution<double> ud(-5.0, 5.0);
        for (int i = 0; i < 5; ++i) {
            const double yaw = 180.0 + ud(rng) * 10.0;
            const double pitch = ud(rng);
            const double roll = ud(rng);
            const auto flight = make_flight(yaw, pitch, roll, 90.0, 10.0, 0.0, 0.0, 10 + i);
            const auto pairs = window_pairs(flight.tracks[0], flight.gps);
            RadarPose initial;
            initial.yaw_deg = yaw - 5.0;
            const CalibrationResult r = fit_orientation(pairs, initial);
            CHECK(std::abs(wrap_deg(r.yaw_deg - yaw)) < 0.1);
            CHECK(std::abs(r.pitch_deg - pitch) < 0.1);
            CHECK(std::abs(r.roll_deg - roll) < 0.1);
        }
    }
    SECTION("collinear geometry is flagged low-confidence") {
        RadarTrack r;
        r.track_id = 1;
        GpsTrack g;
        for (double t = 0.0; t < 10.0; t += 0.1) {
            // all points along one ray from the radar
            const Vec3 p{0.0, 100.0 + 5.0 * t, 0.0};
            g.append(t, p);
            r.append(t + 1e-3, enu_to_radar_frame(0, 0, 0, p));
        }
        const CalibrationResult res = fit_orientation(window_pairs(r, g), RadarPose{});
        CHECK(res.low_confidence);
    }
    SECTION("fewer than 3 windows throws") {
        CHECK_THROWS_AS(fit_orientation({WindowPair{}, WindowPair{}}, RadarPose{}),
                        std::invalid_argument);
    }
}

TEST_CASE("residual is invariant to a rigid time shift of both traces") {
    // resample away from window edges so binning is immune to rounding
    const auto flight = make_flight(10.0, 2.0, 1.0, 60.0, 10.0, 0.5, 1.0, 8);
    RadarTrack base_track, shifted_track;
    base_track.track_id = shifted_track.track_id = flight.tracks[0].track_id;
    GpsTrack base_gps, shifted_gps;
    for (const auto& s : flight.tracks[0].samples) {
        base_track.append(s.timestamp_s + 0.03, s.position_enu);
        shifted_track.append(s.timestamp_s + 1000.03, s.position_enu);
    }
    for (const auto& s : flight.gps.samples) {
        base_gps.append(s.timestamp_s + 0.03, s.position_enu);
        shifted_gps.append(s.timestamp_s + 1000.03, s.position_enu);
    }
    RadarPose initial;
    initial.yaw_deg = 9.0;
    const auto r1 = fit_orientation(window_pairs(base_track, base_gps), initial);
    const auto r2 = fit_orientation(window_pairs(shifted_track, shifted_gps), initial);
    CHECK(r1.total_residual() == Catch::Approx(r2.total_residual()).margin(1e-9));
}

TEST_CASE("select_best_residual_track") {
    SECTION("clean track beats clutter") {
        auto flight = make_flight(10.0, 0.0, 0.0, 120.0, 10.0, 0.0, 0.0, 9, 50);
        // clutter: a track that does not follow the GPS at all
        RadarTrack clutter;
        clutter.track_id = 51;
        std::mt19937 rng(12);
        std::uniform_real_distribution<double> u(-200.0, 200.0);
        for (double t = 0.0; t < 120.0; t += 0.1)
            clutter.append(t, {u(rng), 100.0 + u(rng), 50.0});
        flight.tracks.push_back(clutter);
        RadarPose initial;
        initial.yaw_deg = 8.0;
        const CalibrationResult best =
            select_best_residual_track(flight.tracks, flight.gps, initial);
        CHECK(best.selected_track_id == 50);
    }
    SECTION("never worse than the longest-track selection") {
        auto flight = make_flight(10.0, 2.0, 1.0, 120.0, 10.0, 1.0, 2.0, 10, 7);
        auto short_flight = make_flight(10.0, 2.0, 1.0, 30.0, 10.0, 3.0, 5.0, 11, 3);
        flight.tracks.push_back(short_flight.tracks[0]);
        RadarPose initial;
        initial.yaw_deg = 9.0;
        const RadarTrack& longest = select_longest_track(flight.tracks);
        CalibrationResult by_longest =
            fit_orientation(window_pairs(longest, flight.gps), initial);
        const CalibrationResult best =
            select_best_residual_track(flight.tracks, flight.gps, initial);
        CHECK(best.total_residual() <= by_longest.total_residual() + 1e-12);
    }
    SECTION("single track equals fit_orientation") {
        const auto flight = make_flight(10.0, 0.0, 0.0, 60.0, 10.0, 0.5, 1.0, 13);
        RadarPose initial;
        initial.yaw_deg = 9.0;
        const auto direct = fit_orientation(window_pairs(flight.tracks[0], flight.gps), initial);
        const auto best = select_best_residual_track(flight.tracks, flight.gps, initial);
        CHECK(best.total_residual() == Catch::Approx(direct.total_residual()).margin(1e-12));
        CHECK(best.yaw_deg == Catch::Approx(direct.yaw_deg).margin(1e-9));
    }
}

TEST_CASE("fit_six_parameter") {
    SECTION("well-conditioned data recovers pose and offset") {
        auto flight = make_flight(10.0, 2.0, 1.0, 216.0, 10.0, 0.0, 0.0, 14);
        // shift the GPS frame: radar actually sits 10 m east, 4 m up of the guess
        GpsTrack shifted;
        const Vec3 offset{10.0, 0.0, 4.0};
        for (const auto& s : flight.gps.samples) shifted.append(s.timestamp_s, s.position_enu + offset);
        RadarPose initial;
        initial.yaw_deg = 10.0;  // truth-initialized orientation
        const CalibrationResult r =
            fit_six_parameter(window_pairs(flight.tracks[0], shifted), initial);
        CHECK(r.experimental);
        CHECK(std::abs(wrap_deg(r.yaw_deg - 10.0)) < 1.0);
        CHECK(std::abs(r.pitch_deg - 2.0) < 1.0);
        CHECK((r.position_offset_enu - offset).norm() < 5.0);
    }
    SECTION("zero-offset truth with truth initialization converges to truth") {
        const auto flight = make_flight(5.0, 1.0, 0.0, 120.0, 10.0, 0.0, 0.0, 15);
        RadarPose initial;
        initial.yaw_deg = 5.0;
        initial.pitch_deg = 1.0;
        const CalibrationResult r =
            fit_six_parameter(window_pairs(flight.tracks[0], flight.gps), initial);
        CHECK(std::abs(wrap_deg(r.yaw_deg - 5.0)) < 0.1);
        CHECK(r.position_offset_enu.norm() < 1.0);
        CHECK(r.total_residual() < 1e-3);
    }
    SECTION("short low-diversity track fits poorly and is only flagged") {
        RadarTrack r;
        r.track_id = 1;
        GpsTrack g;
        std::mt19937 rng(16);
        std::normal_distribution<double> n(0.0, 2.0);
        for (double t = 0.0; t < 4.0; t += 0.1) {
            const Vec3 p{0.0, 120.0 + t, 0.0};
            g.append(t, p + Vec3{n(rng), n(rng), n(rng)});
            r.append(t + 1e-3, enu_to_radar_frame(0, 0, 0, p));
        }
        CalibrationResult res;
        CHECK_NOTHROW(res = fit_six_parameter(window_pairs(r, g), RadarPose{}));
        CHECK(res.low_confidence);
    }
}
