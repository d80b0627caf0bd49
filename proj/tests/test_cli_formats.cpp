#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "chaser/sim/metrics.hpp"
#include "chaser/sim/scenario.hpp"
#include "chaser/sim/telemetry.hpp"

using namespace chaser;
using namespace chaser::sim;

namespace {

std::vector<TelemetryRow> sample_rows() {
    std::vector<TelemetryRow> rows;
    for (int i = 0; i < 50; ++i) {
        TelemetryRow r;
        r.t = 0.2 * (i + 1);
        r.mission_state = i < 10 ? "Search" : "VisionFollow";
        r.chase = {1.5 * i, -2.0, 25.0};
        r.chase_yaw_deg = 10.0 * i;
        r.target = {1.5 * i + 20.0, 28.0, 0.5};
        r.cmd_yaw_rate_dps = 0.25 * i;
        r.cmd_pitch_deg = -1.0;
        r.cmd_climb_mps = 0.5;
        r.rel_azimuth_deg = 3.0;
        r.rel_elevation_deg = -40.0;
        r.rel_range_m = 40.0;
        r.target_in_fov = i % 3 == 0 ? 0 : 1;
        r.detected = i % 4 == 0 ? 0 : 1;
        if (r.detected) {
            r.det_px = 1920.0 + i;
            r.det_py = 1080.0;
            r.det_cd_px = 21.0;
        }
        r.n_radar_tracks = i % 2;
        if (i % 2) {
            r.associated_id = 940;
            r.assoc_correct = 1;
        }
        if (i < 10) {
            r.belief_gain = 0.001 * i;
            r.waypoint = GridIndex{3, 4, 5};
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_CASE("telemetry round trip preserves every field") {
    const auto rows = sample_rows();
    std::stringstream ss;
    write_telemetry_csv(ss, rows);
    const auto back = read_telemetry_csv(ss);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].t == Catch::Approx(rows[i].t).margin(1e-6));
        CHECK(back[i].mission_state == rows[i].mission_state);
        CHECK((back[i].chase - rows[i].chase).norm() < 1e-6);
        CHECK((back[i].target - rows[i].target).norm() < 1e-6);
        CHECK(back[i].target_in_fov == rows[i].target_in_fov);
        CHECK(back[i].detected == rows[i].detected);
        CHECK(back[i].det_px.has_value() == rows[i].det_px.has_value());
        CHECK(back[i].associated_id == rows[i].associated_id);
        CHECK(back[i].assoc_correct == rows[i].assoc_correct);
        CHECK(back[i].belief_gain.has_value() == rows[i].belief_gain.has_value());
        CHECK(back[i].waypoint.has_value() == rows[i].waypoint.has_value());
        if (rows[i].waypoint) CHECK(*back[i].waypoint == *rows[i].waypoint);
    }
}

TEST_CASE("metrics from a re-read log equal metrics computed in-process") {
    const auto rows = sample_rows();
    const MetricsReport direct = compute_metrics(rows);
    std::stringstream ss;
    write_telemetry_csv(ss, rows);
    const MetricsReport reread = compute_metrics(read_telemetry_csv(ss));
    REQUIRE(direct.fov_containment_fraction);
    CHECK(*reread.fov_containment_fraction ==
          Catch::Approx(*direct.fov_containment_fraction).margin(1e-12));
    CHECK(*reread.detection_fraction == Catch::Approx(*direct.detection_fraction).margin(1e-12));
    CHECK(*reread.association_fraction ==
          Catch::Approx(*direct.association_fraction).margin(1e-12));
    CHECK(*reread.cumulative_belief_gain ==
          Catch::Approx(*direct.cumulative_belief_gain).margin(1e-9));
    CHECK(reread.time_to_acquire_s.has_value());
}

TEST_CASE("telemetry reader rejects schema mismatches") {
    SECTION("wrong version header") {
        std::stringstream ss("# chaser-telemetry v0\n");
        CHECK_THROWS_AS(read_telemetry_csv(ss), std::runtime_error);
    }
    SECTION("wrong columns") {
        std::stringstream ss;
        ss << "# " << kTelemetryVersion << "\nt,x,y\n";
        CHECK_THROWS_AS(read_telemetry_csv(ss), std::runtime_error);
    }
}

TEST_CASE("metrics on an empty or non-autonomous log report absence, not zero") {
    MetricsReport m = compute_metrics({});
    CHECK(!m.fov_containment_fraction);
    CHECK(!m.time_to_acquire_s);

    TelemetryRow r;
    r.t = 1.0;
    r.mission_state = "OnGround";
    m = compute_metrics({r});
    CHECK(!m.fov_containment_fraction);
    CHECK(!m.detection_fraction);
    CHECK(!m.cumulative_belief_gain);
    CHECK(!m.time_to_acquire_s);
}

TEST_CASE("association metrics count 1 second windows") {
    // 1000 windows, an associated ID in 917 of them
    std::vector<TelemetryRow> rows;
    for (int w = 0; w < 1000; ++w) {
        TelemetryRow r;
        r.t = w + 0.5;
        r.mission_state = "VisionFollow";
        if (w < 917) {
            r.associated_id = 7;
            r.assoc_correct = 1;
        }
        rows.push_back(r);
    }
    const MetricsReport m = compute_metrics(rows);
    REQUIRE(m.association_fraction);
    CHECK(*m.association_fraction == Catch::Approx(0.917).margin(1e-12));
    CHECK(m.association_wrong_windows == 0);
}

namespace {

const char* kValidScenario = R"json({
  "name": "unit",
  "duration_s": 10.0,
  "seed": 3,
  "camera": {"horizontal_fov_deg": 90, "vertical_fov_deg": 60,
             "width_px": 3840, "height_px": 2160, "max_detection_range_m": 100},
  "target": {"script": [{"shape": "hold", "waypoints": [[0, 30, 0]]}]}
})json";

}  // namespace

TEST_CASE("scenario parsing accepts a minimal valid config") {
    const Scenario s = parse_scenario_text(kValidScenario);
    CHECK(s.name == "unit");
    CHECK(s.duration_s == 10.0);
    CHECK(s.seed == 3);
    CHECK(s.target_script.size() == 1);
    CHECK(s.camera.width_px == 3840);
    CHECK(s.search.nx == 41);  // defaults fill in
}

TEST_CASE("scenario parsing enumerates every bad field at once") {
    const char* bad = R"json({
      "duration_s": -5,
      "camera": {"horizontal_fov_deg": 250, "vertical_fov_deg": 60,
                 "width_px": 3840, "height_px": 2160},
      "target": {"script": [{"shape": "warp-drive"}]},
      "radar": {"drop_prob_per_s": 3.0},
      "events": [{"time_s": 1.0, "type": "meteor"}]
    })json";
    try {
        parse_scenario_text(bad);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        auto mentions = [&](const std::string& needle) {
            for (const auto& err : e.errors())
                if (err.find(needle) != std::string::npos) return true;
            return false;
        };
        CHECK(mentions("name"));
        CHECK(mentions("duration_s"));
        CHECK(mentions("horizontal_fov_deg"));
        CHECK(mentions("warp-drive"));
        CHECK(mentions("drop_prob_per_s"));
        CHECK(mentions("meteor"));
        CHECK(e.errors().size() >= 6);
    }
}

TEST_CASE("scenario parsing rejects missing camera and non-JSON input") {
    CHECK_THROWS_AS(parse_scenario_text("{\"name\": \"x\", \"duration_s\": 1}"), ScenarioError);
    CHECK_THROWS_AS(parse_scenario_text("not json at all"), ScenarioError);
    try {
        parse_scenario_text("{\"name\": \"x\", \"duration_s\": 1}");
    } catch (const ScenarioError& e) {
        bool camera_named = false;
        for (const auto& err : e.errors())
            camera_named = camera_named || err.find("camera") != std::string::npos;
        CHECK(camera_named);
    }
}
