// Scenario configuration: a JSON document describing one simulated run
// (timing, vehicles, sensors, search parameters, scripted events). Parsing
// collects every problem it finds and reports them together, so a bad config
// fails with the full list of offending fields.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaser/follow.hpp"
#include "chaser/geo.hpp"
#include "chaser/search.hpp"
#include "chaser/sim/detector.hpp"
#include "chaser/sim/plant.hpp"
#include "chaser/sim/radar.hpp"
#include "chaser/sim/target.hpp"

namespace chaser::sim {

/// Config rejection; `errors` names every bad or missing field.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> errors)
        : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
    const std::vector<std::string>& errors() const { return errors_; }

private:
    static std::string join(const std::vector<std::string>& errs) {
        std::string s = "scenario config invalid:";
        for (const auto& e : errs) s += "\n  - " + e;
        return s;
    }
    std::vector<std::string> errors_;
};

struct ScenarioEvent {
    double time_s = 0.0;
    std::string type;  // radar_off | radar_on | detector_off | detector_on
};

struct SearchConfig {
    Vec3 grid_origin;
    double spacing_m = 20.0;
    int nx = 41, ny = 41, nz = 11;
    TargetDynamics dynamics;
    RhcConfig rhc;
    double sigma_range_m = 30.0;
    double sigma_az_deg = 10.0;
    double sigma_el_deg = 10.0;
    double confidence_full_range_m = 60.0;
    std::string planner = "rhc";  // rhc | max-belief
};

struct MissionConfig {
    double takeoff_altitude_m = 20.0;
    int vision_debounce_count = 3;
    double vision_lost_s = 2.0;
    double cue_staleness_s = 2.0;
};

struct Scenario {
    std::string name;
    uint64_t seed = 0;
    double duration_s = 0.0;
    double physics_dt_s = 0.05;
    double controller_dt_s = 0.2;
    double radar_dt_s = 0.1;
    GeodeticPoint origin{35.0, -106.0, 1600.0};

    CameraModel camera;
    double camera_tilt_down_deg = 40.0;

    PlantConfig plant;
    Vec3 chase_start;
    double chase_start_yaw_deg = 0.0;
    std::string initial_state = "OnGround";

    FollowConfig follow;
    std::vector<TargetSegment> target_script;
    std::optional<RadarConfig> radar;
    DetectorConfig detector;
    SearchConfig search;
    MissionConfig mission;
    std::vector<ScenarioEvent> events;
    double belief_snapshot_every_s = 0.0;  // 0 = no snapshots
    double gps_noise_sd_m = 0.0;
};

namespace detail {

class ConfigReader {
public:
    explicit ConfigReader(std::vector<std::string>& errors) : errors_(errors) {}

    double num(const nlohmann::json& j, const std::string& path, const char* key,
               double fallback, bool required = false) {
        if (!j.contains(key)) {
            if (required) errors_.push_back(path + key + ": missing required field");
            return fallback;
        }
        if (!j[key].is_number()) {
            errors_.push_back(path + key + ": expected a number");
            return fallback;
        }
        return j[key].get<double>();
    }

    std::string str(const nlohmann::json& j, const std::string& path, const char* key,
                    const std::string& fallback, bool required = false) {
        if (!j.contains(key)) {
            if (required) errors_.push_back(path + key + ": missing required field");
            return fallback;
        }
        if (!j[key].is_string()) {
            errors_.push_back(path + key + ": expected a string");
            return fallback;
        }
        return j[key].get<std::string>();
    }

    Vec3 vec(const nlohmann::json& j, const std::string& path, const char* key,
             const Vec3& fallback, bool required = false) {
        if (!j.contains(key)) {
            if (required) errors_.push_back(path + key + ": missing required field");
            return fallback;
        }
        const auto& v = j[key];
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
            !v[2].is_number()) {
            errors_.push_back(path + key + ": expected [east, north, up] numbers");
            return fallback;
        }
        return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }

    void check(bool ok, const std::string& message) {
        if (!ok) errors_.push_back(message);
    }

private:
    std::vector<std::string>& errors_;
};

inline TargetSegment parse_segment(ConfigReader& r, const nlohmann::json& j,
                                   const std::string& path) {
    TargetSegment s;
    const std::string shape = r.str(j, path, "shape", "", true);
    if (shape == "hold")
        s.shape = TargetShape::Hold;
    else if (shape == "waypoint-line")
        s.shape = TargetShape::WaypointLine;
    else if (shape == "rectangle-with-pauses")
        s.shape = TargetShape::RectangleWithPauses;
    else if (shape == "circle")
        s.shape = TargetShape::Circle;
    else if (!shape.empty())
        r.check(false, path + "shape: unknown shape '" + shape + "'");
    s.duration_s = r.num(j, path, "duration_s", 0.0);
    s.speed_mps = r.num(j, path, "speed_mps", 5.0);
    if (j.contains("waypoints")) {
        if (!j["waypoints"].is_array()) {
            r.check(false, path + "waypoints: expected an array of [e, n, u]");
        } else {
            int k = 0;
            for (const auto& w : j["waypoints"]) {
                nlohmann::json wrap;
                wrap["p"] = w;
                s.waypoints.push_back(
                    r.vec(wrap, path + "waypoints[" + std::to_string(k) + "].", "p", {}, true));
                ++k;
            }
        }
    }
    s.corner = r.vec(j, path, "corner", {});
    s.east_extent_m = r.num(j, path, "east_extent_m", 0.0);
    s.north_extent_m = r.num(j, path, "north_extent_m", 0.0);
    s.pause_s = r.num(j, path, "pause_s", 0.0);
    s.center = r.vec(j, path, "center", {});
    s.radius_m = r.num(j, path, "radius_m", 0.0);
    return s;
}

}  // namespace detail

/// Parse and validate a scenario document. Throws ScenarioError listing
/// every bad field; never partially succeeds.
inline Scenario parse_scenario(const nlohmann::json& j) {
    std::vector<std::string> errors;
    detail::ConfigReader r(errors);
    Scenario s;

    s.name = r.str(j, "", "name", "", true);
    s.duration_s = r.num(j, "", "duration_s", 0.0, true);
    r.check(s.duration_s > 0.0 || !j.contains("duration_s"), "duration_s: must be > 0");
    s.seed = static_cast<uint64_t>(r.num(j, "", "seed", 0.0));
    s.physics_dt_s = r.num(j, "", "physics_dt_s", 0.05);
    s.controller_dt_s = r.num(j, "", "controller_dt_s", 0.2);
    s.radar_dt_s = r.num(j, "", "radar_dt_s", 0.1);
    r.check(s.physics_dt_s > 0.0, "physics_dt_s: must be > 0");
    r.check(s.controller_dt_s >= s.physics_dt_s,
            "controller_dt_s: must be >= physics_dt_s");
    s.belief_snapshot_every_s = r.num(j, "", "belief_snapshot_every_s", 0.0);
    s.gps_noise_sd_m = r.num(j, "", "gps_noise_sd_m", 0.0);

    if (j.contains("origin")) {
        const auto& o = j["origin"];
        s.origin.latitude_deg = r.num(o, "origin.", "latitude_deg", 35.0, true);
        s.origin.longitude_deg = r.num(o, "origin.", "longitude_deg", -106.0, true);
        s.origin.altitude_m = r.num(o, "origin.", "altitude_m", 0.0);
        r.check(std::abs(s.origin.latitude_deg) < 89.0, "origin.latitude_deg: out of range");
    }

    if (!j.contains("camera")) {
        errors.push_back("camera: missing required field");
    } else {
        const auto& c = j["camera"];
        s.camera.horizontal_fov_deg = r.num(c, "camera.", "horizontal_fov_deg", 90.0, true);
        s.camera.vertical_fov_deg = r.num(c, "camera.", "vertical_fov_deg", 60.0, true);
        s.camera.width_px = static_cast<int>(r.num(c, "camera.", "width_px", 3840.0, true));
        s.camera.height_px = static_cast<int>(r.num(c, "camera.", "height_px", 2160.0, true));
        s.camera.max_detection_range_m = r.num(c, "camera.", "max_detection_range_m", 100.0);
        s.camera_tilt_down_deg = r.num(c, "camera.", "tilt_down_deg", 40.0);
        r.check(s.camera.horizontal_fov_deg > 0.0 && s.camera.horizontal_fov_deg < 180.0,
                "camera.horizontal_fov_deg: must be in (0, 180)");
        r.check(s.camera.vertical_fov_deg > 0.0 && s.camera.vertical_fov_deg < 180.0,
                "camera.vertical_fov_deg: must be in (0, 180)");
        r.check(s.camera.width_px >= 1 && s.camera.height_px >= 1,
                "camera.width_px/height_px: must be >= 1");
    }
    s.camera.mount_orientation = CameraModel::mount_for_tilt_down(s.camera_tilt_down_deg);

    if (j.contains("plant")) {
        const auto& p = j["plant"];
        s.plant.max_speed_mps = r.num(p, "plant.", "max_speed_mps", s.plant.max_speed_mps);
        s.plant.pitch_to_accel_gain =
            r.num(p, "plant.", "pitch_to_accel_gain", s.plant.pitch_to_accel_gain);
        s.plant.drag_per_s = r.num(p, "plant.", "drag_per_s", s.plant.drag_per_s);
        s.plant.command_lag_s = r.num(p, "plant.", "command_lag_s", s.plant.command_lag_s);
        r.check(s.plant.max_speed_mps > 0.0, "plant.max_speed_mps: must be > 0");
        r.check(s.plant.command_lag_s > 0.0, "plant.command_lag_s: must be > 0");
    }
    if (j.contains("chase")) {
        const auto& c = j["chase"];
        s.chase_start = r.vec(c, "chase.", "start_position", {});
        s.chase_start_yaw_deg = r.num(c, "chase.", "start_yaw_deg", 0.0);
        s.initial_state = r.str(c, "chase.", "initial_state", "OnGround");
        r.check(s.initial_state == "OnGround" || s.initial_state == "Search" ||
                    s.initial_state == "FlyToCue" || s.initial_state == "VisionFollow",
                "chase.initial_state: unknown state '" + s.initial_state + "'");
    }

    if (j.contains("follow")) {
        const auto& f = j["follow"];
        s.follow.ground_range_setpoint_m =
            r.num(f, "follow.", "ground_range_setpoint_m", s.follow.ground_range_setpoint_m);
        s.follow.relative_height_setpoint_m = r.num(f, "follow.", "relative_height_setpoint_m",
                                                    s.follow.relative_height_setpoint_m);
        auto gains = [&](const char* key, PidGains& g) {
            if (!f.contains(key)) return;
            nlohmann::json wrap = f[key];
            const std::string path = std::string("follow.") + key + ".";
            g.kp = r.num(wrap, path, "kp", g.kp);
            g.ki = r.num(wrap, path, "ki", g.ki);
            g.kd = r.num(wrap, path, "kd", g.kd);
        };
        gains("yaw_gains", s.follow.yaw_gains);
        gains("pitch_gains", s.follow.pitch_gains);
        gains("climb_gains", s.follow.climb_gains);
    }

    if (!j.contains("target") || !j["target"].is_object() || !j["target"].contains("script") ||
        !j["target"]["script"].is_array() || j["target"]["script"].empty()) {
        errors.push_back("target.script: missing or empty segment list");
    } else {
        int k = 0;
        for (const auto& seg : j["target"]["script"]) {
            const std::string path = "target.script[" + std::to_string(k) + "].";
            TargetSegment parsed = detail::parse_segment(r, seg, path);
            try {
                parsed.validate();
            } catch (const std::invalid_argument& e) {
                errors.push_back(path.substr(0, path.size() - 1) + ": " + e.what());
            }
            s.target_script.push_back(std::move(parsed));
            ++k;
        }
    }

    if (j.contains("radar")) {
        const auto& rj = j["radar"];
        RadarConfig rc;
        rc.position = r.vec(rj, "radar.", "position", {});
        rc.boresight_yaw_deg = r.num(rj, "radar.", "boresight_yaw_deg", 0.0);
        rc.fov_az_deg = r.num(rj, "radar.", "fov_az_deg", rc.fov_az_deg);
        rc.fov_el_deg = r.num(rj, "radar.", "fov_el_deg", rc.fov_el_deg);
        rc.max_range_m = r.num(rj, "radar.", "max_range_m", rc.max_range_m);
        rc.noise_range_m = r.num(rj, "radar.", "noise_range_m", rc.noise_range_m);
        rc.noise_az_deg = r.num(rj, "radar.", "noise_az_deg", rc.noise_az_deg);
        rc.noise_el_deg = r.num(rj, "radar.", "noise_el_deg", rc.noise_el_deg);
        rc.drop_prob_per_s = r.num(rj, "radar.", "drop_prob_per_s", 0.0);
        rc.swap_prob_per_s = r.num(rj, "radar.", "swap_prob_per_s", 0.0);
        rc.swap_proximity_m = r.num(rj, "radar.", "swap_proximity_m", rc.swap_proximity_m);
        rc.duplicate_prob_per_s = r.num(rj, "radar.", "duplicate_prob_per_s", 0.0);
        rc.duplicate_lifetime_s = r.num(rj, "radar.", "duplicate_lifetime_s", rc.duplicate_lifetime_s);
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        r.check(prob(rc.drop_prob_per_s), "radar.drop_prob_per_s: must be in [0, 1]");
        r.check(prob(rc.swap_prob_per_s), "radar.swap_prob_per_s: must be in [0, 1]");
        r.check(prob(rc.duplicate_prob_per_s), "radar.duplicate_prob_per_s: must be in [0, 1]");
        s.radar = rc;
    }

    if (j.contains("detector")) {
        const auto& d = j["detector"];
        s.detector.target_size_m = r.num(d, "detector.", "target_size_m", 0.35);
        s.detector.min_pixels = r.num(d, "detector.", "min_pixels", 15.0);
        s.detector.detect_prob_given_visible =
            r.num(d, "detector.", "detect_prob_given_visible", 1.0);
        s.detector.pixel_noise_sd = r.num(d, "detector.", "pixel_noise_sd", 0.0);
        r.check(s.detector.detect_prob_given_visible >= 0.0 &&
                    s.detector.detect_prob_given_visible <= 1.0,
                "detector.detect_prob_given_visible: must be in [0, 1]");
        r.check(s.detector.target_size_m > 0.0, "detector.target_size_m: must be > 0");
    }
    s.detector.camera = s.camera;

    if (j.contains("search")) {
        const auto& sj = j["search"];
        s.search.grid_origin = r.vec(sj, "search.", "grid_origin", {});
        s.search.spacing_m = r.num(sj, "search.", "spacing_m", 20.0);
        s.search.nx = static_cast<int>(r.num(sj, "search.", "nx", 41.0));
        s.search.ny = static_cast<int>(r.num(sj, "search.", "ny", 41.0));
        s.search.nz = static_cast<int>(r.num(sj, "search.", "nz", 11.0));
        s.search.dynamics.v_h_mps = r.num(sj, "search.", "target_v_h_mps", 10.0);
        s.search.dynamics.v_v_mps = r.num(sj, "search.", "target_v_v_mps", 5.0);
        s.search.rhc.horizon = static_cast<int>(r.num(sj, "search.", "horizon", 3.0));
        s.search.rhc.discount = r.num(sj, "search.", "discount", 0.9);
        s.search.sigma_range_m = r.num(sj, "search.", "sigma_range_m", 30.0);
        s.search.sigma_az_deg = r.num(sj, "search.", "sigma_az_deg", 10.0);
        s.search.sigma_el_deg = r.num(sj, "search.", "sigma_el_deg", 10.0);
        s.search.confidence_full_range_m = r.num(sj, "search.", "confidence_full_range_m", 60.0);
        s.search.planner = r.str(sj, "search.", "planner", "rhc");
        r.check(s.search.planner == "rhc" || s.search.planner == "max-belief",
                "search.planner: must be 'rhc' or 'max-belief'");
        r.check(s.search.spacing_m > 0.0, "search.spacing_m: must be > 0");
        r.check(s.search.nx >= 1 && s.search.ny >= 1 && s.search.nz >= 1,
                "search.nx/ny/nz: must be >= 1");
        r.check(s.search.rhc.horizon >= 1, "search.horizon: must be >= 1");
        r.check(s.search.rhc.discount > 0.0 && s.search.rhc.discount <= 1.0,
                "search.discount: must be in (0, 1]");
    }

    if (j.contains("mission")) {
        const auto& m = j["mission"];
        s.mission.takeoff_altitude_m = r.num(m, "mission.", "takeoff_altitude_m", 20.0);
        s.mission.vision_debounce_count =
            static_cast<int>(r.num(m, "mission.", "vision_debounce_count", 3.0));
        s.mission.vision_lost_s = r.num(m, "mission.", "vision_lost_s", 2.0);
        s.mission.cue_staleness_s = r.num(m, "mission.", "cue_staleness_s", 2.0);
        r.check(s.mission.takeoff_altitude_m > 0.0, "mission.takeoff_altitude_m: must be > 0");
        r.check(s.mission.vision_debounce_count >= 1,
                "mission.vision_debounce_count: must be >= 1");
    }

    if (j.contains("events")) {
        if (!j["events"].is_array()) {
            errors.push_back("events: expected an array");
        } else {
            int k = 0;
            for (const auto& e : j["events"]) {
                const std::string path = "events[" + std::to_string(k) + "].";
                ScenarioEvent ev;
                ev.time_s = r.num(e, path, "time_s", 0.0, true);
                ev.type = r.str(e, path, "type", "", true);
                r.check(ev.type == "radar_off" || ev.type == "radar_on" ||
                            ev.type == "detector_off" || ev.type == "detector_on" ||
                            ev.type.empty(),
                        path + "type: unknown event type '" + ev.type + "'");
                s.events.push_back(ev);
                ++k;
            }
        }
    }

    // cross-field checks
    for (std::size_t k = 0; k < s.target_script.size(); ++k)
        r.check(s.target_script[k].speed_mps <= s.search.dynamics.v_h_mps + 1e-9,
                "target.script[" + std::to_string(k) +
                    "].speed_mps: exceeds search.target_v_h_mps dynamics bound");

    if (!errors.empty()) throw ScenarioError(std::move(errors));
    return s;
}

inline Scenario parse_scenario_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError({std::string("not valid JSON: ") + e.what()});
    }
    return parse_scenario(j);
}

}  // namespace chaser::sim
