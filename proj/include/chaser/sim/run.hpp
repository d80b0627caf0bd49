// Scenario execution: the deterministic fixed-step loop. Physics advances at
// physics_dt; the radar revisits at radar_dt; the correlator, mission logic,
// controllers, detector, and belief updates run at controller_dt with
// zero-order hold on commands between ticks. Intra-step module order is
// fixed: target, plant, radar, correlator, mission, controller, detector,
// belief, telemetry.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "chaser/correlator.hpp"
#include "chaser/follow.hpp"
#include "chaser/geo.hpp"
#include "chaser/mission.hpp"
#include "chaser/search.hpp"
#include "chaser/sim/detector.hpp"
#include "chaser/sim/metrics.hpp"
#include "chaser/sim/plant.hpp"
#include "chaser/sim/radar.hpp"
#include "chaser/sim/scenario.hpp"
#include "chaser/sim/target.hpp"
#include "chaser/sim/telemetry.hpp"

namespace chaser::sim {

struct RunResult {
    std::vector<TelemetryRow> telemetry;
    EventLog events;
    std::vector<std::pair<double, BeliefGrid>> belief_snapshots;
    MetricsReport metrics;
};

namespace detail {

/// Waypoint chase: yaw toward the aim point, pitch by distance with speed
/// damping, climb toward the aim altitude. Plain P/PD plumbing shared by the
/// takeoff, fly-to-cue, and search movement modes.
inline FollowCommand steer_to_point(const ChasePlant& plant, const Vec3& aim,
                                    const FollowConfig& limits) {
    FollowCommand cmd;
    const Vec3 rel = aim - plant.position;
    const double dist_h = std::hypot(rel.x, rel.y);
    if (dist_h > 1.0) {
        const double desired_yaw = rad_to_deg(std::atan2(rel.x, rel.y));
        const double yaw_err = wrap_deg(desired_yaw - plant.yaw_deg);
        cmd.yaw_rate_dps = std::clamp(2.0 * yaw_err, -limits.yaw_rate_limit_dps,
                                      limits.yaw_rate_limit_dps);
        const double fwd_speed = Vec3{plant.velocity.x, plant.velocity.y, 0.0}.dot(plant.heading());
        if (std::abs(yaw_err) < 60.0) {
            cmd.pitch_deg = std::clamp(0.6 * dist_h - 1.5 * fwd_speed, -limits.pitch_limit_deg,
                                       limits.pitch_limit_deg);
        }
    }
    cmd.climb_rate_mps = std::clamp(0.8 * rel.z, -limits.climb_limit_mps, limits.climb_limit_mps);
    return cmd;
}

inline double inverse_pixels_on_target(double cd_px, double target_size_m,
                                       const CameraModel& cam) {
    const double half_angle = 0.5 * cd_px * rad_per_pixel(cam);
    return 0.5 * target_size_m / std::tan(std::max(half_angle, 1e-9));
}

}  // namespace detail

inline RunResult run_scenario(const Scenario& sc) {
    RunResult out;

    // seed fan-out: enabling one noise source never perturbs another stream
    std::optional<SyntheticRadar> radar;
    if (sc.radar) {
        RadarConfig rc = *sc.radar;
        rc.seed = sc.seed + 1;
        radar.emplace(rc);
    }
    DetectorConfig dc = sc.detector;
    dc.camera = sc.camera;
    dc.seed = sc.seed + 2;
    SyntheticDetector detector(dc);
    std::mt19937_64 gps_rng(sc.seed + 3);
    std::normal_distribution<double> gps_noise(0.0, std::max(sc.gps_noise_sd_m, 1e-12));

    TargetScript script(sc.target_script);
    ChasePlant plant;
    plant.config = sc.plant;
    plant.position = sc.chase_start;
    plant.yaw_deg = sc.chase_start_yaw_deg;

    FollowController follow(sc.follow);
    Correlator correlator;
    const SensorModel sensor({sc.camera, sc.search.confidence_full_range_m});

    bool log_transitions = false;
    double log_time = 0.0;
    MissionExecutive exec([&](MissionState from, MissionState to, const MissionEvent& ev) {
        if (log_transitions)
            out.events.record(log_time, "mission_transition",
                              {{"from", to_string(from)},
                               {"to", to_string(to)},
                               {"event", to_string(ev.type)}});
    });

    // walk the executive to a non-default initial state without logging
    {
        MissionContext ctx;
        if (sc.initial_state != "OnGround") {
            exec.handle(MissionEvent::track_validated(), ctx, 0.0);
            ctx.cue_available = sc.initial_state == "FlyToCue";
            exec.handle(MissionEvent::altitude_reached(sc.mission.takeoff_altitude_m), ctx, 0.0);
            if (sc.initial_state == "VisionFollow")
                exec.handle(MissionEvent::vision_acquired(), ctx, 0.0);
        }
    }
    log_transitions = true;

    // radar bookkeeping (rolling windows; the correlator needs ~3 windows)
    std::map<int64_t, RadarTrack> tracks;
    std::map<int64_t, int> truth_of;  // latest ground-truth object per track ID
    GpsTrack gps;
    const double keep_horizon_s = 8.0;

    bool radar_on = sc.radar.has_value();
    bool detector_on = true;
    std::vector<bool> event_fired(sc.events.size(), false);

    // vision state
    int consecutive_detections = 0;
    std::optional<double> last_detection_t;
    struct Detection {
        BoundingBox bbox;
        OwnshipPose pose;
        double t;
    };
    std::optional<Detection> last_detection;
    bool fresh_detection = false;
    // a run that starts mid-follow treats vision as fresh at t = 0
    if (sc.initial_state == "VisionFollow") last_detection_t = 0.0;

    // cue state
    std::optional<Vec3> cue_position;
    std::optional<double> cue_time;

    // search state
    std::optional<BeliefGrid> belief;
    std::vector<GridIndex> search_waypoints;
    std::optional<GridIndex> current_waypoint;

    FollowCommand held_cmd = FollowCommand::hover_command();

    const long n_steps = std::lround(sc.duration_s / sc.physics_dt_s);
    const long radar_every = std::max(1L, std::lround(sc.radar_dt_s / sc.physics_dt_s));
    const long ctrl_every = std::max(1L, std::lround(sc.controller_dt_s / sc.physics_dt_s));
    const long corr_every = std::max(ctrl_every, std::lround(1.0 / sc.physics_dt_s));
    long next_snapshot = 0;

    for (long step = 1; step <= n_steps; ++step) {
        const double t = step * sc.physics_dt_s;
        log_time = t;

        // scripted events
        for (std::size_t k = 0; k < sc.events.size(); ++k) {
            if (event_fired[k] || sc.events[k].time_s > t) continue;
            event_fired[k] = true;
            const std::string& type = sc.events[k].type;
            if (type == "radar_off") radar_on = false;
            if (type == "radar_on") radar_on = radar.has_value();
            if (type == "detector_off") detector_on = false;
            if (type == "detector_on") detector_on = true;
            out.events.record(t, "scripted_event", {{"event", type}});
        }

        // target, then plant under the held command
        const Vec3 target = script.position_at(t);
        plant = plant_step(plant, held_cmd, sc.physics_dt_s);

        // radar revisit and ownship GPS
        if (step % radar_every == 0) {
            const Vec3 gp = sc.gps_noise_sd_m > 0.0
                                ? plant.position +
                                      Vec3{gps_noise(gps_rng), gps_noise(gps_rng), gps_noise(gps_rng)}
                                : plant.position;
            gps.append(t, gp);
            if (radar && radar_on) {
                const std::vector<Vec3> objects{plant.position, target};
                for (const RadarUpdate& u : radar->step(objects, t, sc.radar_dt_s)) {
                    tracks[u.track_id].track_id = u.track_id;
                    tracks[u.track_id].append(t, u.position_enu);
                    truth_of[u.track_id] = u.truth_index;
                }
            }
            // trim rolling storage
            std::erase_if(tracks, [&](const auto& kv) {
                return kv.second.last_time() < t - keep_horizon_s;
            });
            for (auto& [id, tr] : tracks) {
                auto& s = tr.samples;
                const auto it = std::find_if(s.begin(), s.end(), [&](const TrackSample& x) {
                    return x.timestamp_s >= t - keep_horizon_s;
                });
                s.erase(s.begin(), it);
            }
            auto& gs = gps.samples;
            const auto git = std::find_if(gs.begin(), gs.end(), [&](const TrackSample& x) {
                return x.timestamp_s >= t - keep_horizon_s;
            });
            gs.erase(gs.begin(), git);
        }

        if (step % ctrl_every != 0) continue;

        const OwnshipPose pose = plant.pose(t);

        // correlator (1 Hz is ample for 2 s windows)
        int n_active_tracks = 0;
        for (const auto& [id, tr] : tracks)
            if (t - tr.last_time() <= correlator.config().staleness_s) ++n_active_tracks;
        if (radar_on && step % corr_every == 0) {
            std::vector<RadarTrack> track_list;
            track_list.reserve(tracks.size());
            for (const auto& [id, tr] : tracks) track_list.push_back(tr);
            correlator.update(track_list, gps, t);
        }

        // cue: freshest active track that is not the ownship-associated one
        if (radar_on) {
            const auto assoc = correlator.associated_id();
            const RadarTrack* best = nullptr;
            for (const auto& [id, tr] : tracks) {
                if (assoc && id == *assoc) continue;
                if (t - tr.last_time() > sc.mission.cue_staleness_s) continue;
                if (!best || tr.last_time() > best->last_time()) best = &tr;
            }
            if (best) {
                cue_position = best->samples.back().position_enu;
                cue_time = best->samples.back().timestamp_s;
            }
        }
        const bool cue_fresh = cue_time && t - *cue_time <= sc.mission.cue_staleness_s;
        MissionContext ctx;
        ctx.cue_available = cue_fresh;

        // mission events
        const MissionState before = exec.state();
        if (exec.state() == MissionState::OnGround && cue_fresh)
            exec.handle(MissionEvent::track_validated(), ctx, t);
        if (exec.state() == MissionState::TakeoffToAltitude &&
            plant.position.z >= sc.mission.takeoff_altitude_m)
            exec.handle(MissionEvent::altitude_reached(sc.mission.takeoff_altitude_m), ctx, t);
        if ((exec.state() == MissionState::FlyToCue || exec.state() == MissionState::Search) &&
            consecutive_detections >= sc.mission.vision_debounce_count)
            exec.handle(MissionEvent::vision_acquired(), ctx, t);
        if (exec.state() == MissionState::VisionFollow &&
            (!last_detection_t || t - *last_detection_t > sc.mission.vision_lost_s))
            exec.handle(MissionEvent::vision_lost(), ctx, t);
        if (exec.state() == MissionState::FlyToCue && !cue_fresh)
            exec.handle(MissionEvent::cue_lost(), ctx, t);
        if (exec.state() == MissionState::Search && cue_fresh)
            exec.handle(MissionEvent::cue_updated(*cue_position), ctx, t);

        // search bookkeeping on entry/exit
        if (exec.state() == MissionState::Search &&
            (before != MissionState::Search || !belief)) {
            const SearchConfig& sg = sc.search;
            if (cue_position) {
                Vec3 seed = *cue_position;
                BeliefGrid probe(sg.grid_origin, sg.spacing_m, sg.nx, sg.ny, sg.nz);
                if (!probe.position_in_bounds(seed)) seed = probe.cell_center(probe.nearest_cell(seed));
                belief = init_belief(seed, plant.position, sg.sigma_range_m, sg.sigma_az_deg,
                                     sg.sigma_el_deg, sg.grid_origin, sg.spacing_m, sg.nx, sg.ny,
                                     sg.nz);
            } else {
                belief.emplace(sg.grid_origin, sg.spacing_m, sg.nx, sg.ny, sg.nz);
                std::fill(belief->values().begin(), belief->values().end(),
                          1.0 / belief->size());
            }
            search_waypoints.clear();
            current_waypoint.reset();
            out.events.record(t, "search_started", {});
        }
        if (exec.state() != MissionState::Search && before == MissionState::Search) {
            search_waypoints.clear();
            current_waypoint.reset();
        }
        if (before != exec.state() && exec.state() == MissionState::VisionFollow) follow.reset();

        // active controller
        std::optional<double> gain_this_tick;
        switch (active_controller(exec.state())) {
            case ControllerSelector::None:
                held_cmd = FollowCommand::hover_command();
                break;
            case ControllerSelector::ClimbToAltitude: {
                held_cmd = {};
                held_cmd.climb_rate_mps = 2.0;
                break;
            }
            case ControllerSelector::WaypointToCue: {
                Vec3 aim = cue_position.value_or(plant.position);
                const Vec3 rel = plant.position - aim;
                const double dh = std::hypot(rel.x, rel.y);
                Vec3 back = dh > 1e-6 ? Vec3{rel.x / dh, rel.y / dh, 0.0} : Vec3{0.0, -1.0, 0.0};
                aim += back * sc.follow.ground_range_setpoint_m;
                aim.z = cue_position ? cue_position->z + sc.follow.relative_height_setpoint_m
                                     : plant.position.z;
                held_cmd = detail::steer_to_point(plant, aim, sc.follow);
                // keep the camera on the cue, not on the standoff point
                if (cue_position) {
                    const Vec3 to_cue = *cue_position - plant.position;
                    const double desired_yaw = rad_to_deg(std::atan2(to_cue.x, to_cue.y));
                    held_cmd.yaw_rate_dps =
                        std::clamp(2.0 * wrap_deg(desired_yaw - plant.yaw_deg),
                                   -sc.follow.yaw_rate_limit_dps, sc.follow.yaw_rate_limit_dps);
                }
                break;
            }
            case ControllerSelector::RhcSearch: {
                BeliefGrid& b = *belief;
                propagate(b, sc.search.dynamics, sc.controller_dt_s);
                const SensorFootprint fp = sensor.footprint(b, plant.position, plant.yaw_deg);
                gain_this_tick = belief_gain(b, fp);
                apply_sensor(b, fp);

                const GridIndex here = b.nearest_cell(plant.position);
                const bool reached =
                    current_waypoint &&
                    (b.cell_center(*current_waypoint) - plant.position).norm() <
                        0.5 * b.spacing();
                if (reached) current_waypoint.reset();
                if (!current_waypoint) {
                    if (search_waypoints.empty()) {
                        if (sc.search.planner == "max-belief") {
                            search_waypoints = {max_belief_point(b)};
                        } else {
                            const PlannedPath p =
                                plan_rhc(b, here, plant.yaw_deg, sensor, sc.search.rhc);
                            if (p.found && p.waypoints.size() > 1)
                                search_waypoints.assign(p.waypoints.begin() + 1,
                                                        p.waypoints.end());
                            else
                                search_waypoints = {max_belief_point(b)};
                        }
                        out.events.record(t, "search_replan",
                                          {{"n_waypoints", search_waypoints.size()}});
                    }
                    current_waypoint = search_waypoints.front();
                    search_waypoints.erase(search_waypoints.begin());
                }
                Vec3 aim = b.cell_center(*current_waypoint);
                held_cmd = detail::steer_to_point(plant, aim, sc.follow);
                break;
            }
            case ControllerSelector::VisionFollowPid: {
                if (const auto hover = follow.staleness_guard(t)) {
                    held_cmd = *hover;
                } else if (fresh_detection && last_detection) {
                    const Detection& d = *last_detection;
                    const Vec3 dir = pixel_to_direction(d.bbox, sc.camera, d.pose);
                    const double range = detail::inverse_pixels_on_target(
                        d.bbox.critical_dimension_px(), sc.detector.target_size_m, sc.camera);
                    const Vec3 cam_pos = camera_position(sc.camera, d.pose).vec();
                    const Vec3 est = cam_pos + dir * range;
                    const Vec3 rel = est - plant.position;
                    RelativeTargetState rts;
                    rts.azimuth_deg =
                        wrap_deg(rad_to_deg(std::atan2(rel.x, rel.y)) - plant.yaw_deg);
                    rts.ground_range_m = std::hypot(rel.x, rel.y);
                    rts.relative_height_m = -rel.z;
                    rts.timestamp_s = d.t;
                    held_cmd = follow.step(rts, t);
                }
                break;
            }
        }
        fresh_detection = false;

        // detector
        std::optional<BoundingBox> det;
        if (detector_on) det = detector.step(pose, target);
        if (det) {
            ++consecutive_detections;
            last_detection_t = t;
            last_detection = Detection{*det, pose, t};
            fresh_detection = true;
        } else {
            consecutive_detections = 0;
        }

        // telemetry
        TelemetryRow row;
        row.t = t;
        row.mission_state = to_string(exec.state());
        row.chase = plant.position;
        row.chase_yaw_deg = plant.yaw_deg;
        row.target = target;
        row.cmd_yaw_rate_dps = held_cmd.yaw_rate_dps;
        row.cmd_pitch_deg = held_cmd.pitch_deg;
        row.cmd_climb_mps = held_cmd.climb_rate_mps;
        row.cmd_hover = held_cmd.hover ? 1 : 0;
        {
            const Vec3 rel = target - plant.position;
            row.rel_azimuth_deg = wrap_deg(rad_to_deg(std::atan2(rel.x, rel.y)) - plant.yaw_deg);
            row.rel_elevation_deg = rad_to_deg(std::atan2(rel.z, std::hypot(rel.x, rel.y)));
            row.rel_range_m = rel.norm();
        }
        row.target_in_fov = in_frustum(target, sc.camera, pose) ? 1 : 0;
        row.detected = det ? 1 : 0;
        if (det) {
            row.det_px = det->center_x_px;
            row.det_py = det->center_y_px;
            row.det_cd_px = det->critical_dimension_px();
        }
        row.n_radar_tracks = n_active_tracks;
        if (radar_on)
            if (const auto id = correlator.associated_id()) {
                row.associated_id = *id;
                const auto it = truth_of.find(*id);
                row.assoc_correct = (it != truth_of.end() && it->second == 0) ? 1 : 0;
            }
        row.belief_gain = gain_this_tick;
        row.waypoint = current_waypoint;
        out.telemetry.push_back(std::move(row));

        // belief snapshots
        if (sc.belief_snapshot_every_s > 0.0 && belief &&
            t + 1e-9 >= next_snapshot * sc.belief_snapshot_every_s) {
            out.belief_snapshots.emplace_back(t, *belief);
            ++next_snapshot;
        }
    }

    out.metrics = compute_metrics(out.telemetry);
    return out;
}

}  // namespace chaser::sim
