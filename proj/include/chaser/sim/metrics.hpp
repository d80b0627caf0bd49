// Run metrics computed from a telemetry log. Metrics whose defining segment
// is empty are reported as absent, never as zero.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaser/sim/telemetry.hpp"

namespace chaser::sim {

struct MetricsReport {
    std::optional<double> fov_containment_fraction;   // over VisionFollow timesteps
    std::optional<double> detection_fraction;         // over VisionFollow timesteps
    std::optional<double> association_fraction;       // 1 s windows with an associated ID
    int association_wrong_windows = 0;                // windows with a wrong-vehicle ID
    std::optional<double> radar_coverage_fraction;    // 1 s windows with any radar track
    std::optional<double> cumulative_belief_gain;
    std::optional<double> time_to_acquire_s;          // first VisionFollow entry
};

inline MetricsReport compute_metrics(const std::vector<TelemetryRow>& rows) {
    MetricsReport m;
    if (rows.empty()) return m;

    long follow_rows = 0, contained = 0, detected = 0;
    for (const auto& r : rows) {
        if (r.mission_state == "VisionFollow") {
            ++follow_rows;
            contained += r.target_in_fov;
            detected += r.detected;
        }
        if (!m.time_to_acquire_s && r.mission_state == "VisionFollow") m.time_to_acquire_s = r.t;
    }
    if (follow_rows > 0) {
        m.fov_containment_fraction = static_cast<double>(contained) / follow_rows;
        m.detection_fraction = static_cast<double>(detected) / follow_rows;
    }

    // 1 s window statistics
    struct Window {
        bool any_assoc = false;
        bool any_wrong = false;
        bool any_radar = false;
    };
    std::map<long, Window> windows;
    for (const auto& r : rows) {
        Window& w = windows[static_cast<long>(std::floor(r.t))];
        if (r.associated_id) w.any_assoc = true;
        if (r.assoc_correct && *r.assoc_correct == 0) w.any_wrong = true;
        if (r.n_radar_tracks > 0) w.any_radar = true;
    }
    if (!windows.empty()) {
        long assoc = 0, radar = 0;
        for (const auto& [k, w] : windows) {
            assoc += w.any_assoc;
            m.association_wrong_windows += w.any_wrong;
            radar += w.any_radar;
        }
        m.association_fraction = static_cast<double>(assoc) / windows.size();
        m.radar_coverage_fraction = static_cast<double>(radar) / windows.size();
    }

    double gain = 0.0;
    bool any_gain = false;
    for (const auto& r : rows)
        if (r.belief_gain) {
            gain += *r.belief_gain;
            any_gain = true;
        }
    if (any_gain) m.cumulative_belief_gain = gain;
    return m;
}

inline nlohmann::json metrics_to_json(const MetricsReport& m) {
    nlohmann::json j;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("fov_containment_fraction", m.fov_containment_fraction);
    put("detection_fraction", m.detection_fraction);
    put("association_fraction", m.association_fraction);
    j["association_wrong_windows"] = m.association_wrong_windows;
    put("radar_coverage_fraction", m.radar_coverage_fraction);
    put("cumulative_belief_gain", m.cumulative_belief_gain);
    put("time_to_acquire_s", m.time_to_acquire_s);
    return j;
}

}  // namespace chaser::sim
