// Run artifacts: dense telemetry CSV (versioned schema), line-delimited JSON
// event log, and dense text belief-grid snapshots. All writers format
// numbers deterministically so identical runs produce identical bytes.
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "chaser/search.hpp"
#include "chaser/vec3.hpp"

namespace chaser::sim {

inline constexpr const char* kTelemetryVersion = "chaser-telemetry v1";

struct TelemetryRow {
    double t = 0.0;
    std::string mission_state;
    Vec3 chase;
    double chase_yaw_deg = 0.0;
    Vec3 target;
    double cmd_yaw_rate_dps = 0.0;
    double cmd_pitch_deg = 0.0;
    double cmd_climb_mps = 0.0;
    int cmd_hover = 0;
    double rel_azimuth_deg = 0.0;
    double rel_elevation_deg = 0.0;
    double rel_range_m = 0.0;
    int target_in_fov = 0;
    int detected = 0;
    std::optional<double> det_px, det_py, det_cd_px;
    int n_radar_tracks = 0;
    std::optional<int64_t> associated_id;
    std::optional<int> assoc_correct;
    std::optional<double> belief_gain;
    std::optional<GridIndex> waypoint;
};

inline const char* telemetry_columns() {
    return "t,mission_state,chase_e,chase_n,chase_u,chase_yaw_deg,target_e,target_n,target_u,"
           "cmd_yaw_rate_dps,cmd_pitch_deg,cmd_climb_mps,cmd_hover,rel_azimuth_deg,"
           "rel_elevation_deg,rel_range_m,target_in_fov,detected,det_px,det_py,det_cd_px,"
           "n_radar_tracks,associated_id,assoc_correct,belief_gain,waypoint_ix,waypoint_iy,"
           "waypoint_iz";
}

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

template <typename T>
std::string fmt_opt(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_floating_point_v<T>)
        return fmt(*v);
    else
        return std::to_string(*v);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(cell);
    return out;
}

}  // namespace detail

inline std::string telemetry_row_csv(const TelemetryRow& r) {
    using detail::fmt;
    using detail::fmt_opt;
    std::string s;
    s += fmt(r.t) + ',' + r.mission_state + ',';
    s += fmt(r.chase.x) + ',' + fmt(r.chase.y) + ',' + fmt(r.chase.z) + ',';
    s += fmt(r.chase_yaw_deg) + ',';
    s += fmt(r.target.x) + ',' + fmt(r.target.y) + ',' + fmt(r.target.z) + ',';
    s += fmt(r.cmd_yaw_rate_dps) + ',' + fmt(r.cmd_pitch_deg) + ',' + fmt(r.cmd_climb_mps) + ',';
    s += std::to_string(r.cmd_hover) + ',';
    s += fmt(r.rel_azimuth_deg) + ',' + fmt(r.rel_elevation_deg) + ',' + fmt(r.rel_range_m) + ',';
    s += std::to_string(r.target_in_fov) + ',' + std::to_string(r.detected) + ',';
    s += fmt_opt(r.det_px) + ',' + fmt_opt(r.det_py) + ',' + fmt_opt(r.det_cd_px) + ',';
    s += std::to_string(r.n_radar_tracks) + ',';
    s += fmt_opt(r.associated_id) + ',' + fmt_opt(r.assoc_correct) + ',';
    s += fmt_opt(r.belief_gain) + ',';
    if (r.waypoint) {
        s += std::to_string(r.waypoint->ix) + ',' + std::to_string(r.waypoint->iy) + ',' +
             std::to_string(r.waypoint->iz);
    } else {
        s += ",,";
    }
    return s;
}

inline void write_telemetry_csv(std::ostream& out, const std::vector<TelemetryRow>& rows) {
    out << "# " << kTelemetryVersion << '\n' << telemetry_columns() << '\n';
    for (const auto& r : rows) out << telemetry_row_csv(r) << '\n';
}

/// Parse a telemetry CSV; throws std::runtime_error on a version or column
/// mismatch (schema contract).
inline std::vector<TelemetryRow> read_telemetry_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != std::string("# ") + kTelemetryVersion)
        throw std::runtime_error("telemetry: missing or mismatched schema version header");
    if (!std::getline(in, line) || line != telemetry_columns())
        throw std::runtime_error("telemetry: column header does not match schema");
    std::vector<TelemetryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = detail::split_csv(line);
        if (c.size() != 28) throw std::runtime_error("telemetry: bad column count in row");
        TelemetryRow r;
        r.t = std::stod(c[0]);
        r.mission_state = c[1];
        r.chase = {std::stod(c[2]), std::stod(c[3]), std::stod(c[4])};
        r.chase_yaw_deg = std::stod(c[5]);
        r.target = {std::stod(c[6]), std::stod(c[7]), std::stod(c[8])};
        r.cmd_yaw_rate_dps = std::stod(c[9]);
        r.cmd_pitch_deg = std::stod(c[10]);
        r.cmd_climb_mps = std::stod(c[11]);
        r.cmd_hover = std::stoi(c[12]);
        r.rel_azimuth_deg = std::stod(c[13]);
        r.rel_elevation_deg = std::stod(c[14]);
        r.rel_range_m = std::stod(c[15]);
        r.target_in_fov = std::stoi(c[16]);
        r.detected = std::stoi(c[17]);
        if (!c[18].empty()) r.det_px = std::stod(c[18]);
        if (!c[19].empty()) r.det_py = std::stod(c[19]);
        if (!c[20].empty()) r.det_cd_px = std::stod(c[20]);
        r.n_radar_tracks = std::stoi(c[21]);
        if (!c[22].empty()) r.associated_id = std::stoll(c[22]);
        if (!c[23].empty()) r.assoc_correct = std::stoi(c[23]);
        if (!c[24].empty()) r.belief_gain = std::stod(c[24]);
        if (!c[25].empty()) r.waypoint = GridIndex{std::stoi(c[25]), std::stoi(c[26]), std::stoi(c[27])};
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Append-only JSONL event log.
class EventLog {
public:
    void record(double t, const std::string& type, nlohmann::json fields = {}) {
        nlohmann::json e = std::move(fields);
        e["t"] = detail::fmt(t);
        e["type"] = type;
        lines_.push_back(e.dump());
    }

    const std::vector<std::string>& lines() const { return lines_; }

    void write(std::ostream& out) const {
        for (const auto& l : lines_) out << l << '\n';
    }

private:
    std::vector<std::string> lines_;
};

/// Dense text dump of one belief snapshot: header then one line per z-layer
/// row, x-fastest.
inline void write_belief_snapshot(std::ostream& out, const BeliefGrid& b, double t) {
    out << "# chaser-belief v1 t=" << detail::fmt(t) << " nx=" << b.nx() << " ny=" << b.ny()
        << " nz=" << b.nz() << " spacing=" << detail::fmt(b.spacing()) << '\n';
    char buf[32];
    for (int iz = 0; iz < b.nz(); ++iz)
        for (int iy = 0; iy < b.ny(); ++iy) {
            for (int ix = 0; ix < b.nx(); ++ix) {
                std::snprintf(buf, sizeof(buf), "%.9e", b.at({ix, iy, iz}));
                out << buf << (ix + 1 == b.nx() ? '\n' : ' ');
            }
        }
}

}  // namespace chaser::sim
