// Command-line entry point: scenario runs, metrics extraction, chase
// geometry analysis tables, and radar pose calibration from recorded traces.
//
// Exit codes: 0 success, 1 config error, 2 runtime error, 3 degenerate fit.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaser/calibration.hpp"
#include "chaser/follow.hpp"
#include "chaser/sim/metrics.hpp"
#include "chaser/sim/run.hpp"
#include "chaser/sim/scenario.hpp"
#include "chaser/sim/telemetry.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitDegenerate = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<uint64_t> seed_override) {
    chaser::sim::Scenario sc;
    try {
        sc = chaser::sim::parse_scenario_text(read_file(scenario_path));
    } catch (const chaser::sim::ScenarioError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }
    if (seed_override) sc.seed = *seed_override;

    try {
        const chaser::sim::RunResult result = chaser::sim::run_scenario(sc);
        std::filesystem::create_directories(out_dir);
        {
            std::ofstream f(out_dir + "/telemetry.csv");
            chaser::sim::write_telemetry_csv(f, result.telemetry);
        }
        {
            std::ofstream f(out_dir + "/events.jsonl");
            result.events.write(f);
        }
        {
            std::ofstream f(out_dir + "/metrics.json");
            f << chaser::sim::metrics_to_json(result.metrics).dump(2) << '\n';
        }
        int k = 0;
        for (const auto& [t, grid] : result.belief_snapshots) {
            char name[64];
            std::snprintf(name, sizeof(name), "/belief_%04d.grid", k++);
            std::ofstream f(out_dir + name);
            chaser::sim::write_belief_snapshot(f, grid, t);
        }
        std::cout << chaser::sim::metrics_to_json(result.metrics).dump(2) << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_metrics(const std::string& telemetry_path) {
    try {
        std::ifstream in(telemetry_path);
        if (!in) {
            std::cerr << "cannot read file: " << telemetry_path << '\n';
            return kExitConfig;
        }
        const auto rows = chaser::sim::read_telemetry_csv(in);
        const auto report = chaser::sim::compute_metrics(rows);
        std::cout << chaser::sim::metrics_to_json(report).dump(2) << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "metrics failed: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_chase_analysis(const std::string& config_path) {
    chaser::ChaseAnalysisConfig cfg;
    chaser::CameraModel cam;
    try {
        if (!config_path.empty()) {
            const nlohmann::json j = nlohmann::json::parse(read_file(config_path));
            auto num = [&](const char* key, double fallback) {
                return j.contains(key) ? j[key].get<double>() : fallback;
            };
            cfg.target_size_m = num("target_size_m", cfg.target_size_m);
            cfg.target_vmax_h_mps = num("target_vmax_h_mps", cfg.target_vmax_h_mps);
            cfg.target_vmax_v_mps = num("target_vmax_v_mps", cfg.target_vmax_v_mps);
            cfg.min_pixels = num("min_pixels", cfg.min_pixels);
            cfg.range_min_m = num("range_min_m", cfg.range_min_m);
            cfg.range_max_m = num("range_max_m", cfg.range_max_m);
            cfg.range_step_m = num("range_step_m", cfg.range_step_m);
            cfg.elevation_min_deg = num("elevation_min_deg", cfg.elevation_min_deg);
            cfg.elevation_max_deg = num("elevation_max_deg", cfg.elevation_max_deg);
            cfg.elevation_step_deg = num("elevation_step_deg", cfg.elevation_step_deg);
            cam.horizontal_fov_deg = num("horizontal_fov_deg", cam.horizontal_fov_deg);
            cam.vertical_fov_deg = num("vertical_fov_deg", cam.vertical_fov_deg);
            cam.width_px = static_cast<int>(num("width_px", cam.width_px));
            cam.height_px = static_cast<int>(num("height_px", cam.height_px));
        }
        cam.validate();
    } catch (const std::exception& e) {
        std::cerr << "bad analysis config: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto table = chaser::chase_geometry_analysis(cfg, cam);
        std::cout << "slant_range_m,elevation_deg,pixels_on_target,vertical_reaction_s,"
                     "horizontal_reaction_s,acceptable\n";
        char line[160];
        for (const auto& c : table) {
            std::snprintf(line, sizeof(line), "%.1f,%.1f,%.3f,%.3f,%.3f,%d\n", c.slant_range_m,
                          c.elevation_deg, c.pixels_on_target, c.vertical_reaction_s,
                          c.horizontal_reaction_s, c.acceptable ? 1 : 0);
            std::cout << line;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "analysis failed: " << e.what() << '\n';
        return kExitRuntime;
    }
}

// radar trace: timestamp_s,track_id,range_m,azimuth_deg,elevation_deg
std::vector<chaser::RadarTrack> parse_radar_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read file: " + path);
    std::map<int64_t, chaser::RadarTrack> by_id;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first && line.find("timestamp") != std::string::npos) {
            first = false;
            continue;
        }
        first = false;
        double t, r, az, el;
        long long id;
        if (std::sscanf(line.c_str(), "%lf,%lld,%lf,%lf,%lf", &t, &id, &r, &az, &el) != 5)
            throw std::invalid_argument("bad radar trace row: " + line);
        by_id[id].track_id = id;
        by_id[id].append(t, chaser::radar_spherical_to_cartesian(r, az, el));
    }
    std::vector<chaser::RadarTrack> out;
    for (auto& [id, tr] : by_id) out.push_back(std::move(tr));
    if (out.empty()) throw std::invalid_argument("radar trace is empty: " + path);
    return out;
}

// gps trace: timestamp_s,east_m,north_m,up_m
chaser::GpsTrack parse_gps_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read file: " + path);
    chaser::GpsTrack g;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first && line.find("timestamp") != std::string::npos) {
            first = false;
            continue;
        }
        first = false;
        double t, e, n, u;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &e, &n, &u) != 4)
            throw std::invalid_argument("bad gps trace row: " + line);
        g.append(t, {e, n, u});
    }
    if (g.samples.empty()) throw std::invalid_argument("gps trace is empty: " + path);
    return g;
}

int cmd_calibrate(const std::string& radar_path, const std::string& gps_path,
                  const std::string& method, double yaw0, double pitch0, double roll0,
                  double window_s) {
    std::vector<chaser::RadarTrack> tracks;
    chaser::GpsTrack gps;
    try {
        tracks = parse_radar_trace(radar_path);
        gps = parse_gps_trace(gps_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }
    chaser::RadarPose initial;
    initial.yaw_deg = yaw0;
    initial.pitch_deg = pitch0;
    initial.roll_deg = roll0;

    chaser::CalibrationResult result;
    try {
        if (method == "longest") {
            const chaser::RadarTrack& track = chaser::select_longest_track(tracks);
            result = chaser::fit_orientation(chaser::window_pairs(track, gps, window_s), initial);
            result.selected_track_id = track.track_id;
        } else if (method == "best-residual") {
            result = chaser::select_best_residual_track(tracks, gps, initial, window_s);
        } else if (method == "six-param") {
            const chaser::RadarTrack& track = chaser::select_longest_track(tracks);
            result =
                chaser::fit_six_parameter(chaser::window_pairs(track, gps, window_s), initial);
            result.selected_track_id = track.track_id;
            std::cerr << "warning: six-parameter fit is experimental and ill-conditioned on "
                         "short or low-diversity tracks\n";
        } else {
            std::cerr << "unknown method '" << method
                      << "' (expected longest | best-residual | six-param)\n";
            return kExitConfig;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return kExitRuntime;
    }

    nlohmann::json j;
    j["yaw_deg"] = result.yaw_deg;
    j["pitch_deg"] = result.pitch_deg;
    j["roll_deg"] = result.roll_deg;
    j["position_offset_enu"] = {result.position_offset_enu.x, result.position_offset_enu.y,
                                result.position_offset_enu.z};
    j["residual_sd_enu"] = {result.residual_sd_enu.x, result.residual_sd_enu.y,
                            result.residual_sd_enu.z};
    j["total_residual"] = result.total_residual();
    j["selected_track_id"] = result.selected_track_id;
    j["n_windows"] = result.n_windows;
    j["converged"] = result.converged;
    j["low_confidence"] = result.low_confidence;
    j["experimental"] = result.experimental;
    std::cout << j.dump(2) << '\n';

    if (result.low_confidence || !result.converged) {
        std::cerr << "degenerate fit: viewing geometry has too little angular diversity\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaser: pursuit stack scenario runner and analysis tools"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out";
    std::optional<uint64_t> seed;
    auto* run = app.add_subcommand("run", "run a scenario and write telemetry");
    run->add_option("scenario", scenario_path, "scenario config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the scenario seed");

    std::string telemetry_path;
    auto* metrics = app.add_subcommand("metrics", "compute metrics from a telemetry CSV");
    metrics->add_option("telemetry", telemetry_path, "telemetry.csv path")->required();

    std::string analysis_config;
    auto* analysis = app.add_subcommand("chase-analysis", "emit the chase geometry table");
    analysis->add_option("--config", analysis_config, "analysis parameters (JSON)");

    std::string radar_path, gps_path, method = "best-residual";
    double yaw0 = 0.0, pitch0 = 0.0, roll0 = 0.0, window_s = 0.5;
    auto* calibrate = app.add_subcommand("calibrate", "fit radar orientation from traces");
    calibrate->add_option("--radar", radar_path, "radar trace CSV")->required();
    calibrate->add_option("--gps", gps_path, "GPS trace CSV")->required();
    calibrate->add_option("--method", method, "longest | best-residual | six-param");
    calibrate->add_option("--initial-yaw", yaw0, "initial yaw guess, degrees");
    calibrate->add_option("--initial-pitch", pitch0, "initial pitch guess, degrees");
    calibrate->add_option("--initial-roll", roll0, "initial roll guess, degrees");
    calibrate->add_option("--window", window_s, "averaging window, seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(scenario_path, out_dir, seed);
    if (metrics->parsed()) return cmd_metrics(telemetry_path);
    if (analysis->parsed()) return cmd_chase_analysis(analysis_config);
    if (calibrate->parsed()) return cmd_calibrate(radar_path, gps_path, method, yaw0, pitch0,
                                                  roll0, window_s);
    return kExitConfig;
}
