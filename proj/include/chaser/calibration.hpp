// Radar pose calibration from a single flight: candidate-track selection,
// windowed averaging of radar and GPS measurements, and least-squares fits
// of the radar orientation (and, experimentally, position) that best map
// radar-frame measurements onto the GPS track.
//
// Frames: radar measurements are (range, azimuth, elevation) converted to
// radar-frame cartesian (x right, y boresight, z up; azimuth measured from
// the boresight, positive clockwise viewed from above). GPS positions are
// ENU meters about the radar's initial position guess.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chaser/correlator.hpp"
#include "chaser/geo.hpp"

namespace chaser {

/// Radar-frame cartesian from a (range, azimuth, elevation) measurement.
inline Vec3 radar_spherical_to_cartesian(double range_m, double az_deg, double el_deg) {
    const double az = deg_to_rad(az_deg);
    const double el = deg_to_rad(el_deg);
    return {range_m * std::cos(el) * std::sin(az), range_m * std::cos(el) * std::cos(az),
            range_m * std::sin(el)};
}

/// Rotate a radar-frame vector into ENU for a radar with the given yaw
/// (boresight compass heading), pitch, and roll in degrees.
inline Vec3 radar_to_enu(double yaw_deg, double pitch_deg, double roll_deg, const Vec3& v) {
    // radar frame (x right, y forward, z up) -> body FLU (x forward, y left, z up)
    const Vec3 flu{v.y, -v.x, v.z};
    return rotate(quat_from_yaw_pitch_roll(yaw_deg, pitch_deg, roll_deg), flu);
}

struct RadarPose {
    GeodeticPoint position;
    double yaw_deg = 0.0;  // boresight compass heading, [0, 360)
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
};

struct CalibrationResult {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
    Vec3 position_offset_enu;  // fitted radar displacement (six-parameter fit only)
    Vec3 residual_sd_enu;      // per-axis residual standard deviation, meters
    int64_t selected_track_id = -1;
    int n_windows = 0;
    bool converged = true;
    bool low_confidence = false;  // degenerate viewing geometry
    bool experimental = false;    // six-parameter fit

    double total_residual() const { return residual_sd_enu.norm(); }
};

/// Track with the longest lifetime; ties break to the lowest ID.
inline const RadarTrack& select_longest_track(const std::vector<RadarTrack>& tracks) {
    if (tracks.empty()) throw std::invalid_argument("select_longest_track: empty track list");
    const RadarTrack* best = &tracks.front();
    for (const RadarTrack& t : tracks) {
        if (t.lifetime_s() > best->lifetime_s() ||
            (t.lifetime_s() == best->lifetime_s() && t.track_id < best->track_id))
            best = &t;
    }
    return *best;
}

struct WindowPair {
    Vec3 radar_mean;  // radar-frame cartesian
    Vec3 gps_mean;    // ENU about the radar position guess
};

/// Bin both traces into fixed windows and average; a window contributes a
/// pair only when both sources have at least one sample in it. Radar track
/// samples carry radar-frame cartesian positions here.
inline std::vector<WindowPair> window_pairs(const RadarTrack& track, const GpsTrack& gps,
                                            double window_s = 0.5) {
    if (!(window_s > 0.0)) throw std::invalid_argument("window_pairs: window must be > 0");
    struct Acc {
        Vec3 sum;
        int n = 0;
    };
    std::map<int64_t, Acc> radar_bins, gps_bins;
    auto bin = [&](double t) { return static_cast<int64_t>(std::floor(t / window_s)); };
    for (const auto& s : track.samples) {
        auto& a = radar_bins[bin(s.timestamp_s)];
        a.sum += s.position_enu;
        ++a.n;
    }
    for (const auto& s : gps.samples) {
        auto& a = gps_bins[bin(s.timestamp_s)];
        a.sum += s.position_enu;
        ++a.n;
    }
    std::vector<WindowPair> out;
    for (const auto& [k, r] : radar_bins) {
        auto it = gps_bins.find(k);
        if (it == gps_bins.end()) continue;
        out.push_back({r.sum / r.n, it->second.sum / it->second.n});
    }
    if (out.empty()) throw std::invalid_argument("window_pairs: traces do not overlap");
    return out;
}

namespace detail {

/// Dense Levenberg-Marquardt on a small parameter vector with a numeric
/// central-difference Jacobian. Returns false when it runs out of
/// iterations without meeting the step tolerance.
inline bool levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double>& params, int max_iters = 200, double step_tol = 1e-10) {
    const std::size_t np = params.size();
    double lambda = 1e-3;
    auto sse = [&](const std::vector<double>& p) {
        double s = 0.0;
        for (double r : residuals(p)) s += r * r;
        return s;
    };
    double current_sse = sse(params);

    for (int iter = 0; iter < max_iters; ++iter) {
        const std::vector<double> r0 = residuals(params);
        const std::size_t nr = r0.size();
        // numeric Jacobian
        std::vector<std::vector<double>> jac(nr, std::vector<double>(np));
        for (std::size_t j = 0; j < np; ++j) {
            const double h = std::max(1e-7, 1e-7 * std::abs(params[j]));
            auto pp = params, pm = params;
            pp[j] += h;
            pm[j] -= h;
            const auto rp = residuals(pp);
            const auto rm = residuals(pm);
            for (std::size_t i = 0; i < nr; ++i) jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
        }
        // normal equations JtJ + lambda*diag, Jtr
        std::vector<std::vector<double>> a(np, std::vector<double>(np, 0.0));
        std::vector<double> g(np, 0.0);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < np; ++j) {
                g[j] += jac[i][j] * r0[i];
                for (std::size_t k = j; k < np; ++k) a[j][k] += jac[i][j] * jac[i][k];
            }
        for (std::size_t j = 0; j < np; ++j)
            for (std::size_t k = 0; k < j; ++k) a[j][k] = a[k][j];

        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            auto m = a;
            for (std::size_t j = 0; j < np; ++j) m[j][j] += lambda * (a[j][j] > 0 ? a[j][j] : 1.0);
            // Gaussian elimination with partial pivoting for m * dx = g
            std::vector<double> rhs = g;
            std::vector<double> dx(np, 0.0);
            bool singular = false;
            for (std::size_t c = 0; c < np; ++c) {
                std::size_t piv = c;
                for (std::size_t rI = c + 1; rI < np; ++rI)
                    if (std::abs(m[rI][c]) > std::abs(m[piv][c])) piv = rI;
                if (std::abs(m[piv][c]) < 1e-14) {
                    singular = true;
                    break;
                }
                std::swap(m[c], m[piv]);
                std::swap(rhs[c], rhs[piv]);
                for (std::size_t rI = c + 1; rI < np; ++rI) {
                    const double f = m[rI][c] / m[c][c];
                    for (std::size_t k = c; k < np; ++k) m[rI][k] -= f * m[c][k];
                    rhs[rI] -= f * rhs[c];
                }
            }
            if (!singular) {
                for (std::size_t c = np; c-- > 0;) {
                    double s = rhs[c];
                    for (std::size_t k = c + 1; k < np; ++k) s -= m[c][k] * dx[k];
                    dx[c] = s / m[c][c];
                }
                std::vector<double> trial = params;
                double step_norm = 0.0;
                for (std::size_t j = 0; j < np; ++j) {
                    trial[j] -= dx[j];
                    step_norm += dx[j] * dx[j];
                }
                const double trial_sse = sse(trial);
                if (trial_sse < current_sse) {
                    params = trial;
                    current_sse = trial_sse;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    stepped = true;
                    if (std::sqrt(step_norm) < step_tol) return true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!stepped) return true;  // converged: no descent direction left
    }
    return false;
}

/// True when the viewing directions from the radar are effectively
/// collinear (no leverage to determine orientation).
inline bool degenerate_geometry(const std::vector<WindowPair>& pairs) {
    double max_angle = 0.0;
    const Vec3 ref = pairs.front().radar_mean.normalized();
    for (const auto& p : pairs) {
        const double c = std::clamp(ref.dot(p.radar_mean.normalized()), -1.0, 1.0);
        max_angle = std::max(max_angle, std::acos(c));
    }
    return max_angle < deg_to_rad(2.0);
}

inline Vec3 residual_sd(const std::vector<WindowPair>& pairs,
                        const std::function<Vec3(const Vec3&)>& model) {
    Vec3 ss;
    for (const auto& p : pairs) {
        const Vec3 r = model(p.radar_mean) - p.gps_mean;
        ss += Vec3{r.x * r.x, r.y * r.y, r.z * r.z};
    }
    const double n = static_cast<double>(pairs.size());
    return {std::sqrt(ss.x / n), std::sqrt(ss.y / n), std::sqrt(ss.z / n)};
}

}  // namespace detail

/// Least-squares fit of the radar orientation (yaw, pitch, roll), radar
/// position held fixed at the initial guess (the ENU origin of the GPS
/// trace).
inline CalibrationResult fit_orientation(const std::vector<WindowPair>& pairs,
                                         const RadarPose& initial) {
    if (pairs.size() < 3)
        throw std::invalid_argument("fit_orientation: need at least 3 window pairs");
    std::vector<double> params{initial.yaw_deg, initial.pitch_deg, initial.roll_deg};
    auto residuals = [&](const std::vector<double>& p) {
        std::vector<double> r;
        r.reserve(3 * pairs.size());
        for (const auto& wp : pairs) {
            const Vec3 e = radar_to_enu(p[0], p[1], p[2], wp.radar_mean) - wp.gps_mean;
            r.push_back(e.x);
            r.push_back(e.y);
            r.push_back(e.z);
        }
        return r;
    };
    CalibrationResult result;
    result.converged = detail::levenberg_marquardt(residuals, params);
    result.yaw_deg = std::fmod(std::fmod(params[0], 360.0) + 360.0, 360.0);
    result.pitch_deg = params[1];
    result.roll_deg = params[2];
    result.n_windows = static_cast<int>(pairs.size());
    result.low_confidence = detail::degenerate_geometry(pairs);
    result.residual_sd_enu = detail::residual_sd(
        pairs, [&](const Vec3& v) { return radar_to_enu(params[0], params[1], params[2], v); });
    return result;
}

/// Experimental joint fit of orientation and position (six parameters).
/// Known to be ill-conditioned on short, low-diversity tracks; failures are
/// reported through `converged` / residuals, never thrown.
inline CalibrationResult fit_six_parameter(const std::vector<WindowPair>& pairs,
                                           const RadarPose& initial) {
    if (pairs.size() < 3)
        throw std::invalid_argument("fit_six_parameter: need at least 3 window pairs");
    std::vector<double> params{initial.yaw_deg, initial.pitch_deg, initial.roll_deg, 0.0, 0.0, 0.0};
    auto residuals = [&](const std::vector<double>& p) {
        std::vector<double> r;
        r.reserve(3 * pairs.size());
        const Vec3 offset{p[3], p[4], p[5]};
        for (const auto& wp : pairs) {
            const Vec3 e = radar_to_enu(p[0], p[1], p[2], wp.radar_mean) + offset - wp.gps_mean;
            r.push_back(e.x);
            r.push_back(e.y);
            r.push_back(e.z);
        }
        return r;
    };
    CalibrationResult result;
    result.experimental = true;
    result.converged = detail::levenberg_marquardt(residuals, params);
    result.yaw_deg = std::fmod(std::fmod(params[0], 360.0) + 360.0, 360.0);
    result.pitch_deg = params[1];
    result.roll_deg = params[2];
    result.position_offset_enu = {params[3], params[4], params[5]};
    result.n_windows = static_cast<int>(pairs.size());
    result.low_confidence = detail::degenerate_geometry(pairs);
    result.residual_sd_enu = detail::residual_sd(pairs, [&](const Vec3& v) {
        return radar_to_enu(params[0], params[1], params[2], v) + result.position_offset_enu;
    });
    return result;
}

/// Run the orientation fit against every candidate track and keep the one
/// with the lowest total residual.
inline CalibrationResult select_best_residual_track(const std::vector<RadarTrack>& tracks,
                                                    const GpsTrack& gps, const RadarPose& initial,
                                                    double window_s = 0.5) {
    if (tracks.empty())
        throw std::invalid_argument("select_best_residual_track: empty track list");
    std::optional<CalibrationResult> best;
    for (const RadarTrack& t : tracks) {
        std::vector<WindowPair> pairs;
        try {
            pairs = window_pairs(t, gps, window_s);
            if (pairs.size() < 3) continue;
        } catch (const std::invalid_argument&) {
            continue;
        }
        CalibrationResult r = fit_orientation(pairs, initial);
        r.selected_track_id = t.track_id;
        if (!best || r.total_residual() < best->total_residual()) best = r;
    }
    if (!best)
        throw std::invalid_argument("select_best_residual_track: no track produced a usable fit");
    return *best;
}

}  // namespace chaser
