// Radar track correlation: binds one radar track ID to the GPS-tracked
// ownship and keeps that binding valid through track dropping, swapping,
// and duplication.
//
// Positions are local-ENU meters relative to the scenario origin; all traces
// share that single frame by construction.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chaser/vec3.hpp"

namespace chaser {

struct TrackSample {
    double timestamp_s = 0.0;
    Vec3 position_enu;
};

/// A radar-assigned track: time-ordered samples under one ID.
struct RadarTrack {
    int64_t track_id = 0;
    std::vector<TrackSample> samples;  // strictly increasing timestamps

    void append(double t, const Vec3& p) {
        if (!samples.empty() && t <= samples.back().timestamp_s)
            throw std::invalid_argument("RadarTrack: timestamps must be strictly increasing");
        samples.push_back({t, p});
    }

    double first_time() const { return samples.front().timestamp_s; }
    double last_time() const { return samples.back().timestamp_s; }
    double lifetime_s() const { return samples.empty() ? 0.0 : last_time() - first_time(); }
};

/// Ownship GPS positions, time-ordered.
struct GpsTrack {
    std::vector<TrackSample> samples;

    void append(double t, const Vec3& p) {
        if (!samples.empty() && t <= samples.back().timestamp_s)
            throw std::invalid_argument("GpsTrack: timestamps must be strictly increasing");
        samples.push_back({t, p});
    }

    /// Piecewise-linear interpolation at `t`. Empty when `t` falls outside
    /// the GPS span; such samples are excluded from detection counting.
    std::optional<Vec3> interpolate(double t) const {
        if (samples.empty() || t < samples.front().timestamp_s || t > samples.back().timestamp_s)
            return std::nullopt;
        auto it = std::lower_bound(
            samples.begin(), samples.end(), t,
            [](const TrackSample& s, double v) { return s.timestamp_s < v; });
        if (it->timestamp_s == t) return it->position_enu;
        const TrackSample& hi = *it;
        const TrackSample& lo = *(it - 1);
        const double f = (t - lo.timestamp_s) / (hi.timestamp_s - lo.timestamp_s);
        return lo.position_enu + (hi.position_enu - lo.position_enu) * f;
    }
};

inline std::vector<std::optional<Vec3>> interpolate_gps(const GpsTrack& g,
                                                        const std::vector<double>& timestamps) {
    std::vector<std::optional<Vec3>> out;
    out.reserve(timestamps.size());
    for (double t : timestamps) out.push_back(g.interpolate(t));
    return out;
}

/// Number of radar samples in the half-open window (t_lo, t_hi] whose
/// distance to the interpolated GPS position is strictly below epsilon.
inline int count_detections(const RadarTrack& r, const GpsTrack& g, double t_lo, double t_hi,
                            double epsilon_m) {
    if (!(t_lo < t_hi)) throw std::invalid_argument("count_detections: t_lo must be < t_hi");
    int count = 0;
    for (const TrackSample& s : r.samples) {
        if (s.timestamp_s <= t_lo || s.timestamp_s > t_hi) continue;
        const auto gps = g.interpolate(s.timestamp_s);
        if (!gps) continue;
        if ((s.position_enu - *gps).norm() < epsilon_m) ++count;
    }
    return count;
}

struct CorrelatorConfig {
    double epsilon_m = 10.0;       // detection threshold distance
    double window_length_s = 2.0;  // per-window span
    int window_count = 3;          // recent windows examined on disagreement
    double staleness_s = 2.0;      // tracks with no sample this recent are inactive
};

/// Association state machine. Once set, the associated ID changes only when
/// at least two of the three window winners agree on a different track.
class Correlator {
public:
    explicit Correlator(CorrelatorConfig cfg = {}) : cfg_(cfg) {
        if (!(cfg_.epsilon_m > 0.0)) throw std::invalid_argument("Correlator: epsilon must be > 0");
        if (!(cfg_.window_length_s > 0.0))
            throw std::invalid_argument("Correlator: window_length must be > 0");
    }

    std::optional<int64_t> associated_id() const { return associated_id_; }
    const CorrelatorConfig& config() const { return cfg_; }

    /// Winner of the detection-count argmax over one window; ties break to
    /// the lowest track ID, an all-zero window has no winner.
    static std::optional<int64_t> window_winner(const std::vector<const RadarTrack*>& tracks,
                                                const GpsTrack& g, double t_lo, double t_hi,
                                                double epsilon_m) {
        std::optional<int64_t> best;
        int best_count = 0;
        for (const RadarTrack* r : tracks) {
            const int n = count_detections(*r, g, t_lo, t_hi, epsilon_m);
            if (n > best_count || (n == best_count && n > 0 && best && r->track_id < *best)) {
                best = r->track_id;
                best_count = n;
            }
        }
        return best;
    }

    /// One evaluation of the association procedure at time `now`.
    void update(const std::vector<RadarTrack>& tracks, const GpsTrack& gps, double now) {
        std::vector<const RadarTrack*> active;
        for (const RadarTrack& r : tracks) {
            if (r.samples.empty()) continue;
            if (now - r.last_time() > cfg_.staleness_s) continue;
            active.push_back(&r);
        }
        std::sort(active.begin(), active.end(),
                  [](const RadarTrack* a, const RadarTrack* b) { return a->track_id < b->track_id; });

        const double w = cfg_.window_length_s;
        const auto m0 = window_winner(active, gps, now - w, now, cfg_.epsilon_m);

        if (!associated_id_) {
            associated_id_ = m0;
            return;
        }
        if (m0 && *m0 == *associated_id_) return;
        if (!m0) return;  // nothing won the recent window; keep the binding

        const auto m1 = window_winner(active, gps, now - 2 * w, now - w, cfg_.epsilon_m);
        const auto m2 = window_winner(active, gps, now - 3 * w, now - 2 * w, cfg_.epsilon_m);

        // Most frequent among the defined winners; adopt it only when at
        // least two windows agree.
        std::map<int64_t, int> votes;
        for (const auto& m : {m0, m1, m2})
            if (m) ++votes[*m];
        std::optional<int64_t> majority;
        int best_votes = 1;
        for (const auto& [id, n] : votes) {
            if (n > best_votes) {
                majority = id;
                best_votes = n;
            }
        }
        if (majority) associated_id_ = majority;
    }

    void reset() { associated_id_.reset(); }

private:
    CorrelatorConfig cfg_;
    std::optional<int64_t> associated_id_;
};

}  // namespace chaser
