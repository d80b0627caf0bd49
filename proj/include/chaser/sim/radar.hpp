// Synthetic radar: noisy spherical measurements of every in-FOV object with
// three injectable failure modes (track dropping with re-ID, track swapping
// on proximity, duplicate tracks). Fully deterministic under a fixed seed:
// draws happen in a fixed per-object order every step.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "chaser/vec3.hpp"

namespace chaser::sim {

struct RadarConfig {
    Vec3 position;               // scenario ENU
    double boresight_yaw_deg = 0.0;
    double fov_az_deg = 120.0;
    double fov_el_deg = 60.0;
    double max_range_m = 2000.0;
    double noise_range_m = 0.5;
    double noise_az_deg = 0.2;
    double noise_el_deg = 0.2;
    double drop_prob_per_s = 0.0;
    double swap_prob_per_s = 0.0;        // applied while two objects are within proximity
    double swap_proximity_m = 15.0;
    double duplicate_prob_per_s = 0.0;
    double duplicate_lifetime_s = 2.0;
    uint64_t seed = 0;

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!prob(drop_prob_per_s) || !prob(swap_prob_per_s) || !prob(duplicate_prob_per_s))
            throw std::invalid_argument("RadarConfig: probabilities must be in [0, 1]");
        if (!(fov_az_deg > 0.0 && fov_el_deg > 0.0))
            throw std::invalid_argument("RadarConfig: FOV must be > 0");
        if (!(max_range_m > 0.0)) throw std::invalid_argument("RadarConfig: max_range must be > 0");
    }
};

struct RadarUpdate {
    int64_t track_id = 0;
    Vec3 position_enu;
    int truth_index = -1;  // ground-truth object this sample came from
};

class SyntheticRadar {
public:
    explicit SyntheticRadar(const RadarConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
    }

    RadarConfig& config() { return cfg_; }
    const RadarConfig& config() const { return cfg_; }

    /// Current track ID carried by a ground-truth object.
    int64_t track_id_of(int truth_index) const {
        return truth_index < static_cast<int>(ids_.size()) ? ids_[truth_index] : -1;
    }

    /// One radar revisit: emits at most one sample per visible object plus
    /// any live duplicate tracks. `dt_s` is the revisit interval, used to
    /// scale the per-second failure probabilities.
    std::vector<RadarUpdate> step(const std::vector<Vec3>& true_positions, double t,
                                  double dt_s) {
        if (!(dt_s > 0.0)) throw std::invalid_argument("SyntheticRadar: dt must be > 0");
        while (ids_.size() < true_positions.size()) {
            ids_.push_back(next_id_++);
            dropped_.push_back(false);
        }
        std::uniform_real_distribution<double> u(0.0, 1.0);
        // per-step probability from a per-second one; p = 1 forces the event
        auto per_step = [dt_s](double p) { return 1.0 - std::pow(1.0 - p, dt_s); };
        std::normal_distribution<double> nr(0.0, cfg_.noise_range_m);
        std::normal_distribution<double> naz(0.0, deg_to_rad(cfg_.noise_az_deg));
        std::normal_distribution<double> nel(0.0, deg_to_rad(cfg_.noise_el_deg));

        // failure draws first, in fixed order
        for (std::size_t i = 0; i < true_positions.size(); ++i) {
            if (dropped_[i]) {
                ids_[i] = next_id_++;  // reacquired under a fresh ID
                dropped_[i] = false;
            }
            if (u(rng_) < per_step(cfg_.drop_prob_per_s)) dropped_[i] = true;
        }
        for (std::size_t i = 0; i < true_positions.size(); ++i)
            for (std::size_t j = i + 1; j < true_positions.size(); ++j)
                if ((true_positions[i] - true_positions[j]).norm() < cfg_.swap_proximity_m &&
                    u(rng_) < per_step(cfg_.swap_prob_per_s))
                    std::swap(ids_[i], ids_[j]);
        for (std::size_t i = 0; i < true_positions.size(); ++i)
            if (u(rng_) < per_step(cfg_.duplicate_prob_per_s))
                duplicates_.push_back({next_id_++, static_cast<int>(i), t + cfg_.duplicate_lifetime_s});

        std::vector<RadarUpdate> out;
        auto emit = [&](int64_t id, int truth_idx) {
            const Vec3& p = true_positions[truth_idx];
            const Vec3 d = p - cfg_.position;
            const double range = d.norm();
            if (range > cfg_.max_range_m || range < 1e-9) return;
            const double az = std::atan2(d.x, d.y);  // compass, radians
            const double el = std::atan2(d.z, std::hypot(d.x, d.y));
            const double daz = wrap_deg(rad_to_deg(az) - cfg_.boresight_yaw_deg);
            if (std::abs(daz) > 0.5 * cfg_.fov_az_deg) return;
            if (std::abs(rad_to_deg(el)) > 0.5 * cfg_.fov_el_deg) return;
            const double mr = range + nr(rng_);
            const double maz = az + naz(rng_);
            const double mel = el + nel(rng_);
            const Vec3 meas{mr * std::cos(mel) * std::sin(maz), mr * std::cos(mel) * std::cos(maz),
                            mr * std::sin(mel)};
            out.push_back({id, cfg_.position + meas, truth_idx});
        };

        for (std::size_t i = 0; i < true_positions.size(); ++i) {
            if (dropped_[i]) {
                // noise draws are consumed even for a dropped sample so the
                // other objects' streams stay unchanged
                (void)nr(rng_);
                (void)naz(rng_);
                (void)nel(rng_);
                continue;
            }
            emit(ids_[i], static_cast<int>(i));
        }
        std::erase_if(duplicates_, [&](const Duplicate& d) { return t > d.expires_s; });
        for (const Duplicate& d : duplicates_)
            if (d.truth_index < static_cast<int>(true_positions.size()))
                emit(d.track_id, d.truth_index);
        return out;
    }

private:
    struct Duplicate {
        int64_t track_id;
        int truth_index;
        double expires_s;
    };

    RadarConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<int64_t> ids_;
    std::vector<bool> dropped_;
    std::vector<Duplicate> duplicates_;
    int64_t next_id_ = 1;
};

}  // namespace chaser::sim
