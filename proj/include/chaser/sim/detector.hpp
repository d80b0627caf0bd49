// Synthetic vision detector: stands in for the onboard CNN. Emits a bounding
// box for a target that is inside the camera frustum, within detection
// range, and large enough on screen, with a configurable per-frame miss
// probability and pixel noise.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>

#include "chaser/follow.hpp"
#include "chaser/geo.hpp"

namespace chaser::sim {

struct DetectorConfig {
    CameraModel camera;
    double target_size_m = 0.35;  // critical dimension of the target airframe
    double min_pixels = 15.0;
    double detect_prob_given_visible = 1.0;
    double pixel_noise_sd = 0.0;
    uint64_t seed = 0;

    void validate() const {
        camera.validate();
        if (!(target_size_m > 0.0))
            throw std::invalid_argument("DetectorConfig: target_size must be > 0");
        if (!(min_pixels >= 0.0))
            throw std::invalid_argument("DetectorConfig: min_pixels must be >= 0");
        if (!(detect_prob_given_visible >= 0.0 && detect_prob_given_visible <= 1.0))
            throw std::invalid_argument("DetectorConfig: detect_prob must be in [0, 1]");
        if (pixel_noise_sd < 0.0)
            throw std::invalid_argument("DetectorConfig: pixel_noise_sd must be >= 0");
    }
};

class SyntheticDetector {
public:
    explicit SyntheticDetector(const DetectorConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
    }

    const DetectorConfig& config() const { return cfg_; }

    std::optional<BoundingBox> step(const OwnshipPose& chase_pose, const Vec3& target_enu) {
        double px = 0.0, py = 0.0, range = 0.0;
        if (!project_to_pixel(target_enu, cfg_.camera, chase_pose, &px, &py, &range))
            return std::nullopt;
        if (px < 0.0 || px > cfg_.camera.width_px || py < 0.0 || py > cfg_.camera.height_px)
            return std::nullopt;
        if (range > cfg_.camera.max_detection_range_m) return std::nullopt;
        const double cd_px = pixels_on_target(cfg_.target_size_m, range, cfg_.camera);
        if (cd_px < cfg_.min_pixels) return std::nullopt;

        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (u(rng_) >= cfg_.detect_prob_given_visible) return std::nullopt;

        BoundingBox b;
        b.center_x_px = px;
        b.center_y_px = py;
        if (cfg_.pixel_noise_sd > 0.0) {
            std::normal_distribution<double> n(0.0, cfg_.pixel_noise_sd);
            b.center_x_px = std::clamp(b.center_x_px + n(rng_), 0.0,
                                       static_cast<double>(cfg_.camera.width_px));
            b.center_y_px = std::clamp(b.center_y_px + n(rng_), 0.0,
                                       static_cast<double>(cfg_.camera.height_px));
        }
        b.width_px = b.height_px = cd_px;
        b.confidence = 1.0;
        return b;
    }

private:
    DetectorConfig cfg_;
    std::mt19937_64 rng_;
};

}  // namespace chaser::sim
