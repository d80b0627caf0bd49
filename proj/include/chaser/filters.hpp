// Measurement smoothing ahead of the transforms and controller: fixed-gain
// alpha-beta trackers (scalar, vector, and quaternion variants) and a
// sliding-window median filter.
#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chaser/geo.hpp"
#include "chaser/vec3.hpp"

namespace chaser {

/// Two-state (value, rate) predictor-corrector with fixed gains.
/// alpha = 1, beta = 0 is exactly the identity on measurements.
template <typename T>
class AlphaBetaFilter {
public:
    AlphaBetaFilter(double alpha, double beta) : alpha_(alpha), beta_(beta) {
        if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0)
            throw std::invalid_argument("AlphaBetaFilter: gains must be in [0, 1]");
    }

    T update(const T& measurement, double timestamp_s) {
        if (!initialized_) {
            estimate_ = measurement;
            rate_ = T{};
            last_timestamp_s_ = timestamp_s;
            initialized_ = true;
            return estimate_;
        }
        const double dt = timestamp_s - last_timestamp_s_;
        if (dt <= 0.0)
            throw std::invalid_argument("AlphaBetaFilter: non-increasing timestamp");
        const T predicted = estimate_ + rate_ * dt;
        const T residual = measurement - predicted;
        estimate_ = predicted + residual * alpha_;
        rate_ = rate_ + residual * (beta_ / dt);
        last_timestamp_s_ = timestamp_s;
        return estimate_;
    }

    bool initialized() const { return initialized_; }
    const T& estimate() const { return estimate_; }
    const T& rate() const { return rate_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    double alpha_;
    double beta_;
    T estimate_{};
    T rate_{};
    double last_timestamp_s_ = 0.0;
    bool initialized_ = false;
};

/// Alpha-beta smoothing on SO(3): the filter runs on the rotation-vector
/// residual between prediction and measurement, so the output stays a unit
/// quaternion and avoids component-wise filtering artifacts.
class QuaternionAlphaBetaFilter {
public:
    QuaternionAlphaBetaFilter(double alpha, double beta) : alpha_(alpha), beta_(beta) {
        if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0)
            throw std::invalid_argument("QuaternionAlphaBetaFilter: gains must be in [0, 1]");
    }

    Quaternion update(const Quaternion& measurement, double timestamp_s) {
        const Quaternion m = measurement.normalized();
        if (!initialized_) {
            estimate_ = m;
            rate_rad_s_ = {0, 0, 0};
            last_timestamp_s_ = timestamp_s;
            initialized_ = true;
            return estimate_;
        }
        const double dt = timestamp_s - last_timestamp_s_;
        if (dt <= 0.0)
            throw std::invalid_argument("QuaternionAlphaBetaFilter: non-increasing timestamp");
        const Quaternion predicted =
            (quat_from_rotation_vector(rate_rad_s_ * dt) * estimate_).normalized();
        const Vec3 residual = rotation_vector_between(predicted, m);
        estimate_ = (quat_from_rotation_vector(residual * alpha_) * predicted).normalized();
        rate_rad_s_ += residual * (beta_ / dt);
        last_timestamp_s_ = timestamp_s;
        return estimate_;
    }

    bool initialized() const { return initialized_; }
    const Quaternion& estimate() const { return estimate_; }
    const Vec3& rate_rad_s() const { return rate_rad_s_; }

private:
    double alpha_;
    double beta_;
    Quaternion estimate_{};
    Vec3 rate_rad_s_{};
    double last_timestamp_s_ = 0.0;
    bool initialized_ = false;
};

/// Sliding median over the most recent `window_size` samples. A partially
/// filled window uses however many samples exist; even counts average the
/// two central values.
class MedianWindow {
public:
    explicit MedianWindow(std::size_t window_size = 5) : window_size_(window_size) {
        if (window_size == 0) throw std::invalid_argument("MedianWindow: window_size must be >= 1");
    }

    double push(double sample) {
        buffer_.push_back(sample);
        if (buffer_.size() > window_size_) buffer_.pop_front();
        std::vector<double> sorted(buffer_.begin(), buffer_.end());
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        if (n % 2 == 1) return sorted[n / 2];
        return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }

    void clear() { buffer_.clear(); }
    std::size_t size() const { return buffer_.size(); }
    std::size_t window_size() const { return window_size_; }

private:
    std::size_t window_size_;
    std::deque<double> buffer_;
};

}  // namespace chaser
