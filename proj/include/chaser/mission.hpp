// Five-state mission executive: on-ground, takeoff, fly-to-cue, search, and
// vision follow, with the fallback rules between them. The transition
// function is total and deterministic; disallowed (state, event) pairs
// leave the state unchanged.
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "chaser/vec3.hpp"

namespace chaser {

enum class MissionState {
    OnGround,
    TakeoffToAltitude,
    FlyToCue,
    Search,
    VisionFollow,
};

inline const char* to_string(MissionState s) {
    switch (s) {
        case MissionState::OnGround: return "OnGround";
        case MissionState::TakeoffToAltitude: return "TakeoffToAltitude";
        case MissionState::FlyToCue: return "FlyToCue";
        case MissionState::Search: return "Search";
        case MissionState::VisionFollow: return "VisionFollow";
    }
    return "?";
}

enum class MissionEventType {
    TrackValidated,
    AltitudeReached,
    CueUpdated,
    CueLost,
    VisionAcquired,
    VisionLost,
    Abort,
};

inline const char* to_string(MissionEventType e) {
    switch (e) {
        case MissionEventType::TrackValidated: return "TrackValidated";
        case MissionEventType::AltitudeReached: return "AltitudeReached";
        case MissionEventType::CueUpdated: return "CueUpdated";
        case MissionEventType::CueLost: return "CueLost";
        case MissionEventType::VisionAcquired: return "VisionAcquired";
        case MissionEventType::VisionLost: return "VisionLost";
        case MissionEventType::Abort: return "Abort";
    }
    return "?";
}

struct MissionEvent {
    MissionEventType type;
    std::optional<Vec3> cue_position;     // CueUpdated
    std::optional<double> target_alt_m;   // AltitudeReached

    static MissionEvent track_validated() { return {MissionEventType::TrackValidated, {}, {}}; }
    static MissionEvent altitude_reached(double alt) {
        return {MissionEventType::AltitudeReached, {}, alt};
    }
    static MissionEvent cue_updated(const Vec3& p) { return {MissionEventType::CueUpdated, p, {}}; }
    static MissionEvent cue_lost() { return {MissionEventType::CueLost, {}, {}}; }
    static MissionEvent vision_acquired() { return {MissionEventType::VisionAcquired, {}, {}}; }
    static MissionEvent vision_lost() { return {MissionEventType::VisionLost, {}, {}}; }
    static MissionEvent abort() { return {MissionEventType::Abort, {}, {}}; }
};

/// Context the transition function consults: whether a live radar cue exists
/// right now (decides the fallback from VisionFollow and the post-takeoff
/// destination).
struct MissionContext {
    bool cue_available = false;
};

/// Deterministic transition table. Abort returns to OnGround (the sim's
/// safe terminal: return-to-launch directive).
inline MissionState transition(MissionState state, const MissionEvent& event,
                               const MissionContext& ctx) {
    using S = MissionState;
    using E = MissionEventType;
    if (event.type == E::Abort) return S::OnGround;
    switch (state) {
        case S::OnGround:
            if (event.type == E::TrackValidated) return S::TakeoffToAltitude;
            return state;
        case S::TakeoffToAltitude:
            // never leaves before the target altitude is achieved
            if (event.type == E::AltitudeReached)
                return ctx.cue_available ? S::FlyToCue : S::Search;
            return state;
        case S::FlyToCue:
            if (event.type == E::CueLost) return S::Search;
            if (event.type == E::VisionAcquired) return S::VisionFollow;
            return state;
        case S::Search:
            if (event.type == E::CueUpdated) return S::FlyToCue;
            if (event.type == E::VisionAcquired) return S::VisionFollow;
            return state;
        case S::VisionFollow:
            if (event.type == E::VisionLost)
                return ctx.cue_available ? S::FlyToCue : S::Search;
            return state;
    }
    return state;
}

enum class ControllerSelector {
    None,
    ClimbToAltitude,
    WaypointToCue,
    RhcSearch,
    VisionFollowPid,
};

inline ControllerSelector active_controller(MissionState s) {
    switch (s) {
        case MissionState::OnGround: return ControllerSelector::None;
        case MissionState::TakeoffToAltitude: return ControllerSelector::ClimbToAltitude;
        case MissionState::FlyToCue: return ControllerSelector::WaypointToCue;
        case MissionState::Search: return ControllerSelector::RhcSearch;
        case MissionState::VisionFollow: return ControllerSelector::VisionFollowPid;
    }
    return ControllerSelector::None;
}

/// Current-state holder with an optional state-change callback for logging.
class MissionExecutive {
public:
    using ChangeCallback =
        std::function<void(MissionState from, MissionState to, const MissionEvent&)>;

    explicit MissionExecutive(ChangeCallback on_change = nullptr)
        : on_change_(std::move(on_change)) {}

    MissionState state() const { return state_; }
    double entered_at_s() const { return entered_at_s_; }

    MissionState handle(const MissionEvent& event, const MissionContext& ctx, double now_s) {
        const MissionState next = transition(state_, event, ctx);
        if (next != state_) {
            if (on_change_) on_change_(state_, next, event);
            state_ = next;
            entered_at_s_ = now_s;
        }
        return state_;
    }

private:
    MissionState state_ = MissionState::OnGround;
    double entered_at_s_ = 0.0;
    ChangeCallback on_change_;
};

}  // namespace chaser
