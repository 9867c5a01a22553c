#pragma once

#include <array>
#include <cmath>
#include <span>

#include "swarmsim/rng.hpp"

namespace swarmsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // radians in [-pi, pi)
};

inline double wrap_angle(double a) {
    a = std::fmod(a + 3.14159265358979323846, 2.0 * 3.14159265358979323846);
    if (a < 0.0) a += 2.0 * 3.14159265358979323846;
    return a - 3.14159265358979323846;
}

struct MotionConfig {
    double speed = 0.0277;      // m/s, constant forward speed
    double dt = 0.008;          // s per simulation step
    double r_body = 0.025;      // body disc radius, m
    double arena_side = 1.0;    // m
    double sensor_range = 0.15; // m, must exceed the largest trigger distance
    double d_trigger_m = 0.05;  // avoidance trigger distance, m
    int s_max = 564;            // upper bound on forward-leg length, steps
    double turn_rate = 3.14159265358979323846;  // rad/s while turning in place
    double turn_sigma = 3.14159265358979323846 / 4.0;
    double turn_clamp = 3.14159265358979323846 / 2.0;
    double avoid_turn_min = 3.14159265358979323846 / 4.0;
    double avoid_turn_max = 3.14159265358979323846 / 2.0;

    // Eight rays in 30 degree increments centered on the heading.
    static constexpr int kSensorCount = 8;
    static const std::array<double, kSensorCount> kSensorAngles;

    double step_length() const { return speed * dt; }
    double turn_step() const { return turn_rate * dt; }
};

enum class MotionFsm : std::uint8_t { Forward, Turning, PausedSampling, Avoiding };

struct MotionState {
    MotionFsm leg = MotionFsm::Forward;  // underlying motion leg
    int steps_remaining = 0;             // steps left in the current leg
    double turn_target = 0.0;
    double turn_step = 0.0;  // signed per-step rotation
    int pause_remaining = 0; // > 0 while holding for a sample

    MotionFsm state() const {
        return pause_remaining > 0 ? MotionFsm::PausedSampling : leg;
    }
};

using SensorArray = std::array<double, MotionConfig::kSensorCount>;

// Caches the sensor ray directions; they only change when the heading does.
struct SensorRig {
    double cached_heading = std::nan("");
    std::array<Vec2, MotionConfig::kSensorCount> dirs{};

    void refresh(double heading) {
        if (heading == cached_heading) return;
        for (int i = 0; i < MotionConfig::kSensorCount; ++i) {
            const double a = heading + MotionConfig::kSensorAngles[i];
            dirs[i] = Vec2{std::cos(a), std::sin(a)};
        }
        cached_heading = heading;
    }
};

// Distance along each sensor ray to the nearest wall or other robot body,
// measured from the body surface and capped at sensor_range. `positions`
// holds every robot's center; `self` is excluded.
SensorArray sense_distances(const Pose& pose, std::span<const Vec2> positions, int self,
                            const MotionConfig& cfg, SensorRig& rig);
SensorArray sense_distances(const Pose& pose, std::span<const Vec2> positions, int self,
                            const MotionConfig& cfg);

struct StepResult {
    bool pause_completed = false;  // a sampling hold finished on this step
    bool wall_contact = false;     // forward motion was truncated by a wall
};

// Advances one robot by one time step. Forward legs translate by speed*dt,
// turning and avoidance rotate in place at the fixed turn rate, sampling
// pauses hold the pose. Any sensed distance below d_trigger_m forces the
// avoidance state (while moving; a sampling hold finishes first, stationary
// robots cannot close distance). Movement into a wall is truncated and also
// forces avoidance; movement into another robot's body is cancelled.
// `legs` draws leg lengths and turn angles, `avoid` draws avoidance turns.
StepResult step_motion(MotionState& state, Pose& pose, const MotionConfig& cfg,
                       const SensorArray& sensed, std::span<const Vec2> positions, int self,
                       RngStream& legs, RngStream& avoid);

// Hold the pose for the next `pause_steps` steps, then resume the current leg.
inline void begin_pause(MotionState& state, int pause_steps) {
    state.pause_remaining = pause_steps;
}

// Forward-leg length in steps: |N(0, s_max/2)| rounded, clamped to [1, s_max].
int draw_forward_steps(int s_max, RngStream& rng);

// Signed turn angle: N(0, pi/4) clamped to [-pi/2, pi/2].
double draw_turn_angle(RngStream& rng);

void start_forward_leg(MotionState& state, const MotionConfig& cfg, RngStream& legs);
void start_turn(MotionState& state, const Pose& pose, double delta, const MotionConfig& cfg,
                MotionFsm kind);

}  // namespace swarmsim
