#include "swarmsim/kinematics.hpp"

#include <algorithm>
#include <limits>

namespace swarmsim {

namespace {
constexpr double kPi = 3.14159265358979323846;

double deg(double d) { return d * kPi / 180.0; }

// Nearest positive intersection of the ray with the arena boundary.
double ray_to_walls(const Pose& pose, const Vec2& dir, double side) {
    double t = std::numeric_limits<double>::infinity();
    if (dir.x > 0.0) {
        t = std::min(t, (side - pose.x) / dir.x);
    } else if (dir.x < 0.0) {
        t = std::min(t, -pose.x / dir.x);
    }
    if (dir.y > 0.0) {
        t = std::min(t, (side - pose.y) / dir.y);
    } else if (dir.y < 0.0) {
        t = std::min(t, -pose.y / dir.y);
    }
    return t;
}

// Nearest positive intersection of the ray with a disc of radius r at c.
double ray_to_disc(const Pose& pose, const Vec2& dir, const Vec2& c, double r) {
    const double ox = c.x - pose.x;
    const double oy = c.y - pose.y;
    const double b = ox * dir.x + oy * dir.y;
    if (b <= 0.0) return std::numeric_limits<double>::infinity();  // behind
    const double disc = b * b - (ox * ox + oy * oy - r * r);
    if (disc < 0.0) return std::numeric_limits<double>::infinity();
    const double t = b - std::sqrt(disc);
    return t > 0.0 ? t : 0.0;  // 0 when already overlapping the disc rim
}
}  // namespace

const std::array<double, MotionConfig::kSensorCount> MotionConfig::kSensorAngles = {
    deg(-105.0), deg(-75.0), deg(-45.0), deg(-15.0),
    deg(15.0),   deg(45.0),  deg(75.0),  deg(105.0)};

SensorArray sense_distances(const Pose& pose, std::span<const Vec2> positions, int self,
                            const MotionConfig& cfg, SensorRig& rig) {
    rig.refresh(pose.heading);
    SensorArray out{};
    for (int i = 0; i < MotionConfig::kSensorCount; ++i) {
        const Vec2& dir = rig.dirs[i];
        double t = ray_to_walls(pose, dir, cfg.arena_side);
        for (int j = 0; j < static_cast<int>(positions.size()); ++j) {
            if (j == self) continue;
            t = std::min(t, ray_to_disc(pose, dir, positions[j], cfg.r_body));
        }
        out[i] = std::clamp(t - cfg.r_body, 0.0, cfg.sensor_range);
    }
    return out;
}

SensorArray sense_distances(const Pose& pose, std::span<const Vec2> positions, int self,
                            const MotionConfig& cfg) {
    SensorRig rig;
    return sense_distances(pose, positions, self, cfg, rig);
}

int draw_forward_steps(int s_max, RngStream& rng) {
    const double sigma = s_max / 2.0;
    const long long steps = std::llround(std::fabs(rng.normal()) * sigma);
    return static_cast<int>(std::clamp<long long>(steps, 1, s_max));
}

double draw_turn_angle(RngStream& rng) {
    const double a = rng.normal() * kPi / 4.0;
    return std::clamp(a, -kPi / 2.0, kPi / 2.0);
}

void start_forward_leg(MotionState& state, const MotionConfig& cfg, RngStream& legs) {
    state.leg = MotionFsm::Forward;
    state.steps_remaining = draw_forward_steps(cfg.s_max, legs);
}

void start_turn(MotionState& state, const Pose& pose, double delta, const MotionConfig& cfg,
                MotionFsm kind) {
    state.leg = kind;
    state.turn_target = wrap_angle(pose.heading + delta);
    const double per_step = cfg.turn_step();
    state.steps_remaining = std::max(1, static_cast<int>(std::ceil(std::fabs(delta) / per_step)));
    state.turn_step = std::copysign(per_step, delta);
}

namespace {

int min_sensor(const SensorArray& sensed) {
    return static_cast<int>(std::min_element(sensed.begin(), sensed.end()) - sensed.begin());
}

void enter_avoidance(MotionState& state, const Pose& pose, const MotionConfig& cfg,
                     const SensorArray& sensed, RngStream& avoid) {
    // Turn away from the side of the closest reading.
    const double blocked_angle = MotionConfig::kSensorAngles[min_sensor(sensed)];
    const double sign = blocked_angle > 0.0 ? -1.0 : 1.0;
    const double delta = sign * avoid.uniform(cfg.avoid_turn_min, cfg.avoid_turn_max);
    start_turn(state, pose, delta, cfg, MotionFsm::Avoiding);
}

// One rotation step toward turn_target; returns true when the turn finished.
bool rotate_step(MotionState& state, Pose& pose) {
    if (state.steps_remaining <= 1) {
        pose.heading = state.turn_target;
        state.steps_remaining = 0;
        return true;
    }
    pose.heading = wrap_angle(pose.heading + state.turn_step);
    --state.steps_remaining;
    return false;
}

}  // namespace

StepResult step_motion(MotionState& state, Pose& pose, const MotionConfig& cfg,
                       const SensorArray& sensed, std::span<const Vec2> positions, int self,
                       RngStream& legs, RngStream& avoid) {
    StepResult result;

    if (state.pause_remaining > 0) {
        --state.pause_remaining;
        result.pause_completed = (state.pause_remaining == 0);
        return result;
    }

    const double min_d = *std::min_element(sensed.begin(), sensed.end());
    if (min_d < cfg.d_trigger_m && state.leg != MotionFsm::Avoiding) {
        enter_avoidance(state, pose, cfg, sensed, avoid);
    }

    switch (state.leg) {
        case MotionFsm::Forward: {
            const double lo = cfg.r_body;
            const double hi = cfg.arena_side - cfg.r_body;
            double nx = pose.x + std::cos(pose.heading) * cfg.step_length();
            double ny = pose.y + std::sin(pose.heading) * cfg.step_length();
            const double cx = std::clamp(nx, lo, hi);
            const double cy = std::clamp(ny, lo, hi);
            result.wall_contact = (cx != nx) || (cy != ny);
            nx = cx;
            ny = cy;

            // No push resolution: a move that would overlap a body is dropped.
            bool blocked = false;
            const double min_sep_sq = 4.0 * cfg.r_body * cfg.r_body;
            for (int j = 0; j < static_cast<int>(positions.size()); ++j) {
                if (j == self) continue;
                const double dx = nx - positions[j].x;
                const double dy = ny - positions[j].y;
                if (dx * dx + dy * dy < min_sep_sq) {
                    blocked = true;
                    break;
                }
            }
            if (!blocked) {
                pose.x = nx;
                pose.y = ny;
            }

            if (result.wall_contact) {
                enter_avoidance(state, pose, cfg, sensed, avoid);
            } else if (--state.steps_remaining <= 0) {
                start_turn(state, pose, draw_turn_angle(legs), cfg, MotionFsm::Turning);
            }
            break;
        }
        case MotionFsm::Turning: {
            if (rotate_step(state, pose)) {
                start_forward_leg(state, cfg, legs);
            }
            break;
        }
        case MotionFsm::Avoiding: {
            if (rotate_step(state, pose)) {
                if (min_d < cfg.d_trigger_m) {
                    enter_avoidance(state, pose, cfg, sensed, avoid);
                } else {
                    start_forward_leg(state, cfg, legs);
                }
            }
            break;
        }
        case MotionFsm::PausedSampling:
            break;  // unreachable, pauses are handled above
    }
    return result;
}

}  // namespace swarmsim
