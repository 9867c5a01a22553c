#include "swarmsim/engine.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <limits>
#include <sstream>

#include "swarmsim/parallel.hpp"
#include "swarmsim/rng.hpp"

namespace swarmsim {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_bound(const char* name, int value, ParamBound b) {
    if (value < b.lo || value > b.hi) {
        std::ostringstream os;
        os << name << "=" << value << " outside [" << b.lo << ", " << b.hi << "]";
        throw ValidationError(os.str());
    }
}
}  // namespace

void ParameterSet::validate() const {
    check_bound("tau", tau, kTauBounds);
    check_bound("s", s, kSBounds);
    check_bound("d", d, kDBounds);
    check_bound("h", h, kHBounds);
    if (!(p_c > 0.5 && p_c < 1.0)) {
        std::ostringstream os;
        os << "p_c=" << p_c << " outside (0.5, 1)";
        throw ValidationError(os.str());
    }
    if (alpha0 < 0.0 || beta0 < 0.0) {
        throw ValidationError("prior counts alpha0/beta0 must be non-negative");
    }
}

void SimConfig::validate() const {
    if (n_robots < 1) throw ValidationError("n_robots must be >= 1");
    if (t_max_steps < 1) throw ValidationError("t_max_steps must be >= 1");
    if (fill < 0.0 || fill > 1.0) {
        std::ostringstream os;
        os << "fill=" << fill << " outside [0, 1]";
        throw ValidationError(os.str());
    }
    if (fill == 0.5) throw ValidationError("fill=0.5 has no majority color to classify");
    if (pause_steps < 0) throw ValidationError("pause_steps must be >= 0");
    if (series_stride < 1) throw ValidationError("series_stride must be >= 1");
    if (motion.dt <= 0.0 || motion.speed <= 0.0) {
        throw ValidationError("motion dt and speed must be positive");
    }
    if (motion.r_body <= 0.0 || motion.arena_side <= 2.0 * motion.r_body) {
        throw ValidationError("arena side must exceed the robot diameter");
    }
}

namespace {

// Rejection-samples non-overlapping positions, then a heading, per robot.
std::vector<Pose> place_robots(const SimConfig& cfg, const MotionConfig& motion,
                               RngStream& rng) {
    const double r = motion.r_body;
    const double lo = r;
    const double hi = motion.arena_side - r;
    std::vector<Pose> poses;
    poses.reserve(cfg.n_robots);
    for (int i = 0; i < cfg.n_robots; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            const double x = rng.uniform(lo, hi);
            const double y = rng.uniform(lo, hi);
            bool clear = true;
            for (const Pose& other : poses) {
                const double dx = x - other.x;
                const double dy = y - other.y;
                if (dx * dx + dy * dy < 4.0 * r * r) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                poses.push_back(Pose{x, y, 0.0});
                placed = true;
            }
        }
        if (!placed) {
            throw ValidationError("cannot place " + std::to_string(cfg.n_robots) +
                                  " robot bodies without overlap");
        }
        poses.back().heading = rng.uniform(-kPi, kPi);
    }
    return poses;
}

struct RobotRt {
    MotionState motion{};
    SensorRig rig{};
    Belief belief{};
    DecisionState ds{};
    int last_color = -1;      // most recent own sample, -1 before the first
    std::int64_t walk = 0;    // non-pause steps since the last sample
    RngStream legs;
    RngStream avoid;

    RobotRt(std::uint64_t seed, int id)
        : legs(derive_stream(seed, streams::kLegs, id)),
          avoid(derive_stream(seed, streams::kAvoid, id)) {}
};

}  // namespace

SimTrace run_simulation(const ParameterSet& params, const SimConfig& cfg) {
    params.validate();
    cfg.validate();

    MotionConfig motion = cfg.motion;
    motion.s_max = params.s;
    motion.d_trigger_m = params.d / 1000.0;

    const ArenaPattern pattern = generate_pattern(cfg.fill, cfg.seed);
    const int n = cfg.n_robots;

    SimTrace trace;
    trace.nominal_fill = cfg.fill;
    trace.actual_fill = pattern.actual_fill();
    trace.truth_white = pattern.truth_white_majority();
    trace.seed = cfg.seed;
    trace.t_max_steps = cfg.t_max_steps;
    trace.dt = motion.dt;
    trace.n_robots = n;

    RngStream pose_rng = derive_stream(cfg.seed, streams::kInitPose);
    std::vector<Pose> poses = place_robots(cfg, motion, pose_rng);

    std::vector<RobotRt> robots;
    robots.reserve(n);
    for (int i = 0; i < n; ++i) {
        robots.emplace_back(cfg.seed, i);
        robots[i].belief = Belief{params.alpha0, params.beta0};
        start_forward_leg(robots[i].motion, motion, robots[i].legs);
    }

    const DecisionConstants consts{0.5, params.p_c, params.h};
    const FeedbackMode fb{params.positive_feedback};
    BroadcastBus bus;
    std::vector<std::vector<Message>> inboxes(n);
    std::vector<Vec2> snapshot(n);
    std::vector<Vec2> current(n);
    std::vector<char> sampled(n, 0);
    std::vector<int> sample_color(n, -1);
    std::bitset<ArenaPattern::kTileCount> visited;

    auto tile_of = [](const Pose& p) {
        return tile_index(p.y) * ArenaPattern::kTilesPerSide + tile_index(p.x);
    };
    for (int i = 0; i < n; ++i) {
        current[i] = Vec2{poses[i].x, poses[i].y};
        visited.set(tile_of(poses[i]));
    }

    auto push_series = [&](std::int64_t step) {
        SeriesSample s;
        s.step = step;
        s.coverage = static_cast<double>(visited.count()) / ArenaPattern::kTileCount;
        s.robots.reserve(n);
        for (int i = 0; i < n; ++i) {
            s.robots.push_back(RobotSample{robots[i].belief.alpha, robots[i].belief.beta,
                                           static_cast<int>(robots[i].ds.d_f), poses[i].x,
                                           poses[i].y});
        }
        trace.series.push_back(std::move(s));
    };
    if (cfg.record_series) push_series(0);

    for (std::int64_t step = 1; step <= cfg.t_max_steps; ++step) {
        // Motion. Sensing sees everyone's pre-step position; overlap checks
        // see positions already advanced this step, in robot-id order.
        for (int i = 0; i < n; ++i) snapshot[i] = current[i];
        for (int i = 0; i < n; ++i) {
            RobotRt& r = robots[i];
            const bool was_paused = r.motion.pause_remaining > 0;
            SensorArray sensed{};
            if (!was_paused) sensed = sense_distances(poses[i], snapshot, i, motion, r.rig);
            const StepResult res =
                step_motion(r.motion, poses[i], motion, sensed, current, i, r.legs, r.avoid);
            current[i] = Vec2{poses[i].x, poses[i].y};
            if (res.pause_completed) sampled[i] = 1;
            if (!was_paused && ++r.walk >= params.tau) {
                r.walk = 0;
                if (cfg.pause_steps > 0) {
                    begin_pause(r.motion, cfg.pause_steps);
                } else {
                    sampled[i] = 1;
                }
            }
            visited.set(tile_of(poses[i]));
        }

        // Sampling and emission. The payload pairs the fresh color with the
        // decision flag carried into this step.
        for (int i = 0; i < n; ++i) {
            if (!sampled[i]) continue;
            const int c = color_at(pattern, poses[i].x, poses[i].y);
            sample_color[i] = c;
            bus.emit(i, compose_broadcast(robots[i].ds.d_f, c, fb), step);
            if (cfg.record_observations) trace.observations.push_back(ObsEvent{step, i, c});
        }
        if (cfg.broadcast_per_step) {
            for (int i = 0; i < n; ++i) {
                if (sampled[i] || robots[i].last_color < 0) continue;
                bus.emit(i, compose_broadcast(robots[i].ds.d_f, robots[i].last_color, fb),
                         step);
            }
        }

        // Delivery.
        if (!bus.empty()) {
            const std::vector<Message> delivered = bus.deliver(inboxes);
            if (cfg.record_messages) {
                for (const Message& m : delivered) {
                    for (int rcpt = 0; rcpt < n; ++rcpt) {
                        if (rcpt == m.sender) continue;
                        trace.deliveries.push_back(
                            DeliveryEvent{step, m.sender, rcpt, m.color_bit, m.kind});
                    }
                }
            }
        }

        // Belief integration and decision update, own color first.
        for (int i = 0; i < n; ++i) {
            RobotRt& r = robots[i];
            bool updated = false;
            if (sampled[i]) {
                r.belief = update_belief(r.belief, sample_color[i]);
                ++r.ds.o_total;
                r.last_color = sample_color[i];
                updated = true;
            }
            for (const Message& m : inboxes[i]) {
                r.belief = update_belief(r.belief, m.color_bit);
                if (params.count_received) ++r.ds.o_total;
                updated = true;
            }
            inboxes[i].clear();
            if (updated) {
                if (const auto p = cdf_at_theta(r.belief, consts.theta)) {
                    if (update_decision(r.ds, *p, consts)) {
                        trace.decisions.push_back(DecisionEvent{
                            step, i, r.ds.d_f, trace.decision_correct(r.ds.d_f),
                            r.ds.o_total});
                    }
                }
            }
            sampled[i] = 0;
        }

        if (cfg.record_series && step % cfg.series_stride == 0) push_series(step);
    }

    trace.finals.reserve(n);
    for (int i = 0; i < n; ++i) {
        trace.finals.push_back(
            RobotFinal{robots[i].belief, robots[i].ds.d_f, poses[i], robots[i].ds.o_total});
    }
    trace.final_coverage = static_cast<double>(visited.count()) / ArenaPattern::kTileCount;
    return trace;
}

FitnessRecord evaluate_fitness(const SimTrace& trace) {
    const int n = trace.n_robots;
    const double horizon = trace.t_max_seconds();
    FitnessRecord rec;
    rec.f_i.assign(n, 0.0);
    rec.n_events.assign(n, 0);
    rec.final_correct.assign(n, false);
    std::vector<double> sum(n, 0.0);
    for (const DecisionEvent& ev : trace.decisions) {
        sum[ev.robot] += ev.correct ? static_cast<double>(ev.step) * trace.dt : horizon;
        ++rec.n_events[ev.robot];
    }
    for (int i = 0; i < n; ++i) {
        const Decision d = trace.finals[i].d_f;
        rec.final_correct[i] = d != Decision::Undecided && trace.decision_correct(d);
        rec.f_i[i] = (rec.final_correct[i] && rec.n_events[i] > 0)
                         ? sum[i] / rec.n_events[i]
                         : horizon;
        rec.fit += rec.f_i[i];
    }
    return rec;
}

double time_to_consensus_seconds(const SimTrace& trace) {
    std::vector<Decision> cur(trace.n_robots, Decision::Undecided);
    std::size_t k = 0;
    const auto& evs = trace.decisions;
    while (k < evs.size()) {
        const std::int64_t step = evs[k].step;
        for (; k < evs.size() && evs[k].step == step; ++k) cur[evs[k].robot] = evs[k].d;
        bool agreed = cur[0] != Decision::Undecided;
        for (int i = 1; agreed && i < trace.n_robots; ++i) agreed = cur[i] == cur[0];
        if (agreed) return static_cast<double>(step) * trace.dt;
    }
    return -1.0;
}

std::uint64_t batch_run_seed(std::uint64_t base_seed, double fill, int run_index) {
    return fold_words(base_seed, streams::kBatchRun,
                      static_cast<std::uint64_t>(std::llround(fill * 1e9)),
                      static_cast<std::uint64_t>(run_index));
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

BatchResult run_batch(const ParameterSet& params, const SimConfig& base, double fill,
                      int n_runs, std::uint64_t base_seed, int workers) {
    if (n_runs < 1) throw ValidationError("runs must be >= 1");
    params.validate();

    BatchResult out;
    out.fill = fill;
    out.runs.resize(n_runs);
    parallel_for(static_cast<std::size_t>(n_runs), workers, [&](std::size_t idx) {
        RunSummary& rs = out.runs[idx];
        rs.run_index = static_cast<int>(idx);
        rs.fill = fill;
        rs.seed = batch_run_seed(base_seed, fill, rs.run_index);
        SimConfig cfg = base;
        cfg.fill = fill;
        cfg.seed = rs.seed;
        cfg.record_observations = false;
        cfg.record_messages = false;
        cfg.record_series = true;
        try {
            const SimTrace tr = run_simulation(params, cfg);
            rs.actual_fill = tr.actual_fill;
            rs.truth_white = tr.truth_white;
            rs.fitness = evaluate_fitness(tr);
            rs.time_to_consensus_s = time_to_consensus_seconds(tr);
            rs.belief_curve.reserve(tr.series.size());
            rs.coverage_curve.reserve(tr.series.size());
            for (const SeriesSample& s : tr.series) {
                double acc = 0.0;
                for (const RobotSample& r : s.robots) {
                    const double total = r.alpha + r.beta;
                    acc += total > 0.0 ? r.alpha / total : 0.5;
                }
                rs.belief_curve.push_back(acc / static_cast<double>(s.robots.size()));
                rs.coverage_curve.push_back(s.coverage);
            }
        } catch (const std::exception& e) {
            rs.error = e.what();
        }
    });

    std::vector<double> fits;
    const RunSummary* first_ok = nullptr;
    for (const RunSummary& rs : out.runs) {
        if (!rs.error.empty()) {
            out.failed_runs.push_back(rs.run_index);
            continue;
        }
        if (!first_ok) first_ok = &rs;
        fits.push_back(rs.fitness.fit);
    }
    out.median_fit = median(std::move(fits));

    if (first_ok) {
        const std::size_t len = first_ok->belief_curve.size();
        out.time_grid_s.resize(len);
        for (std::size_t k = 0; k < len; ++k) {
            out.time_grid_s[k] =
                base.motion.dt * static_cast<double>(k) * static_cast<double>(base.series_stride);
        }
        out.avg_belief_curve.assign(len, 0.0);
        out.avg_coverage_curve.assign(len, 0.0);
        int ok = 0;
        for (const RunSummary& rs : out.runs) {
            if (!rs.error.empty()) continue;
            ++ok;
            for (std::size_t k = 0; k < len; ++k) {
                out.avg_belief_curve[k] += rs.belief_curve[k];
                out.avg_coverage_curve[k] += rs.coverage_curve[k];
            }
        }
        for (std::size_t k = 0; k < len; ++k) {
            out.avg_belief_curve[k] /= ok;
            out.avg_coverage_curve[k] /= ok;
        }
    }
    return out;
}

}  // namespace swarmsim
