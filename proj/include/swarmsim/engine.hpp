#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/arena.hpp"
#include "swarmsim/comms.hpp"
#include "swarmsim/inference.hpp"
#include "swarmsim/kinematics.hpp"

namespace swarmsim {

// Bad configuration or parameter values. The CLI maps this to a usage error.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Tunable bounds, in sampling cadence steps / walk steps / mm / message count.
struct ParamBound {
    int lo;
    int hi;
};
inline constexpr ParamBound kTauBounds{56, 1410};
inline constexpr ParamBound kSBounds{56, 22575};
inline constexpr ParamBound kDBounds{5, 145};
inline constexpr ParamBound kHBounds{0, 128};

// Per-robot behavioral parameters. tau counts walk steps between samples,
// s is the cap on forward-leg length in steps, d the obstacle trigger
// distance in millimeters, h the hysteresis threshold in observations.
struct ParameterSet {
    double alpha0 = 0.0;
    double beta0 = 0.0;
    int tau = 282;
    int s = 564;
    int d = 50;
    int h = 0;
    double p_c = 0.998;
    bool positive_feedback = false;
    // The hysteresis counter tracks observations the robot makes itself;
    // received colors still update the belief. Set to also count receptions.
    bool count_received = false;

    void validate() const;  // throws ValidationError
};

struct SimConfig {
    int n_robots = 4;
    std::int64_t t_max_steps = 450000;  // 3600 s of 8 ms ticks
    double fill = 0.52;
    std::uint64_t seed = 1;
    int pause_steps = 5;
    std::int64_t series_stride = 125;  // 1 s between series samples
    bool record_observations = true;
    bool record_messages = true;
    bool record_series = true;
    // Rebroadcast the latest payload every step instead of once per sample.
    bool broadcast_per_step = false;
    MotionConfig motion{};

    double t_max_seconds() const { return static_cast<double>(t_max_steps) * motion.dt; }
    void validate() const;  // throws ValidationError
};

struct ObsEvent {
    std::int64_t step;
    int robot;
    int color;
};

struct DeliveryEvent {
    std::int64_t step;
    int sender;
    int recipient;
    int color_bit;
    MessageKind kind;
};

struct DecisionEvent {
    std::int64_t step;
    int robot;
    Decision d;
    bool correct;
    std::int64_t o_total;  // counter value when the switch fired
};

struct RobotSample {
    double alpha;
    double beta;
    int d_f;  // -1 undecided, 0 black, 1 white
    double x;
    double y;
};

struct SeriesSample {
    std::int64_t step;
    double coverage;  // fraction of tiles visited by anyone
    std::vector<RobotSample> robots;
};

struct RobotFinal {
    Belief belief;
    Decision d_f = Decision::Undecided;
    Pose pose;
    std::int64_t o_total = 0;
};

struct SimTrace {
    double nominal_fill = 0.0;
    double actual_fill = 0.0;
    bool truth_white = false;
    std::uint64_t seed = 0;
    std::int64_t t_max_steps = 0;
    double dt = 0.0;
    int n_robots = 0;
    std::vector<DecisionEvent> decisions;
    std::vector<ObsEvent> observations;
    std::vector<DeliveryEvent> deliveries;
    std::vector<SeriesSample> series;
    std::vector<RobotFinal> finals;
    double final_coverage = 0.0;

    double t_max_seconds() const { return static_cast<double>(t_max_steps) * dt; }
    bool decision_correct(Decision d) const {
        return d == (truth_white ? Decision::White : Decision::Black);
    }
};

SimTrace run_simulation(const ParameterSet& params, const SimConfig& cfg);

// Decision-time fitness. Every switch event costs its timestamp if correct
// and the full horizon if wrong; a robot that ends wrong or undecided, or
// never switched at all, scores the full horizon outright.
struct FitnessRecord {
    std::vector<double> f_i;
    std::vector<int> n_events;
    std::vector<bool> final_correct;
    double fit = 0.0;
};
FitnessRecord evaluate_fitness(const SimTrace& trace);

// First second at which every robot holds the same decision; -1 if that
// never happens.
double time_to_consensus_seconds(const SimTrace& trace);

struct RunSummary {
    int run_index = 0;
    double fill = 0.0;
    std::uint64_t seed = 0;
    double actual_fill = 0.0;
    bool truth_white = false;
    FitnessRecord fitness;
    double time_to_consensus_s = -1.0;
    std::vector<double> belief_curve;    // mean posterior estimate per series sample
    std::vector<double> coverage_curve;
    std::string error;  // non-empty when the run failed
};

struct BatchResult {
    double fill = 0.0;
    std::vector<RunSummary> runs;
    double median_fit = 0.0;
    std::vector<double> time_grid_s;
    std::vector<double> avg_belief_curve;
    std::vector<double> avg_coverage_curve;
    std::vector<int> failed_runs;
};

// Runs n_runs independent replicates at one fill ratio. Run seeds derive
// from base_seed, the fill, and the run index, so results do not depend on
// worker count or execution order. Per-run failures are recorded, not thrown.
BatchResult run_batch(const ParameterSet& params, const SimConfig& base, double fill,
                      int n_runs, std::uint64_t base_seed, int workers);

std::uint64_t batch_run_seed(std::uint64_t base_seed, double fill, int run_index);

double median(std::vector<double> values);

}  // namespace swarmsim
