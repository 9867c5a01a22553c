#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "swarmsim/engine.hpp"

namespace swarmsim {

inline constexpr int kPsoDims = 4;  // tau, s, d, h

struct SearchSpace {
    std::array<double, kPsoDims> lo{56.0, 56.0, 5.0, 0.0};
    std::array<double, kPsoDims> hi{1410.0, 22575.0, 145.0, 128.0};
};

struct Particle {
    std::array<double, kPsoDims> x{};
    std::array<double, kPsoDims> v{};
    std::array<double, kPsoDims> best_x{};
    // Recorded best is non-increasing across iterations; the estimate is the
    // current noisy valuation of best_x (they coincide unless re-evaluation
    // is enabled).
    double best_fitness = 0.0;
    double best_estimate = 0.0;
    int best_eval_count = 0;
};

enum class Topology { Global, Ring };

struct PsoConfig {
    int n_particles = 15;
    int n_iterations = 75;
    int n_noise_evals = 10;
    double w = 0.729;   // inertia
    double w_p = 1.49;  // cognitive weight
    double w_n = 1.49;  // social weight
    double gamma = 1.1; // noise penalty on the spread of repeated evaluations
    Topology topology = Topology::Global;
    int ring_k = 1;  // neighbors per side under Ring
    std::uint64_t seed = 1;
    int workers = 1;
    // When set, each iteration also re-aggregates every incumbent personal
    // best once (fresh seeds) and averages it into the estimate, so lucky
    // draws decay instead of anchoring the swarm.
    bool reevaluate_best = false;
    SearchSpace space{};
    bool use_warm_start = true;
    std::array<double, kPsoDims> warm_start{282.0, 564.0, 50.0, 0.0};

    void validate() const;  // throws ValidationError
};

struct HistoryRow {
    int iteration;  // 0 is the initialization evaluation
    int particle;
    double fitness;        // noise-penalized aggregate at this iteration
    double personal_best;  // recorded best after this iteration
    double global_best;
};

struct CampaignState {
    int iterations_done = 0;  // 0 right after initialization
    std::vector<Particle> swarm;
    std::array<double, kPsoDims> global_best_x{};
    double global_best_fitness = 0.0;
    std::vector<HistoryRow> history;
};

// Objective: one noisy evaluation of an integer parameter vector. The seed
// fully determines the draw.
using SingleEval = std::function<double(const std::array<int, kPsoDims>&, std::uint64_t)>;

using CheckpointSink = std::function<void(const CampaignState&)>;

struct CampaignResult {
    std::array<int, kPsoDims> best_x{};
    double best_fitness = 0.0;
    CampaignState state;
};

// Positions stay continuous inside the optimizer; the objective sees
// half-up rounded integers.
std::array<int, kPsoDims> round_position(const std::array<double, kPsoDims>& x);

// mean + gamma * sample standard deviation (n-1); the mean alone if only one
// sample exists.
double aggregate_noisy(const std::vector<double>& samples, double gamma);

// Seeds derive from (campaign seed, iteration, particle, eval index), so any
// subset of evaluations reproduces identically in any execution order.
std::uint64_t eval_seed(std::uint64_t seed, int iteration, int particle, int eval_index);

double evaluate_particle(const std::array<double, kPsoDims>& x, const PsoConfig& cfg,
                         const SingleEval& eval, int iteration, int particle);

// One velocity/position update for the whole swarm. Out-of-bound coordinates
// clamp to the boundary with the velocity component zeroed.
void pso_step(std::vector<Particle>& swarm, const PsoConfig& cfg, int iteration);

// Full campaign: initialization evaluation (iteration 0), then n_iterations
// move/evaluate rounds. `resume` continues from a checkpoint; `checkpoint`
// is invoked after every completed iteration.
CampaignResult run_campaign(const PsoConfig& cfg, const SingleEval& eval,
                            std::optional<CampaignState> resume = std::nullopt,
                            const CheckpointSink& checkpoint = {});

// Binds the simulator as the objective at the given fill: (tau, s, d, h)
// splice into `base`, one full run per evaluation, fitness as the score.
SingleEval make_simulation_evaluator(ParameterSet base, SimConfig sim);

}  // namespace swarmsim
