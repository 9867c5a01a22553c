#include "swarmsim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarmsim/parallel.hpp"
#include "swarmsim/rng.hpp"

namespace swarmsim {

void PsoConfig::validate() const {
    if (n_particles < 1) throw ValidationError("n_particles must be >= 1");
    if (n_iterations < 0) throw ValidationError("n_iterations must be >= 0");
    if (n_noise_evals < 1) throw ValidationError("n_noise_evals must be >= 1");
    if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
    if (ring_k < 1) throw ValidationError("ring_k must be >= 1");
    for (int j = 0; j < kPsoDims; ++j) {
        if (space.lo[j] > space.hi[j]) {
            throw ValidationError("search space has lo > hi");
        }
    }
}

std::array<int, kPsoDims> round_position(const std::array<double, kPsoDims>& x) {
    std::array<int, kPsoDims> out{};
    for (int j = 0; j < kPsoDims; ++j) {
        out[j] = static_cast<int>(std::floor(x[j] + 0.5));
    }
    return out;
}

double aggregate_noisy(const std::vector<double>& samples, double gamma) {
    const std::size_t n = samples.size();
    double mu = 0.0;
    for (double v : samples) mu += v;
    mu /= static_cast<double>(n);
    if (n < 2) return mu;
    double ss = 0.0;
    for (double v : samples) ss += (v - mu) * (v - mu);
    return mu + gamma * std::sqrt(ss / static_cast<double>(n - 1));
}

std::uint64_t eval_seed(std::uint64_t seed, int iteration, int particle, int eval_index) {
    return fold_words(seed, streams::kPsoEval, static_cast<std::uint64_t>(iteration),
                      static_cast<std::uint64_t>(particle),
                      static_cast<std::uint64_t>(eval_index));
}

namespace {

double aggregate_at(const std::array<int, kPsoDims>& xi, const PsoConfig& cfg,
                    const SingleEval& eval, int iteration, int particle, int eval_offset) {
    std::vector<double> samples(cfg.n_noise_evals);
    for (int k = 0; k < cfg.n_noise_evals; ++k) {
        samples[k] = eval(xi, eval_seed(cfg.seed, iteration, particle, eval_offset + k));
    }
    return aggregate_noisy(samples, cfg.gamma);
}

// Noise-penalized aggregate for every particle; the flat (particle, eval)
// job list keeps all workers busy and is order-independent by construction.
std::vector<double> evaluate_swarm(const std::vector<Particle>& swarm, const PsoConfig& cfg,
                                   const SingleEval& eval, int iteration) {
    const int n_p = static_cast<int>(swarm.size());
    const int n_e = cfg.n_noise_evals;
    std::vector<std::array<int, kPsoDims>> xi(n_p);
    for (int p = 0; p < n_p; ++p) xi[p] = round_position(swarm[p].x);
    std::vector<double> samples(static_cast<std::size_t>(n_p) * n_e);
    parallel_for(samples.size(), cfg.workers, [&](std::size_t job) {
        const int p = static_cast<int>(job) / n_e;
        const int k = static_cast<int>(job) % n_e;
        samples[job] = eval(xi[p], eval_seed(cfg.seed, iteration, p, k));
    });
    std::vector<double> agg(n_p);
    std::vector<double> slice(n_e);
    for (int p = 0; p < n_p; ++p) {
        std::copy_n(samples.begin() + static_cast<std::size_t>(p) * n_e, n_e, slice.begin());
        agg[p] = aggregate_noisy(slice, cfg.gamma);
    }
    return agg;
}

int best_neighbor(const std::vector<Particle>& swarm, const PsoConfig& cfg, int i) {
    const int n_p = static_cast<int>(swarm.size());
    if (cfg.topology == Topology::Global) {
        int best = 0;
        for (int p = 1; p < n_p; ++p) {
            if (swarm[p].best_estimate < swarm[best].best_estimate) best = p;
        }
        return best;
    }
    int best = i;
    for (int off = -cfg.ring_k; off <= cfg.ring_k; ++off) {
        const int p = ((i + off) % n_p + n_p) % n_p;
        if (swarm[p].best_estimate < swarm[best].best_estimate ||
            (swarm[p].best_estimate == swarm[best].best_estimate && p < best)) {
            best = p;
        }
    }
    return best;
}

void update_personal_best(Particle& part, double aggregate, bool reevaluate_mode) {
    if (aggregate < part.best_estimate) {
        part.best_x = part.x;
        part.best_estimate = aggregate;
        part.best_eval_count = 1;
        part.best_fitness = reevaluate_mode ? std::min(part.best_fitness, aggregate)
                                            : aggregate;
    }
}

void update_global_best(CampaignState& state) {
    for (const Particle& part : state.swarm) {
        if (part.best_fitness < state.global_best_fitness) {
            state.global_best_fitness = part.best_fitness;
            state.global_best_x = part.best_x;
        }
    }
}

void append_history(CampaignState& state, int iteration, const std::vector<double>& agg) {
    for (int p = 0; p < static_cast<int>(state.swarm.size()); ++p) {
        state.history.push_back(HistoryRow{iteration, p, agg[p],
                                           state.swarm[p].best_fitness,
                                           state.global_best_fitness});
    }
}

}  // namespace

double evaluate_particle(const std::array<double, kPsoDims>& x, const PsoConfig& cfg,
                         const SingleEval& eval, int iteration, int particle) {
    return aggregate_at(round_position(x), cfg, eval, iteration, particle, 0);
}

void pso_step(std::vector<Particle>& swarm, const PsoConfig& cfg, int iteration) {
    const int n_p = static_cast<int>(swarm.size());
    std::vector<std::array<double, kPsoDims>> nb(n_p);
    for (int i = 0; i < n_p; ++i) nb[i] = swarm[best_neighbor(swarm, cfg, i)].best_x;
    for (int i = 0; i < n_p; ++i) {
        Particle& part = swarm[i];
        RngStream rng = derive_stream(cfg.seed, streams::kPsoStep,
                                      static_cast<std::uint64_t>(iteration),
                                      static_cast<std::uint64_t>(i));
        for (int j = 0; j < kPsoDims; ++j) {
            const double r1 = rng.uniform01();
            const double r2 = rng.uniform01();
            part.v[j] = cfg.w * part.v[j] + cfg.w_p * r1 * (part.best_x[j] - part.x[j]) +
                        cfg.w_n * r2 * (nb[i][j] - part.x[j]);
            part.x[j] += part.v[j];
            if (part.x[j] < cfg.space.lo[j]) {
                part.x[j] = cfg.space.lo[j];
                part.v[j] = 0.0;
            } else if (part.x[j] > cfg.space.hi[j]) {
                part.x[j] = cfg.space.hi[j];
                part.v[j] = 0.0;
            }
        }
    }
}

CampaignResult run_campaign(const PsoConfig& cfg, const SingleEval& eval,
                            std::optional<CampaignState> resume,
                            const CheckpointSink& checkpoint) {
    cfg.validate();
    constexpr double kInf = std::numeric_limits<double>::infinity();

    CampaignState state;
    if (resume) {
        state = std::move(*resume);
        if (static_cast<int>(state.swarm.size()) != cfg.n_particles) {
            throw ValidationError("checkpoint particle count does not match n_particles");
        }
    } else {
        state.swarm.resize(cfg.n_particles);
        state.global_best_fitness = kInf;
        for (int p = 0; p < cfg.n_particles; ++p) {
            Particle& part = state.swarm[p];
            if (p == 0 && cfg.use_warm_start) {
                for (int j = 0; j < kPsoDims; ++j) {
                    part.x[j] = std::clamp(cfg.warm_start[j], cfg.space.lo[j], cfg.space.hi[j]);
                }
            } else {
                RngStream rng = derive_stream(cfg.seed, streams::kPsoInit,
                                              static_cast<std::uint64_t>(p));
                for (int j = 0; j < kPsoDims; ++j) {
                    part.x[j] = rng.uniform(cfg.space.lo[j], cfg.space.hi[j]);
                }
            }
            part.v = {};
            part.best_x = part.x;
            part.best_fitness = kInf;
            part.best_estimate = kInf;
        }
        const std::vector<double> agg = evaluate_swarm(state.swarm, cfg, eval, 0);
        for (int p = 0; p < cfg.n_particles; ++p) {
            update_personal_best(state.swarm[p], agg[p], cfg.reevaluate_best);
        }
        update_global_best(state);
        append_history(state, 0, agg);
        state.iterations_done = 0;
        if (checkpoint) checkpoint(state);
    }

    for (int it = state.iterations_done + 1; it <= cfg.n_iterations; ++it) {
        pso_step(state.swarm, cfg, it);
        const std::vector<double> agg = evaluate_swarm(state.swarm, cfg, eval, it);
        if (cfg.reevaluate_best) {
            // Refresh incumbents with eval indices beyond the regular block.
            for (int p = 0; p < cfg.n_particles; ++p) {
                Particle& part = state.swarm[p];
                if (part.best_eval_count == 0) continue;
                const double fresh = aggregate_at(round_position(part.best_x), cfg, eval,
                                                  it, p, cfg.n_noise_evals);
                part.best_estimate =
                    (part.best_estimate * part.best_eval_count + fresh) /
                    (part.best_eval_count + 1);
                ++part.best_eval_count;
                part.best_fitness = std::min(part.best_fitness, part.best_estimate);
            }
        }
        for (int p = 0; p < cfg.n_particles; ++p) {
            update_personal_best(state.swarm[p], agg[p], cfg.reevaluate_best);
        }
        update_global_best(state);
        append_history(state, it, agg);
        state.iterations_done = it;
        if (checkpoint) checkpoint(state);
    }

    CampaignResult result;
    result.best_x = round_position(state.global_best_x);
    result.best_fitness = state.global_best_fitness;
    result.state = std::move(state);
    return result;
}

SingleEval make_simulation_evaluator(ParameterSet base, SimConfig sim) {
    sim.record_observations = false;
    sim.record_messages = false;
    sim.record_series = false;
    return [base, sim](const std::array<int, kPsoDims>& xi, std::uint64_t seed) {
        ParameterSet p = base;
        p.tau = xi[0];
        p.s = xi[1];
        p.d = xi[2];
        p.h = xi[3];
        SimConfig cfg = sim;
        cfg.seed = seed;
        return evaluate_fitness(run_simulation(p, cfg)).fit;
    };
}

}  // namespace swarmsim
