#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "swarmsim/io.hpp"
#include "swarmsim/optimizer.hpp"
#include "swarmsim/presets.hpp"

namespace {

using namespace swarmsim;

const std::vector<std::string> kParamKeys = {"tau",    "s",      "d",
                                             "h",      "pc",     "alpha0",
                                             "beta0",  "feedback", "count_received"};
const std::vector<std::string> kSimKeys = {
    "fill",          "seed",          "robots",          "tmax",         "pause_steps",
    "series_stride", "record_observations", "record_messages", "record_series",
    "broadcast_per_step"};
const std::vector<std::string> kBatchKeys = {"runs", "fills", "workers", "traces"};
const std::vector<std::string> kPsoKeys = {"particles", "iters",  "noise_evals",
                                           "gamma",     "w",      "wp",
                                           "wn",        "topology", "ring_k",
                                           "reevaluate_best", "warm_start", "workers"};

std::vector<std::string> concat(std::initializer_list<const std::vector<std::string>*> lists) {
    std::vector<std::string> out;
    for (const auto* l : lists) out.insert(out.end(), l->begin(), l->end());
    return out;
}

int default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

struct BatchExtras {
    int runs = 100;
    std::vector<double> fills = {0.52};
    int workers = default_workers();
    bool traces = false;
};

void apply_batch_json(const Json& j, BatchExtras& e) {
    fetch(j, "runs", e.runs);
    fetch(j, "fills", e.fills);
    fetch(j, "workers", e.workers);
    fetch(j, "traces", e.traces);
}

Json batch_to_json(const BatchExtras& e) {
    Json j;
    j["runs"] = e.runs;
    j["fills"] = e.fills;
    j["workers"] = e.workers;
    j["traces"] = e.traces;
    return j;
}

struct PsoExtras {
    int particles = 15;
    int iters = 75;
    int noise_evals = 10;
    double gamma = 1.1;
    double w = 0.729;
    double wp = 1.49;
    double wn = 1.49;
    std::string topology = "global";
    int ring_k = 1;
    bool reevaluate_best = false;
    bool warm_start = true;
    int workers = default_workers();
};

void apply_pso_json(const Json& j, PsoExtras& e) {
    fetch(j, "particles", e.particles);
    fetch(j, "iters", e.iters);
    fetch(j, "noise_evals", e.noise_evals);
    fetch(j, "gamma", e.gamma);
    fetch(j, "w", e.w);
    fetch(j, "wp", e.wp);
    fetch(j, "wn", e.wn);
    fetch(j, "topology", e.topology);
    fetch(j, "ring_k", e.ring_k);
    fetch(j, "reevaluate_best", e.reevaluate_best);
    fetch(j, "warm_start", e.warm_start);
    fetch(j, "workers", e.workers);
}

Json pso_to_json(const PsoExtras& e) {
    Json j;
    j["particles"] = e.particles;
    j["iters"] = e.iters;
    j["noise_evals"] = e.noise_evals;
    j["gamma"] = e.gamma;
    j["w"] = e.w;
    j["wp"] = e.wp;
    j["wn"] = e.wn;
    j["topology"] = e.topology;
    j["ring_k"] = e.ring_k;
    j["reevaluate_best"] = e.reevaluate_best;
    j["warm_start"] = e.warm_start;
    j["workers"] = e.workers;
    return j;
}

// Optional-typed flags; only flags the user actually passed override files.
struct ParamFlags {
    std::optional<int> tau, s, d, h;
    std::optional<double> pc;
    std::optional<std::string> feedback;

    void add_to(CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help and exit");
        cmd->add_option("--tau", tau, "walk steps between samples");
        cmd->add_option("--s", s, "max forward-leg length in steps");
        cmd->add_option("--d", d, "avoidance trigger distance in mm");
        cmd->add_option("--h", h, "hysteresis threshold in observations");
        cmd->add_option("--pc", pc, "credibility threshold");
        cmd->add_option("--feedback", feedback, "positive feedback: on or off")
            ->check(CLI::IsMember({"on", "off"}));
    }
    void apply(ParameterSet& p) const {
        if (tau) p.tau = *tau;
        if (s) p.s = *s;
        if (d) p.d = *d;
        if (h) p.h = *h;
        if (pc) p.p_c = *pc;
        if (feedback) p.positive_feedback = *feedback == "on";
    }
};

struct SimFlags {
    std::optional<double> fill;
    std::optional<std::uint64_t> seed;
    std::optional<int> robots;
    std::optional<std::int64_t> tmax;

    void add_to(CLI::App* cmd, bool with_fill = true) {
        if (with_fill) cmd->add_option("--fill", fill, "white tile ratio in [0,1]");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--robots", robots, "number of robots");
        cmd->add_option("--tmax", tmax, "simulation length in steps");
    }
    void apply(SimConfig& c) const {
        if (fill) c.fill = *fill;
        if (seed) c.seed = *seed;
        if (robots) c.n_robots = *robots;
        if (tmax) c.t_max_steps = *tmax;
    }
};

struct FileInputs {
    std::string out_dir;
    std::string config_path;
    std::string params_arg;
    std::string manifest_path;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory")->required();
        cmd->add_option("--config", config_path, "flat JSON config file");
        cmd->add_option("--params", params_arg, "preset name or parameter JSON file");
        cmd->add_option("--manifest", manifest_path, "manifest of a previous run to reproduce");
    }
};

// Applies the layered inputs onto defaults: manifest config, then config
// file, then preset/params file (parameters only), then explicit flags.
template <typename Extras, typename ApplyExtras>
void resolve(const FileInputs& files, const std::string& subcommand,
             const std::vector<std::string>& allowed, const ParamFlags& pflags,
             const SimFlags& sflags, ParameterSet& params, SimConfig& sim, Extras& extras,
             ApplyExtras&& apply_extras) {
    if (files.out_dir.empty()) throw ValidationError("--out must not be empty");
    if (!files.manifest_path.empty()) {
        const Json m = load_json_file(files.manifest_path);
        std::string sub;
        fetch(m, "subcommand", sub);
        if (sub != subcommand) {
            throw ValidationError("manifest subcommand '" + sub + "' does not match '" +
                                  subcommand + "'");
        }
        if (!m.contains("config")) throw ValidationError("manifest has no config block");
        const Json& cfg = m["config"];
        validate_config_keys(cfg, allowed);
        apply_params_json(cfg, params);
        apply_sim_json(cfg, sim);
        apply_extras(cfg, extras);
    }
    if (!files.config_path.empty()) {
        const Json cfg = load_json_file(files.config_path);
        validate_config_keys(cfg, allowed);
        apply_params_json(cfg, params);
        apply_sim_json(cfg, sim);
        apply_extras(cfg, extras);
    }
    if (!files.params_arg.empty()) {
        if (const auto preset = find_preset(files.params_arg)) {
            apply_preset(*preset, params);
        } else {
            const Json pj = load_json_file(files.params_arg);
            std::vector<std::string> keys = kParamKeys;
            keys.push_back("fitness");  // best_params.json carries its score
            validate_config_keys(pj, keys);
            apply_params_json(pj, params);
        }
    }
    pflags.apply(params);
    sflags.apply(sim);
}

struct NoExtras {};
void apply_none(const Json&, NoExtras&) {}

std::string out_path(const std::string& dir, const std::string& name) {
    return dir + "/" + name;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_sim(const FileInputs& files, const ParamFlags& pflags, const SimFlags& sflags) {
    const auto t0 = std::chrono::steady_clock::now();
    ParameterSet params;
    SimConfig sim;
    NoExtras none;
    resolve(files, "sim", concat({&kParamKeys, &kSimKeys}), pflags, sflags, params, sim, none,
            apply_none);
    params.validate();
    sim.validate();

    const SimTrace trace = run_simulation(params, sim);
    const FitnessRecord fit = evaluate_fitness(trace);
    const double consensus = time_to_consensus_seconds(trace);

    write_trace_jsonl(out_path(files.out_dir, "trace.jsonl"), trace, params, fit);
    write_sim_summary_csv(out_path(files.out_dir, "summary.csv"), trace, fit, consensus);

    Json resolved = params_to_json(params);
    resolved.update(sim_to_json(sim));
    write_json_file(out_path(files.out_dir, "manifest.json"),
                    manifest_json("sim", resolved, {"trace.jsonl", "summary.csv"}, {},
                                  seconds_since(t0)));

    std::cout << "fill=" << fmt_double(sim.fill) << " truth="
              << (trace.truth_white ? "white" : "black") << " fit=" << fmt_double(fit.fit)
              << " consensus_s=" << fmt_double(consensus) << "\n";
    return 0;
}

int run_batch_cmd(const FileInputs& files, const ParamFlags& pflags, const SimFlags& sflags,
                  const std::optional<int>& runs_flag,
                  const std::optional<std::vector<double>>& fills_flag,
                  const std::optional<int>& workers_flag, bool traces_flag) {
    const auto t0 = std::chrono::steady_clock::now();
    ParameterSet params;
    SimConfig sim;
    BatchExtras extras;
    resolve(files, "batch", concat({&kParamKeys, &kSimKeys, &kBatchKeys}), pflags, sflags,
            params, sim, extras, apply_batch_json);
    if (runs_flag) extras.runs = *runs_flag;
    if (fills_flag) extras.fills = *fills_flag;
    if (workers_flag) extras.workers = *workers_flag;
    if (traces_flag) extras.traces = true;
    params.validate();
    if (extras.runs < 1) throw ValidationError("runs must be >= 1");
    if (extras.fills.empty()) throw ValidationError("at least one fill is required");

    std::vector<std::string> artifacts;
    std::vector<std::string> failures;
    std::vector<BatchResult> batches;
    for (const double fill : extras.fills) {
        BatchResult b = run_batch(params, sim, fill, extras.runs, sim.seed, extras.workers);
        const std::string tag = fmt_double(fill);
        const std::string dist_name = "dist_fill_" + tag + ".csv";
        const std::string curves_name = "curves_fill_" + tag + ".csv";
        write_batch_dist_csv(out_path(files.out_dir, dist_name), b);
        write_batch_curves_csv(out_path(files.out_dir, curves_name), b);
        artifacts.push_back(dist_name);
        artifacts.push_back(curves_name);
        for (const int idx : b.failed_runs) {
            failures.push_back("fill=" + tag + " run=" + std::to_string(idx) + ": " +
                               b.runs[idx].error);
        }
        if (extras.traces) {
            for (const RunSummary& rs : b.runs) {
                if (!rs.error.empty()) continue;
                SimConfig cfg = sim;
                cfg.fill = fill;
                cfg.seed = rs.seed;
                const SimTrace tr = run_simulation(params, cfg);
                const FitnessRecord f = evaluate_fitness(tr);
                const std::string name =
                    "traces/trace_fill_" + tag + "_run_" + std::to_string(rs.run_index) +
                    ".jsonl";
                write_trace_jsonl(out_path(files.out_dir, name), tr, params, f);
                artifacts.push_back(name);
            }
        }
        std::cout << "fill=" << tag << " runs_ok="
                  << (b.runs.size() - b.failed_runs.size())
                  << " median_fit=" << fmt_double(b.median_fit) << "\n";
        batches.push_back(std::move(b));
    }
    write_batch_medians_csv(out_path(files.out_dir, "medians.csv"), batches);
    artifacts.push_back("medians.csv");

    Json resolved = params_to_json(params);
    resolved.update(sim_to_json(sim));
    resolved.update(batch_to_json(extras));
    write_json_file(out_path(files.out_dir, "manifest.json"),
                    manifest_json("batch", resolved, artifacts, failures, seconds_since(t0)));

    for (const std::string& f : failures) std::cerr << "failed: " << f << "\n";
    return failures.empty() ? 0 : 1;
}

int run_pso(const FileInputs& files, const ParamFlags& pflags, const SimFlags& sflags,
            const std::optional<int>& particles_flag, const std::optional<int>& iters_flag,
            const std::optional<int>& noise_flag, const std::optional<double>& gamma_flag,
            const std::optional<std::string>& topology_flag,
            const std::optional<int>& ring_k_flag, const std::optional<int>& workers_flag,
            const std::string& resume_path) {
    const auto t0 = std::chrono::steady_clock::now();
    ParameterSet params;
    SimConfig sim;
    PsoExtras extras;
    resolve(files, "pso", concat({&kParamKeys, &kSimKeys, &kPsoKeys}), pflags, sflags, params,
            sim, extras, apply_pso_json);
    if (particles_flag) extras.particles = *particles_flag;
    if (iters_flag) extras.iters = *iters_flag;
    if (noise_flag) extras.noise_evals = *noise_flag;
    if (gamma_flag) extras.gamma = *gamma_flag;
    if (topology_flag) extras.topology = *topology_flag;
    if (ring_k_flag) extras.ring_k = *ring_k_flag;
    if (workers_flag) extras.workers = *workers_flag;
    sim.validate();

    PsoConfig pso;
    pso.n_particles = extras.particles;
    pso.n_iterations = extras.iters;
    pso.n_noise_evals = extras.noise_evals;
    pso.gamma = extras.gamma;
    pso.w = extras.w;
    pso.w_p = extras.wp;
    pso.w_n = extras.wn;
    pso.ring_k = extras.ring_k;
    pso.seed = sim.seed;
    pso.workers = extras.workers;
    pso.reevaluate_best = extras.reevaluate_best;
    pso.use_warm_start = extras.warm_start;
    if (extras.topology == "global") {
        pso.topology = Topology::Global;
    } else if (extras.topology == "ring") {
        pso.topology = Topology::Ring;
    } else {
        throw ValidationError("topology must be \"global\" or \"ring\"");
    }
    pso.validate();

    std::optional<CampaignState> resume;
    if (!resume_path.empty()) {
        resume = campaign_state_from_json(load_json_file(resume_path));
    }

    const SingleEval eval = make_simulation_evaluator(params, sim);
    const std::string checkpoint_path = out_path(files.out_dir, "checkpoint.json");
    const CheckpointSink sink = [&](const CampaignState& state) {
        write_json_file(checkpoint_path, campaign_state_to_json(state));
    };
    const CampaignResult result = run_campaign(pso, eval, std::move(resume), sink);

    write_history_csv(out_path(files.out_dir, "history.csv"), result.state.history);
    write_json_file(out_path(files.out_dir, "best_params.json"),
                    best_params_json(params, result.best_x, result.best_fitness));

    Json resolved = params_to_json(params);
    resolved.update(sim_to_json(sim));
    resolved.update(pso_to_json(extras));
    write_json_file(out_path(files.out_dir, "manifest.json"),
                    manifest_json("pso", resolved,
                                  {"history.csv", "best_params.json", "checkpoint.json"}, {},
                                  seconds_since(t0)));

    std::cout << "best tau=" << result.best_x[0] << " s=" << result.best_x[1]
              << " d=" << result.best_x[2] << " h=" << result.best_x[3]
              << " fitness=" << fmt_double(result.best_fitness) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized surface classification simulator"};
    app.require_subcommand(1);
    // --h is a parameter here, so only the long help flag stays
    app.set_help_flag("--help", "print help and exit");

    FileInputs sim_files, batch_files, pso_files;
    ParamFlags sim_pf, batch_pf, pso_pf;
    SimFlags sim_sf, batch_sf, pso_sf;

    CLI::App* sim_cmd = app.add_subcommand("sim", "run one simulation");
    sim_files.add_to(sim_cmd);
    sim_pf.add_to(sim_cmd);
    sim_sf.add_to(sim_cmd);

    CLI::App* batch_cmd = app.add_subcommand("batch", "run replicate batches per fill");
    batch_files.add_to(batch_cmd);
    batch_pf.add_to(batch_cmd);
    batch_sf.add_to(batch_cmd, /*with_fill=*/false);
    std::optional<int> runs_flag, batch_workers_flag;
    std::optional<std::vector<double>> fills_flag;
    bool traces_flag = false;
    batch_cmd->add_option("--runs", runs_flag, "replicates per fill");
    batch_cmd->add_option("--fills", fills_flag, "fill ratios to sweep")->delimiter(',');
    batch_cmd->add_option("--workers", batch_workers_flag, "worker threads");
    batch_cmd->add_flag("--traces", traces_flag, "also write per-run JSONL traces");

    CLI::App* pso_cmd = app.add_subcommand("pso", "optimize tau, s, d, h");
    pso_files.add_to(pso_cmd);
    pso_pf.add_to(pso_cmd);
    pso_sf.add_to(pso_cmd);
    std::optional<int> particles_flag, iters_flag, noise_flag, ring_k_flag, pso_workers_flag;
    std::optional<double> gamma_flag;
    std::optional<std::string> topology_flag;
    std::string resume_path;
    pso_cmd->add_option("--particles", particles_flag, "swarm size");
    pso_cmd->add_option("--iters", iters_flag, "iterations after initialization");
    pso_cmd->add_option("--noise-evals", noise_flag, "evaluations per particle per iteration");
    pso_cmd->add_option("--gamma", gamma_flag, "noise penalty weight");
    pso_cmd->add_option("--topology", topology_flag, "global or ring")
        ->check(CLI::IsMember({"global", "ring"}));
    pso_cmd->add_option("--ring-k", ring_k_flag, "ring neighbors per side");
    pso_cmd->add_option("--workers", pso_workers_flag, "worker threads");
    pso_cmd->add_option("--resume", resume_path, "checkpoint file to continue from");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim_cmd->parsed()) return run_sim(sim_files, sim_pf, sim_sf);
        if (batch_cmd->parsed()) {
            return run_batch_cmd(batch_files, batch_pf, batch_sf, runs_flag, fills_flag,
                                 batch_workers_flag, traces_flag);
        }
        if (pso_cmd->parsed()) {
            return run_pso(pso_files, pso_pf, pso_sf, particles_flag, iters_flag, noise_flag,
                           gamma_flag, topology_flag, ring_k_flag, pso_workers_flag,
                           resume_path);
        }
    } catch (const swarmsim::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
