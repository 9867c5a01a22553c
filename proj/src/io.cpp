#include "swarmsim/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace swarmsim {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << content;
}

Json load_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

namespace {

const Json* find_key(const Json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

[[noreturn]] void type_error(const char* key, const char* want) {
    throw ValidationError(std::string("config key '") + key + "' must be " + want);
}

}  // namespace

void fetch(const Json& j, const char* key, int& out) {
    if (const Json* v = find_key(j, key)) {
        if (!v->is_number_integer()) type_error(key, "an integer");
        out = v->get<int>();
    }
}

void fetch(const Json& j, const char* key, double& out) {
    if (const Json* v = find_key(j, key)) {
        if (!v->is_number()) type_error(key, "a number");
        out = v->get<double>();
    }
}

void fetch(const Json& j, const char* key, bool& out) {
    if (const Json* v = find_key(j, key)) {
        if (!v->is_boolean()) type_error(key, "a boolean");
        out = v->get<bool>();
    }
}

void fetch(const Json& j, const char* key, std::uint64_t& out) {
    if (const Json* v = find_key(j, key)) {
        if (!v->is_number_unsigned()) type_error(key, "a non-negative integer");
        out = v->get<std::uint64_t>();
    }
}

void fetch(const Json& j, const char* key, std::string& out) {
    if (const Json* v = find_key(j, key)) {
        if (!v->is_string()) type_error(key, "a string");
        out = v->get<std::string>();
    }
}

void fetch(const Json& j, const char* key, std::int64_t& out) {
    if (const Json* v = find_key(j, key)) {
        if (!v->is_number_integer()) type_error(key, "an integer");
        out = v->get<std::int64_t>();
    }
}

void fetch(const Json& j, const char* key, std::vector<double>& out) {
    if (const Json* v = find_key(j, key)) {
        if (!v->is_array()) type_error(key, "an array of numbers");
        std::vector<double> vals;
        for (const Json& e : *v) {
            if (!e.is_number()) type_error(key, "an array of numbers");
            vals.push_back(e.get<double>());
        }
        out = std::move(vals);
    }
}

void validate_config_keys(const Json& j, const std::vector<std::string>& allowed) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const std::string& k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) throw ValidationError("unknown config key '" + item.key() + "'");
    }
}

void apply_params_json(const Json& j, ParameterSet& params) {
    fetch(j, "tau", params.tau);
    fetch(j, "s", params.s);
    fetch(j, "d", params.d);
    fetch(j, "h", params.h);
    fetch(j, "pc", params.p_c);
    fetch(j, "alpha0", params.alpha0);
    fetch(j, "beta0", params.beta0);
    fetch(j, "count_received", params.count_received);
    if (const Json* v = find_key(j, "feedback")) {
        if (!v->is_string()) type_error("feedback", "\"on\" or \"off\"");
        const std::string mode = v->get<std::string>();
        if (mode == "on") {
            params.positive_feedback = true;
        } else if (mode == "off") {
            params.positive_feedback = false;
        } else {
            type_error("feedback", "\"on\" or \"off\"");
        }
    }
}

Json params_to_json(const ParameterSet& params) {
    Json j;
    j["tau"] = params.tau;
    j["s"] = params.s;
    j["d"] = params.d;
    j["h"] = params.h;
    j["pc"] = params.p_c;
    j["alpha0"] = params.alpha0;
    j["beta0"] = params.beta0;
    j["feedback"] = params.positive_feedback ? "on" : "off";
    j["count_received"] = params.count_received;
    return j;
}

void apply_sim_json(const Json& j, SimConfig& sim) {
    fetch(j, "fill", sim.fill);
    fetch(j, "seed", sim.seed);
    fetch(j, "robots", sim.n_robots);
    fetch(j, "tmax", sim.t_max_steps);
    fetch(j, "pause_steps", sim.pause_steps);
    fetch(j, "series_stride", sim.series_stride);
    fetch(j, "record_observations", sim.record_observations);
    fetch(j, "record_messages", sim.record_messages);
    fetch(j, "record_series", sim.record_series);
    fetch(j, "broadcast_per_step", sim.broadcast_per_step);
}

Json sim_to_json(const SimConfig& sim) {
    Json j;
    j["fill"] = sim.fill;
    j["seed"] = sim.seed;
    j["robots"] = sim.n_robots;
    j["tmax"] = sim.t_max_steps;
    j["pause_steps"] = sim.pause_steps;
    j["series_stride"] = sim.series_stride;
    j["record_observations"] = sim.record_observations;
    j["record_messages"] = sim.record_messages;
    j["record_series"] = sim.record_series;
    j["broadcast_per_step"] = sim.broadcast_per_step;
    return j;
}

Json manifest_json(const std::string& subcommand, const Json& resolved_config,
                   const std::vector<std::string>& artifacts,
                   const std::vector<std::string>& failed_runs, double wall_seconds) {
    Json m;
    m["tool"] = "swarmsim";
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["config"] = resolved_config;
    m["artifacts"] = artifacts;
    if (!failed_runs.empty()) m["failed_runs"] = failed_runs;
    m["wall_seconds"] = wall_seconds;
    return m;
}

namespace {

Json robot_sample_row(const RobotSample& r) {
    return Json::array({r.alpha, r.beta, r.d_f, r.x, r.y});
}

const char* truth_name(bool white) { return white ? "white" : "black"; }

}  // namespace

void write_trace_jsonl(const std::string& path, const SimTrace& trace,
                       const ParameterSet& params, const FitnessRecord& fitness) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);

    Json meta;
    meta["type"] = "meta";
    meta["fill"] = trace.nominal_fill;
    meta["actual_fill"] = trace.actual_fill;
    meta["truth"] = truth_name(trace.truth_white);
    meta["seed"] = trace.seed;
    meta["robots"] = trace.n_robots;
    meta["tmax_steps"] = trace.t_max_steps;
    meta["dt"] = trace.dt;
    meta["params"] = params_to_json(params);
    out << meta.dump() << "\n";

    std::size_t io = 0;
    std::size_t im = 0;
    std::size_t id = 0;
    std::size_t is = 0;
    constexpr std::int64_t kDone = std::numeric_limits<std::int64_t>::max();
    for (;;) {
        std::int64_t step = kDone;
        if (io < trace.observations.size()) step = std::min(step, trace.observations[io].step);
        if (im < trace.deliveries.size()) step = std::min(step, trace.deliveries[im].step);
        if (id < trace.decisions.size()) step = std::min(step, trace.decisions[id].step);
        if (is < trace.series.size()) step = std::min(step, trace.series[is].step);
        if (step == kDone) break;

        for (; io < trace.observations.size() && trace.observations[io].step == step; ++io) {
            const ObsEvent& e = trace.observations[io];
            Json line;
            line["type"] = "obs";
            line["step"] = e.step;
            line["robot"] = e.robot;
            line["color"] = e.color;
            out << line.dump() << "\n";
        }
        for (; im < trace.deliveries.size() && trace.deliveries[im].step == step; ++im) {
            const DeliveryEvent& e = trace.deliveries[im];
            Json line;
            line["type"] = "msg";
            line["step"] = e.step;
            line["from"] = e.sender;
            line["to"] = e.recipient;
            line["bit"] = e.color_bit;
            line["kind"] = e.kind == MessageKind::Decision ? "dec" : "obs";
            out << line.dump() << "\n";
        }
        for (; id < trace.decisions.size() && trace.decisions[id].step == step; ++id) {
            const DecisionEvent& e = trace.decisions[id];
            Json line;
            line["type"] = "decision";
            line["step"] = e.step;
            line["robot"] = e.robot;
            line["d"] = static_cast<int>(e.d);
            line["correct"] = e.correct;
            line["o"] = e.o_total;
            out << line.dump() << "\n";
        }
        for (; is < trace.series.size() && trace.series[is].step == step; ++is) {
            const SeriesSample& s = trace.series[is];
            Json line;
            line["type"] = "series";
            line["step"] = s.step;
            line["coverage"] = s.coverage;
            Json robots = Json::array();
            for (const RobotSample& r : s.robots) robots.push_back(robot_sample_row(r));
            line["robots"] = robots;
            out << line.dump() << "\n";
        }
    }

    Json fin;
    fin["type"] = "final";
    fin["step"] = trace.t_max_steps;
    fin["coverage"] = trace.final_coverage;
    Json robots = Json::array();
    for (int i = 0; i < trace.n_robots; ++i) {
        const RobotFinal& f = trace.finals[i];
        robots.push_back(Json::array({f.belief.alpha, f.belief.beta,
                                      static_cast<int>(f.d_f), f.pose.x, f.pose.y}));
    }
    fin["robots"] = robots;
    fin["fit"] = fitness.fit;
    fin["f_i"] = fitness.f_i;
    fin["final_correct"] = fitness.final_correct;
    out << fin.dump() << "\n";
}

void write_sim_summary_csv(const std::string& path, const SimTrace& trace,
                           const FitnessRecord& fitness, double consensus_s) {
    std::string csv = "fill,actual_fill,seed,truth,fit,consensus_s";
    const int n = trace.n_robots;
    for (int i = 0; i < n; ++i) csv += ",f_" + std::to_string(i);
    for (int i = 0; i < n; ++i) csv += ",n_events_" + std::to_string(i);
    for (int i = 0; i < n; ++i) csv += ",final_correct_" + std::to_string(i);
    csv += "\n";
    csv += fmt_double(trace.nominal_fill) + "," + fmt_double(trace.actual_fill) + "," +
           std::to_string(trace.seed) + "," + truth_name(trace.truth_white) + "," +
           fmt_double(fitness.fit) + "," + fmt_double(consensus_s);
    for (int i = 0; i < n; ++i) csv += "," + fmt_double(fitness.f_i[i]);
    for (int i = 0; i < n; ++i) csv += "," + std::to_string(fitness.n_events[i]);
    for (int i = 0; i < n; ++i) csv += fitness.final_correct[i] ? ",1" : ",0";
    csv += "\n";
    write_text_file(path, csv);
}

void write_batch_dist_csv(const std::string& path, const BatchResult& batch) {
    int n = 0;
    for (const RunSummary& rs : batch.runs) {
        if (rs.error.empty()) {
            n = static_cast<int>(rs.fitness.f_i.size());
            break;
        }
    }
    std::string csv = "run,seed,actual_fill,truth,fit,consensus_s";
    for (int i = 0; i < n; ++i) csv += ",f_" + std::to_string(i);
    for (int i = 0; i < n; ++i) csv += ",final_correct_" + std::to_string(i);
    csv += "\n";
    for (const RunSummary& rs : batch.runs) {
        if (!rs.error.empty()) continue;
        csv += std::to_string(rs.run_index) + "," + std::to_string(rs.seed) + "," +
               fmt_double(rs.actual_fill) + "," + truth_name(rs.truth_white) + "," +
               fmt_double(rs.fitness.fit) + "," + fmt_double(rs.time_to_consensus_s);
        for (int i = 0; i < n; ++i) csv += "," + fmt_double(rs.fitness.f_i[i]);
        for (int i = 0; i < n; ++i) csv += rs.fitness.final_correct[i] ? ",1" : ",0";
        csv += "\n";
    }
    write_text_file(path, csv);
}

void write_batch_curves_csv(const std::string& path, const BatchResult& batch) {
    std::string csv = "time_s,belief,coverage\n";
    for (std::size_t k = 0; k < batch.time_grid_s.size(); ++k) {
        csv += fmt_double(batch.time_grid_s[k]) + "," + fmt_double(batch.avg_belief_curve[k]) +
               "," + fmt_double(batch.avg_coverage_curve[k]) + "\n";
    }
    write_text_file(path, csv);
}

void write_batch_medians_csv(const std::string& path,
                             const std::vector<BatchResult>& batches) {
    std::string csv = "fill,runs_ok,median_fit\n";
    for (const BatchResult& b : batches) {
        const int ok = static_cast<int>(b.runs.size() - b.failed_runs.size());
        csv += fmt_double(b.fill) + "," + std::to_string(ok) + "," +
               fmt_double(b.median_fit) + "\n";
    }
    write_text_file(path, csv);
}

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history) {
    std::string csv = "iteration,particle,fitness,personal_best,global_best\n";
    for (const HistoryRow& row : history) {
        csv += std::to_string(row.iteration) + "," + std::to_string(row.particle) + "," +
               fmt_double(row.fitness) + "," + fmt_double(row.personal_best) + "," +
               fmt_double(row.global_best) + "\n";
    }
    write_text_file(path, csv);
}

namespace {

Json dims_to_json(const std::array<double, kPsoDims>& a) {
    return Json::array({a[0], a[1], a[2], a[3]});
}

std::array<double, kPsoDims> dims_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != kPsoDims) {
        throw ValidationError(std::string("checkpoint: ") + what + " must have " +
                              std::to_string(kPsoDims) + " numbers");
    }
    std::array<double, kPsoDims> out{};
    for (int i = 0; i < kPsoDims; ++i) {
        if (!j[i].is_number()) {
            throw ValidationError(std::string("checkpoint: ") + what + " must be numeric");
        }
        out[i] = j[i].get<double>();
    }
    return out;
}

}  // namespace

Json campaign_state_to_json(const CampaignState& state) {
    Json j;
    j["version"] = 1;
    j["iterations_done"] = state.iterations_done;
    j["global_best_fitness"] = state.global_best_fitness;
    j["global_best_x"] = dims_to_json(state.global_best_x);
    Json swarm = Json::array();
    for (const Particle& p : state.swarm) {
        Json part;
        part["x"] = dims_to_json(p.x);
        part["v"] = dims_to_json(p.v);
        part["best_x"] = dims_to_json(p.best_x);
        part["best_fitness"] = p.best_fitness;
        part["best_estimate"] = p.best_estimate;
        part["best_eval_count"] = p.best_eval_count;
        swarm.push_back(part);
    }
    j["swarm"] = swarm;
    Json hist = Json::array();
    for (const HistoryRow& row : state.history) {
        hist.push_back(Json::array(
            {row.iteration, row.particle, row.fitness, row.personal_best, row.global_best}));
    }
    j["history"] = hist;
    return j;
}

CampaignState campaign_state_from_json(const Json& j) {
    int version = 0;
    fetch(j, "version", version);
    if (version != 1) throw ValidationError("checkpoint: unsupported version");
    CampaignState state;
    fetch(j, "iterations_done", state.iterations_done);
    fetch(j, "global_best_fitness", state.global_best_fitness);
    if (!j.contains("swarm") || !j["swarm"].is_array()) {
        throw ValidationError("checkpoint: missing swarm");
    }
    state.global_best_x = dims_from_json(j.at("global_best_x"), "global_best_x");
    for (const Json& part : j["swarm"]) {
        Particle p;
        p.x = dims_from_json(part.at("x"), "x");
        p.v = dims_from_json(part.at("v"), "v");
        p.best_x = dims_from_json(part.at("best_x"), "best_x");
        fetch(part, "best_fitness", p.best_fitness);
        fetch(part, "best_estimate", p.best_estimate);
        fetch(part, "best_eval_count", p.best_eval_count);
        state.swarm.push_back(p);
    }
    if (j.contains("history")) {
        if (!j["history"].is_array()) throw ValidationError("checkpoint: bad history");
        for (const Json& row : j["history"]) {
            if (!row.is_array() || row.size() != 5) {
                throw ValidationError("checkpoint: bad history row");
            }
            state.history.push_back(HistoryRow{row[0].get<int>(), row[1].get<int>(),
                                               row[2].get<double>(), row[3].get<double>(),
                                               row[4].get<double>()});
        }
    }
    return state;
}

Json best_params_json(const ParameterSet& base, const std::array<int, kPsoDims>& x,
                      double fitness) {
    ParameterSet p = base;
    p.tau = x[0];
    p.s = x[1];
    p.d = x[2];
    p.h = x[3];
    Json j = params_to_json(p);
    j["fitness"] = fitness;
    return j;
}

}  // namespace swarmsim
