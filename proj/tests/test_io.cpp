#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "swarmsim/io.hpp"

using namespace swarmsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("swarmsim_io_" + std::to_string(static_cast<unsigned>(::getpid())));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("fmt_double emits the shortest round-trip form") {
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(0.52) == "0.52");
    CHECK(fmt_double(3600.0) == "3600");
    CHECK(fmt_double(14400.0) == "14400");
    CHECK(fmt_double(0.0) == "0");
    CHECK(fmt_double(-1.25) == "-1.25");
    CHECK(fmt_double(std::nan("")) == "nan");
    CHECK(fmt_double(HUGE_VAL) == "inf");
    CHECK(fmt_double(-HUGE_VAL) == "-inf");
    for (double v : {0.1, 2.216e-4, 1.0 / 3.0, 133.0 / 256.0, 355.56349186104046, 1e300})
        CHECK(std::stod(fmt_double(v)) == v);
}

TEST_CASE("fetch reads typed values and rejects mismatches") {
    const Json j = Json::parse(R"({"a": 3, "b": 0.5, "c": true, "d": "x", "e": [1, 2.5]})");
    int i = -1;
    fetch(j, "a", i);
    CHECK(i == 3);
    double d = 0.0;
    fetch(j, "b", d);
    CHECK(d == 0.5);
    fetch(j, "a", d);  // integers coerce into doubles
    CHECK(d == 3.0);
    bool b = false;
    fetch(j, "c", b);
    CHECK(b);
    std::string s;
    fetch(j, "d", s);
    CHECK(s == "x");
    std::vector<double> v;
    fetch(j, "e", v);
    CHECK(v == std::vector<double>{1.0, 2.5});

    int untouched = 7;
    fetch(j, "missing", untouched);
    CHECK(untouched == 7);

    CHECK_THROWS_WITH_AS(fetch(j, "d", i), doctest::Contains("'d'"), ValidationError);
    CHECK_THROWS_AS(fetch(j, "b", i), ValidationError);       // 0.5 is not an integer
    CHECK_THROWS_AS(fetch(j, "a", b), ValidationError);
    std::uint64_t u = 0;
    const Json neg = Json::parse(R"({"n": -4})");
    CHECK_THROWS_AS(fetch(neg, "n", u), ValidationError);
}

TEST_CASE("unknown config keys fail loudly") {
    const Json j = Json::parse(R"({"tau": 100, "tua": 200})");
    CHECK_THROWS_WITH_AS(validate_config_keys(j, {"tau", "s"}),
                         doctest::Contains("tua"), ValidationError);
    CHECK_NOTHROW(validate_config_keys(Json::parse(R"({"tau": 1})"), {"tau"}));
    CHECK_THROWS_AS(validate_config_keys(Json::parse("[1]"), {"tau"}), ValidationError);
}

TEST_CASE("parameter block round trip") {
    ParameterSet p;
    p.tau = 57;
    p.s = 912;
    p.d = 51;
    p.h = 10;
    p.p_c = 0.97;
    p.alpha0 = 1.0;
    p.beta0 = 2.0;
    p.positive_feedback = true;
    p.count_received = true;

    ParameterSet q;
    apply_params_json(params_to_json(p), q);
    CHECK(q.tau == 57);
    CHECK(q.s == 912);
    CHECK(q.d == 51);
    CHECK(q.h == 10);
    CHECK(q.p_c == 0.97);
    CHECK(q.alpha0 == 1.0);
    CHECK(q.beta0 == 2.0);
    CHECK(q.positive_feedback);
    CHECK(q.count_received);

    CHECK(params_to_json(p)["feedback"] == "on");
    p.positive_feedback = false;
    CHECK(params_to_json(p)["feedback"] == "off");

    ParameterSet r;
    CHECK_THROWS_AS(apply_params_json(Json::parse(R"({"feedback": "maybe"})"), r),
                    ValidationError);
    CHECK_THROWS_AS(apply_params_json(Json::parse(R"({"feedback": true})"), r),
                    ValidationError);
}

TEST_CASE("simulation block round trip") {
    SimConfig s;
    s.fill = 0.7;
    s.seed = 42;
    s.n_robots = 6;
    s.t_max_steps = 9000;
    s.pause_steps = 3;
    s.series_stride = 250;
    s.record_messages = false;
    s.broadcast_per_step = true;

    SimConfig t;
    apply_sim_json(sim_to_json(s), t);
    CHECK(t.fill == 0.7);
    CHECK(t.seed == 42);
    CHECK(t.n_robots == 6);
    CHECK(t.t_max_steps == 9000);
    CHECK(t.pause_steps == 3);
    CHECK(t.series_stride == 250);
    CHECK_FALSE(t.record_messages);
    CHECK(t.record_series);
    CHECK(t.broadcast_per_step);
}

TEST_CASE("json files round trip and bad syntax is a validation error") {
    const fs::path path = temp_dir() / "cfg.json";
    Json j;
    j["x"] = 1.5;
    j["nested"] = Json::array({1, 2, 3});
    write_json_file(path.string(), j);
    const Json back = load_json_file(path.string());
    CHECK(back == j);

    write_text_file((temp_dir() / "bad.json").string(), "{not json");
    CHECK_THROWS_AS(load_json_file((temp_dir() / "bad.json").string()), ValidationError);
    CHECK_THROWS_AS(read_text_file((temp_dir() / "absent.json").string()), ValidationError);
}

TEST_CASE("manifest layout") {
    Json cfg;
    cfg["fill"] = 0.52;
    const Json m = manifest_json("sim", cfg, {"trace.jsonl", "summary.csv"}, {}, 1.25);
    CHECK(m["tool"] == "swarmsim");
    CHECK(m["version"] == kToolVersion);
    CHECK(m["subcommand"] == "sim");
    CHECK(m["config"]["fill"] == 0.52);
    CHECK(m["artifacts"].size() == 2);
    CHECK_FALSE(m.contains("failed_runs"));
    CHECK(m["wall_seconds"] == 1.25);

    const Json f = manifest_json("batch", cfg, {}, {"fill=0.5 run=0: tie"}, 0.1);
    REQUIRE(f.contains("failed_runs"));
    CHECK(f["failed_runs"][0] == "fill=0.5 run=0: tie");
}

TEST_CASE("trace JSONL structure") {
    ParameterSet params;
    params.tau = 100;
    SimConfig cfg;
    cfg.t_max_steps = 500;
    cfg.fill = 0.52;
    cfg.seed = 11;
    const SimTrace tr = run_simulation(params, cfg);
    const FitnessRecord fit = evaluate_fitness(tr);
    const fs::path path = temp_dir() / "trace.jsonl";
    write_trace_jsonl(path.string(), tr, params, fit);

    std::vector<Json> lines;
    std::string text = read_text_file(path.string());
    size_t pos = 0;
    while (pos < text.size()) {
        const size_t nl = text.find('\n', pos);
        lines.push_back(Json::parse(text.substr(pos, nl - pos)));
        pos = nl + 1;
    }
    REQUIRE(lines.size() >= 3);
    CHECK(lines.front()["type"] == "meta");
    CHECK(lines.front()["params"]["tau"] == 100);
    CHECK(lines.front()["truth"].is_string());
    CHECK(lines.back()["type"] == "final");
    CHECK(lines.back()["fit"] == fit.fit);
    REQUIRE(lines.back()["robots"].size() == 4);

    std::int64_t prev_step = -1;
    int n_obs = 0, n_series = 0;
    for (size_t i = 1; i + 1 < lines.size(); ++i) {
        const Json& l = lines[i];
        const std::string type = l["type"];
        CHECK((type == "obs" || type == "msg" || type == "decision" || type == "series"));
        const std::int64_t step = l["step"];
        CHECK(step >= prev_step);
        prev_step = step;
        if (type == "obs") ++n_obs;
        if (type == "series") {
            ++n_series;
            CHECK(l["robots"].size() == 4);
        }
    }
    CHECK(n_obs == static_cast<int>(tr.observations.size()));
    CHECK(n_series == static_cast<int>(tr.series.size()));
}

TEST_CASE("summary and batch CSV shapes") {
    ParameterSet params;
    params.tau = 100;
    SimConfig cfg;
    cfg.t_max_steps = 800;
    cfg.fill = 0.52;
    cfg.seed = 4;
    const SimTrace tr = run_simulation(params, cfg);
    const FitnessRecord fit = evaluate_fitness(tr);

    const fs::path sum = temp_dir() / "summary.csv";
    write_sim_summary_csv(sum.string(), tr, fit, time_to_consensus_seconds(tr));
    const std::string text = read_text_file(sum.string());
    CHECK(count_lines(text) == 2);
    CHECK(text.find("fill,actual_fill,seed,truth,fit,consensus_s,f_0") == 0);
    CHECK(text.find("0.52,") != std::string::npos);

    const BatchResult batch = run_batch(params, cfg, 0.52, 3, 7, 1);
    const fs::path dist = temp_dir() / "dist.csv";
    write_batch_dist_csv(dist.string(), batch);
    const std::string dtext = read_text_file(dist.string());
    CHECK(count_lines(dtext) == 4);  // header + 3 runs
    CHECK(dtext.find("run,seed,actual_fill,truth,fit,consensus_s") == 0);

    const fs::path curves = temp_dir() / "curves.csv";
    write_batch_curves_csv(curves.string(), batch);
    const std::string ctext = read_text_file(curves.string());
    CHECK(count_lines(ctext) == static_cast<int>(batch.time_grid_s.size()) + 1);
    CHECK(ctext.find("time_s,belief,coverage\n0,") == 0);

    const fs::path med = temp_dir() / "medians.csv";
    write_batch_medians_csv(med.string(), {batch});
    const std::string mtext = read_text_file(med.string());
    CHECK(count_lines(mtext) == 2);
    CHECK(mtext.find("fill,runs_ok,median_fit\n0.52,3,") == 0);
}

TEST_CASE("history CSV") {
    std::vector<HistoryRow> rows{{0, 0, 10.5, 10.5, 10.5}, {0, 1, 20.0, 20.0, 10.5}};
    const fs::path path = temp_dir() / "history.csv";
    write_history_csv(path.string(), rows);
    CHECK(read_text_file(path.string()) ==
          "iteration,particle,fitness,personal_best,global_best\n"
          "0,0,10.5,10.5,10.5\n"
          "0,1,20,20,10.5\n");
}

TEST_CASE("campaign state survives the JSON round trip exactly") {
    CampaignState st;
    st.iterations_done = 3;
    st.global_best_fitness = 123.456789012345;
    st.global_best_x = {1.5, 2.5, 3.5, 4.5};
    Particle p;
    p.x = {0.1, 0.2, 0.3, 0.4};
    p.v = {-1.0, 0.0, 1.0, 2.0};
    p.best_x = {10.0, 20.0, 30.0, 40.0};
    p.best_fitness = 99.5;
    p.best_estimate = 101.25;
    p.best_eval_count = 4;
    st.swarm.push_back(p);
    st.history.push_back(HistoryRow{0, 0, 5.5, 5.5, 5.5});
    st.history.push_back(HistoryRow{1, 0, 4.25, 4.25, 4.25});

    const CampaignState back = campaign_state_from_json(campaign_state_to_json(st));
    CHECK(back.iterations_done == 3);
    CHECK(back.global_best_fitness == st.global_best_fitness);
    CHECK(back.global_best_x == st.global_best_x);
    REQUIRE(back.swarm.size() == 1);
    CHECK(back.swarm[0].x == p.x);
    CHECK(back.swarm[0].v == p.v);
    CHECK(back.swarm[0].best_x == p.best_x);
    CHECK(back.swarm[0].best_fitness == p.best_fitness);
    CHECK(back.swarm[0].best_estimate == p.best_estimate);
    CHECK(back.swarm[0].best_eval_count == 4);
    REQUIRE(back.history.size() == 2);
    CHECK(back.history[1].fitness == 4.25);

    Json bad = campaign_state_to_json(st);
    bad["version"] = 2;
    CHECK_THROWS_AS(campaign_state_from_json(bad), ValidationError);
    bad = campaign_state_to_json(st);
    bad.erase("swarm");
    CHECK_THROWS_AS(campaign_state_from_json(bad), ValidationError);
}

TEST_CASE("best parameter export is loadable as a params file") {
    ParameterSet base;
    base.positive_feedback = true;
    const Json j = best_params_json(base, {56, 178, 29, 17}, 315.5);
    CHECK(j["tau"] == 56);
    CHECK(j["s"] == 178);
    CHECK(j["d"] == 29);
    CHECK(j["h"] == 17);
    CHECK(j["feedback"] == "on");
    CHECK(j["fitness"] == 315.5);

    ParameterSet loaded;
    Json params_only = j;
    params_only.erase("fitness");
    apply_params_json(params_only, loaded);
    CHECK(loaded.tau == 56);
    CHECK(loaded.h == 17);
    CHECK(loaded.positive_feedback);
}
