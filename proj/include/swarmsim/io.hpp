#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "swarmsim/engine.hpp"
#include "swarmsim/optimizer.hpp"

namespace swarmsim {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

// Shortest round-trip decimal form, identical across runs and platforms.
std::string fmt_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Json load_json_file(const std::string& path);  // ValidationError on bad syntax
void write_json_file(const std::string& path, const Json& j);

// Flat config access. Getters throw ValidationError naming the key when the
// stored type does not match; absent keys leave the fallback untouched.
void fetch(const Json& j, const char* key, int& out);
void fetch(const Json& j, const char* key, double& out);
void fetch(const Json& j, const char* key, bool& out);
void fetch(const Json& j, const char* key, std::uint64_t& out);
void fetch(const Json& j, const char* key, std::string& out);
void fetch(const Json& j, const char* key, std::int64_t& out);
void fetch(const Json& j, const char* key, std::vector<double>& out);

// Rejects keys outside `allowed` so typos fail loudly instead of silently
// falling back to defaults.
void validate_config_keys(const Json& j, const std::vector<std::string>& allowed);

// Parameter block ("tau", "s", "d", "h", "pc", "alpha0", "beta0",
// "feedback" on/off, "count_received").
void apply_params_json(const Json& j, ParameterSet& params);
Json params_to_json(const ParameterSet& params);

// Simulation block ("fill", "seed", "robots", "tmax", "pause_steps",
// "series_stride", record toggles, "broadcast_per_step").
void apply_sim_json(const Json& j, SimConfig& sim);
Json sim_to_json(const SimConfig& sim);

Json manifest_json(const std::string& subcommand, const Json& resolved_config,
                   const std::vector<std::string>& artifacts,
                   const std::vector<std::string>& failed_runs, double wall_seconds);

void write_trace_jsonl(const std::string& path, const SimTrace& trace,
                       const ParameterSet& params, const FitnessRecord& fitness);

void write_sim_summary_csv(const std::string& path, const SimTrace& trace,
                           const FitnessRecord& fitness, double consensus_s);

void write_batch_dist_csv(const std::string& path, const BatchResult& batch);
void write_batch_curves_csv(const std::string& path, const BatchResult& batch);
void write_batch_medians_csv(const std::string& path,
                             const std::vector<BatchResult>& batches);

void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history);

Json campaign_state_to_json(const CampaignState& state);
CampaignState campaign_state_from_json(const Json& j);

Json best_params_json(const ParameterSet& base, const std::array<int, kPsoDims>& x,
                      double fitness);

}  // namespace swarmsim
