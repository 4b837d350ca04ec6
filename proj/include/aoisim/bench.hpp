#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoisim/baselines.hpp"
#include "aoisim/trainer.hpp"

namespace aoisim {

// Communication-overhead accounting for the two learned frameworks.
// formula_bits is the literal per-exchange expression
//   maddpg: 16*(M-1)*|s_u| + 16*M*|S|      (one iteration's exchange)
//   frl:    16*L_pi + 16*M*L_pi            (one aggregation round)
// per_episode_bits amortizes both onto one training episode: the MADDPG
// exchange happens every iteration, the FRL exchange every fed_period-th
// episode.
struct OverheadReport {
  std::string framework;
  long long formula_bits = 0;
  double formula_bytes = 0.0;
  long long per_episode_bits = 0;
  double per_episode_bytes = 0.0;
  long long actor_params = 0;  // L_pi
  int state_u_dim = 0;
  int state_global_dim = 0;
};

long long actor_param_count(const ScenarioConfig& cfg, const TrainerConfig& tcfg);
OverheadReport overhead_report(const ScenarioConfig& cfg, const TrainerConfig& tcfg,
                               const std::string& framework);

struct ParamsReport {
  Trainer::Registry registry;
  bool network_count_ok = false;
};
ParamsReport report_params(const Trainer& trainer);

// Batch experiment plan: the cross product of the sweep axes, each cell run
// once per seed. Axes with a single entry make `run` a special case of
// `sweep`.
struct ExperimentPlan {
  ScenarioConfig base;
  TrainerConfig trainer;
  std::vector<int> devices;                      // K axis
  std::vector<int> subcarriers;                  // F axis
  std::vector<std::string> algos;                // maddpg|frl|random|greedy|round_robin
  std::vector<std::string> backhauls = {"noma"}; // noma|ofdma
  bool no_uav = false;
  int episodes = 20;
  int seeds = 1;
  std::uint64_t seed0 = 1;
  std::string out_dir;
  bool write_trace = false;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
  std::string to_json() const;
  static ExperimentPlan from_json(const std::string& text);
};

// Executes every cell x seed, writes per-run CSV streams, per-cell and
// global summaries, and a manifest. Returns the out directory.
std::string run_plan(const ExperimentPlan& plan);

// Scenario used by the oracle consistency runs: frozen channels, degenerate
// task draws, generous backhaul so the oracle's fixed allocation rule is
// never the binding constraint.
ScenarioConfig tiny_oracle_config(std::uint64_t seed, int devices, int uavs, int subcarriers,
                                  int backhaul_subcarriers, int backhaul_share);

struct OracleCheckRow {
  std::uint64_t seed = 0;
  int horizon = 0;
  double oracle_objective = 0.0;
  double replay_objective = 0.0;
  double greedy_objective = 0.0;
  double random_objective = 0.0;
  bool replay_exact = false;
  bool ordered = false;  // oracle <= greedy <= random
};
OracleCheckRow oracle_check(const ScenarioConfig& cfg, int horizon);

// mean per-episode objective of a heuristic policy on a fixed scenario
double policy_mean_objective(const ScenarioConfig& cfg, const PolicySpec& spec, int episodes);

// 64-bit FNV-1a, used for the manifest's config hash
std::uint64_t fnv1a64(const std::string& text);

}  // namespace aoisim
