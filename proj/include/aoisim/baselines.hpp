#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aoisim/env.hpp"

namespace aoisim {

enum class PolicyKind { Random, RoundRobin, GreedyMaxAge, NoUav };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Random;
  std::uint64_t seed = 0;  // stream for the random policy

  static PolicySpec parse(const std::string& name, std::uint64_t seed);
};

// Raw actor-style outputs, decodable exactly like learned actions.
struct RawAction {
  std::vector<VecX> uav;
  VecX bs;
};

// Non-learned controllers. Stateless between slots except the round-robin
// cursor and the random stream, both owned per episode (call reset()).
class Policy {
 public:
  Policy(const PolicySpec& spec, const ScenarioConfig& cfg);

  void reset();
  RawAction act(const World& w);

 private:
  RawAction act_random(const World& w);
  RawAction act_round_robin(const World& w);
  RawAction act_greedy(const World& w);
  VecX act_greedy_direct(const World& w);

  PolicySpec spec_;
  ScenarioConfig cfg_;
  EnvLayout lay_;
  Rng rng_;
  int rr_cursor_ = 0;
};

// Scenario variants for the ablations.

// Devices transmit straight to the BS; all processing happens there.
ScenarioConfig no_uav_scenario(const ScenarioConfig& cfg);

// Backhaul restricted to one UAV per subcarrier (no SIC, no co-channel
// interference).
ScenarioConfig ofdma_backhaul_variant(const ScenarioConfig& cfg);

// Exhaustive minimum-objective schedule on a frozen tiny instance.
// Requirements: K <= 3, M <= 2, horizon <= 8, no backhaul fading, and
// degenerate task ranges (D_range/F_range collapsed to a point) so that
// respawned tasks are predictable. UAVs stay put.
struct OracleResult {
  double objective = 0.0;               // episode-mean weighted objective
  std::vector<JointAction> schedule;    // one action per slot
};
OracleResult oracle_schedule(const ScenarioConfig& cfg, int horizon);

// Replays a scripted schedule through the environment; returns the
// episode-mean objective as the metrics stream reports it.
double replay_schedule(const ScenarioConfig& cfg, const std::vector<JointAction>& schedule);

// Runs a heuristic policy for one episode; returns the episode-mean
// objective and optionally appends the metrics stream.
double run_policy_episode(const ScenarioConfig& cfg, Policy& policy, int episode_index,
                          std::vector<MetricsRecord>* log = nullptr);

}  // namespace aoisim
