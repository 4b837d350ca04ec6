#pragma once

#include <vector>

#include "aoisim/compute.hpp"
#include "aoisim/kinematics.hpp"
#include "aoisim/radio.hpp"
#include "aoisim/world.hpp"

namespace aoisim {

// Vector layouts for the agents' observation/action interfaces. Raw actor
// outputs live in [0,1]^dim; the decoder turns them into feasible schedules.
//
// UAV m action:  [ psi scores K*F (k-major) | cpu 1 | power L | velocity 2 ]
// BS action:     [ zeta scores M*L (m-major) | cpu shares M ]
// direct action: [ psi scores K*F | cpu 1 ]  (no-UAV variant, BS receives)
struct EnvLayout {
  int K = 0, M = 0, F = 0, L = 0;
  bool direct = false;

  int uav_obs_dim() const { return 4 + 4 * K; }
  int bs_obs_dim() const { return K + 2 * M * L; }
  int uav_act_dim() const { return K * F + L + 3; }
  int bs_act_dim() const { return M * L + M; }
  int direct_obs_dim() const { return 3 * K; }
  int direct_act_dim() const { return K * F + 1; }

  // concatenated "whole state/action" widths used by the global critics
  int global_state_dim() const {
    return direct ? direct_obs_dim() : M * uav_obs_dim() + bs_obs_dim();
  }
  int global_action_dim() const {
    return direct ? direct_act_dim() : M * uav_act_dim() + bs_act_dim();
  }

  int psi_index(int k, int f) const { return k * F + f; }
  int cpu_index() const { return K * F; }
  int power_index(int l) const { return K * F + 1 + l; }
  int vel_index() const { return K * F + 1 + L; }
  int zeta_index(int m, int l) const { return m * L + l; }
  int bs_cpu_index(int m) const { return M * L + m; }
};

EnvLayout layout_of(const ScenarioConfig& cfg);

// Immutable per-slot observation snapshot.
struct Observations {
  std::vector<VecX> uav;  // one vector per UAV agent
  VecX bs;
};

// Fully decoded scheduling decision for one slot. All hard constraints
// (subcarrier exclusivity, power budget, CPU budgets) hold by construction;
// time feasibility is re-checked against post-move channels at execution.
struct JointAction {
  std::vector<VelocityCmd> velocity;  // per UAV
  AccessAssignment access;            // psi
  MatB zeta;                          // M x L
  MatX power;                         // M x L [W]
  CpuAllocation cpu;                  // f_uav, f_bs, phi, j
  MatB z;                             // K x M forwarding selector

  JointAction() = default;
  JointAction(int M, int K, int F, int L)
      : velocity(static_cast<std::size_t>(std::max(M, 0))),
        access(std::max(M, 1), K, F),
        zeta(MatB::Zero(M, L)),
        power(MatX::Zero(M, L)),
        cpu(std::max(M, 1), K),
        z(MatB::Zero(K, std::max(M, 1))) {}
};

// One CSV row of the metrics stream.
struct MetricsRecord {
  int episode = 0;
  int slot = 0;
  double mean_delta_m = 0.0;    // stored UAV-hop counter, mean over devices
  double mean_delta_b = 0.0;    // stored BS-hop counter, mean over devices
  double objective = 0.0;       // k1*mean(first-hop live) + k2*mean(deltaB)
  std::vector<double> reward_uav;
  double reward_bs = 0.0;
  int violations = 0;
  double bytes_overhead = 0.0;
  // raw sums for exact recomputation of returns from the log
  std::int64_t sum_first_hop = 0;
  std::int64_t sum_delta_b = 0;
  std::int64_t sum_dest_age = 0;  // destination freshness driving the BS reward
};

struct StepResult {
  MetricsRecord metrics;
  std::vector<SlotOutcome> outcomes;  // per device, as fed to the age tick
};

// Deterministic observation of the current slot (ages are the values
// computed at the previous slot's edge; channels are this slot's snapshot).
Observations observe(const World& w);

// Decodes raw [0,1] actor outputs into a feasible JointAction against the
// current (pre-move) world. Throws std::invalid_argument on NaN input or
// size mismatch.
JointAction decode_actions(const World& w, const std::vector<VecX>& uav_raw,
                           const VecX& bs_raw);

// Direct-to-BS variant decoder (single agent).
JointAction decode_actions_direct(const World& w, const VecX& raw);

// Advances the world by one slot. Effects in order: move, channel refresh,
// uploads, UAV processing, forwards, BS processing, age tick, respawns.
StepResult step(World& w, const JointAction& a);

// Normalization helpers shared by observe() and the heuristic policies.
double gain_to_unit(const ScenarioConfig& cfg, double gain);
double age_to_unit(const ScenarioConfig& cfg, std::int64_t age);

}  // namespace aoisim
