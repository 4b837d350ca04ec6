#pragma once

#include <string>
#include <vector>

#include "aoisim/env.hpp"
#include "aoisim/fedavg.hpp"
#include "aoisim/net.hpp"
#include "aoisim/replay.hpp"

namespace aoisim {

enum class TrainMode { Maddpg, Frl };

struct TrainerConfig {
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  double gamma = 0.99;
  double tau = 5e-4;
  int batch = 64;
  int episodes = 200;
  int iters_per_episode = 100;
  int policy_delay = 2;          // actor/target updates every d-th iteration
  double noise_sigma0 = 0.3;     // exploration noise, decays linearly
  double noise_sigma_final = 0.12;
  std::size_t buffer_capacity = 100000;
  std::size_t update_warmup = 1000;  // buffered steps before updates begin
  int fed_period = 5;            // E_f, used in Frl mode
  double fed_weight = 0.5;       // mixing self-weight w
  std::vector<int> actor_hidden = {64, 64};
  std::vector<int> critic_hidden = {64, 64};
  std::vector<int> global_critic_hidden = {64, 64};
  Optimizer optimizer = Optimizer::Adam;
  double divergence_bound = 1e8;  // abort if any critic loss exceeds this
  bool randomize_episodes = false;
  std::uint64_t seed = 7;

  void validate() const;
};

struct EpisodeStats {
  int episode = 0;
  double return_total = 0.0;  // summed rewards of all agents over the episode
  double objective = 0.0;     // episode-mean weighted AoI objective
  double mean_delta_m = 0.0;
  double mean_delta_b = 0.0;
  int violations = 0;
};

struct FedEvent {
  int epoch = 0;
  double w = 0.0;
  int period = 0;
  double spread_before = 0.0;
  double spread_after = 0.0;
};

// MADDPG trainer with twin global critics, per-UAV local critics, and an
// optional federated averaging stage over the UAV actors.
class Trainer {
 public:
  Trainer(const ScenarioConfig& scenario, const TrainerConfig& cfg, TrainMode mode);

  // runs the configured number of episodes; returns the learning curve
  std::vector<EpisodeStats> train();

  const std::vector<FedEvent>& fed_events() const { return fed_events_; }
  const std::vector<MetricsRecord>& metrics_log() const { return metrics_log_; }

  struct Registry {
    int uav_agents = 0;
    int global_critics = 0;
    int networks_total = 0;     // actual network instances, targets included
    int networks_expected = 0;  // 2*(n*(1+1) + (G+1)), G = global critic count
    int networks_paper_single_critic = 0;  // same formula at G = 1
    Index uav_actor_params = 0;
    Index bs_actor_params = 0;
    Index local_critic_params = 0;
    Index global_critic_params = 0;
    Index total_params = 0;  // live networks only
  };
  Registry registry() const;

  std::vector<ParamSet> uav_actor_params() const;
  void save_checkpoints(const std::string& dir) const;

  const EnvLayout& layout() const { return layout_; }

 private:
  struct Batch {
    MatX state, action, next_state;
    VecX reward_global;
    MatX reward_local;  // M x batch
  };

  World fresh_world(int episode);
  std::vector<VecX> act_with_noise(const Observations& obs, double sigma);
  VecX concat_state(const Observations& obs) const;
  VecX concat_action(const std::vector<VecX>& uav_raw, const VecX& bs_raw) const;
  Batch gather(const std::vector<std::size_t>& idx) const;
  MatX target_actions(const MatX& next_states) const;
  void update_global_critics(const Batch& batch);
  void update_local_critics_and_actors(const Batch& batch);
  void federated_round(int episode);

  ScenarioConfig scenario_;
  TrainerConfig cfg_;
  TrainMode mode_;
  EnvLayout layout_;
  Rng rng_;

  std::vector<MlpNet> actor_u_, actor_u_target_;
  MlpNet actor_b_, actor_b_target_;
  std::vector<MlpNet> critic_local_, critic_local_target_;
  std::vector<MlpNet> critic_global_, critic_global_target_;

  std::vector<AdamState> opt_actor_u_;
  AdamState opt_actor_b_;
  std::vector<AdamState> opt_critic_local_;
  std::vector<AdamState> opt_critic_global_;

  ReplayBuffer buffer_;
  std::vector<FedEvent> fed_events_;
  std::vector<MetricsRecord> metrics_log_;
  long iter_count_ = 0;
};

}  // namespace aoisim
