#include <cstdio>

#include "acceptance.hpp"
#include "aoisim/bench.hpp"

using namespace aoisim;

bool acc_overhead() {
  ScenarioConfig cfg;
  cfg.K = 15;
  cfg.M = 5;
  cfg.F = 4;
  cfg.L = 2;
  TrainerConfig tcfg;

  // hand evaluation of the exchange formulas
  const EnvLayout lay = layout_of(cfg);
  const long long s_u = lay.uav_obs_dim();          // 4 + 4K = 64
  const long long s_all = lay.global_state_dim();   // 5*64 + (15 + 2*5*2) = 355
  const long long l_pi = actor_param_count(cfg, tcfg);
  const long long maddpg_hand = 16 * (5 - 1) * s_u + 16 * 5 * s_all;
  const long long frl_hand = 16 * l_pi + 16 * 5 * l_pi;

  const OverheadReport maddpg = overhead_report(cfg, tcfg, "maddpg");
  const OverheadReport frl = overhead_report(cfg, tcfg, "frl");

  bool ok = true;
  ok = ok && s_u == 64 && s_all == 355;
  ok = ok && maddpg.formula_bits == maddpg_hand;
  ok = ok && frl.formula_bits == frl_hand;
  ok = ok && maddpg.formula_bytes == static_cast<double>(maddpg_hand) / 8.0;
  ok = ok && frl.per_episode_bits == frl_hand / tcfg.fed_period;
  ok = ok && maddpg.per_episode_bits == maddpg_hand * tcfg.iters_per_episode;

  // network-count registry against the closed-form count (a critic+actor
  // pair per UAV agent, the global critic bank plus the BS actor, doubled
  // for targets)
  ScenarioConfig small = cfg;
  small.K = 3;
  small.M = 2;
  small.r_max = 300.0;
  TrainerConfig small_t = tcfg;
  small_t.actor_hidden = {8, 8};
  small_t.critic_hidden = {8, 8};
  small_t.global_critic_hidden = {8, 8};
  Trainer trainer(small, small_t, TrainMode::Maddpg);
  const ParamsReport rep = report_params(trainer);
  const int formula = 2 * (rep.registry.uav_agents * (1 + 1) + (rep.registry.global_critics + 1));
  ok = ok && rep.network_count_ok;
  ok = ok && rep.registry.networks_total == formula;
  ok = ok && rep.registry.networks_total == 4 * small.M + 6;

  // parameter counts cross-checked by shape-table summation
  const EnvLayout slay = layout_of(small);
  long long expect_actor = 0;
  {
    int prev = slay.uav_obs_dim();
    for (int h : small_t.actor_hidden) {
      expect_actor += static_cast<long long>(prev) * h + h;
      prev = h;
    }
    expect_actor += static_cast<long long>(prev) * slay.uav_act_dim() + slay.uav_act_dim();
  }
  ok = ok && rep.registry.uav_actor_params == expect_actor;

  std::printf("  overhead: maddpg=%lld bits, frl=%lld bits (L_pi=%lld), networks=%d "
              "(formula %d), actor params=%lld\n",
              maddpg.formula_bits, frl.formula_bits, l_pi, rep.registry.networks_total, formula,
              static_cast<long long>(rep.registry.uav_actor_params));
  return ok;
}
