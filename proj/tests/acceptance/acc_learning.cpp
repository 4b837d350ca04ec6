#include <cstdio>
#include <vector>

#include "acceptance.hpp"
#include "aoisim/bench.hpp"

using namespace aoisim;

namespace {

ScenarioConfig toy_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.K = 4;
  cfg.M = 2;
  cfg.F = 2;
  cfg.L = 2;
  cfg.L_l = 2;
  cfg.T_slots = 100;
  cfg.r_max = 300.0;  // full coverage: scheduling is the learnable part
  cfg.seed = seed;
  return cfg;
}

TrainerConfig toy_trainer(std::uint64_t seed) {
  TrainerConfig t;
  t.episodes = 200;
  t.iters_per_episode = 100;
  t.seed = seed;
  return t;
}

// mean objective of the final 20 training episodes
double final_window(const std::vector<EpisodeStats>& curve) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = curve.size() >= 20 ? curve.size() - 20 : 0; i < curve.size(); ++i) {
    sum += curve[i].objective;
    n += 1;
  }
  return sum / n;
}

}  // namespace

bool acc_learning() {
  const std::uint64_t seeds[3] = {1, 2, 3};
  bool all_below = true;
  int frl_wins = 0;

  for (std::uint64_t seed : seeds) {
    const ScenarioConfig cfg = toy_scenario(seed);

    // random-policy reference on the same fixed world
    const double random_mean =
        policy_mean_objective(cfg, PolicySpec{PolicyKind::Random, seed + 900}, 20);

    Trainer maddpg(cfg, toy_trainer(seed + 10), TrainMode::Maddpg);
    const double maddpg_final = final_window(maddpg.train());

    Trainer frl(cfg, toy_trainer(seed + 10), TrainMode::Frl);
    const double frl_final = final_window(frl.train());

    const bool maddpg_ok = maddpg_final <= 0.9 * random_mean;
    const bool frl_ok = frl_final <= 0.9 * random_mean;
    if (frl_final <= maddpg_final) frl_wins += 1;
    all_below = all_below && maddpg_ok && frl_ok;

    std::printf("  learning seed %llu: random=%.4f maddpg=%.4f (%s) frl=%.4f (%s)\n",
                static_cast<unsigned long long>(seed), random_mean, maddpg_final,
                maddpg_ok ? "ok" : "ABOVE 0.9x", frl_final, frl_ok ? "ok" : "ABOVE 0.9x");
  }

  std::printf("  learning: FRL <= MADDPG on %d/3 seeds (need >= 2)\n", frl_wins);
  return all_below && frl_wins >= 2;
}
