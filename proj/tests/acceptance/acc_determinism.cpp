#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "aoisim/bench.hpp"

using namespace aoisim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// every regular file under root, path-sorted, as (relative path, bytes)
std::vector<std::pair<std::string, std::string>> tree_bytes(const std::string& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file())
      out.emplace_back(fs::relative(entry.path(), root).string(), slurp(entry.path().string()));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

bool acc_determinism() {
  ExperimentPlan plan;
  plan.base = tiny_oracle_config(3, 3, 2, 2, 2, 2);
  plan.base.T_slots = 20;
  plan.base.backhaul_fading = BackhaulFading::Exponential;  // exercise the fading stream too
  plan.devices = {2, 3};
  plan.subcarriers = {2};
  plan.algos = {"greedy", "random", "maddpg"};
  plan.episodes = 3;
  plan.seeds = 2;
  plan.seed0 = 9;
  plan.trainer.iters_per_episode = 20;
  plan.trainer.batch = 16;
  plan.trainer.buffer_capacity = 4000;
  plan.trainer.actor_hidden = {8, 8};
  plan.trainer.critic_hidden = {8, 8};
  plan.trainer.global_critic_hidden = {8, 8};
  plan.write_trace = true;

  // identical plan (manifest included) run twice into the same path
  plan.out_dir = "/tmp/aoisim_acc_det";
  fs::remove_all(plan.out_dir);
  run_plan(plan);
  const auto a = tree_bytes(plan.out_dir);

  fs::remove_all(plan.out_dir);
  run_plan(plan);
  const auto b = tree_bytes(plan.out_dir);

  int mismatches = 0;
  if (a.size() != b.size()) mismatches += 1;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i].first != b[i].first || a[i].second != b[i].second) {
      mismatches += 1;
      std::printf("  determinism: %s differs between reruns\n", a[i].first.c_str());
    }
  }
  std::printf("  determinism: %zu files compared, %d mismatches\n", a.size(), mismatches);

  fs::remove_all(plan.out_dir);
  return mismatches == 0 && !a.empty();
}
