#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aoisim/bench.hpp"
#include "aoisim/csv.hpp"

using namespace aoisim;

namespace {

ScenarioConfig load_scenario(const std::string& path) {
  if (path.empty()) return ScenarioConfig{};
  return ScenarioConfig::load(path);
}

int fail_json(const std::string& what) {
  nlohmann::json err;
  err["error"] = what;
  std::cerr << err.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-hop UAV/MEC age-of-information simulator and experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, plan_path, algo = "greedy", backhaul = "noma";
  int seeds = 1, episodes = 20;
  std::uint64_t seed0 = 1;
  bool no_uav = false, trace = false;
  unsigned threads = 0;
  std::vector<int> device_axis, subcarrier_axis;
  std::vector<std::string> algo_axis, backhaul_axis;

  CLI::App* run = app.add_subcommand("run", "run one configuration across seeds");
  run->add_option("--config", config_path, "scenario config JSON");
  run->add_option("--algo", algo, "maddpg|frl|random|greedy|round_robin")
      ->check(CLI::IsMember({"maddpg", "frl", "random", "greedy", "round_robin"}));
  run->add_option("--seeds", seeds, "number of seeds");
  run->add_option("--seed0", seed0, "first seed");
  run->add_option("--episodes", episodes, "episodes per run");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--backhaul", backhaul, "noma|ofdma")->check(CLI::IsMember({"noma", "ofdma"}));
  run->add_flag("--no-uav", no_uav, "direct device-to-BS variant");
  run->add_flag("--trace", trace, "write per-device AoI traces (heuristic policies)");
  run->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* sweep = app.add_subcommand("sweep", "run a grid of configurations");
  sweep->add_option("--plan", plan_path, "experiment plan JSON (other flags override)");
  sweep->add_option("--config", config_path, "scenario config JSON");
  sweep->add_option("--devices", device_axis, "device-count axis")->delimiter(',');
  sweep->add_option("--subcarriers", subcarrier_axis, "access-subcarrier axis")->delimiter(',');
  sweep->add_option("--algos", algo_axis, "algorithm axis")->delimiter(',');
  sweep->add_option("--backhauls", backhaul_axis, "backhaul axis (noma, ofdma)")->delimiter(',');
  sweep->add_option("--seeds", seeds, "number of seeds");
  sweep->add_option("--seed0", seed0, "first seed");
  sweep->add_option("--episodes", episodes, "episodes per run");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_flag("--no-uav", no_uav, "direct device-to-BS variant");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* oracle = app.add_subcommand("oracle-check", "oracle vs greedy vs random on tiny instances");
  oracle->add_option("--config", config_path, "tiny scenario config JSON (default: built-in)");
  oracle->add_option("--seeds", seeds, "number of instances")->default_val(5);
  oracle->add_option("--seed0", seed0, "first instance seed");
  oracle->add_option("--out", out_dir, "output directory")->required();

  CLI::App* overhead = app.add_subcommand("overhead", "communication-overhead accounting");
  overhead->add_option("--config", config_path, "scenario config JSON");
  overhead->add_option("--out", out_dir, "optional output directory for overhead.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) {
      ExperimentPlan plan;
      plan.base = load_scenario(config_path);
      plan.devices = {plan.base.K};
      plan.subcarriers = {plan.base.F};
      plan.algos = {algo};
      plan.backhauls = {backhaul};
      plan.no_uav = no_uav;
      plan.episodes = episodes;
      plan.seeds = seeds;
      plan.seed0 = seed0;
      plan.out_dir = out_dir;
      plan.write_trace = trace;
      plan.threads = threads;
      run_plan(plan);
      std::cout << "wrote " << out_dir << "\n";
    } else if (app.got_subcommand(sweep)) {
      ExperimentPlan plan;
      if (!plan_path.empty()) {
        std::ifstream in(plan_path);
        if (!in) return fail_json("cannot open plan: " + plan_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        plan = ExperimentPlan::from_json(text);
      } else {
        plan.base = load_scenario(config_path);
        plan.devices = {plan.base.K};
        plan.subcarriers = {plan.base.F};
        plan.algos = {"greedy"};
      }
      if (!config_path.empty() && !plan_path.empty()) plan.base = load_scenario(config_path);
      if (!device_axis.empty()) plan.devices = device_axis;
      if (!subcarrier_axis.empty()) plan.subcarriers = subcarrier_axis;
      if (!algo_axis.empty()) plan.algos = algo_axis;
      if (!backhaul_axis.empty()) plan.backhauls = backhaul_axis;
      if (sweep->count("--seeds")) plan.seeds = seeds;
      if (sweep->count("--seed0")) plan.seed0 = seed0;
      if (sweep->count("--episodes")) plan.episodes = episodes;
      if (sweep->count("--no-uav")) plan.no_uav = no_uav;
      if (sweep->count("--threads")) plan.threads = threads;
      if (!out_dir.empty()) plan.out_dir = out_dir;
      run_plan(plan);
      std::cout << "wrote " << plan.out_dir << "\n";
    } else if (app.got_subcommand(oracle)) {
      std::filesystem::create_directories(out_dir);
      CsvWriter csv(out_dir + "/oracle.csv");
      csv.row({"seed", "horizon", "oracle_objective", "replay_objective", "greedy_objective",
               "random_objective", "replay_exact", "ordered"});
      bool all_ok = true;
      for (int i = 0; i < seeds; ++i) {
        const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
        const ScenarioConfig cfg = config_path.empty()
                                       ? tiny_oracle_config(seed, 2, 2, 2, 2, 2)
                                       : ScenarioConfig::load(config_path);
        const int horizon = std::min(cfg.T_slots, 8);
        const OracleCheckRow row = oracle_check(cfg, horizon);
        csv.row({std::to_string(row.seed), std::to_string(row.horizon),
                 format_double(row.oracle_objective), format_double(row.replay_objective),
                 format_double(row.greedy_objective), format_double(row.random_objective),
                 row.replay_exact ? "1" : "0", row.ordered ? "1" : "0"});
        all_ok = all_ok && row.replay_exact && row.ordered;
        std::cout << "seed " << seed << ": oracle=" << row.oracle_objective
                  << " greedy=" << row.greedy_objective << " random=" << row.random_objective
                  << (row.replay_exact && row.ordered ? " ok" : " MISMATCH") << "\n";
      }
      if (!all_ok) return fail_json("oracle consistency check failed");
    } else if (app.got_subcommand(overhead)) {
      ScenarioConfig cfg = load_scenario(config_path);
      TrainerConfig tcfg;
      nlohmann::json out;
      for (const std::string& fw : {"maddpg", "frl"}) {
        const OverheadReport r = overhead_report(cfg, tcfg, fw);
        nlohmann::json jr;
        jr["formula_bits"] = r.formula_bits;
        jr["formula_bytes"] = r.formula_bytes;
        jr["per_episode_bits"] = r.per_episode_bits;
        jr["per_episode_bytes"] = r.per_episode_bytes;
        jr["actor_params"] = r.actor_params;
        jr["state_u_dim"] = r.state_u_dim;
        jr["state_global_dim"] = r.state_global_dim;
        out[fw] = jr;
      }
      std::cout << out.dump(2) << "\n";
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        CsvWriter csv(out_dir + "/overhead.csv");
        csv.row({"framework", "formula_bits", "per_episode_bits", "actor_params"});
        for (const std::string& fw : {"maddpg", "frl"}) {
          const OverheadReport r = overhead_report(cfg, tcfg, fw);
          csv.row({fw, std::to_string(r.formula_bits), std::to_string(r.per_episode_bits),
                   std::to_string(r.actor_params)});
        }
      }
    }
  } catch (const std::exception& e) {
    return fail_json(e.what());
  }
  return 0;
}
