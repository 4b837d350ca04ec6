#include "doctest.h"

#include "aoisim/baselines.hpp"
#include "aoisim/bench.hpp"

using namespace aoisim;

TEST_CASE("greedy schedules the single waiting task") {
  const ScenarioConfig cfg = tiny_oracle_config(5, 1, 1, 1, 1, 1);
  World w = new_scenario(cfg);
  Policy greedy(PolicySpec{PolicyKind::GreedyMaxAge, 0}, cfg);
  const RawAction raw = greedy.act(w);
  const JointAction a = decode_actions(w, raw.uav, raw.bs);
  CHECK(a.access.at(0, 0, 0) == 1);
}

TEST_CASE("greedy prefers the older task under a one-slot capacity") {
  ScenarioConfig cfg = tiny_oracle_config(6, 2, 1, 1, 1, 1);
  World w = new_scenario(cfg);
  // device 0 waits with age 3, device 1 with age 7 (older generation)
  w.tasks[0].t_gen = 0;
  w.tasks[1].t_gen = 0;
  w.age.delta0[0] = 3;
  w.age.delta0[1] = 7;
  w.tasks[1].t_gen = -4;  // older
  Policy greedy(PolicySpec{PolicyKind::GreedyMaxAge, 0}, cfg);
  const RawAction raw = greedy.act(w);
  const JointAction a = decode_actions(w, raw.uav, raw.bs);
  CHECK(a.access.at(0, 1, 0) == 1);  // the age-7 device wins the only subcarrier
  int total = 0;
  for (int k = 0; k < cfg.K; ++k)
    for (int f = 0; f < cfg.F; ++f) total += a.access.at(0, k, f);
  CHECK(total == 1);
}

TEST_CASE("the random policy replays identically under one seed") {
  const ScenarioConfig cfg = tiny_oracle_config(7, 2, 2, 2, 2, 2);
  World w = new_scenario(cfg);
  Policy a(PolicySpec{PolicyKind::Random, 42}, cfg);
  Policy b(PolicySpec{PolicyKind::Random, 42}, cfg);
  for (int t = 0; t < 5; ++t) {
    const RawAction ra = a.act(w);
    const RawAction rb = b.act(w);
    CHECK(ra.bs == rb.bs);
    for (std::size_t m = 0; m < ra.uav.size(); ++m) CHECK(ra.uav[m] == rb.uav[m]);
  }
  // reset restores the stream
  a.reset();
  Policy c(PolicySpec{PolicyKind::Random, 42}, cfg);
  CHECK(a.act(w).bs == c.act(w).bs);
}

TEST_CASE("greedy never triggers violations on fading-free instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ScenarioConfig cfg = tiny_oracle_config(seed, 3, 2, 2, 2, 2);
    Policy greedy(PolicySpec{PolicyKind::GreedyMaxAge, seed}, cfg);
    std::vector<MetricsRecord> log;
    run_policy_episode(cfg, greedy, 1, &log);
    int violations = 0;
    for (const MetricsRecord& r : log) violations += r.violations;
    CHECK(violations == 0);
  }
}

TEST_CASE("scenario variants flip the intended switches") {
  ScenarioConfig cfg = tiny_oracle_config(1, 2, 2, 2, 2, 2);
  const ScenarioConfig direct = no_uav_scenario(cfg);
  CHECK(direct.direct_to_bs);
  CHECK(direct.M == 0);
  CHECK(direct.lambda_k == 0.0);

  const ScenarioConfig ofdma = ofdma_backhaul_variant(cfg);
  CHECK(ofdma.L_l == 1);
  CHECK(ofdma.L == cfg.L);
}

TEST_CASE("NOMA shares subcarriers that OFDMA cannot") {
  // 4 UAVs with forwardable tasks, 2 subcarriers: L_l=2 schedules all four,
  // L_l=1 schedules two
  for (int share : {2, 1}) {
    ScenarioConfig cfg;
    cfg.K = 4;
    cfg.M = 4;
    cfg.F = 1;
    cfg.L = 2;
    cfg.L_l = share;
    cfg.area_m = 100.0;
    cfg.h_uav = 50.0;
    cfg.r_max = 200.0;
    cfg.D_min = 2.0;
    cfg.D_range = {160000.0, 160000.0};
    cfg.F_range = {50.0, 50.0};
    cfg.residual_ratio = 0.01;
    cfg.backhaul_fading = BackhaulFading::None;
    cfg.seed = 3;
    World w = new_scenario(cfg);
    // put one processed task on every UAV, eligible for forwarding
    for (int k = 0; k < 4; ++k) {
      w.tasks[static_cast<std::size_t>(k)].stage = TaskStage::AtUav;
      w.tasks[static_cast<std::size_t>(k)].holder_uav = k;
      w.tasks[static_cast<std::size_t>(k)].upload_slot = 0;
      w.tasks[static_cast<std::size_t>(k)].uav_process_slot = 1;
    }
    w.slot = 2;
    Policy greedy(PolicySpec{PolicyKind::GreedyMaxAge, 0}, cfg);
    const RawAction raw = greedy.act(w);
    const JointAction a = decode_actions(w, raw.uav, raw.bs);
    int forwarding_uavs = 0;
    for (int m = 0; m < 4; ++m)
      if (a.zeta.row(m).any() && a.z.col(m).any()) forwarding_uavs += 1;
    CHECK(forwarding_uavs == (share == 2 ? 4 : 2));
    for (int l = 0; l < 2; ++l) {
      int sharers = 0;
      for (int m = 0; m < 4; ++m) sharers += a.zeta(m, l);
      CHECK(sharers <= share);
    }
  }
}

TEST_CASE("oracle handles the empty horizon and guards its limits") {
  const ScenarioConfig cfg = tiny_oracle_config(1, 2, 2, 2, 2, 2);
  const OracleResult empty = oracle_schedule(cfg, 0);
  CHECK(empty.objective == 0.0);
  CHECK(empty.schedule.empty());

  ScenarioConfig big = cfg;
  big.K = 4;
  CHECK_THROWS_AS(oracle_schedule(big, 4), std::invalid_argument);
  ScenarioConfig fading = cfg;
  fading.backhaul_fading = BackhaulFading::Exponential;
  CHECK_THROWS_AS(oracle_schedule(fading, 4), std::invalid_argument);
  ScenarioConfig spread = cfg;
  spread.D_range = {100000.0, 200000.0};
  CHECK_THROWS_AS(oracle_schedule(spread, 4), std::invalid_argument);
}

TEST_CASE("the unobstructed oracle pipeline delivers at four stage-slots") {
  // K=1, M=1: upload, process, forward, BS-process in consecutive slots;
  // the delivered age equals finish slot - generation slot = 3
  const ScenarioConfig cfg = tiny_oracle_config(2, 1, 1, 1, 1, 1);
  const OracleResult res = oracle_schedule(cfg, 6);
  World w = new_scenario(cfg);
  int finish = -1;
  for (std::size_t t = 0; t < res.schedule.size(); ++t) {
    const StepResult sr = step(w, res.schedule[t]);
    if (sr.outcomes[0] == SlotOutcome::Completed && finish < 0) finish = static_cast<int>(t);
  }
  CHECK(finish == 3);
  CHECK(w.age.deltaB[0] >= 3);  // frozen final age of the first delivery
}

TEST_CASE("oracle replay matches and dominates the heuristics") {
  const ScenarioConfig cfg = tiny_oracle_config(9, 2, 2, 2, 2, 2);
  const OracleCheckRow row = oracle_check(cfg, 6);
  CHECK(row.replay_exact);
  CHECK(row.ordered);
}
