#include "doctest.h"

#include <cmath>

#include "aoisim/env.hpp"
#include "aoisim/rng.hpp"

using namespace aoisim;

namespace {

// tiny controlled scenario: everything covered, fixed task sizes, channels
// frozen, every single task feasible in one slot per stage
ScenarioConfig controlled(int K, int M, int F, int L) {
  ScenarioConfig cfg;
  cfg.K = K;
  cfg.M = M;
  cfg.F = F;
  cfg.L = L;
  cfg.L_l = 2;
  cfg.T_slots = 16;
  cfg.area_m = 100.0;
  cfg.h_uav = 50.0;
  cfg.r_max = 200.0;
  cfg.D_min = 2.0;
  cfg.D_range = {160000.0, 160000.0};
  cfg.F_range = {50.0, 50.0};
  cfg.f_uav_max = 1e7;
  cfg.f_bs_max = 1e7;
  cfg.backhaul_fading = BackhaulFading::None;
  cfg.seed = 11;
  return cfg;
}

struct RawActionLocal {
  std::vector<VecX> uav;
  VecX bs;
};

RawActionLocal zeros(const ScenarioConfig& cfg) {
  const EnvLayout lay = layout_of(cfg);
  RawActionLocal r;
  r.uav.assign(static_cast<std::size_t>(cfg.M), VecX::Zero(lay.uav_act_dim()));
  r.bs = VecX::Zero(lay.bs_act_dim());
  return r;
}

}  // namespace

TEST_CASE("fresh world observes zero ages and pure functions repeat") {
  const ScenarioConfig cfg = controlled(3, 2, 2, 2);
  World w = new_scenario(cfg);
  const Observations a = observe(w);
  const Observations b = observe(w);
  CHECK(a.bs == b.bs);
  for (int m = 0; m < cfg.M; ++m) {
    CHECK(a.uav[static_cast<std::size_t>(m)] == b.uav[static_cast<std::size_t>(m)]);
    for (int k = 0; k < cfg.K; ++k)
      CHECK(a.uav[static_cast<std::size_t>(m)][4 + 4 * k] == 0.0);  // age slot
  }
  for (int k = 0; k < cfg.K; ++k) CHECK(a.bs[k] == 0.0);
}

TEST_CASE("devices outside coverage are padded with the sentinel") {
  ScenarioConfig cfg = controlled(2, 1, 1, 1);
  cfg.r_max = 1.0;  // nobody covered (altitude excluded in the flat reading,
                    // horizontal offsets exceed 1 m for the seeded layout)
  World w = new_scenario(cfg);
  const Observations obs = observe(w);
  for (int k = 0; k < cfg.K; ++k)
    for (int i = 0; i < 4; ++i) CHECK(obs.uav[0][4 + 4 * k + i] == -1.0);
}

TEST_CASE("all-zero raw decodes to an empty schedule") {
  const ScenarioConfig cfg = controlled(3, 2, 2, 2);
  World w = new_scenario(cfg);
  const RawActionLocal r = zeros(cfg);
  const JointAction a = decode_actions(w, r.uav, r.bs);
  CHECK(a.access.psi.isZero());
  CHECK(a.zeta.isZero());
  CHECK(a.power.isZero());
  CHECK(a.z.isZero());
  CHECK(a.cpu.phi.isZero());
  CHECK(a.cpu.j.isZero());
  for (const VelocityCmd& v : a.velocity) {
    CHECK(v.vx == doctest::Approx(-cfg.v_max));  // raw 0 maps to full negative
    CHECK(v.vy == doctest::Approx(-cfg.v_max));
  }
}

TEST_CASE("a confident score schedules the device when feasible") {
  const ScenarioConfig cfg = controlled(1, 1, 1, 1);
  World w = new_scenario(cfg);
  RawActionLocal r = zeros(cfg);
  const EnvLayout lay = layout_of(cfg);
  r.uav[0][lay.psi_index(0, 0)] = 0.9;
  r.uav[0][lay.vel_index()] = 0.5;
  r.uav[0][lay.vel_index() + 1] = 0.5;
  const JointAction a = decode_actions(w, r.uav, r.bs);
  CHECK(a.access.at(0, 0, 0) == 1);

  StepResult res = step(w, a);
  CHECK(w.tasks[0].stage == TaskStage::AtUav);
  CHECK(res.metrics.violations == 0);
  CHECK(w.age.deltaM[0] == 1);
}

TEST_CASE("scores below the threshold never schedule") {
  const ScenarioConfig cfg = controlled(1, 1, 1, 1);
  World w = new_scenario(cfg);
  RawActionLocal r = zeros(cfg);
  r.uav[0][layout_of(cfg).psi_index(0, 0)] = 0.49;
  const JointAction a = decode_actions(w, r.uav, r.bs);
  CHECK(a.access.psi.isZero());
}

TEST_CASE("backhaul subcarriers keep the top scores up to L_l") {
  ScenarioConfig cfg = controlled(2, 2, 2, 1);
  cfg.L_l = 1;
  World w = new_scenario(cfg);
  RawActionLocal r = zeros(cfg);
  const EnvLayout lay = layout_of(cfg);
  SUBCASE("higher score wins") {
    r.bs[lay.zeta_index(0, 0)] = 0.7;
    r.bs[lay.zeta_index(1, 0)] = 0.9;
    const JointAction a = decode_actions(w, r.uav, r.bs);
    CHECK(a.zeta(1, 0) == 1);
    CHECK(a.zeta(0, 0) == 0);
  }
  SUBCASE("ties go to the lower index") {
    r.bs[lay.zeta_index(0, 0)] = 0.9;
    r.bs[lay.zeta_index(1, 0)] = 0.9;
    const JointAction a = decode_actions(w, r.uav, r.bs);
    CHECK(a.zeta(0, 0) == 1);
    CHECK(a.zeta(1, 0) == 0);
  }
}

TEST_CASE("NaN in raw actions is rejected") {
  const ScenarioConfig cfg = controlled(1, 1, 1, 1);
  World w = new_scenario(cfg);
  RawActionLocal r = zeros(cfg);
  r.uav[0][0] = std::nan("");
  CHECK_THROWS_AS(decode_actions(w, r.uav, r.bs), std::invalid_argument);
}

TEST_CASE("an idle slot ages the waiting device and penalizes its UAV") {
  ScenarioConfig cfg = controlled(1, 1, 1, 1);
  cfg.k1 = 0.1;
  World w = new_scenario(cfg);
  RawActionLocal r = zeros(cfg);
  for (VecX& v : r.uav) {
    v[layout_of(cfg).vel_index()] = 0.5;
    v[layout_of(cfg).vel_index() + 1] = 0.5;
  }
  const StepResult res = step(w, decode_actions(w, r.uav, r.bs));
  CHECK(w.age.delta0[0] == 1);
  CHECK(res.metrics.reward_uav[0] == doctest::Approx(-0.1));  // k1 * delta0 path
  CHECK(res.metrics.violations == 0);
}

TEST_CASE("UAV reward is -k1 times the served post-slot ages") {
  ScenarioConfig cfg = controlled(1, 1, 1, 1);
  cfg.k1 = 0.1;
  World w = new_scenario(cfg);
  // age the device to 3, then upload: served age next slot is 4
  RawActionLocal idle = zeros(cfg);
  for (VecX& v : idle.uav) {
    v[layout_of(cfg).vel_index()] = 0.5;
    v[layout_of(cfg).vel_index() + 1] = 0.5;
  }
  for (int t = 0; t < 3; ++t) step(w, decode_actions(w, idle.uav, idle.bs));
  CHECK(w.age.delta0[0] == 3);
  RawActionLocal up = idle;
  up.uav[0][layout_of(cfg).psi_index(0, 0)] = 1.0;
  const StepResult res = step(w, decode_actions(w, up.uav, up.bs));
  CHECK(w.age.deltaM[0] == 4);
  CHECK(res.metrics.reward_uav[0] == doctest::Approx(-0.4));
}

TEST_CASE("the unobstructed pipeline takes four stage-slots") {
  const ScenarioConfig cfg = controlled(1, 1, 1, 1);
  World w = new_scenario(cfg);
  const EnvLayout lay = layout_of(cfg);

  auto act = [&](bool upload) {
    RawActionLocal r = zeros(cfg);
    r.uav[0][lay.vel_index()] = 0.5;
    r.uav[0][lay.vel_index() + 1] = 0.5;
    r.uav[0][lay.cpu_index()] = 1.0;
    for (int l = 0; l < cfg.L; ++l) r.uav[0][lay.power_index(l)] = 1.0;
    if (upload) r.uav[0][lay.psi_index(0, 0)] = 1.0;
    r.bs[lay.zeta_index(0, 0)] = 1.0;
    r.bs[lay.bs_cpu_index(0)] = 1.0;
    return r;
  };

  // slot 0: upload
  RawActionLocal r = act(true);
  step(w, decode_actions(w, r.uav, r.bs));
  CHECK(w.tasks[0].stage == TaskStage::AtUav);
  CHECK(w.tasks[0].upload_slot == 0);

  // slot 1: UAV processes (greedy phi decode picks the eligible task)
  r = act(false);
  step(w, decode_actions(w, r.uav, r.bs));
  CHECK(w.tasks[0].uav_process_slot == 1);
  CHECK(w.tasks[0].stage == TaskStage::AtUav);

  // slot 2: forward
  r = act(false);
  step(w, decode_actions(w, r.uav, r.bs));
  CHECK(w.tasks[0].stage == TaskStage::AtBs);
  CHECK(w.tasks[0].forward_slot == 2);
  CHECK(w.age.deltaB[0] == 3);

  // slot 3: BS processes; the task respawns with the final age frozen
  r = act(false);
  const StepResult res = step(w, decode_actions(w, r.uav, r.bs));
  CHECK(res.outcomes[0] == SlotOutcome::Completed);
  CHECK(w.age.deltaB[0] == 3);  // final age = finish slot - t_gen
  CHECK(w.age.delta0[0] == 0);  // respawned task
  CHECK(w.tasks[0].t_gen == 4);
  CHECK(w.tasks[0].stage == TaskStage::AtDevice);
}

TEST_CASE("decoded actions always satisfy the hard constraints") {
  const ScenarioConfig cfg = controlled(4, 3, 2, 2);
  Rng rng(17);
  World w = new_scenario(cfg);
  const EnvLayout lay = layout_of(cfg);
  for (int t = 0; t < 30; ++t) {
    std::vector<VecX> uav(static_cast<std::size_t>(cfg.M), VecX::Zero(lay.uav_act_dim()));
    VecX bs = VecX::Zero(lay.bs_act_dim());
    for (VecX& v : uav)
      for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform();
    for (Index i = 0; i < bs.size(); ++i) bs[i] = rng.uniform();
    const JointAction a = decode_actions(w, uav, bs);

    // one (m, f) slot per device and one device per (m, f)
    for (int k = 0; k < cfg.K; ++k) {
      int assigned = 0;
      for (int m = 0; m < cfg.M; ++m)
        for (int f = 0; f < cfg.F; ++f) assigned += a.access.at(m, k, f);
      CHECK(assigned <= 1);
    }
    for (int m = 0; m < cfg.M; ++m)
      for (int f = 0; f < cfg.F; ++f) {
        int users = 0;
        for (int k = 0; k < cfg.K; ++k) users += a.access.at(m, k, f);
        CHECK(users <= 1);
      }
    // subcarrier sharing cap and power budget
    for (int l = 0; l < cfg.L; ++l) {
      int sharers = 0;
      for (int m = 0; m < cfg.M; ++m) sharers += a.zeta(m, l);
      CHECK(sharers <= cfg.L_l);
    }
    for (int m = 0; m < cfg.M; ++m) {
      double p = 0.0;
      for (int l = 0; l < cfg.L; ++l) p += a.zeta(m, l) ? a.power(m, l) : 0.0;
      CHECK(p <= cfg.P_max * (1.0 + 1e-12));
    }
    double bs_cpu = 0.0;
    for (int m = 0; m < cfg.M; ++m) bs_cpu += a.cpu.f_bs(m);
    CHECK(bs_cpu <= cfg.f_bs_max * (1.0 + 1e-12));

    step(w, a);
  }
}

TEST_CASE("episode return is recomputable from the metrics log") {
  const ScenarioConfig cfg = controlled(3, 2, 2, 2);
  World w = new_scenario(cfg);
  Rng rng(5);
  const EnvLayout lay = layout_of(cfg);
  double total_reward = 0.0;
  double recomputed = 0.0;
  for (int t = 0; t < cfg.T_slots; ++t) {
    std::vector<VecX> uav(static_cast<std::size_t>(cfg.M), VecX::Zero(lay.uav_act_dim()));
    VecX bs = VecX::Zero(lay.bs_act_dim());
    for (VecX& v : uav)
      for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform();
    for (Index i = 0; i < bs.size(); ++i) bs[i] = rng.uniform();
    const StepResult res = step(w, decode_actions(w, uav, bs));

    for (double r : res.metrics.reward_uav) {
      CHECK(r <= 0.0);
      total_reward += r;
    }
    CHECK(res.metrics.reward_bs <= 0.0);
    total_reward += res.metrics.reward_bs;
    recomputed -= cfg.k1 * static_cast<double>(res.metrics.sum_first_hop);
    recomputed -= cfg.k2 * static_cast<double>(res.metrics.sum_dest_age);
    recomputed -= cfg.violation_penalty * res.metrics.violations;
  }
  CHECK(total_reward == doctest::Approx(recomputed).epsilon(1e-9));
}

TEST_CASE("stepping is deterministic for a fixed seed and action stream") {
  const ScenarioConfig cfg = controlled(3, 2, 2, 2);
  auto run = [&] {
    World w = new_scenario(cfg);
    Rng rng(21);
    const EnvLayout lay = layout_of(cfg);
    double sum = 0.0;
    for (int t = 0; t < 12; ++t) {
      std::vector<VecX> uav(static_cast<std::size_t>(cfg.M), VecX::Zero(lay.uav_act_dim()));
      VecX bs = VecX::Zero(lay.bs_act_dim());
      for (VecX& v : uav)
        for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform();
      for (Index i = 0; i < bs.size(); ++i) bs[i] = rng.uniform();
      sum += step(w, decode_actions(w, uav, bs)).metrics.objective;
    }
    return sum;
  };
  CHECK(run() == run());
}

TEST_CASE("the direct variant skips the UAV hop") {
  ScenarioConfig cfg = controlled(2, 1, 2, 1);
  cfg.direct_to_bs = true;
  cfg.M = 0;
  cfg.lambda_k = 0.0;
  cfg.residual_ratio = -1.0;
  World w = new_scenario(cfg);
  const EnvLayout lay = layout_of(cfg);
  VecX raw = VecX::Zero(lay.direct_act_dim());
  raw[cfg.K * cfg.F] = 1.0;  // full CPU
  raw[0 * cfg.F + 0] = 1.0;  // device 0 on subcarrier 0
  step(w, decode_actions_direct(w, raw));
  CHECK(w.tasks[0].stage == TaskStage::AtBs);
  CHECK(w.age.deltaB[0] == 1);
  // next slot: BS processes the prior-slot arrival
  VecX raw2 = VecX::Zero(lay.direct_act_dim());
  raw2[cfg.K * cfg.F] = 1.0;
  const StepResult res = step(w, decode_actions_direct(w, raw2));
  CHECK(res.outcomes[0] == SlotOutcome::Completed);
  CHECK(w.age.deltaB[0] == 1);  // two stage-slots end to end
}
