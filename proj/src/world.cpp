#include "aoisim/world.hpp"

#include <cmath>
#include <stdexcept>

#include "aoisim/radio.hpp"

namespace aoisim {

namespace {

constexpr int kPlacementAttempts = 10000;

double round_bits(double bits) { return std::round(bits); }

Task draw_task(World& w, int k, int t) {
  Task task;
  task.device = k;
  task.D_bits = round_bits(w.rng.uniform(w.cfg.D_range[0], w.cfg.D_range[1]));
  task.F_cyc_per_bit = w.rng.uniform(w.cfg.F_range[0], w.cfg.F_range[1]);
  task.D_residual_bits = round_bits(w.cfg.effective_residual_ratio() * task.D_bits);
  task.t_gen = t;
  task.stage = TaskStage::AtDevice;
  return task;
}

}  // namespace

World::World(const ScenarioConfig& c) : cfg(c), rng(c.seed) {
  bs_pos = Vec2(cfg.area_m / 2.0, cfg.area_m / 2.0);
}

void World::refresh_channel_geometry() {
  const int K = cfg.K;
  if (cfg.direct_to_bs) {
    chan.access_gain.resize(1, K);
    for (int k = 0; k < K; ++k) {
      const Vec2 d = bs_pos - device_pos[static_cast<std::size_t>(k)];
      chan.access_gain(0, k) = access_gain(cfg.beta0, cfg.H_bs, d.x(), d.y());
    }
    chan.backhaul_h2.resize(0, 0);
    return;
  }
  const int M = cfg.M;
  const int L = cfg.L;
  chan.access_gain.resize(M, K);
  chan.backhaul_h2.resize(M, L);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const Vec2 d = uav_pos[static_cast<std::size_t>(m)] - device_pos[static_cast<std::size_t>(k)];
      chan.access_gain(m, k) = access_gain(cfg.beta0, cfg.h_uav, d.x(), d.y());
    }
    const Vec2 d = uav_pos[static_cast<std::size_t>(m)] - bs_pos;
    const double los = access_gain(cfg.beta0, cfg.h_uav - cfg.H_bs, d.x(), d.y());
    for (int l = 0; l < L; ++l) chan.backhaul_h2(m, l) = los * chan.fading(m, l);
  }
}

void World::advance_channel() {
  if (!cfg.direct_to_bs) {
    chan.fading.resize(cfg.M, cfg.L);
    if (cfg.backhaul_fading == BackhaulFading::Exponential) {
      for (int m = 0; m < cfg.M; ++m)
        for (int l = 0; l < cfg.L; ++l) chan.fading(m, l) = rng.exponential();
    } else {
      chan.fading.setOnes();
    }
  }
  refresh_channel_geometry();
}

std::int64_t World::first_hop_live_age(int k) const {
  switch (tasks[static_cast<std::size_t>(k)].stage) {
    case TaskStage::AtDevice:
      return age.delta0[k];
    case TaskStage::AtUav:
      return age.deltaM[k];
    default:
      return 0;
  }
}

World new_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  World w(cfg);

  w.device_pos.reserve(static_cast<std::size_t>(cfg.K));
  for (int k = 0; k < cfg.K; ++k) {
    const double x = w.rng.uniform(0.0, cfg.area_m);
    const double y = w.rng.uniform(0.0, cfg.area_m);
    w.device_pos.emplace_back(x, y);
  }

  w.uav_pos.reserve(static_cast<std::size_t>(cfg.M));
  for (int m = 0; m < cfg.M; ++m) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Vec2 p(w.rng.uniform(0.0, cfg.area_m), w.rng.uniform(0.0, cfg.area_m));
      placed = true;
      for (const Vec2& q : w.uav_pos)
        if ((p - q).norm() < cfg.D_min) {
          placed = false;
          break;
        }
      if (placed) w.uav_pos.push_back(p);
    }
    if (!placed)
      throw ConfigError("UAV placement failed: area too small for M UAVs at D_min spacing");
  }
  w.uav_vel.assign(static_cast<std::size_t>(cfg.M), Vec2::Zero());

  w.tasks.reserve(static_cast<std::size_t>(cfg.K));
  for (int k = 0; k < cfg.K; ++k) w.tasks.push_back(draw_task(w, k, 0));

  w.age = AgeState(cfg.K);
  w.prev_interference = MatX::Zero(cfg.M, cfg.L);
  w.last_delivered_gen.assign(static_cast<std::size_t>(cfg.K), -1);
  w.advance_channel();
  return w;
}

Task spawn_task(World& world, int k, int t) {
  Task& current = world.tasks[static_cast<std::size_t>(k)];
  if (current.stage != TaskStage::Done)
    throw std::logic_error("spawn_task: device still has a task in flight");
  current = draw_task(world, k, t);
  world.age.reset_device(k);
  return current;
}

}  // namespace aoisim
