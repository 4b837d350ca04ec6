#pragma once

#include <vector>

#include "aoisim/age.hpp"
#include "aoisim/config.hpp"
#include "aoisim/rng.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

enum class TaskStage : std::uint8_t { AtDevice, AtUav, AtBs, Done };

// One computation task. Stages only move forward:
// AtDevice -> AtUav -> AtBs -> Done (the direct-to-BS variant skips AtUav).
struct Task {
  int device = 0;
  double D_bits = 0.0;          // input size [bits]
  double F_cyc_per_bit = 0.0;   // CPU demand [cycles/bit]
  double D_residual_bits = 0.0; // payload forwarded to the BS [bits]
  int t_gen = 0;                // generation slot; schedulable from this slot on
  TaskStage stage = TaskStage::AtDevice;
  int holder_uav = -1;          // UAV holding/having forwarded the task
  int upload_slot = -1;
  int uav_process_slot = -1;
  int forward_slot = -1;
  int finish_slot = -1;

  bool uav_processed() const { return uav_process_slot >= 0; }
};

// Channel snapshot for one slot: access gains from current geometry and
// backhaul |h|^2 of the slot (LoS geometry times, optionally, a per-slot
// unit-mean exponential fading factor).
struct ChannelSnapshot {
  MatX access_gain;   // M x K (or 1 x K in the direct variant, BS as receiver)
  MatX backhaul_h2;   // M x L
  MatX fading;        // M x L factors drawn for this slot (all ones when disabled)
};

// Full simulator state for one episode stream. One World is mutated by
// exactly one driver; run distinct seeded Worlds for parallelism.
struct World {
  ScenarioConfig cfg;
  Rng rng;

  std::vector<Vec2> device_pos;  // static
  std::vector<Vec2> uav_pos;
  std::vector<Vec2> uav_vel;     // displacement applied in the previous slot
  Vec2 bs_pos = Vec2::Zero();

  std::vector<Task> tasks;  // one per device
  AgeState age;
  ChannelSnapshot chan;
  MatX prev_interference;   // M x L, measured at the previous slot's forwards

  // generation slot of each device's last delivered task, -1 before any
  // delivery; drives the destination-freshness term of the BS reward
  std::vector<int> last_delivered_gen;

  int slot = 0;

  explicit World(const ScenarioConfig& c);

  int devices() const { return cfg.K; }
  int uavs() const { return cfg.M; }

  // rebuilds the access-gain part of the snapshot from current positions,
  // keeping this slot's fading factors
  void refresh_channel_geometry();
  // draws the next slot's fading and rebuilds the snapshot
  void advance_channel();

  // live first-hop age of device k (delta0 at the device, deltaM at a UAV,
  // 0 once the task has been forwarded or delivered)
  std::int64_t first_hop_live_age(int k) const;

  // age of the freshest update delivered for device k, as seen at the start
  // of slot t: t minus the generation slot of the last delivered task
  // (t itself before any delivery)
  std::int64_t destination_age(int k, int t) const {
    const int gen = last_delivered_gen[static_cast<std::size_t>(k)];
    return gen < 0 ? t : t - gen;
  }
};

// Builds the initial world: uniform device placement, uniform UAV placement
// under the pairwise spacing constraint (rejection sampling, bounded
// attempts), one fresh task per device, all ages zero.
World new_scenario(const ScenarioConfig& cfg);

// Replaces device k's task with a freshly drawn one generated at slot t.
// Throws std::logic_error if the previous task is still in flight.
Task spawn_task(World& world, int k, int t);

}  // namespace aoisim
