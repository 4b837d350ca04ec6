#include "aoisim/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoisim {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double interf_to_unit(const ScenarioConfig& cfg, double interference) {
  return clamp01(std::log2(1.0 + interference / cfg.noise_power) / 32.0);
}

void check_raw(const VecX& v, Index expect, const char* who) {
  if (v.size() != expect) throw std::invalid_argument(std::string(who) + ": raw size mismatch");
  if (v.hasNaN()) throw std::invalid_argument(std::string(who) + ": NaN in raw action");
}

// oldest task first: earlier generation slot, then lower device index
struct OlderFirst {
  const World& w;
  bool operator()(int ka, int kb) const {
    const Task& a = w.tasks[static_cast<std::size_t>(ka)];
    const Task& b = w.tasks[static_cast<std::size_t>(kb)];
    if (a.t_gen != b.t_gen) return a.t_gen < b.t_gen;
    return ka < kb;
  }
};

// greedy prefix of `sorted` whose summed weight stays within budget;
// everything else is dropped (counted by the caller as violations)
std::vector<int> pack_within(const std::vector<int>& sorted,
                             const std::vector<double>& weight, double budget) {
  std::vector<int> kept;
  double used = 0.0;
  for (int k : sorted) {
    const double wgt = weight[static_cast<std::size_t>(k)];
    if (used + wgt <= budget) {
      used += wgt;
      kept.push_back(k);
    }
  }
  return kept;
}

}  // namespace

EnvLayout layout_of(const ScenarioConfig& cfg) {
  EnvLayout lay;
  lay.K = cfg.K;
  lay.M = cfg.M;
  lay.F = cfg.F;
  lay.L = cfg.L;
  lay.direct = cfg.direct_to_bs;
  return lay;
}

double gain_to_unit(const ScenarioConfig& cfg, double gain) {
  const double h_ref = std::max(cfg.h_uav, cfg.H_bs);
  const double hi = 10.0 * std::log10(cfg.beta0);
  const double lo =
      10.0 * std::log10(cfg.beta0 / (h_ref * h_ref + 2.0 * cfg.area_m * cfg.area_m + 1.0));
  if (gain <= 0.0) return -1.0;
  const double db = 10.0 * std::log10(gain);
  return std::clamp(2.0 * (db - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

double age_to_unit(const ScenarioConfig& cfg, std::int64_t age) {
  return std::min(static_cast<double>(age) / static_cast<double>(cfg.T_slots), 1.0);
}

Observations observe(const World& w) {
  const ScenarioConfig& cfg = w.cfg;
  const EnvLayout lay = layout_of(cfg);
  Observations obs;

  if (cfg.direct_to_bs) {
    obs.bs.resize(lay.direct_obs_dim());
    for (int k = 0; k < cfg.K; ++k) {
      obs.bs[3 * k + 0] = age_to_unit(cfg, w.first_hop_live_age(k));
      obs.bs[3 * k + 1] = gain_to_unit(cfg, w.chan.access_gain(0, k));
      obs.bs[3 * k + 2] = age_to_unit(cfg, w.age.deltaB[k]);
    }
    return obs;
  }

  obs.uav.resize(static_cast<std::size_t>(cfg.M));
  for (int m = 0; m < cfg.M; ++m) {
    VecX& v = obs.uav[static_cast<std::size_t>(m)];
    v.resize(lay.uav_obs_dim());
    const Vec2& p = w.uav_pos[static_cast<std::size_t>(m)];
    v[0] = p.x() / cfg.area_m;
    v[1] = p.y() / cfg.area_m;
    v[2] = w.uav_vel[static_cast<std::size_t>(m)].x() / cfg.v_max;
    v[3] = w.uav_vel[static_cast<std::size_t>(m)].y() / cfg.v_max;
    for (int k = 0; k < cfg.K; ++k) {
      double* slot = v.data() + 4 + 4 * k;
      const Vec2& q = w.device_pos[static_cast<std::size_t>(k)];
      if (in_coverage(p, cfg.h_uav, q, cfg.r_max, cfg.coverage_3d)) {
        slot[0] = age_to_unit(cfg, w.first_hop_live_age(k));
        slot[1] = gain_to_unit(cfg, w.chan.access_gain(m, k));
        slot[2] = (q.x() - p.x()) / cfg.area_m;
        slot[3] = (q.y() - p.y()) / cfg.area_m;
      } else {
        slot[0] = slot[1] = slot[2] = slot[3] = -1.0;
      }
    }
  }

  obs.bs.resize(lay.bs_obs_dim());
  for (int k = 0; k < cfg.K; ++k) obs.bs[k] = age_to_unit(cfg, w.age.deltaB[k]);
  for (int m = 0; m < cfg.M; ++m)
    for (int l = 0; l < cfg.L; ++l) {
      obs.bs[cfg.K + 2 * (m * cfg.L + l) + 0] = gain_to_unit(cfg, w.chan.backhaul_h2(m, l));
      obs.bs[cfg.K + 2 * (m * cfg.L + l) + 1] = interf_to_unit(cfg, w.prev_interference(m, l));
    }
  return obs;
}

namespace {

// shared by both decoders: greedy CPU/forward selections
void decode_phi(const World& w, JointAction& a) {
  const double slot_ms = w.cfg.slot_ms;
  for (int m = 0; m < w.cfg.M; ++m) {
    std::vector<int> eligible;
    for (int k = 0; k < w.cfg.K; ++k) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      if (t.stage == TaskStage::AtUav && t.holder_uav == m && !t.uav_processed() &&
          t.upload_slot < w.slot)
        eligible.push_back(k);
    }
    std::sort(eligible.begin(), eligible.end(), OlderFirst{w});
    std::vector<double> cycles(static_cast<std::size_t>(w.cfg.K), 0.0);
    for (int k : eligible) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      cycles[static_cast<std::size_t>(k)] = uav_task_cycles(w.cfg.lambda_k, t.D_bits, t.F_cyc_per_bit);
    }
    for (int k : pack_within(eligible, cycles, a.cpu.f_uav(m) * slot_ms)) a.cpu.phi(m, k) = 1;
  }
}

void decode_z(const World& w, JointAction& a) {
  const double slot_ms = w.cfg.slot_ms;
  BackhaulAssignment ba(w.cfg.M, w.cfg.L, w.cfg.K);
  ba.zeta = a.zeta;
  ba.power = a.power;
  ba.h2 = w.chan.backhaul_h2;
  for (int m = 0; m < w.cfg.M; ++m) {
    if (!a.zeta.row(m).any()) continue;
    const double rate = backhaul_sum_rate<double>(ba, m, w.cfg.noise_power,
                                                  w.cfg.backhaul_bits_per_ms(),
                                                  w.cfg.sic_literal_power);
    if (rate <= 0.0) continue;
    std::vector<int> eligible;
    for (int k = 0; k < w.cfg.K; ++k) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      if (t.stage == TaskStage::AtUav && t.holder_uav == m && t.uav_processed() &&
          t.uav_process_slot < w.slot)
        eligible.push_back(k);
    }
    std::sort(eligible.begin(), eligible.end(), OlderFirst{w});
    std::vector<double> payload(static_cast<std::size_t>(w.cfg.K), 0.0);
    for (int k : eligible)
      payload[static_cast<std::size_t>(k)] = w.tasks[static_cast<std::size_t>(k)].D_residual_bits;
    for (int k : pack_within(eligible, payload, rate * slot_ms)) a.z(k, m) = 1;
  }
}

void decode_j(const World& w, JointAction& a) {
  const double slot_ms = w.cfg.slot_ms;
  const int holders = w.cfg.direct_to_bs ? 1 : w.cfg.M;
  for (int m = 0; m < holders; ++m) {
    std::vector<int> eligible;
    for (int k = 0; k < w.cfg.K; ++k) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      const int arrival = w.cfg.direct_to_bs ? t.upload_slot : t.forward_slot;
      if (t.stage == TaskStage::AtBs && t.holder_uav == (w.cfg.direct_to_bs ? -1 : m) &&
          arrival >= 0 && arrival < w.slot)
        eligible.push_back(k);
    }
    std::sort(eligible.begin(), eligible.end(), OlderFirst{w});
    std::vector<double> cycles(static_cast<std::size_t>(w.cfg.K), 0.0);
    for (int k : eligible) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      const double lam = w.cfg.direct_to_bs ? 0.0 : w.cfg.lambda_k;
      cycles[static_cast<std::size_t>(k)] = bs_task_cycles(lam, t.D_bits, t.F_cyc_per_bit);
    }
    for (int k : pack_within(eligible, cycles, a.cpu.f_bs(m) * slot_ms)) a.cpu.j(k, m) = 1;
  }
}

}  // namespace

JointAction decode_actions(const World& w, const std::vector<VecX>& uav_raw,
                           const VecX& bs_raw) {
  const ScenarioConfig& cfg = w.cfg;
  if (cfg.direct_to_bs)
    throw std::invalid_argument("decode_actions: world runs the direct variant");
  const EnvLayout lay = layout_of(cfg);
  if (static_cast<int>(uav_raw.size()) != cfg.M)
    throw std::invalid_argument("decode_actions: one raw vector per UAV required");
  for (const VecX& v : uav_raw) check_raw(v, lay.uav_act_dim(), "decode_actions(uav)");
  check_raw(bs_raw, lay.bs_act_dim(), "decode_actions(bs)");

  JointAction a(cfg.M, cfg.K, cfg.F, cfg.L);

  for (int m = 0; m < cfg.M; ++m) {
    const VecX& v = uav_raw[static_cast<std::size_t>(m)];
    a.velocity[static_cast<std::size_t>(m)].vx = (2.0 * clamp01(v[lay.vel_index()]) - 1.0) * cfg.v_max;
    a.velocity[static_cast<std::size_t>(m)].vy =
        (2.0 * clamp01(v[lay.vel_index() + 1]) - 1.0) * cfg.v_max;
    a.cpu.f_uav(m) = clamp01(v[lay.cpu_index()]) * cfg.f_uav_max;
  }

  // psi: per device (ascending), best scoring in-coverage (m, f) still free
  std::vector<std::vector<bool>> taken(static_cast<std::size_t>(cfg.M),
                                       std::vector<bool>(static_cast<std::size_t>(cfg.F), false));
  for (int k = 0; k < cfg.K; ++k) {
    const Task& t = w.tasks[static_cast<std::size_t>(k)];
    if (t.stage != TaskStage::AtDevice || t.t_gen > w.slot) continue;
    int best_m = -1, best_f = -1;
    double best_score = 0.0;
    for (int m = 0; m < cfg.M; ++m) {
      if (!in_coverage(w.uav_pos[static_cast<std::size_t>(m)], cfg.h_uav,
                       w.device_pos[static_cast<std::size_t>(k)], cfg.r_max, cfg.coverage_3d))
        continue;
      const VecX& v = uav_raw[static_cast<std::size_t>(m)];
      for (int f = 0; f < cfg.F; ++f) {
        if (taken[static_cast<std::size_t>(m)][static_cast<std::size_t>(f)]) continue;
        const double s = clamp01(v[lay.psi_index(k, f)]);
        if (s < 0.5 || s <= best_score) continue;
        best_score = s;
        best_m = m;
        best_f = f;
      }
    }
    if (best_m >= 0) {
      a.access.at(best_m, k, best_f) = 1;
      taken[static_cast<std::size_t>(best_m)][static_cast<std::size_t>(best_f)] = true;
    }
  }

  // zeta: per subcarrier keep the top-L_l scores >= 0.5 (ties favor lower index)
  for (int l = 0; l < cfg.L; ++l) {
    std::vector<std::pair<double, int>> cand;
    for (int m = 0; m < cfg.M; ++m) {
      const double s = clamp01(bs_raw[lay.zeta_index(m, l)]);
      if (s >= 0.5) cand.emplace_back(s, m);
    }
    std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    for (std::size_t i = 0; i < cand.size() && i < static_cast<std::size_t>(cfg.L_l); ++i)
      a.zeta(cand[i].second, l) = 1;
  }

  // powers: scaled to [0, P_max], then renormalized onto the budget
  for (int m = 0; m < cfg.M; ++m) {
    const VecX& v = uav_raw[static_cast<std::size_t>(m)];
    double sum = 0.0;
    for (int l = 0; l < cfg.L; ++l) {
      a.power(m, l) = a.zeta(m, l) ? clamp01(v[lay.power_index(l)]) * cfg.P_max : 0.0;
      sum += a.power(m, l);
    }
    if (sum > cfg.P_max) a.power.row(m) *= cfg.P_max / sum;
  }

  // BS CPU shares renormalized onto the budget
  double share_sum = 0.0;
  for (int m = 0; m < cfg.M; ++m) {
    a.cpu.f_bs(m) = clamp01(bs_raw[lay.bs_cpu_index(m)]) * cfg.f_bs_max;
    share_sum += a.cpu.f_bs(m);
  }
  if (share_sum > cfg.f_bs_max) a.cpu.f_bs *= cfg.f_bs_max / share_sum;

  decode_phi(w, a);
  decode_z(w, a);
  decode_j(w, a);
  return a;
}

JointAction decode_actions_direct(const World& w, const VecX& raw) {
  const ScenarioConfig& cfg = w.cfg;
  if (!cfg.direct_to_bs)
    throw std::invalid_argument("decode_actions_direct: world runs the two-hop variant");
  const EnvLayout lay = layout_of(cfg);
  check_raw(raw, lay.direct_act_dim(), "decode_actions_direct");

  JointAction a(0, cfg.K, cfg.F, std::max(cfg.L, 1));
  a.cpu.f_bs(0) = clamp01(raw[cfg.K * cfg.F]) * cfg.f_bs_max;

  std::vector<bool> taken(static_cast<std::size_t>(cfg.F), false);
  for (int k = 0; k < cfg.K; ++k) {
    const Task& t = w.tasks[static_cast<std::size_t>(k)];
    if (t.stage != TaskStage::AtDevice || t.t_gen > w.slot) continue;
    int best_f = -1;
    double best_score = 0.0;
    for (int f = 0; f < cfg.F; ++f) {
      if (taken[static_cast<std::size_t>(f)]) continue;
      const double s = clamp01(raw[k * cfg.F + f]);
      if (s < 0.5 || s <= best_score) continue;
      best_score = s;
      best_f = f;
    }
    if (best_f >= 0) {
      a.access.at(0, k, best_f) = 1;
      taken[static_cast<std::size_t>(best_f)] = true;
    }
  }

  decode_j(w, a);
  return a;
}

namespace {

struct SlotEffects {
  std::vector<SlotOutcome> outcomes;
  std::vector<int> violations_uav;
  int violations_bs = 0;
};

void run_uploads(World& w, const JointAction& a, SlotEffects& fx) {
  const ScenarioConfig& cfg = w.cfg;
  const int M = cfg.direct_to_bs ? 1 : cfg.M;
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < cfg.K; ++k)
      for (int f = 0; f < cfg.F; ++f) {
        if (!a.access.at(m, k, f)) continue;
        Task& t = w.tasks[static_cast<std::size_t>(k)];
        auto violate = [&] {
          if (cfg.direct_to_bs)
            fx.violations_bs += 1;
          else
            fx.violations_uav[static_cast<std::size_t>(m)] += 1;
        };
        if (t.stage != TaskStage::AtDevice || t.t_gen > w.slot) {
          violate();
          continue;
        }
        if (!cfg.direct_to_bs &&
            !in_coverage(w.uav_pos[static_cast<std::size_t>(m)], cfg.h_uav,
                         w.device_pos[static_cast<std::size_t>(k)], cfg.r_max, cfg.coverage_3d)) {
          violate();
          continue;
        }
        const double rate = access_rate(w.chan.access_gain(m, k), cfg.rho_dev, cfg.noise_power,
                                        cfg.bandwidth_bits_per_ms());
        const double time = upload_time(t.D_bits, true, rate);
        if (time > cfg.slot_ms) {
          violate();
          continue;
        }
        t.upload_slot = w.slot;
        if (cfg.direct_to_bs) {
          t.stage = TaskStage::AtBs;
          fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::UploadedDirect;
        } else {
          t.stage = TaskStage::AtUav;
          t.holder_uav = m;
          fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::Uploaded;
        }
      }
}

void run_uav_processing(World& w, const JointAction& a, SlotEffects& fx) {
  const ScenarioConfig& cfg = w.cfg;
  for (int m = 0; m < cfg.M; ++m) {
    std::vector<int> selected;
    for (int k = 0; k < cfg.K; ++k) {
      if (!a.cpu.phi(m, k)) continue;
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      if (t.stage != TaskStage::AtUav || t.holder_uav != m || t.uav_processed() ||
          t.upload_slot >= w.slot) {
        fx.violations_uav[static_cast<std::size_t>(m)] += 1;
        continue;
      }
      selected.push_back(k);
    }
    std::sort(selected.begin(), selected.end(), OlderFirst{w});
    std::vector<double> cycles(static_cast<std::size_t>(cfg.K), 0.0);
    for (int k : selected) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      cycles[static_cast<std::size_t>(k)] = uav_task_cycles(cfg.lambda_k, t.D_bits, t.F_cyc_per_bit);
    }
    const std::vector<int> kept = pack_within(selected, cycles, a.cpu.f_uav(m) * cfg.slot_ms);
    fx.violations_uav[static_cast<std::size_t>(m)] +=
        static_cast<int>(selected.size() - kept.size());
    for (int k : kept) w.tasks[static_cast<std::size_t>(k)].uav_process_slot = w.slot;
  }
}

void run_forwards(World& w, const JointAction& a, SlotEffects& fx) {
  const ScenarioConfig& cfg = w.cfg;
  BackhaulAssignment ba(cfg.M, cfg.L, cfg.K);
  ba.zeta = a.zeta;
  ba.power = a.power;
  ba.h2 = w.chan.backhaul_h2;
  ba.z = a.z;

  // interference measured at this slot's allocation, observed next slot
  w.prev_interference.setZero();
  for (int m = 0; m < cfg.M; ++m)
    for (int l = 0; l < cfg.L; ++l) {
      if (!ba.zeta(m, l)) continue;
      double interference = 0.0;
      for (int mp = 0; mp < cfg.M; ++mp) {
        if (mp == m || !ba.zeta(mp, l)) continue;
        if (sic_decoded_before(ba.h2(mp, l), mp, ba.h2(m, l), m)) continue;
        interference += ba.h2(mp, l) * (cfg.sic_literal_power ? ba.power(m, l) : ba.power(mp, l));
      }
      w.prev_interference(m, l) = interference;
    }

  for (int m = 0; m < cfg.M; ++m) {
    std::vector<int> selected;
    for (int k = 0; k < cfg.K; ++k) {
      if (!a.z(k, m)) continue;
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      if (t.stage != TaskStage::AtUav || t.holder_uav != m || !t.uav_processed() ||
          t.uav_process_slot >= w.slot) {
        fx.violations_bs += 1;
        continue;
      }
      selected.push_back(k);
    }
    if (selected.empty()) continue;
    const double rate = backhaul_sum_rate<double>(ba, m, cfg.noise_power,
                                                  cfg.backhaul_bits_per_ms(),
                                                  cfg.sic_literal_power);
    if (!a.zeta.row(m).any() || rate <= 0.0) {
      fx.violations_bs += static_cast<int>(selected.size());
      continue;
    }
    std::sort(selected.begin(), selected.end(), OlderFirst{w});
    std::vector<double> payload(static_cast<std::size_t>(cfg.K), 0.0);
    for (int k : selected)
      payload[static_cast<std::size_t>(k)] = w.tasks[static_cast<std::size_t>(k)].D_residual_bits;
    const std::vector<int> kept = pack_within(selected, payload, rate * cfg.slot_ms);
    fx.violations_bs += static_cast<int>(selected.size() - kept.size());
    for (int k : kept) {
      Task& t = w.tasks[static_cast<std::size_t>(k)];
      t.stage = TaskStage::AtBs;
      t.forward_slot = w.slot;
      fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::Forwarded;
    }
  }
}

void run_bs_processing(World& w, const JointAction& a, SlotEffects& fx) {
  const ScenarioConfig& cfg = w.cfg;
  const int holders = cfg.direct_to_bs ? 1 : cfg.M;
  for (int m = 0; m < holders; ++m) {
    std::vector<int> selected;
    for (int k = 0; k < cfg.K; ++k) {
      if (!a.cpu.j(k, m)) continue;
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      const int arrival = cfg.direct_to_bs ? t.upload_slot : t.forward_slot;
      const int expected_holder = cfg.direct_to_bs ? -1 : m;
      if (t.stage != TaskStage::AtBs || t.holder_uav != expected_holder || arrival < 0 ||
          arrival >= w.slot) {
        fx.violations_bs += 1;
        continue;
      }
      selected.push_back(k);
    }
    std::sort(selected.begin(), selected.end(), OlderFirst{w});
    std::vector<double> cycles(static_cast<std::size_t>(cfg.K), 0.0);
    for (int k : selected) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      const double lam = cfg.direct_to_bs ? 0.0 : cfg.lambda_k;
      cycles[static_cast<std::size_t>(k)] = bs_task_cycles(lam, t.D_bits, t.F_cyc_per_bit);
    }
    const std::vector<int> kept = pack_within(selected, cycles, a.cpu.f_bs(m) * cfg.slot_ms);
    fx.violations_bs += static_cast<int>(selected.size() - kept.size());
    for (int k : kept) {
      Task& t = w.tasks[static_cast<std::size_t>(k)];
      t.stage = TaskStage::Done;
      t.finish_slot = w.slot;
      fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::Completed;
    }
  }
}

}  // namespace

StepResult step(World& w, const JointAction& a) {
  const ScenarioConfig& cfg = w.cfg;
  SlotEffects fx;
  fx.outcomes.assign(static_cast<std::size_t>(cfg.K), SlotOutcome::Idle);
  fx.violations_uav.assign(static_cast<std::size_t>(std::max(cfg.M, 0)), 0);

  // (1) move, (2) refresh channel geometry
  if (!cfg.direct_to_bs && cfg.M > 0) {
    const MoveResult mv = apply_move(w.uav_pos, a.velocity, cfg.v_max, cfg.area_m, cfg.D_min);
    for (int m = 0; m < cfg.M; ++m)
      if (mv.held[static_cast<std::size_t>(m)]) fx.violations_uav[static_cast<std::size_t>(m)] += 1;
    w.uav_pos = mv.positions;
    w.uav_vel = mv.applied;
    w.refresh_channel_geometry();
  }

  // default outcomes from the stage each task holds entering the slot
  for (int k = 0; k < cfg.K; ++k) {
    switch (w.tasks[static_cast<std::size_t>(k)].stage) {
      case TaskStage::AtDevice:
        fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::HeldAtDevice;
        break;
      case TaskStage::AtUav:
        fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::HeldAtUav;
        break;
      case TaskStage::AtBs:
        fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::HeldAtBs;
        break;
      case TaskStage::Done:
        fx.outcomes[static_cast<std::size_t>(k)] = SlotOutcome::Idle;
        break;
    }
  }

  // (3)-(6) pipeline stages
  run_uploads(w, a, fx);
  if (!cfg.direct_to_bs) {
    run_uav_processing(w, a, fx);
    run_forwards(w, a, fx);
  }
  run_bs_processing(w, a, fx);

  // (7) age tick
  w.age = tick(w.age, fx.outcomes, w.slot);

  // (8) respawn tasks delivered this slot; the new task is schedulable from
  // the next slot on
  for (int k = 0; k < cfg.K; ++k)
    if (fx.outcomes[static_cast<std::size_t>(k)] == SlotOutcome::Completed) {
      w.last_delivered_gen[static_cast<std::size_t>(k)] =
          w.tasks[static_cast<std::size_t>(k)].t_gen;
      spawn_task(w, k, w.slot + 1);
    }

  // rewards and per-slot metrics over the post-tick ages
  StepResult res;
  res.outcomes = fx.outcomes;
  MetricsRecord& rec = res.metrics;
  rec.slot = w.slot;
  rec.reward_uav.assign(static_cast<std::size_t>(std::max(cfg.M, 0)), 0.0);

  std::int64_t sum_m = 0, sum_b = 0, sum_first = 0, sum_dest = 0;
  for (int k = 0; k < cfg.K; ++k) {
    sum_m += w.age.deltaM[k];
    sum_b += w.age.deltaB[k];
    sum_first += w.first_hop_live_age(k);
    sum_dest += w.destination_age(k, w.slot + 1);
  }
  rec.sum_first_hop = sum_first;
  rec.sum_delta_b = sum_b;
  rec.sum_dest_age = sum_dest;
  rec.mean_delta_m = static_cast<double>(sum_m) / cfg.K;
  rec.mean_delta_b = static_cast<double>(sum_b) / cfg.K;
  rec.objective = cfg.k1 * static_cast<double>(sum_first) / cfg.K + cfg.k2 * rec.mean_delta_b;

  if (!cfg.direct_to_bs) {
    // first-hop ages attributed to the holding UAV, waiting devices to the
    // nearest UAV (ties to the lower index)
    for (int k = 0; k < cfg.K; ++k) {
      const Task& t = w.tasks[static_cast<std::size_t>(k)];
      const std::int64_t age = w.first_hop_live_age(k);
      if (age == 0) continue;
      int target = t.stage == TaskStage::AtUav ? t.holder_uav : -1;
      if (target < 0) {
        double best = std::numeric_limits<double>::infinity();
        for (int m = 0; m < cfg.M; ++m) {
          const double d = (w.uav_pos[static_cast<std::size_t>(m)] -
                            w.device_pos[static_cast<std::size_t>(k)])
                               .norm();
          if (d < best) {
            best = d;
            target = m;
          }
        }
      }
      rec.reward_uav[static_cast<std::size_t>(target)] -= cfg.k1 * static_cast<double>(age);
    }
    for (int m = 0; m < cfg.M; ++m)
      rec.reward_uav[static_cast<std::size_t>(m)] -=
          cfg.violation_penalty * fx.violations_uav[static_cast<std::size_t>(m)];
  }
  // the BS optimizes destination freshness: the recursion counter freezes
  // between deliveries, which would make inaction reward-neutral
  rec.reward_bs =
      -cfg.k2 * static_cast<double>(sum_dest) - cfg.violation_penalty * fx.violations_bs;

  rec.violations = fx.violations_bs;
  for (int v : fx.violations_uav) rec.violations += v;

  w.slot += 1;
  w.advance_channel();
  return res;
}

}  // namespace aoisim
