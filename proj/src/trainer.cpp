#include "aoisim/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace aoisim {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<int> dims_with(const std::vector<int>& hidden, int in, int out) {
  std::vector<int> dims;
  dims.push_back(in);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

void TrainerConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid trainer config: ") + what);
  };
  check(lr_actor > 0.0 && lr_critic > 0.0, "learning rates positive");
  check(gamma >= 0.0 && gamma < 1.0, "gamma in [0,1)");
  check(tau > 0.0 && tau <= 1.0, "tau in (0,1]");
  check(batch >= 1, "batch >= 1");
  check(episodes >= 0, "episodes >= 0");
  check(iters_per_episode >= 1, "iters_per_episode >= 1");
  check(policy_delay >= 1, "policy_delay >= 1");
  check(noise_sigma0 >= 0.0 && noise_sigma_final >= 0.0, "noise scales non-negative");
  check(buffer_capacity >= static_cast<std::size_t>(batch), "buffer holds at least one batch");
  check(fed_period >= 1, "fed_period >= 1");
  check(fed_weight >= 0.0 && fed_weight <= 1.0, "fed_weight in [0,1]");
  check(divergence_bound > 0.0, "divergence_bound positive");
}

Trainer::Trainer(const ScenarioConfig& scenario, const TrainerConfig& cfg, TrainMode mode)
    : scenario_(scenario),
      cfg_(cfg),
      mode_(mode),
      layout_(layout_of(scenario)),
      rng_(cfg.seed),
      buffer_(cfg.buffer_capacity) {
  scenario_.validate();
  cfg_.validate();
  if (scenario_.direct_to_bs)
    throw std::invalid_argument("Trainer: the direct-to-BS variant is heuristic-only");

  const int M = scenario_.M;
  actor_u_.reserve(static_cast<std::size_t>(M));
  critic_local_.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    actor_u_.emplace_back(dims_with(cfg_.actor_hidden, layout_.uav_obs_dim(), layout_.uav_act_dim()),
                          OutputActivation::Sigmoid, rng_);
    critic_local_.emplace_back(
        dims_with(cfg_.critic_hidden, layout_.uav_obs_dim() + layout_.uav_act_dim(), 1),
        OutputActivation::Linear, rng_);
  }
  actor_b_ = MlpNet(dims_with(cfg_.actor_hidden, layout_.bs_obs_dim(), layout_.bs_act_dim()),
                    OutputActivation::Sigmoid, rng_);
  const int global_in = layout_.global_state_dim() + layout_.global_action_dim();
  for (int j = 0; j < 2; ++j)
    critic_global_.emplace_back(dims_with(cfg_.global_critic_hidden, global_in, 1),
                                OutputActivation::Linear, rng_);

  actor_u_target_ = actor_u_;
  actor_b_target_ = actor_b_;
  critic_local_target_ = critic_local_;
  critic_global_target_ = critic_global_;

  opt_actor_u_.assign(static_cast<std::size_t>(M), AdamState{});
  opt_critic_local_.assign(static_cast<std::size_t>(M), AdamState{});
  opt_critic_global_.assign(2, AdamState{});
}

World Trainer::fresh_world(int episode) {
  ScenarioConfig c = scenario_;
  if (cfg_.randomize_episodes) c.seed = scenario_.seed + static_cast<std::uint64_t>(episode);
  return new_scenario(c);
}

VecX Trainer::concat_state(const Observations& obs) const {
  VecX s(layout_.global_state_dim());
  Index off = 0;
  for (const VecX& v : obs.uav) {
    s.segment(off, v.size()) = v;
    off += v.size();
  }
  s.segment(off, obs.bs.size()) = obs.bs;
  return s;
}

VecX Trainer::concat_action(const std::vector<VecX>& uav_raw, const VecX& bs_raw) const {
  VecX a(layout_.global_action_dim());
  Index off = 0;
  for (const VecX& v : uav_raw) {
    a.segment(off, v.size()) = v;
    off += v.size();
  }
  a.segment(off, bs_raw.size()) = bs_raw;
  return a;
}

std::vector<VecX> Trainer::act_with_noise(const Observations& obs, double sigma) {
  std::vector<VecX> raw;
  raw.reserve(obs.uav.size() + 1);
  for (std::size_t m = 0; m < obs.uav.size(); ++m)
    raw.push_back(actor_u_[m].forward(obs.uav[m]));
  raw.push_back(actor_b_.forward(obs.bs));
  if (sigma > 0.0)
    for (VecX& v : raw)
      for (Index i = 0; i < v.size(); ++i) v[i] = clamp01(v[i] + sigma * rng_.normal());
  return raw;
}

Trainer::Batch Trainer::gather(const std::vector<std::size_t>& idx) const {
  const Index b = static_cast<Index>(idx.size());
  Batch batch;
  batch.state.resize(layout_.global_state_dim(), b);
  batch.action.resize(layout_.global_action_dim(), b);
  batch.next_state.resize(layout_.global_state_dim(), b);
  batch.reward_global.resize(b);
  batch.reward_local.resize(scenario_.M, b);
  for (Index i = 0; i < b; ++i) {
    const Transition& t = buffer_[idx[static_cast<std::size_t>(i)]];
    batch.state.col(i) = t.state;
    batch.action.col(i) = t.action;
    batch.next_state.col(i) = t.next_state;
    batch.reward_global[i] = t.reward_global;
    batch.reward_local.col(i) = t.reward_local;
  }
  return batch;
}

MatX Trainer::target_actions(const MatX& next_states) const {
  const Index b = next_states.cols();
  MatX actions(layout_.global_action_dim(), b);
  Index s_off = 0, a_off = 0;
  for (int m = 0; m < scenario_.M; ++m) {
    actions.middleRows(a_off, layout_.uav_act_dim()) =
        actor_u_target_[static_cast<std::size_t>(m)].forward_batch(
            MatX(next_states.middleRows(s_off, layout_.uav_obs_dim())));
    s_off += layout_.uav_obs_dim();
    a_off += layout_.uav_act_dim();
  }
  actions.middleRows(a_off, layout_.bs_act_dim()) =
      actor_b_target_.forward_batch(MatX(next_states.middleRows(s_off, layout_.bs_obs_dim())));
  return actions;
}

void Trainer::update_global_critics(const Batch& batch) {
  const Index b = batch.state.cols();
  const MatX next_actions = target_actions(batch.next_state);
  MatX next_in(layout_.global_state_dim() + layout_.global_action_dim(), b);
  next_in.topRows(layout_.global_state_dim()) = batch.next_state;
  next_in.bottomRows(layout_.global_action_dim()) = next_actions;

  const MatX q1 = critic_global_target_[0].forward_batch(next_in);
  const MatX q2 = critic_global_target_[1].forward_batch(next_in);
  VecX y(b);
  for (Index i = 0; i < b; ++i)
    y[i] = batch.reward_global[i] + cfg_.gamma * std::min(q1(0, i), q2(0, i));

  MatX in(layout_.global_state_dim() + layout_.global_action_dim(), b);
  in.topRows(layout_.global_state_dim()) = batch.state;
  in.bottomRows(layout_.global_action_dim()) = batch.action;

  for (int j = 0; j < 2; ++j) {
    MlpNet::Cache cache;
    const MatX q = critic_global_[static_cast<std::size_t>(j)].forward_cached(in, cache);
    const VecX err = q.row(0).transpose() - y;
    const double loss = err.squaredNorm() / static_cast<double>(b);
    if (!std::isfinite(loss) || loss > cfg_.divergence_bound) {
      std::ostringstream msg;
      msg << "training diverged: global critic " << j << " loss " << loss << " at iteration "
          << iter_count_;
      throw std::runtime_error(msg.str());
    }
    MatX dY(1, b);
    dY.row(0) = (2.0 / static_cast<double>(b)) * err.transpose();
    VecX grad;
    critic_global_[static_cast<std::size_t>(j)].backward(cache, dY, grad);
    opt_critic_global_[static_cast<std::size_t>(j)].apply(critic_global_[static_cast<std::size_t>(j)],
                                                          grad, cfg_.lr_critic,
                                                          cfg_.optimizer == Optimizer::Sgd);
  }
  for (int j = 0; j < 2; ++j)
    MlpNet::soft_update(critic_global_[static_cast<std::size_t>(j)],
                        critic_global_target_[static_cast<std::size_t>(j)], cfg_.tau);
}

void Trainer::update_local_critics_and_actors(const Batch& batch) {
  const Index b = batch.state.cols();
  const int M = scenario_.M;
  Index s_off = 0, a_off = 0;

  // local critic regression per UAV agent
  for (int m = 0; m < M; ++m) {
    const MatX s_m = batch.state.middleRows(s_off, layout_.uav_obs_dim());
    const MatX a_m = batch.action.middleRows(a_off, layout_.uav_act_dim());
    const MatX s_next = batch.next_state.middleRows(s_off, layout_.uav_obs_dim());
    const MatX a_next = actor_u_target_[static_cast<std::size_t>(m)].forward_batch(s_next);

    MatX next_in(layout_.uav_obs_dim() + layout_.uav_act_dim(), b);
    next_in.topRows(layout_.uav_obs_dim()) = s_next;
    next_in.bottomRows(layout_.uav_act_dim()) = a_next;
    const MatX qn = critic_local_target_[static_cast<std::size_t>(m)].forward_batch(next_in);

    VecX y(b);
    for (Index i = 0; i < b; ++i)
      y[i] = batch.reward_local(m, i) + cfg_.gamma * qn(0, i);

    MatX in(layout_.uav_obs_dim() + layout_.uav_act_dim(), b);
    in.topRows(layout_.uav_obs_dim()) = s_m;
    in.bottomRows(layout_.uav_act_dim()) = a_m;
    MlpNet::Cache cache;
    const MatX q = critic_local_[static_cast<std::size_t>(m)].forward_cached(in, cache);
    const VecX err = q.row(0).transpose() - y;
    const double loss = err.squaredNorm() / static_cast<double>(b);
    if (!std::isfinite(loss) || loss > cfg_.divergence_bound) {
      std::ostringstream msg;
      msg << "training diverged: local critic " << m << " loss " << loss << " at iteration "
          << iter_count_;
      throw std::runtime_error(msg.str());
    }
    MatX dY(1, b);
    dY.row(0) = (2.0 / static_cast<double>(b)) * err.transpose();
    VecX grad;
    critic_local_[static_cast<std::size_t>(m)].backward(cache, dY, grad);
    opt_critic_local_[static_cast<std::size_t>(m)].apply(critic_local_[static_cast<std::size_t>(m)],
                                                         grad, cfg_.lr_critic,
                                                         cfg_.optimizer == Optimizer::Sgd);
    s_off += layout_.uav_obs_dim();
    a_off += layout_.uav_act_dim();
  }

  // deterministic policy gradient: each UAV actor ascends the first global
  // critic plus its local critic; the BS actor ascends the global term only
  s_off = 0;
  a_off = 0;
  for (int m = 0; m < M; ++m) {
    const MatX s_m = batch.state.middleRows(s_off, layout_.uav_obs_dim());
    MlpNet::Cache actor_cache;
    const MatX a_m = actor_u_[static_cast<std::size_t>(m)].forward_cached(s_m, actor_cache);

    MatX global_in(layout_.global_state_dim() + layout_.global_action_dim(), b);
    global_in.topRows(layout_.global_state_dim()) = batch.state;
    global_in.bottomRows(layout_.global_action_dim()) = batch.action;
    global_in.middleRows(layout_.global_state_dim() + a_off, layout_.uav_act_dim()) = a_m;

    MlpNet::Cache gc;
    critic_global_[0].forward_cached(global_in, gc);
    MatX dQ(1, b);
    dQ.setConstant(-1.0 / static_cast<double>(b));  // minimize -mean(Q)
    VecX unused;
    const MatX dIn_global = critic_global_[0].backward(gc, dQ, unused);
    MatX dA = dIn_global.middleRows(layout_.global_state_dim() + a_off, layout_.uav_act_dim());

    MatX local_in(layout_.uav_obs_dim() + layout_.uav_act_dim(), b);
    local_in.topRows(layout_.uav_obs_dim()) = s_m;
    local_in.bottomRows(layout_.uav_act_dim()) = a_m;
    MlpNet::Cache lc;
    critic_local_[static_cast<std::size_t>(m)].forward_cached(local_in, lc);
    const MatX dIn_local = critic_local_[static_cast<std::size_t>(m)].backward(lc, dQ, unused);
    dA += dIn_local.bottomRows(layout_.uav_act_dim());

    VecX grad;
    actor_u_[static_cast<std::size_t>(m)].backward(actor_cache, dA, grad);
    opt_actor_u_[static_cast<std::size_t>(m)].apply(actor_u_[static_cast<std::size_t>(m)], grad,
                                                    cfg_.lr_actor,
                                                    cfg_.optimizer == Optimizer::Sgd);
    s_off += layout_.uav_obs_dim();
    a_off += layout_.uav_act_dim();
  }

  {
    const MatX s_b = batch.state.middleRows(s_off, layout_.bs_obs_dim());
    MlpNet::Cache actor_cache;
    const MatX a_b = actor_b_.forward_cached(s_b, actor_cache);

    MatX global_in(layout_.global_state_dim() + layout_.global_action_dim(), b);
    global_in.topRows(layout_.global_state_dim()) = batch.state;
    global_in.bottomRows(layout_.global_action_dim()) = batch.action;
    global_in.middleRows(layout_.global_state_dim() + a_off, layout_.bs_act_dim()) = a_b;

    MlpNet::Cache gc;
    critic_global_[0].forward_cached(global_in, gc);
    MatX dQ(1, b);
    dQ.setConstant(-1.0 / static_cast<double>(b));
    VecX unused;
    const MatX dIn = critic_global_[0].backward(gc, dQ, unused);
    const MatX dA = dIn.middleRows(layout_.global_state_dim() + a_off, layout_.bs_act_dim());

    VecX grad;
    actor_b_.backward(actor_cache, dA, grad);
    opt_actor_b_.apply(actor_b_, grad, cfg_.lr_actor, cfg_.optimizer == Optimizer::Sgd);
  }

  for (int m = 0; m < M; ++m) {
    MlpNet::soft_update(actor_u_[static_cast<std::size_t>(m)],
                        actor_u_target_[static_cast<std::size_t>(m)], cfg_.tau);
    MlpNet::soft_update(critic_local_[static_cast<std::size_t>(m)],
                        critic_local_target_[static_cast<std::size_t>(m)], cfg_.tau);
  }
  MlpNet::soft_update(actor_b_, actor_b_target_, cfg_.tau);
}

void Trainer::federated_round(int episode) {
  std::vector<ParamSet> params = uav_actor_params();
  FedEvent ev;
  ev.epoch = episode;
  ev.w = cfg_.fed_weight;
  ev.period = cfg_.fed_period;
  ev.spread_before = parameter_spread(params);
  const MixMatrix mix(scenario_.M, cfg_.fed_weight);
  const std::vector<ParamSet> mixed = aggregate(params, mix);
  for (int m = 0; m < scenario_.M; ++m)
    actor_u_[static_cast<std::size_t>(m)].set_params(mixed[static_cast<std::size_t>(m)]);
  ev.spread_after = parameter_spread(mixed);
  fed_events_.push_back(ev);
}

std::vector<EpisodeStats> Trainer::train() {
  std::vector<EpisodeStats> curve;
  curve.reserve(static_cast<std::size_t>(cfg_.episodes));

  for (int ep = 1; ep <= cfg_.episodes; ++ep) {
    const double frac =
        cfg_.episodes > 1 ? static_cast<double>(ep - 1) / (cfg_.episodes - 1) : 0.0;
    const double sigma = cfg_.noise_sigma0 + frac * (cfg_.noise_sigma_final - cfg_.noise_sigma0);

    World world = fresh_world(ep);
    Observations obs = observe(world);

    EpisodeStats stats;
    stats.episode = ep;
    double objective_sum = 0.0;
    double dm_sum = 0.0, db_sum = 0.0;

    for (int it = 0; it < cfg_.iters_per_episode; ++it) {
      std::vector<VecX> raw = act_with_noise(obs, sigma);
      VecX bs_raw = raw.back();
      raw.pop_back();

      const JointAction joint = decode_actions(world, raw, bs_raw);
      const VecX state = concat_state(obs);
      StepResult res = step(world, joint);
      Observations next_obs = observe(world);

      Transition tr;
      tr.state = state;
      tr.action = concat_action(raw, bs_raw);
      tr.reward_local = Eigen::Map<const VecX>(res.metrics.reward_uav.data(),
                                               static_cast<Index>(res.metrics.reward_uav.size()));
      tr.reward_global = res.metrics.reward_bs;
      tr.next_state = concat_state(next_obs);
      buffer_.add(std::move(tr));

      res.metrics.episode = ep;
      stats.return_total += res.metrics.reward_bs;
      for (double r : res.metrics.reward_uav) stats.return_total += r;
      stats.violations += res.metrics.violations;
      objective_sum += res.metrics.objective;
      dm_sum += res.metrics.mean_delta_m;
      db_sum += res.metrics.mean_delta_b;
      metrics_log_.push_back(std::move(res.metrics));

      obs = std::move(next_obs);

      const std::size_t gate = std::max(static_cast<std::size_t>(cfg_.batch), cfg_.update_warmup);
      if (buffer_.size() >= gate) {
        const Batch batch = gather(buffer_.sample_indices(static_cast<std::size_t>(cfg_.batch), rng_));
        update_global_critics(batch);
        iter_count_ += 1;
        if (iter_count_ % cfg_.policy_delay == 0) update_local_critics_and_actors(batch);
      }
    }

    stats.objective = objective_sum / cfg_.iters_per_episode;
    stats.mean_delta_m = dm_sum / cfg_.iters_per_episode;
    stats.mean_delta_b = db_sum / cfg_.iters_per_episode;
    curve.push_back(stats);

    if (mode_ == TrainMode::Frl && scenario_.M > 1 && aggregation_due(ep, cfg_.fed_period))
      federated_round(ep);
  }
  return curve;
}

Trainer::Registry Trainer::registry() const {
  Registry r;
  r.uav_agents = scenario_.M;
  r.global_critics = static_cast<int>(critic_global_.size());
  r.networks_total = static_cast<int>(actor_u_.size() + actor_u_target_.size() +
                                      critic_local_.size() + critic_local_target_.size() +
                                      critic_global_.size() + critic_global_target_.size()) +
                     2;  // BS actor and its target
  r.networks_expected = 2 * (r.uav_agents * 2 + (r.global_critics + 1));
  r.networks_paper_single_critic = 2 * (r.uav_agents * 2 + 2);
  r.uav_actor_params = actor_u_.empty() ? 0 : actor_u_.front().param_count();
  r.bs_actor_params = actor_b_.param_count();
  r.local_critic_params = critic_local_.empty() ? 0 : critic_local_.front().param_count();
  r.global_critic_params = critic_global_.front().param_count();
  r.total_params = r.uav_actor_params * scenario_.M + r.bs_actor_params +
                   r.local_critic_params * scenario_.M + r.global_critic_params * 2;
  return r;
}

std::vector<ParamSet> Trainer::uav_actor_params() const {
  std::vector<ParamSet> out;
  out.reserve(actor_u_.size());
  for (const MlpNet& net : actor_u_) out.push_back(net.params());
  return out;
}

void Trainer::save_checkpoints(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (std::size_t m = 0; m < actor_u_.size(); ++m)
    save_paramset(actor_u_[m].params(), dir + "/actor_uav" + std::to_string(m) + ".apsf");
  save_paramset(actor_b_.params(), dir + "/actor_bs.apsf");
  for (std::size_t m = 0; m < critic_local_.size(); ++m)
    save_paramset(critic_local_[m].params(), dir + "/critic_local" + std::to_string(m) + ".apsf");
  save_paramset(critic_global_[0].params(), dir + "/critic_global1.apsf");
  save_paramset(critic_global_[1].params(), dir + "/critic_global2.apsf");
}

}  // namespace aoisim
