#include "aoisim/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <thread>

#include "aoisim/csv.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace aoisim {

namespace {

using nlohmann::json;

long long mlp_param_count(int in, const std::vector<int>& hidden, int out) {
  long long n = 0;
  int prev = in;
  for (int h : hidden) {
    n += static_cast<long long>(prev) * h + h;
    prev = h;
  }
  n += static_cast<long long>(prev) * out + out;
  return n;
}

json trainer_to_json(const TrainerConfig& t) {
  json j;
  j["lr_actor"] = t.lr_actor;
  j["lr_critic"] = t.lr_critic;
  j["gamma"] = t.gamma;
  j["tau"] = t.tau;
  j["batch"] = t.batch;
  j["episodes"] = t.episodes;
  j["iters_per_episode"] = t.iters_per_episode;
  j["policy_delay"] = t.policy_delay;
  j["noise_sigma0"] = t.noise_sigma0;
  j["noise_sigma_final"] = t.noise_sigma_final;
  j["buffer_capacity"] = t.buffer_capacity;
  j["update_warmup"] = t.update_warmup;
  j["fed_period"] = t.fed_period;
  j["fed_weight"] = t.fed_weight;
  j["actor_hidden"] = t.actor_hidden;
  j["critic_hidden"] = t.critic_hidden;
  j["global_critic_hidden"] = t.global_critic_hidden;
  j["optimizer"] = t.optimizer == Optimizer::Sgd ? "sgd" : "adam";
  j["divergence_bound"] = t.divergence_bound;
  j["randomize_episodes"] = t.randomize_episodes;
  j["seed"] = t.seed;
  return j;
}

TrainerConfig trainer_from_json(const json& j) {
  TrainerConfig t;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("lr_actor", t.lr_actor);
  get("lr_critic", t.lr_critic);
  get("gamma", t.gamma);
  get("tau", t.tau);
  get("batch", t.batch);
  get("episodes", t.episodes);
  get("iters_per_episode", t.iters_per_episode);
  get("policy_delay", t.policy_delay);
  get("noise_sigma0", t.noise_sigma0);
  get("noise_sigma_final", t.noise_sigma_final);
  get("buffer_capacity", t.buffer_capacity);
  get("update_warmup", t.update_warmup);
  get("fed_period", t.fed_period);
  get("fed_weight", t.fed_weight);
  get("actor_hidden", t.actor_hidden);
  get("critic_hidden", t.critic_hidden);
  get("global_critic_hidden", t.global_critic_hidden);
  get("divergence_bound", t.divergence_bound);
  get("randomize_episodes", t.randomize_episodes);
  get("seed", t.seed);
  if (j.contains("optimizer"))
    t.optimizer = j.at("optimizer").get<std::string>() == "sgd" ? Optimizer::Sgd : Optimizer::Adam;
  t.validate();
  return t;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

long long actor_param_count(const ScenarioConfig& cfg, const TrainerConfig& tcfg) {
  const EnvLayout lay = layout_of(cfg);
  return mlp_param_count(lay.uav_obs_dim(), tcfg.actor_hidden, lay.uav_act_dim());
}

OverheadReport overhead_report(const ScenarioConfig& cfg, const TrainerConfig& tcfg,
                               const std::string& framework) {
  const EnvLayout lay = layout_of(cfg);
  OverheadReport r;
  r.framework = framework;
  r.state_u_dim = lay.uav_obs_dim();
  r.state_global_dim = lay.global_state_dim();
  r.actor_params = actor_param_count(cfg, tcfg);
  if (framework == "maddpg") {
    r.formula_bits = 16LL * (cfg.M - 1) * r.state_u_dim + 16LL * cfg.M * r.state_global_dim;
    r.per_episode_bits = r.formula_bits * tcfg.iters_per_episode;
  } else if (framework == "frl") {
    r.formula_bits = 16LL * r.actor_params + 16LL * cfg.M * r.actor_params;
    r.per_episode_bits = r.formula_bits / tcfg.fed_period;
  } else {
    throw std::invalid_argument("overhead_report: framework must be maddpg or frl");
  }
  r.formula_bytes = static_cast<double>(r.formula_bits) / 8.0;
  r.per_episode_bytes = static_cast<double>(r.per_episode_bits) / 8.0;
  return r;
}

ParamsReport report_params(const Trainer& trainer) {
  ParamsReport rep;
  rep.registry = trainer.registry();
  rep.network_count_ok = rep.registry.networks_total == rep.registry.networks_expected;
  return rep;
}

void ExperimentPlan::validate() const {
  base.validate();
  trainer.validate();
  if (devices.empty()) throw std::invalid_argument("plan: empty device axis");
  if (subcarriers.empty()) throw std::invalid_argument("plan: empty subcarrier axis");
  if (algos.empty()) throw std::invalid_argument("plan: empty algorithm axis");
  if (backhauls.empty()) throw std::invalid_argument("plan: empty backhaul axis");
  for (const std::string& b : backhauls)
    if (b != "noma" && b != "ofdma") throw std::invalid_argument("plan: backhaul must be noma|ofdma");
  for (const std::string& a : algos)
    if (a != "maddpg" && a != "frl" && a != "random" && a != "greedy" && a != "round_robin")
      throw std::invalid_argument("plan: unknown algorithm " + a);
  if (episodes < 1) throw std::invalid_argument("plan: episodes >= 1");
  if (seeds < 1) throw std::invalid_argument("plan: seeds >= 1");
  if (out_dir.empty()) throw std::invalid_argument("plan: output directory required");
}

std::string ExperimentPlan::to_json() const {
  json j;
  j["scenario"] = json::parse(base.to_json());
  j["trainer"] = trainer_to_json(trainer);
  j["devices"] = devices;
  j["subcarriers"] = subcarriers;
  j["algos"] = algos;
  j["backhauls"] = backhauls;
  j["no_uav"] = no_uav;
  j["episodes"] = episodes;
  j["seeds"] = seeds;
  j["seed0"] = seed0;
  j["out_dir"] = out_dir;
  j["write_trace"] = write_trace;
  return j.dump(2);
}

ExperimentPlan ExperimentPlan::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("plan is not valid JSON: ") + e.what());
  }
  ExperimentPlan p;
  if (j.contains("scenario")) p.base = ScenarioConfig::from_json(j.at("scenario").dump());
  if (j.contains("trainer")) p.trainer = trainer_from_json(j.at("trainer"));
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("devices", p.devices);
  get("subcarriers", p.subcarriers);
  get("algos", p.algos);
  get("backhauls", p.backhauls);
  get("no_uav", p.no_uav);
  get("episodes", p.episodes);
  get("seeds", p.seeds);
  get("seed0", p.seed0);
  get("out_dir", p.out_dir);
  get("write_trace", p.write_trace);
  p.validate();
  return p;
}

namespace {

struct Cell {
  int K = 0;
  int F = 0;
  std::string algo;
  std::string backhaul;

  std::string name() const {
    return algo + "_K" + std::to_string(K) + "_F" + std::to_string(F) + "_" + backhaul;
  }
};

ScenarioConfig cell_scenario(const ExperimentPlan& plan, const Cell& cell, std::uint64_t seed) {
  ScenarioConfig cfg = plan.base;
  cfg.K = cell.K;
  cfg.F = cell.F;
  if (cell.backhaul == "ofdma") cfg = ofdma_backhaul_variant(cfg);
  if (plan.no_uav) cfg = no_uav_scenario(cfg);
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

std::vector<std::string> metrics_header(int uavs) {
  std::vector<std::string> h = {"episode",       "slot",        "mean_delta_m", "mean_delta_b",
                                "objective",     "reward_bs",   "violations",   "bytes_overhead",
                                "sum_first_hop", "sum_delta_b", "sum_dest_age"};
  for (int m = 0; m < uavs; ++m) h.push_back("reward_uav" + std::to_string(m));
  return h;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& log, int uavs) {
  CsvWriter csv(path);
  csv.row(metrics_header(uavs));
  for (const MetricsRecord& r : log) {
    std::vector<std::string> row = {std::to_string(r.episode),
                                    std::to_string(r.slot),
                                    format_double(r.mean_delta_m),
                                    format_double(r.mean_delta_b),
                                    format_double(r.objective),
                                    format_double(r.reward_bs),
                                    std::to_string(r.violations),
                                    format_double(r.bytes_overhead),
                                    std::to_string(r.sum_first_hop),
                                    std::to_string(r.sum_delta_b),
                                    std::to_string(r.sum_dest_age)};
    for (double v : r.reward_uav) row.push_back(format_double(v));
    csv.row(row);
  }
}

void write_curve_csv(const std::string& path, const std::vector<EpisodeStats>& curve) {
  CsvWriter csv(path);
  csv.row({"episode", "objective", "mean_delta_m", "mean_delta_b", "return", "violations"});
  for (const EpisodeStats& e : curve)
    csv.row({std::to_string(e.episode), format_double(e.objective), format_double(e.mean_delta_m),
             format_double(e.mean_delta_b), format_double(e.return_total),
             std::to_string(e.violations)});
}

const char* stage_name(TaskStage s) {
  switch (s) {
    case TaskStage::AtDevice:
      return "device";
    case TaskStage::AtUav:
      return "uav";
    case TaskStage::AtBs:
      return "bs";
    case TaskStage::Done:
      return "done";
  }
  return "?";
}

// heuristic episode with optional per-device age trace capture
EpisodeStats heuristic_episode(const ScenarioConfig& cfg, Policy& policy, int episode,
                               std::vector<MetricsRecord>& log, CsvWriter* trace) {
  World w = new_scenario(cfg);
  EpisodeStats stats;
  stats.episode = episode;
  for (int t = 0; t < cfg.T_slots; ++t) {
    const RawAction raw = policy.act(w);
    const JointAction joint = cfg.direct_to_bs ? decode_actions_direct(w, raw.bs)
                                               : decode_actions(w, raw.uav, raw.bs);
    StepResult res = step(w, joint);
    res.metrics.episode = episode;
    stats.return_total += res.metrics.reward_bs;
    for (double r : res.metrics.reward_uav) stats.return_total += r;
    stats.violations += res.metrics.violations;
    stats.objective += res.metrics.objective;
    stats.mean_delta_m += res.metrics.mean_delta_m;
    stats.mean_delta_b += res.metrics.mean_delta_b;
    if (trace)
      for (int k = 0; k < cfg.K; ++k)
        trace->row({std::to_string(episode), std::to_string(t), std::to_string(k),
                    std::to_string(w.age.delta0[k]), std::to_string(w.age.deltaM[k]),
                    std::to_string(w.age.deltaB[k]),
                    stage_name(w.tasks[static_cast<std::size_t>(k)].stage)});
    log.push_back(std::move(res.metrics));
  }
  stats.objective /= cfg.T_slots;
  stats.mean_delta_m /= cfg.T_slots;
  stats.mean_delta_b /= cfg.T_slots;
  return stats;
}

void run_one(const ExperimentPlan& plan, const Cell& cell, std::uint64_t seed,
             const std::string& dir) {
  fs::create_directories(dir);
  const ScenarioConfig cfg = cell_scenario(plan, cell, seed);
  const bool learned = cell.algo == "maddpg" || cell.algo == "frl";

  if (learned) {
    TrainerConfig tcfg = plan.trainer;
    tcfg.episodes = plan.episodes;
    tcfg.seed = seed + 0x5eed;
    Trainer trainer(cfg, tcfg, cell.algo == "frl" ? TrainMode::Frl : TrainMode::Maddpg);
    const std::vector<EpisodeStats> curve = trainer.train();

    // overhead accounting folded onto each episode's last slot
    std::vector<MetricsRecord> log = trainer.metrics_log();
    const OverheadReport oh = overhead_report(cfg, tcfg, cell.algo);
    if (cell.algo == "maddpg") {
      for (MetricsRecord& r : log)
        if ((r.slot + 1) % tcfg.iters_per_episode == 0) r.bytes_overhead = oh.per_episode_bytes;
    } else {
      std::vector<bool> fed(static_cast<std::size_t>(plan.episodes) + 1, false);
      for (const FedEvent& ev : trainer.fed_events())
        fed[static_cast<std::size_t>(ev.epoch)] = true;
      for (MetricsRecord& r : log)
        if ((r.slot + 1) % tcfg.iters_per_episode == 0 &&
            fed[static_cast<std::size_t>(r.episode)])
          r.bytes_overhead = oh.formula_bytes;
    }
    write_metrics_csv(dir + "/metrics.csv", log, cfg.M);
    write_curve_csv(dir + "/curve.csv", curve);
    if (cell.algo == "frl") {
      CsvWriter fed(dir + "/fedlog.csv");
      fed.row({"epoch", "w", "period", "spread_before", "spread_after"});
      for (const FedEvent& ev : trainer.fed_events())
        fed.row({std::to_string(ev.epoch), format_double(ev.w), std::to_string(ev.period),
                 format_double(ev.spread_before), format_double(ev.spread_after)});
    }
    trainer.save_checkpoints(dir + "/checkpoints");
    return;
  }

  PolicySpec spec = PolicySpec::parse(cell.algo == "greedy" && plan.no_uav ? "no_uav" : cell.algo,
                                      seed + 0x9011c4);
  Policy policy(spec, cfg);
  policy.reset();
  std::vector<MetricsRecord> log;
  std::vector<EpisodeStats> curve;
  std::unique_ptr<CsvWriter> trace;
  if (plan.write_trace) {
    trace = std::make_unique<CsvWriter>(dir + "/trace.csv");
    trace->row({"episode", "slot", "device", "delta0", "deltaM", "deltaB", "stage"});
  }
  for (int e = 1; e <= plan.episodes; ++e)
    curve.push_back(heuristic_episode(cfg, policy, e, log, trace.get()));
  write_metrics_csv(dir + "/metrics.csv", log, cfg.direct_to_bs ? 0 : cfg.M);
  write_curve_csv(dir + "/curve.csv", curve);
}

struct RunSummary {
  double objective = 0.0;
  double delta_m = 0.0;
  double delta_b = 0.0;
};

// per-run episode means recomputed from the raw per-slot stream
RunSummary summarize_metrics_csv(const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.size() < 2) throw std::runtime_error("empty metrics stream: " + path);
  const auto& header = rows.front();
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("missing column " + name + " in " + path);
  };
  const std::size_t c_ep = col("episode"), c_obj = col("objective"), c_dm = col("mean_delta_m"),
                    c_db = col("mean_delta_b");

  std::map<long, std::array<double, 4>> per_episode;  // sums + count
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const long ep = std::stol(rows[i][c_ep]);
    auto& acc = per_episode[ep];
    acc[0] += std::stod(rows[i][c_obj]);
    acc[1] += std::stod(rows[i][c_dm]);
    acc[2] += std::stod(rows[i][c_db]);
    acc[3] += 1.0;
  }
  RunSummary s;
  for (const auto& [ep, acc] : per_episode) {
    (void)ep;
    s.objective += acc[0] / acc[3];
    s.delta_m += acc[1] / acc[3];
    s.delta_b += acc[2] / acc[3];
  }
  const double n = static_cast<double>(per_episode.size());
  s.objective /= n;
  s.delta_m /= n;
  s.delta_b /= n;
  return s;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

std::string run_plan(const ExperimentPlan& plan) {
  plan.validate();
  fs::create_directories(plan.out_dir);

  std::vector<Cell> cells;
  for (const std::string& algo : plan.algos)
    for (int K : plan.devices)
      for (int F : plan.subcarriers)
        for (const std::string& bh : plan.backhauls) cells.push_back(Cell{K, F, algo, bh});

  struct Job {
    Cell cell;
    std::uint64_t seed;
    std::string dir;
  };
  std::vector<Job> jobs;
  for (const Cell& cell : cells)
    for (int s = 0; s < plan.seeds; ++s) {
      const std::uint64_t seed = plan.seed0 + static_cast<std::uint64_t>(s);
      jobs.push_back(Job{cell, seed,
                         plan.out_dir + "/cells/" + cell.name() + "/seed_" + std::to_string(seed)});
    }

  parallel_for(jobs.size(), plan.threads,
               [&](std::size_t i) { run_one(plan, jobs[i].cell, jobs[i].seed, jobs[i].dir); });

  // manifest (no timestamps: reruns must be byte-identical)
  json manifest;
  manifest["plan"] = json::parse(plan.to_json());
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < plan.seeds; ++s) seeds.push_back(plan.seed0 + static_cast<std::uint64_t>(s));
  manifest["seeds"] = seeds;
  manifest["code_version"] = "aoisim 0.1.0";
  manifest["config_hash"] = fnv1a64(plan.to_json());
  {
    std::ofstream out(plan.out_dir + "/manifest.json", std::ios::binary);
    out << manifest.dump(2) << "\n";
  }

  // summaries recomputed from the per-slot streams
  CsvWriter global(plan.out_dir + "/summary.csv");
  const std::vector<std::string> header = {
      "cell",          "algo",        "K",           "F",          "backhaul",
      "no_uav",        "runs",        "episodes",    "mean_objective", "std_objective",
      "mean_delta_m",  "std_delta_m", "mean_delta_b", "std_delta_b"};
  global.row(header);
  for (const Cell& cell : cells) {
    std::vector<double> obj, dm, db;
    for (int s = 0; s < plan.seeds; ++s) {
      const std::uint64_t seed = plan.seed0 + static_cast<std::uint64_t>(s);
      const RunSummary rs = summarize_metrics_csv(plan.out_dir + "/cells/" + cell.name() +
                                                  "/seed_" + std::to_string(seed) + "/metrics.csv");
      obj.push_back(rs.objective);
      dm.push_back(rs.delta_m);
      db.push_back(rs.delta_b);
    }
    const auto [om, os] = mean_std(obj);
    const auto [dmm, dms] = mean_std(dm);
    const auto [dbm, dbs] = mean_std(db);
    const std::vector<std::string> row = {cell.name(),
                                          cell.algo,
                                          std::to_string(cell.K),
                                          std::to_string(cell.F),
                                          cell.backhaul,
                                          plan.no_uav ? "1" : "0",
                                          std::to_string(plan.seeds),
                                          std::to_string(plan.episodes),
                                          format_double(om),
                                          format_double(os),
                                          format_double(dmm),
                                          format_double(dms),
                                          format_double(dbm),
                                          format_double(dbs)};
    global.row(row);
    CsvWriter local(plan.out_dir + "/cells/" + cell.name() + "/summary.csv");
    local.row(header);
    local.row(row);
  }
  return plan.out_dir;
}

ScenarioConfig tiny_oracle_config(std::uint64_t seed, int devices, int uavs, int subcarriers,
                                  int backhaul_subcarriers, int backhaul_share) {
  ScenarioConfig cfg;
  cfg.K = devices;
  cfg.M = uavs;
  cfg.F = subcarriers;
  cfg.L = backhaul_subcarriers;
  cfg.L_l = backhaul_share;
  cfg.T_slots = 8;
  cfg.area_m = 120.0;
  cfg.h_uav = 50.0;
  cfg.H_bs = 10.0;
  cfg.v_max = 5.0;
  cfg.D_min = 5.0;
  cfg.r_max = 200.0;  // everything covered: the oracle probes scheduling, not geometry
  cfg.D_range = {160000.0, 160000.0};
  cfg.F_range = {50.0, 50.0};
  cfg.lambda_k = 0.5;
  cfg.f_uav_max = 8e6;   // two task shares per slot
  cfg.f_bs_max = 8e6;
  cfg.residual_ratio = 0.02;  // backhaul never binds under the fixed split
  cfg.backhaul_fading = BackhaulFading::None;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

OracleCheckRow oracle_check(const ScenarioConfig& cfg, int horizon) {
  OracleCheckRow row;
  row.seed = cfg.seed;
  row.horizon = horizon;

  const OracleResult oracle = oracle_schedule(cfg, horizon);
  row.oracle_objective = oracle.objective;
  row.replay_objective = replay_schedule(cfg, oracle.schedule);
  row.replay_exact = row.replay_objective == oracle.objective;

  ScenarioConfig short_cfg = cfg;
  short_cfg.T_slots = horizon;
  row.greedy_objective =
      policy_mean_objective(short_cfg, PolicySpec{PolicyKind::GreedyMaxAge, cfg.seed + 11}, 1);
  row.random_objective =
      policy_mean_objective(short_cfg, PolicySpec{PolicyKind::Random, cfg.seed + 13}, 1);
  row.ordered = row.oracle_objective <= row.greedy_objective + 1e-12 &&
                row.greedy_objective <= row.random_objective + 1e-12;
  return row;
}

double policy_mean_objective(const ScenarioConfig& cfg, const PolicySpec& spec, int episodes) {
  Policy policy(spec, cfg);
  policy.reset();
  double sum = 0.0;
  for (int e = 1; e <= episodes; ++e) sum += run_policy_episode(cfg, policy, e);
  return sum / episodes;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace aoisim
