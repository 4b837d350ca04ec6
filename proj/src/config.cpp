#include "aoisim/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace aoisim {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(K >= 1, "K >= 1");
  require(M >= (direct_to_bs ? 0 : 1), "M >= 1");
  require(F >= 1, "F >= 1");
  require(L >= 1, "L >= 1");
  require(L_l >= 1, "L_l >= 1");
  require(T_slots >= 1, "T_slots >= 1");
  require(slot_ms > 0.0, "slot_ms > 0");
  require(area_m > 0.0, "area_m > 0");
  require(h_uav > 0.0, "h_uav > 0");
  require(H_bs > 0.0, "H_bs > 0");
  require(v_max > 0.0, "v_max > 0");
  require(D_min >= 0.0, "D_min >= 0");
  require(D_min < area_m, "D_min < area_m");
  require(r_max > 0.0, "r_max > 0");
  require(beta0 > 0.0, "beta0 > 0");
  require(B > 0.0, "B > 0");
  require(noise_power > 0.0, "noise_power > 0");
  require(rho_dev > 0.0, "rho_dev > 0");
  require(P_max > 0.0, "P_max > 0");
  require(f_uav_max > 0.0, "f_uav_max > 0");
  require(f_bs_max > 0.0, "f_bs_max > 0");
  require(D_range[0] > 0.0 && D_range[0] <= D_range[1], "D_range ordered, positive");
  require(F_range[0] > 0.0 && F_range[0] <= F_range[1], "F_range ordered, positive");
  require(lambda_k >= 0.0 && lambda_k <= 1.0, "lambda_k in [0,1]");
  require(residual_ratio < 0.0 || residual_ratio <= 1.0, "residual_ratio <= 1");
  require(k1 >= 0.0 && k1 <= 1.0, "k1 in [0,1]");
  require(k2 >= 0.0 && k2 <= 1.0, "k2 in [0,1]");
  require(violation_penalty >= 0.0, "violation_penalty >= 0");
}

std::string ScenarioConfig::to_json() const {
  json j;
  j["K"] = K;
  j["M"] = M;
  j["F"] = F;
  j["L"] = L;
  j["L_l"] = L_l;
  j["T_slots"] = T_slots;
  j["slot_ms"] = slot_ms;
  j["area_m"] = area_m;
  j["h_uav"] = h_uav;
  j["H_bs"] = H_bs;
  j["v_max"] = v_max;
  j["D_min"] = D_min;
  j["r_max"] = r_max;
  j["beta0"] = beta0;
  j["B"] = B;
  j["noise_power"] = noise_power;
  j["rho_dev"] = rho_dev;
  j["P_max"] = P_max;
  j["backhaul_bw"] = backhaul_bw;
  j["f_uav_max"] = f_uav_max;
  j["f_bs_max"] = f_bs_max;
  j["D_range"] = D_range;
  j["F_range"] = F_range;
  j["lambda_k"] = lambda_k;
  j["residual_ratio"] = residual_ratio;
  j["k1"] = k1;
  j["k2"] = k2;
  j["violation_penalty"] = violation_penalty;
  j["seed"] = seed;
  j["coverage_3d"] = coverage_3d;
  j["sic_literal_power"] = sic_literal_power;
  j["backhaul_fading"] = backhaul_fading == BackhaulFading::None ? "none" : "exp";
  j["direct_to_bs"] = direct_to_bs;
  return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("K", c.K);
  get("M", c.M);
  get("F", c.F);
  get("L", c.L);
  get("L_l", c.L_l);
  get("T_slots", c.T_slots);
  get("slot_ms", c.slot_ms);
  get("area_m", c.area_m);
  get("h_uav", c.h_uav);
  get("H_bs", c.H_bs);
  get("v_max", c.v_max);
  get("D_min", c.D_min);
  get("r_max", c.r_max);
  get("beta0", c.beta0);
  get("B", c.B);
  get("noise_power", c.noise_power);
  get("rho_dev", c.rho_dev);
  get("P_max", c.P_max);
  get("backhaul_bw", c.backhaul_bw);
  get("f_uav_max", c.f_uav_max);
  get("f_bs_max", c.f_bs_max);
  get("D_range", c.D_range);
  get("F_range", c.F_range);
  get("lambda_k", c.lambda_k);
  get("residual_ratio", c.residual_ratio);
  get("k1", c.k1);
  get("k2", c.k2);
  get("violation_penalty", c.violation_penalty);
  get("seed", c.seed);
  get("coverage_3d", c.coverage_3d);
  get("sic_literal_power", c.sic_literal_power);
  get("direct_to_bs", c.direct_to_bs);
  if (j.contains("backhaul_fading")) {
    const std::string v = j.at("backhaul_fading").get<std::string>();
    if (v == "none")
      c.backhaul_fading = BackhaulFading::None;
    else if (v == "exp")
      c.backhaul_fading = BackhaulFading::Exponential;
    else
      throw ConfigError("backhaul_fading must be \"none\" or \"exp\"");
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void ScenarioConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << to_json() << "\n";
}

}  // namespace aoisim
