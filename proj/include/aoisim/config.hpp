#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace aoisim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class BackhaulFading { None, Exponential };
enum class Optimizer { Adam, Sgd };

// Full experiment parameterization. Field names follow the usual symbols for
// this kind of network model (K devices, M UAVs, F access / L backhaul
// subcarriers, ...). All physical quantities are linear (not dB).
struct ScenarioConfig {
  int K = 15;           // device count
  int M = 5;            // UAV count
  int F = 4;            // access subcarriers (device -> UAV)
  int L = 2;            // backhaul subcarriers (UAV -> BS)
  int L_l = 2;          // max UAVs sharing one backhaul subcarrier
  int T_slots = 100;    // slots per episode
  double slot_ms = 1.0; // slot duration [ms]

  double area_m = 200.0; // square side [m]
  double h_uav = 100.0;  // UAV altitude [m]
  double H_bs = 10.0;    // BS height [m]
  double v_max = 5.0;    // max UAV displacement per slot [m]
  double D_min = 10.0;   // min inter-UAV distance [m]
  double r_max = 100.0;  // coverage radius [m]

  double beta0 = 1e-5;        // channel gain at 1 m (linear)
  double B = 8e7;             // access bandwidth [Hz]
  double noise_power = 1e-13; // sigma^2 [W]
  double rho_dev = 0.1;       // device transmit power [W]
  double P_max = 0.5;         // UAV power budget [W]
  double backhaul_bw = -1.0;  // per-subcarrier backhaul bandwidth [Hz], <0 => B

  double f_uav_max = 1.6e10; // UAV CPU capacity [cycles/ms]
  double f_bs_max = 3.2e10;  // BS CPU capacity [cycles/ms]

  std::array<double, 2> D_range = {160000.0, 400000.0}; // task size [bits]
  std::array<double, 2> F_range = {10000.0, 75000.0};   // CPU demand [cycles/bit]
  double lambda_k = 0.5;        // fraction of cycles executed at the UAV
  double residual_ratio = -1.0; // D'_k = ratio * D_k, <0 => 1 - lambda_k

  double k1 = 0.1; // UAV-hop reward/objective weight
  double k2 = 0.1; // BS-hop reward/objective weight
  double violation_penalty = 1.0; // added per infeasible/cancelled decision

  std::uint64_t seed = 1;

  // model switches (defaults follow the prose readings)
  bool coverage_3d = false;        // coverage test includes the altitude term
  bool sic_literal_power = false;  // SIC denominator uses the receiver's own power
  BackhaulFading backhaul_fading = BackhaulFading::Exponential;
  bool direct_to_bs = false;       // no-UAV variant: devices upload straight to the BS

  double effective_residual_ratio() const {
    return residual_ratio < 0.0 ? 1.0 - lambda_k : residual_ratio;
  }
  double bandwidth_bits_per_ms() const { return B / 1000.0; }
  double backhaul_bits_per_ms() const {
    return (backhaul_bw < 0.0 ? B : backhaul_bw) / 1000.0;
  }
  double uav_cycle_budget() const { return f_uav_max * slot_ms; }
  double bs_cycle_budget() const { return f_bs_max * slot_ms; }

  // throws ConfigError on any violated invariant
  void validate() const;

  std::string to_json() const;
  static ScenarioConfig from_json(const std::string& text);
  static ScenarioConfig load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace aoisim
