#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "aoisim/types.hpp"

namespace aoisim {

// Channel, SINR, rate and transmission-time math for both hops. The core
// formulas are free functions templated on the scalar so they compose with
// Eigen expressions and can be instantiated at any precision.

// LoS channel gain between a transmitter/receiver pair separated by `alt`
// vertically and (dx, dy) horizontally: beta0 / (alt^2 + dx^2 + dy^2).
template <typename Scalar>
Scalar access_gain(Scalar beta0, Scalar alt, Scalar dx, Scalar dy) {
  return beta0 / (alt * alt + dx * dx + dy * dy);
}

// Shannon rate over one subcarrier: bw * log2(1 + tx_power*gain/noise).
// `bw` carries the unit; pass bits-per-ms bandwidth to get bits/ms.
template <typename Scalar>
Scalar access_rate(Scalar gain, Scalar tx_power, Scalar noise, Scalar bw) {
  return bw * std::log2(Scalar(1) + tx_power * gain / noise);
}

// Upload time for one task over one subcarrier; `scheduled` is the binary
// assignment. Returns 0 when unscheduled and +inf when scheduled at zero
// rate (the caller records that as a violation).
template <typename Scalar>
Scalar upload_time(Scalar data_bits, bool scheduled, Scalar rate) {
  if (!scheduled) return Scalar(0);
  if (rate <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return data_bits / rate;
}

// Binary device -> (UAV, subcarrier) assignment. psi(m, k*F + f) == 1 means
// device k uploads to UAV m on access subcarrier f. Each device appears in
// at most one (m, f) cell.
struct AccessAssignment {
  MatB psi;  // M x (K*F)
  int K = 0, F = 0;

  AccessAssignment() = default;
  AccessAssignment(int M, int K_, int F_) : psi(MatB::Zero(M, K_ * F_)), K(K_), F(F_) {}
  std::uint8_t& at(int m, int k, int f) { return psi(m, k * F + f); }
  std::uint8_t at(int m, int k, int f) const { return psi(m, k * F + f); }
};

// Backhaul side: subcarrier allocation, transmit powers, per-(UAV, subcarrier)
// channel magnitude-squared coefficients, and the task-forwarding selector.
struct BackhaulAssignment {
  MatB zeta;   // M x L, subcarrier allocation
  MatX power;  // M x L, transmit power [W]
  MatX h2;     // M x L, |h|^2 (linear)
  MatB z;      // K x M, task k at UAV m selected for forwarding

  BackhaulAssignment() = default;
  BackhaulAssignment(int M, int L, int K)
      : zeta(MatB::Zero(M, L)),
        power(MatX::Zero(M, L)),
        h2(MatX::Zero(M, L)),
        z(MatB::Zero(K, M)) {}
};

// Decode-order rule for SIC on one subcarrier: UAV a is decoded before
// (treated as stronger than) UAV b iff |h_a|^2 > |h_b|^2, ties broken by
// the lower index.
inline bool sic_decoded_before(double h2_a, int a, double h2_b, int b) {
  if (h2_a != h2_b) return h2_a > h2_b;
  return a < b;
}

// SINR of UAV m on backhaul subcarrier l under SIC: interference comes only
// from co-scheduled UAVs decoded after m (weaker channel, or equal channel
// with higher index). `literal_power_subscript` reproduces the receiver's
// own power inside the interference sum instead of each interferer's.
template <typename Scalar>
Scalar backhaul_sinr(const BackhaulAssignment& a, int m, int l, Scalar noise,
                     bool literal_power_subscript = false) {
  if (!a.zeta(m, l)) return Scalar(0);
  Scalar interference(0);
  for (int mp = 0; mp < a.zeta.rows(); ++mp) {
    if (mp == m || !a.zeta(mp, l)) continue;
    if (sic_decoded_before(a.h2(mp, l), mp, a.h2(m, l), m)) continue;
    const Scalar p = literal_power_subscript ? Scalar(a.power(m, l)) : Scalar(a.power(mp, l));
    interference += Scalar(a.h2(mp, l)) * p;
  }
  return Scalar(a.h2(m, l)) * Scalar(a.power(m, l)) / (interference + noise);
}

// Sum backhaul rate of UAV m across subcarriers, scaled by the
// per-subcarrier bandwidth (pass bits/ms bandwidth to get bits/ms).
template <typename Scalar>
Scalar backhaul_sum_rate(const BackhaulAssignment& a, int m, Scalar noise, Scalar bw,
                         bool literal_power_subscript = false) {
  Scalar sum(0);
  for (int l = 0; l < a.zeta.cols(); ++l)
    sum += std::log2(Scalar(1) + backhaul_sinr<Scalar>(a, m, l, noise, literal_power_subscript));
  return bw * sum;
}

// Total forwarding time of UAV m for the selected residual payloads. Returns
// 0 when nothing is selected and +inf when forwarding is selected with no
// allocated subcarrier or zero rate (recorded as a violation upstream).
template <typename Scalar>
Scalar backhaul_time(const BackhaulAssignment& a, int m,
                     const std::vector<Scalar>& residual_bits, Scalar rate) {
  Scalar payload(0);
  for (int k = 0; k < a.z.rows(); ++k)
    if (a.z(k, m)) payload += residual_bits[static_cast<std::size_t>(k)];
  if (payload <= Scalar(0)) return Scalar(0);
  const bool any_subcarrier = a.zeta.row(m).any();
  if (!any_subcarrier || rate <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return payload / rate;
}

}  // namespace aoisim
