#pragma once

#include <vector>

#include "aoisim/types.hpp"

namespace aoisim {

// Per-slot CPU grants and binary processing selectors.
struct CpuAllocation {
  VecX f_uav;  // cycles/ms granted at each UAV this slot
  VecX f_bs;   // BS cycles/ms granted to each UAV's tasks this slot
  MatB phi;    // M x K, task k processed at UAV m this slot
  MatB j;      // K x M, task k (forwarded by UAV m) processed at the BS

  CpuAllocation() = default;
  CpuAllocation(int M, int K)
      : f_uav(VecX::Zero(M)), f_bs(VecX::Zero(M)), phi(MatB::Zero(M, K)), j(MatB::Zero(K, M)) {}
};

// Cycle demand of one task's UAV share: lambda * D * F.
inline double uav_task_cycles(double lambda, double d_bits, double f_cyc_per_bit) {
  return lambda * d_bits * f_cyc_per_bit;
}

// Cycle demand of the residual share executed at the BS: (1-lambda) * D * F.
inline double bs_task_cycles(double lambda, double d_bits, double f_cyc_per_bit) {
  return (1.0 - lambda) * d_bits * f_cyc_per_bit;
}

// Execution time of UAV m this slot: sum of selected tasks' UAV cycle shares
// over the granted capacity. `cycles[k]` must already be the lambda-scaled
// demand. Returns 0 for an empty selection, +inf for a selection with no
// granted CPU.
inline double uav_exec_time(const CpuAllocation& alloc, const std::vector<double>& cycles, int m) {
  double total = 0.0;
  for (int k = 0; k < alloc.phi.cols(); ++k)
    if (alloc.phi(m, k)) total += cycles[static_cast<std::size_t>(k)];
  if (total <= 0.0) return 0.0;
  if (alloc.f_uav(m) <= 0.0) return std::numeric_limits<double>::infinity();
  return total / alloc.f_uav(m);
}

// Execution time of UAV m's forwarded tasks at the BS; `cycles[k]` is the
// (1-lambda)-scaled residual demand.
inline double bs_exec_time(const CpuAllocation& alloc, const std::vector<double>& cycles, int m) {
  double total = 0.0;
  for (int k = 0; k < alloc.j.rows(); ++k)
    if (alloc.j(k, m)) total += cycles[static_cast<std::size_t>(k)];
  if (total <= 0.0) return 0.0;
  if (alloc.f_bs(m) <= 0.0) return std::numeric_limits<double>::infinity();
  return total / alloc.f_bs(m);
}

}  // namespace aoisim
