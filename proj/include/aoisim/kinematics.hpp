#pragma once

#include <vector>

#include "aoisim/types.hpp"

namespace aoisim {

// Horizontal per-slot displacement command. The norm is clipped to the
// per-slot travel budget before it is applied.
struct VelocityCmd {
  double vx = 0.0;
  double vy = 0.0;
  Vec2 vec() const { return Vec2(vx, vy); }
};

struct MoveResult {
  std::vector<Vec2> positions;      // post-move horizontal positions
  std::vector<Vec2> applied;        // displacement actually applied per UAV
  std::vector<bool> held;           // true if the move was cancelled
  int violations = 0;               // number of spacing cancellations
};

// Applies one slot of UAV motion: each commanded displacement is clipped to
// norm <= max_step, positions are clamped to the [0, area]^2 box, and any
// pair of proposed positions closer than min_dist has both moves cancelled.
// Cancellations cascade (a reverted UAV can invalidate another proposed
// move) until the configuration is stable; the starting configuration is
// assumed pairwise-feasible, so the iteration always terminates.
MoveResult apply_move(const std::vector<Vec2>& positions,
                      const std::vector<VelocityCmd>& cmds,
                      double max_step, double area, double min_dist);

// Coverage test between a UAV at altitude `alt` and a ground point.
// The flat variant compares the horizontal distance against r_max; the 3d
// variant includes the altitude term in the distance.
bool in_coverage(const Vec2& uav, double alt, const Vec2& device, double r_max,
                 bool use_3d = false);

}  // namespace aoisim
