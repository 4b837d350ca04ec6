#include "aoisim/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoisim {

namespace {

Vec2 clamp_to_box(const Vec2& p, double area) {
  return Vec2(std::clamp(p.x(), 0.0, area), std::clamp(p.y(), 0.0, area));
}

}  // namespace

MoveResult apply_move(const std::vector<Vec2>& positions,
                      const std::vector<VelocityCmd>& cmds,
                      double max_step, double area, double min_dist) {
  if (cmds.size() != positions.size())
    throw std::invalid_argument("apply_move: one command per UAV required");

  const std::size_t m = positions.size();
  MoveResult out;
  out.positions.resize(m);
  out.applied.assign(m, Vec2::Zero());
  out.held.assign(m, false);

  for (std::size_t i = 0; i < m; ++i) {
    Vec2 d = cmds[i].vec();
    const double n = d.norm();
    if (n > max_step && n > 0.0) d *= max_step / n;
    out.positions[i] = clamp_to_box(positions[i] + d, area);
  }

  // Cancel both members of every pair violating the spacing constraint,
  // then re-check: a reverted UAV may sit too close to a still-moving one.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if ((out.positions[i] - out.positions[j]).norm() >= min_dist) continue;
        for (std::size_t v : {i, j}) {
          if (!out.held[v]) {
            out.held[v] = true;
            out.positions[v] = positions[v];
            out.violations += 1;
            changed = true;
          }
        }
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i)
    if (!out.held[i]) out.applied[i] = out.positions[i] - positions[i];

  return out;
}

bool in_coverage(const Vec2& uav, double alt, const Vec2& device, double r_max,
                 bool use_3d) {
  const double horiz2 = (uav - device).squaredNorm();
  const double d2 = use_3d ? horiz2 + alt * alt : horiz2;
  return d2 <= r_max * r_max;
}

}  // namespace aoisim
