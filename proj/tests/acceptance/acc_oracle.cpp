#include <cstdio>
#include <vector>

#include "acceptance.hpp"
#include "aoisim/bench.hpp"

using namespace aoisim;

bool acc_oracle() {
  // 20 frozen instances spanning easy and contended shapes
  struct Shape {
    int K, M, F, L, L_l, horizon;
    double f_uav;  // <0 keeps the tiny-config default (two task shares/slot)
  };
  const std::vector<Shape> shapes = {
      {1, 1, 1, 1, 1, 8, -1.0}, {2, 1, 1, 1, 1, 8, -1.0},  {2, 2, 2, 2, 2, 8, -1.0},
      {2, 2, 1, 2, 1, 8, -1.0}, {2, 2, 2, 1, 1, 8, -1.0},  {3, 1, 1, 1, 1, 6, -1.0},
      {3, 2, 1, 2, 2, 6, -1.0}, {2, 1, 1, 1, 1, 8, 4e6},   {2, 2, 1, 1, 1, 8, 4e6},
      {3, 1, 1, 2, 1, 6, 4e6},
  };

  int ok = 0, total = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    for (std::uint64_t rep = 0; rep < 2; ++rep) {
      const Shape& s = shapes[i];
      ScenarioConfig cfg = tiny_oracle_config(1000 + 17 * i + rep, s.K, s.M, s.F, s.L, s.L_l);
      if (s.f_uav > 0.0) cfg.f_uav_max = s.f_uav;
      const OracleCheckRow row = oracle_check(cfg, s.horizon);
      total += 1;
      const bool good = row.replay_exact && row.ordered;
      ok += good ? 1 : 0;
      std::printf("  oracle[%02d] K=%d M=%d F=%d L_l=%d T=%d: oracle=%.6g replay=%.6g "
                  "greedy=%.6g random=%.6g %s\n",
                  total, s.K, s.M, s.F, s.L_l, s.horizon, row.oracle_objective,
                  row.replay_objective, row.greedy_objective, row.random_objective,
                  good ? "ok" : "MISMATCH");
    }
  }
  return ok == total && total == 20;
}
