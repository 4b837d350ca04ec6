#include <cmath>
#include <cstdio>
#include <vector>

#include "acceptance.hpp"
#include "aoisim/fedavg.hpp"
#include "aoisim/rng.hpp"

using namespace aoisim;

namespace {

std::vector<ParamSet> random_params(int agents, Index n, Rng& rng) {
  std::vector<ParamSet> out;
  for (int i = 0; i < agents; ++i) {
    ParamSet p;
    p.shapes = {{static_cast<int>(n) - 1, 1}};
    p.values.resize(n);
    for (Index j = 0; j < n; ++j) p.values[j] = rng.uniform(-8.0, 8.0);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

bool acc_fedavg() {
  Rng rng(5150);
  bool ok = true;

  // doubly stochastic for all M <= 8 over a w grid, exact row/column sums
  for (int m = 1; m <= 8 && ok; ++m)
    for (double w = 0.0; w <= 1.0 + 1e-12; w += 0.125) {
      const MatX omega = MixMatrix(m, std::min(w, 1.0)).dense();
      for (int i = 0; i < m; ++i) {
        ok = ok && std::abs(omega.row(i).sum() - 1.0) <= 1e-15;
        ok = ok && std::abs(omega.col(i).sum() - 1.0) <= 1e-15;
      }
    }
  if (!ok) {
    std::printf("  fedavg: mixing matrix is not doubly stochastic\n");
    return false;
  }

  // mean preservation to one ulp at the coordinate scale
  double worst_ulps = 0.0;
  for (int m = 2; m <= 8; ++m)
    for (double w : {0.0, 0.3, 0.5, 0.8, 1.0}) {
      const auto params = random_params(m, 64, rng);
      const auto mixed = aggregate(params, MixMatrix(m, w));
      for (Index j = 0; j < 64; ++j) {
        long double before = 0.0L, after = 0.0L;
        double scale = 0.0;
        for (int i = 0; i < m; ++i) {
          before += params[static_cast<std::size_t>(i)].values[j];
          after += mixed[static_cast<std::size_t>(i)].values[j];
          scale = std::max(scale, std::abs(params[static_cast<std::size_t>(i)].values[j]));
        }
        const double diff = static_cast<double>(std::abs(after - before)) / m;
        const double ulp = std::ldexp(std::max(scale, 1e-300), -52);
        worst_ulps = std::max(worst_ulps, diff / ulp);
      }
    }

  // two-agent spread contraction factor |w - (1-w)| to 1e-12
  double worst_contraction = 0.0;
  for (double w : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    const auto params = random_params(2, 32, rng);
    const double before = parameter_spread(params);
    const double after = parameter_spread(aggregate(params, MixMatrix(2, w)));
    const double expect = std::abs(w - (1.0 - w)) * before;
    worst_contraction = std::max(worst_contraction, std::abs(after - expect) / std::max(before, 1e-300));
  }

  // w = 1 is a no-op, bit for bit
  bool noop = true;
  {
    const auto params = random_params(5, 48, rng);
    const auto mixed = aggregate(params, MixMatrix(5, 1.0));
    for (int i = 0; i < 5; ++i)
      noop = noop && mixed[static_cast<std::size_t>(i)].values ==
                         params[static_cast<std::size_t>(i)].values;
  }

  std::printf("  fedavg: mean drift %.3f ulp (bound 1), contraction error %.3e (bound 1e-12), "
              "w=1 no-op %s\n",
              worst_ulps, worst_contraction, noop ? "yes" : "NO");
  return worst_ulps <= 1.0 && worst_contraction <= 1e-12 && noop;
}
