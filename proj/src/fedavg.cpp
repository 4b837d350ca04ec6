#include "aoisim/fedavg.hpp"

#include <stdexcept>

namespace aoisim {

MixMatrix::MixMatrix(int agents, double self_weight) : M(agents), w(self_weight) {
  if (M < 1) throw std::invalid_argument("MixMatrix: need at least one agent");
  if (w < 0.0 || w > 1.0) throw std::invalid_argument("MixMatrix: w must lie in [0,1]");
}

MatX MixMatrix::dense() const {
  MatX omega = MatX::Constant(M, M, off_diagonal());
  omega.diagonal().setConstant(M > 1 ? w : 1.0);
  return omega;
}

std::vector<ParamSet> aggregate(const std::vector<ParamSet>& params, const MixMatrix& mix) {
  if (static_cast<int>(params.size()) != mix.M)
    throw std::invalid_argument("aggregate: agent count mismatch");
  if (params.empty()) return {};
  for (const ParamSet& p : params)
    if (p.shapes != params.front().shapes || p.count() != params.front().count())
      throw std::invalid_argument("aggregate: parameter shapes differ across agents");

  if (mix.M == 1) return params;

  // convex combination with the cross-agent mean; accumulate in long double
  // so the mean is preserved to within an ulp
  const Index n = params.front().count();
  std::vector<long double> mean(static_cast<std::size_t>(n), 0.0L);
  for (const ParamSet& p : params)
    for (Index j = 0; j < n; ++j) mean[static_cast<std::size_t>(j)] += p.values[j];
  for (long double& v : mean) v /= static_cast<long double>(mix.M);

  const long double alpha = static_cast<long double>(mix.w) - mix.off_diagonal();
  std::vector<ParamSet> out = params;
  for (ParamSet& p : out)
    for (Index j = 0; j < n; ++j)
      p.values[j] = static_cast<double>(alpha * p.values[j] +
                                        (1.0L - alpha) * mean[static_cast<std::size_t>(j)]);
  return out;
}

bool aggregation_due(int epoch, int period) {
  if (period < 1) throw std::invalid_argument("aggregation_due: period must be >= 1");
  return epoch >= 2 && epoch % period == 0;
}

double parameter_spread(const std::vector<ParamSet>& params) {
  if (params.size() < 2) return 0.0;
  VecX lo = params.front().values;
  VecX hi = params.front().values;
  for (const ParamSet& p : params) {
    lo = lo.cwiseMin(p.values);
    hi = hi.cwiseMax(p.values);
  }
  return (hi - lo).maxCoeff();
}

}  // namespace aoisim
