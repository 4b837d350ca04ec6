#include "doctest.h"

#include "aoisim/fedavg.hpp"

using namespace aoisim;

namespace {

ParamSet scalar_params(double v) {
  ParamSet p;
  p.shapes = {{1, 1}};
  p.values = VecX::Constant(2, v);
  return p;
}

}  // namespace

TEST_CASE("the mixing matrix is doubly stochastic") {
  for (int m = 1; m <= 8; ++m)
    for (double w : {0.0, 0.25, 0.5, 0.8, 1.0}) {
      const MixMatrix mix(m, w);
      const MatX omega = mix.dense();
      for (int i = 0; i < m; ++i) {
        CHECK(omega.row(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(omega.col(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  CHECK_THROWS_AS(MixMatrix(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(MixMatrix(2, 1.5), std::invalid_argument);
}

TEST_CASE("w = 1 is the identity") {
  const std::vector<ParamSet> params = {scalar_params(0.0), scalar_params(2.0)};
  const auto out = aggregate(params, MixMatrix(2, 1.0));
  CHECK(out[0].values == params[0].values);
  CHECK(out[1].values == params[1].values);
}

TEST_CASE("two agents at w = 0.5 meet in the middle") {
  const std::vector<ParamSet> params = {scalar_params(0.0), scalar_params(2.0)};
  const auto out = aggregate(params, MixMatrix(2, 0.5));
  CHECK(out[0].values[0] == doctest::Approx(1.0));
  CHECK(out[1].values[0] == doctest::Approx(1.0));
}

TEST_CASE("three agents at w = 0.8 match the hand multiply") {
  const std::vector<ParamSet> params = {scalar_params(0.0), scalar_params(3.0),
                                        scalar_params(6.0)};
  const auto out = aggregate(params, MixMatrix(3, 0.8));
  CHECK(out[0].values[0] == doctest::Approx(0.9));   // 0.8*0 + 0.1*3 + 0.1*6
  CHECK(out[1].values[0] == doctest::Approx(3.0));
  CHECK(out[2].values[0] == doctest::Approx(5.1));
}

TEST_CASE("aggregation preserves the cross-agent mean") {
  Rng rng(12);
  std::vector<ParamSet> params;
  for (int i = 0; i < 5; ++i) {
    ParamSet p;
    p.shapes = {{3, 2}};
    p.values.resize(3 * 2 + 2);
    for (Index j = 0; j < p.values.size(); ++j) p.values[j] = rng.uniform(-5.0, 5.0);
    params.push_back(std::move(p));
  }
  const auto out = aggregate(params, MixMatrix(5, 0.6));
  for (Index j = 0; j < params[0].values.size(); ++j) {
    double before = 0.0, after = 0.0;
    for (int i = 0; i < 5; ++i) {
      before += params[static_cast<std::size_t>(i)].values[j];
      after += out[static_cast<std::size_t>(i)].values[j];
    }
    CHECK(after / 5.0 == doctest::Approx(before / 5.0).epsilon(1e-14));
  }
}

TEST_CASE("two-agent contraction factor is |w - (1-w)|") {
  for (double w : {0.1, 0.3, 0.5, 0.9}) {
    const std::vector<ParamSet> params = {scalar_params(-1.0), scalar_params(3.0)};
    const double before = parameter_spread(params);
    const auto out = aggregate(params, MixMatrix(2, w));
    const double after = parameter_spread(out);
    CHECK(after == doctest::Approx(std::abs(w - (1.0 - w)) * before).epsilon(1e-12));
  }
}

TEST_CASE("aggregation is equivariant under agent permutation") {
  const std::vector<ParamSet> params = {scalar_params(1.0), scalar_params(4.0),
                                        scalar_params(-2.0)};
  const std::vector<ParamSet> permuted = {params[2], params[0], params[1]};
  const auto out = aggregate(params, MixMatrix(3, 0.7));
  const auto out_p = aggregate(permuted, MixMatrix(3, 0.7));
  CHECK(out_p[0].values == out[2].values);
  CHECK(out_p[1].values == out[0].values);
  CHECK(out_p[2].values == out[1].values);
}

TEST_CASE("shape mismatches are rejected") {
  ParamSet a = scalar_params(1.0);
  ParamSet b;
  b.shapes = {{2, 1}};
  b.values = VecX::Zero(3);
  CHECK_THROWS_AS(aggregate({a, b}, MixMatrix(2, 0.5)), std::invalid_argument);
}

TEST_CASE("aggregation schedule honors the period and the warmup gate") {
  CHECK(aggregation_due(5, 1));
  CHECK_FALSE(aggregation_due(5, 10));
  CHECK_FALSE(aggregation_due(1, 1));  // never before the second epoch
  CHECK(aggregation_due(2, 2));
  CHECK_FALSE(aggregation_due(3, 2));
  CHECK_THROWS_AS(aggregation_due(3, 0), std::invalid_argument);
}
