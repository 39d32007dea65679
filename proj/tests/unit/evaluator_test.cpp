// Copyright 2026 The GoGePo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gogepo/evaluator.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gradcheck.hpp"
#include "oracles.hpp"

namespace gogepo {
namespace {

EvaluatorConfig config(int obs = 3, int act = 2, int hidden = 16, int probes = 10) {
  return {{obs, act, hidden}, probes, 24};
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

TEST(EvaluatorInit, ShapesAndProbeRange) {
  Rng rng = make_stream(0, Stream::kInit);
  const EvaluatorParams w = init_evaluator({{2, 1, 16}, 200, 256}, rng);
  EXPECT_EQ(w.probing_states().rows(), 200);
  EXPECT_EQ(w.probing_states().cols(), 2);
  EXPECT_EQ(w.params.at("value.w0").rows(), 200);
  EXPECT_GE(w.probing_states().minCoeff(), 0.0);
  EXPECT_LT(w.probing_states().maxCoeff(), 1.0);
  Rng again = make_stream(0, Stream::kInit);
  EXPECT_TRUE(init_evaluator({{2, 1, 16}, 200, 256}, again).params == w.params);
}

TEST(ProbingActions, ZeroPolicyGivesZeroVector) {
  Rng rng = make_stream(1, Stream::kInit);
  const EvaluatorParams w = init_evaluator(config(), rng);
  EXPECT_TRUE(probing_actions(w, PolicyParams::zeros({3, 2, 16})).isZero(0.0));
}

TEST(ProbingActions, EqualsPerStateLoopAndIgnoresBounds) {
  Rng rng = make_stream(2, Stream::kInit);
  const EvaluatorParams w = init_evaluator(config(), rng);
  PolicyParams t = init_policy({3, 2, 16}, 16, rng);
  t.k3 *= 40.0;
  const Vector got = probing_actions(w, t);
  const auto ref = oracle::probing_actions(w, t);
  ASSERT_EQ(got.size(), 20);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_NEAR(got[static_cast<Eigen::Index>(i)], ref[i], 1e-12 * (1.0 + std::abs(ref[i])));
  }
  EXPECT_GT(got.cwiseAbs().maxCoeff(), 1.0);
}

TEST(ProbingActions, DimensionMismatchRejected) {
  Rng rng = make_stream(3, Stream::kInit);
  const EvaluatorParams w = init_evaluator(config(), rng);
  EXPECT_THROW(probing_actions(w, PolicyParams::zeros({4, 2, 16})), std::invalid_argument);
  EXPECT_THROW(evaluate(w, PolicyParams::zeros({3, 1, 16})), std::invalid_argument);
}

TEST(Evaluate, MatchesComposedOracle) {
  Rng rng = make_stream(4, Stream::kInit);
  const EvaluatorParams w = init_evaluator(config(), rng);
  for (int i = 0; i < 5; ++i) {
    const PolicyParams t = init_policy({3, 2, 16}, 16, rng);
    EXPECT_NEAR(evaluate(w, t), oracle::value(w, t), 1e-12);
  }
}

TEST(Evaluate, ZeroWeightsReturnOutputBias) {
  Rng rng = make_stream(5, Stream::kInit);
  EvaluatorParams w = init_evaluator(config(), rng);
  for (auto& e : w.params.entries()) {
    if (e.name.rfind("value.", 0) == 0) e.value.setZero();
  }
  w.params.at("value.b2")(0, 0) = 5.0;
  EXPECT_EQ(evaluate(w, init_policy({3, 2, 16}, 16, rng)), 5.0);
}

TEST(Evaluate, TapeValueMatchesDirect) {
  Rng rng = make_stream(6, Stream::kInit);
  const EvaluatorParams w = init_evaluator(config(), rng);
  std::vector<PolicyParams> ps;
  for (int i = 0; i < 3; ++i) ps.push_back(init_policy({3, 2, 16}, 16, rng));
  diff::Tape tape;
  const VarMap vars = w.params.bind_constants(tape, "");
  std::vector<nets::PolicyVars> pv;
  for (const auto& p : ps) pv.push_back(nets::bind_policy_constants(tape, p));
  const Matrix v = tape.value(value_on_tape(tape, w.config, vars, pv));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(v(i, 0), evaluate(w, ps[static_cast<std::size_t>(i)]), 1e-12);
}

class Symmetry : public ::testing::TestWithParam<int> {};

TEST_P(Symmetry, PermutedPolicyHasSameFingerprintAndValue) {
  Rng rng = make_stream(static_cast<std::uint64_t>(GetParam()), std::uint64_t{31});
  const EvaluatorParams w = init_evaluator(config(3, 2, 32, 12), rng);
  const PolicyParams t = init_policy({3, 2, 32}, 16, rng);
  const PolicyParams s =
      permute_hidden(permute_hidden(t, 2, random_permutation(32, rng)), 1, random_permutation(32, rng));
  EXPECT_LT((probing_actions(w, s) - probing_actions(w, t)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(evaluate(w, s), evaluate(w, t), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Seeds, Symmetry, ::testing::Range(0, 10));

TEST(Evaluate, ArchitectureIndependence) {
  Rng rng = make_stream(7, Stream::kInit);
  const EvaluatorParams w = init_evaluator(config(3, 2, 16, 10), rng);
  const PolicyParams narrow = init_policy({3, 2, 16}, 16, rng);
  // Duplicate every hidden unit of layer 2 and halve the outgoing weights:
  // same function, twice the width.
  PolicyParams wide = PolicyParams::zeros({3, 2, 32});
  wide.k1.topRows(16) = narrow.k1;
  wide.b1.head(16) = narrow.b1;
  wide.k2.block(0, 0, 16, 16) = narrow.k2;
  wide.k2.block(16, 0, 16, 16) = narrow.k2;
  wide.b2.head(16) = narrow.b2;
  wide.b2.tail(16) = narrow.b2;
  wide.k3.leftCols(16) = 0.5 * narrow.k3;
  wide.k3.rightCols(16) = 0.5 * narrow.k3;
  wide.b3 = narrow.b3;
  EXPECT_NEAR(evaluate(w, wide), evaluate(w, narrow), 1e-12);
}

TEST(EvaluatorUpdate, ZeroLearningRateAndEmptyBatch) {
  Rng rng = make_stream(8, Stream::kInit);
  EvaluatorParams w = init_evaluator(config(), rng);
  const ParamSet before = w.params;
  AdamState opt = AdamState::for_params(w.params);
  const std::vector<PolicyParams> ps{init_policy({3, 2, 16}, 16, rng)};
  const double r[] = {1.0};
  evaluator_update(w, r, ps, opt, 0.0);
  EXPECT_TRUE(w.params == before);
  EXPECT_THROW(evaluator_update(w, {}, {}, opt, 1e-3), std::invalid_argument);
}

TEST(EvaluatorUpdate, FitsSinglePair) {
  Rng rng = make_stream(9, Stream::kInit);
  EvaluatorParams w = init_evaluator({{3, 2, 16}, 200, 256}, rng);
  AdamState opt = AdamState::for_params(w.params);
  const std::vector<PolicyParams> ps{init_policy({3, 2, 16}, 16, rng)};
  const double r[] = {10.0};
  const Matrix probes_before = w.probing_states();
  for (int i = 0; i < 2000; ++i) evaluator_update(w, r, ps, opt, 5e-3);
  const double e = evaluate(w, ps[0]) - 10.0;
  EXPECT_LT(e * e, 1e-2);
  EXPECT_GT((w.probing_states() - probes_before).cwiseAbs().maxCoeff(), 0.0);
}

class EvaluatorGradient : public ::testing::TestWithParam<int> {};

TEST_P(EvaluatorGradient, MatchesFiniteDifferences) {
  EXPECT_LT(gradcheck::evaluator_loss_graph(gradcheck::tiny_setup(static_cast<std::uint64_t>(GetParam()))),
            1e-4);
}

INSTANTIATE_TEST_SUITE_P(Seeds, EvaluatorGradient, ::testing::Range(0, 10));

}  // namespace
}  // namespace gogepo
