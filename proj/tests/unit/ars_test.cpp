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

#include "gogepo/ars.hpp"
#include "gogepo/checkpoint.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace gogepo {
namespace {

namespace fs = std::filesystem;

Vector random_vector(std::mt19937_64& g, Eigen::Index n) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (auto& x : v) x = d(g);
  return v;
}

TEST(ArsUpdate, SingleDirection) {
  Vector theta = Vector::Zero(3);
  std::vector<Vector> deltas{Vector::Ones(3)};
  const std::vector<double> rp{1.0}, rm{0.0};
  const Vector out = ars_update(theta, deltas, rp, rm, 0.01, 1);
  for (auto x : out) EXPECT_NEAR(x, 0.02, 1e-15);
}

TEST(ArsUpdate, EqualRewardsAndZeroStepLeaveThetaUnchanged) {
  std::mt19937_64 g(1);
  const Vector theta = random_vector(g, 5);
  std::vector<Vector> deltas{random_vector(g, 5), random_vector(g, 5)};
  const std::vector<double> r{3.0, -2.0};
  EXPECT_EQ(ars_update(theta, deltas, r, r, 0.01, 2), theta);
  const std::vector<double> rp{1.0, 4.0}, rm{0.0, -1.0};
  EXPECT_EQ(ars_update(theta, deltas, rp, rm, 0.0, 2), theta);
}

// Direct evaluation: explicit elite sort, population std of the 2b rewards.
Vector reference_update(const Vector& theta, const std::vector<Vector>& deltas,
                        const std::vector<double>& rp, const std::vector<double>& rm, double step,
                        int b) {
  std::vector<int> order(deltas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return std::max(rp[x], rm[x]) > std::max(rp[y], rm[y]);
  });
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < b; ++k) sum += rp[order[k]] + rm[order[k]];
  const double mean = sum / (2 * b);
  for (int k = 0; k < b; ++k) {
    sq += (rp[order[k]] - mean) * (rp[order[k]] - mean) + (rm[order[k]] - mean) * (rm[order[k]] - mean);
  }
  const double sigma = std::max(std::sqrt(sq / (2 * b)), 1e-8);
  Vector out = theta;
  for (int k = 0; k < b; ++k) out += step / (b * sigma) * (rp[order[k]] - rm[order[k]]) * deltas[order[k]];
  return out;
}

TEST(ArsUpdate, MatchesReferenceAndKeepsElite) {
  std::mt19937_64 g(7);
  std::normal_distribution<double> d(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6;
    const Vector theta = random_vector(g, 4);
    std::vector<Vector> deltas;
    std::vector<double> rp, rm;
    for (int i = 0; i < n; ++i) {
      deltas.push_back(random_vector(g, 4));
      rp.push_back(d(g));
      rm.push_back(d(g));
    }
    for (int b = 1; b <= n; ++b) {
      const Vector got = ars_update(theta, deltas, rp, rm, 0.02, b);
      EXPECT_TRUE(got.isApprox(reference_update(theta, deltas, rp, rm, 0.02, b), 1e-12));
    }
  }
}

TEST(ArsUpdate, FullEliteIgnoresOrdering) {
  std::mt19937_64 g(3);
  const Vector theta = random_vector(g, 4);
  std::vector<Vector> deltas{random_vector(g, 4), random_vector(g, 4), random_vector(g, 4)};
  std::vector<double> rp{1.0, 5.0, -2.0}, rm{0.5, 7.0, 3.0};
  const Vector a = ars_update(theta, deltas, rp, rm, 0.01, 3);
  std::swap(deltas[0], deltas[2]);
  std::swap(rp[0], rp[2]);
  std::swap(rm[0], rm[2]);
  EXPECT_TRUE(ars_update(theta, deltas, rp, rm, 0.01, 3).isApprox(a, 1e-14));
}

TEST(ArsUpdate, RewardScaleCancels) {
  std::mt19937_64 g(5);
  const Vector theta = random_vector(g, 4);
  std::vector<Vector> deltas{random_vector(g, 4), random_vector(g, 4)};
  std::vector<double> rp{1.0, 2.0}, rm{-1.5, 0.25};
  const Vector a = ars_update(theta, deltas, rp, rm, 0.01, 2);
  for (double k : {0.001, 3.0, 1000.0}) {
    std::vector<double> sp, sm;
    for (double r : rp) sp.push_back(k * r);
    for (double r : rm) sm.push_back(k * r);
    EXPECT_TRUE(ars_update(theta, deltas, sp, sm, 0.01, 2).isApprox(a, 1e-12)) << k;
  }
}

TEST(ArsUpdate, Errors) {
  const Vector theta = Vector::Zero(2);
  std::vector<Vector> deltas{Vector::Ones(2)};
  const std::vector<double> one{1.0}, two{1.0, 2.0};
  EXPECT_THROW(ars_update(theta, deltas, one, one, 0.01, 2), std::invalid_argument);
  EXPECT_THROW(ars_update(theta, deltas, one, one, 0.01, 0), std::invalid_argument);
  EXPECT_THROW(ars_update(theta, deltas, two, one, 0.01, 1), std::invalid_argument);
}

ArsConfig small_ars(std::uint64_t seed) {
  ArsConfig c;
  c.env = "pointreacher";
  c.hidden = 16;
  c.slice = 16;
  c.directions = 4;
  c.elite_directions = 2;
  c.step_size = 0.02;
  c.noise = 0.03;
  c.budget = 20000;
  c.eval_interval = 2000;
  c.eval_episodes = 1;
  c.seed = seed;
  return c;
}

TEST(Ars, IterationBookkeeping) {
  ArsState s = init_ars(small_ars(0));
  const Vector before = s.policy.flatten();
  ars_iteration(s);
  EXPECT_EQ(s.interactions, 2 * 4 * 100);
  EXPECT_EQ(s.episodes, 8);
  EXPECT_EQ(s.obs_stat.count(), 800);
  EXPECT_NE(s.policy.flatten(), before);
}

TEST(Ars, BitReproducible) {
  ArsState a = init_ars(small_ars(4));
  ArsState b = init_ars(small_ars(4));
  run_ars(a);
  run_ars(b);
  EXPECT_EQ(a.policy.flatten(), b.policy.flatten());
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(format_log_row(a.log[i]), format_log_row(b.log[i]));
  }
}

TEST(Ars, PointReacherImproves) {
  ArsState s = init_ars(small_ars(1));
  run_ars(s);
  ASSERT_EQ(s.log.size(), 10u);
  int improving = 0;
  for (std::size_t i = 1; i < s.log.size(); ++i) {
    EXPECT_GE(s.log[i].best_buffer_return, s.log[i - 1].best_buffer_return);
    if (s.log[i].best_buffer_return >= s.log[i - 1].best_buffer_return) ++improving;
    EXPECT_FALSE(s.log[i].command.has_value());
    EXPECT_FALSE(s.log[i].loss_v.has_value());
  }
  EXPECT_GE(improving, 8);
  EXPECT_GT(s.log.back().eval_return_mean, s.log.front().eval_return_mean);
}

TEST(Ars, TrainWritesArtifacts) {
  const fs::path dir = fs::temp_directory_path() / "gogepo_ars_artifacts";
  fs::remove_all(dir);
  ArsConfig c = small_ars(2);
  c.budget = 2000;
  c.eval_interval = 1000;
  const ArsState s = ars_train(c, dir);
  EXPECT_TRUE(fs::exists(dir / "config.txt"));
  EXPECT_EQ(read_log_csv(dir / "log.csv").size(), 2u);
  const Checkpoint ck = load_checkpoint(dir / "policy.bin");
  EXPECT_EQ(ck.meta("kind"), "ars");
  EXPECT_EQ(Vector(ck.arrays.at("policy/flat").row(0).transpose()), s.policy.flatten());
  fs::remove_all(dir);
}

}  // namespace
}  // namespace gogepo
