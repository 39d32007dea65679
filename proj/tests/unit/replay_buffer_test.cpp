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

#include "gogepo/replay_buffer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

namespace gogepo {
namespace {

Vector theta(double v, Eigen::Index n = 3) { return Vector::Constant(n, v); }

TEST(ReplayBuffer, RingEvictsOldestFirst) {
  ReplayBuffer b(2);
  b.push(1.0, theta(1));
  b.push(2.0, theta(2));
  b.push(3.0, theta(3));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].ret, 2.0);
  EXPECT_EQ(b[1].ret, 3.0);
  EXPECT_EQ(b[0].episode, 2);
  EXPECT_EQ(b[1].episode, 3);
}

TEST(ReplayBuffer, SizeAndEpisodeIndices) {
  ReplayBuffer b(10);
  for (int k = 1; k <= 7; ++k) {
    b.push(k, theta(k));
    EXPECT_EQ(b.size(), static_cast<std::size_t>(k));
  }
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b[i].episode, static_cast<std::int64_t>(i + 1));
  EXPECT_EQ(b.age(6), 1);
  EXPECT_EQ(b.age(0), 7);
}

TEST(ReplayBuffer, NonFiniteReturnRejected) {
  ReplayBuffer b;
  EXPECT_THROW(b.push(std::nan(""), theta(0)), std::domain_error);
  EXPECT_THROW(b.push(INFINITY, theta(0)), std::domain_error);
  EXPECT_TRUE(b.empty());
}

TEST(ReplayBuffer, RecencyProbabilitiesForThreeEntries) {
  ReplayBuffer b;
  for (int k = 0; k < 3; ++k) b.push(k, theta(k));
  const double w[] = {std::pow(3.0, -1.1), std::pow(2.0, -1.1), 1.0};
  const double total = w[0] + w[1] + w[2];
  const auto p = b.probabilities(1.1);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[static_cast<std::size_t>(i)], w[i] / total, 1e-15);
  EXPECT_NEAR(p[2], 0.5665, 5e-5);
  EXPECT_NEAR(p[1], 0.2643, 5e-5);
  EXPECT_NEAR(p[0], 0.1692, 5e-5);
}

TEST(ReplayBuffer, EmpiricalFrequenciesMatchWithinTolerance) {
  ReplayBuffer b;
  for (int k = 0; k < 3; ++k) b.push(k, theta(k));
  const auto p = b.probabilities(1.1);
  Rng rng = make_stream(1, Stream::kSampling);
  const std::size_t n = 1'000'000;
  std::vector<double> counts(3, 0.0);
  for (std::size_t i : b.sample_indices(n, 1.1, rng)) counts[i] += 1.0;
  double chi2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double f = counts[static_cast<std::size_t>(i)] / n;
    EXPECT_NEAR(f, p[static_cast<std::size_t>(i)], 0.003);
    const double e = p[static_cast<std::size_t>(i)] * n;
    chi2 += (counts[static_cast<std::size_t>(i)] - e) * (counts[static_cast<std::size_t>(i)] - e) / e;
  }
  // 99th percentile of chi-square with 2 degrees of freedom.
  EXPECT_LT(chi2, 9.21);
}

TEST(ReplayBuffer, ExponentZeroIsUniform) {
  ReplayBuffer b;
  for (int k = 0; k < 4; ++k) b.push(k, theta(k));
  for (double q : b.probabilities(0.0)) EXPECT_DOUBLE_EQ(q, 0.25);
}

TEST(ReplayBuffer, SingleEntryAlwaysReturned) {
  ReplayBuffer b;
  b.push(5.0, theta(5));
  Rng rng(3);
  for (const auto& e : b.sample(50, 1.1, rng)) EXPECT_EQ(e.ret, 5.0);
}

TEST(ReplayBuffer, EmptyBufferErrors) {
  ReplayBuffer b;
  Rng rng(0);
  EXPECT_THROW(b.sample(1, 1.1, rng), std::logic_error);
  EXPECT_THROW(b.max_return(), std::logic_error);
}

TEST(ReplayBuffer, SamplingDeterministicGivenSeed) {
  ReplayBuffer b;
  for (int k = 0; k < 20; ++k) b.push(k, theta(k));
  Rng a = make_stream(4, Stream::kSampling);
  Rng c = make_stream(4, Stream::kSampling);
  EXPECT_EQ(b.sample_indices(100, 1.1, a), b.sample_indices(100, 1.1, c));
}

TEST(ReplayBuffer, MaxReturn) {
  ReplayBuffer b(2);
  b.push(-5, theta(0));
  EXPECT_EQ(b.max_return(), -5);
  b.push(120, theta(0));
  EXPECT_EQ(b.max_return(), 120);
  b.push(7, theta(0));
  EXPECT_EQ(b.max_return(), 120);
  b.push(3, theta(0));
  EXPECT_EQ(b.max_return(), 7);
  EXPECT_EQ(b.min_return(), 3);
}

TEST(ReplayBuffer, RestorePreservesOrderAndAges) {
  ReplayBuffer b(3);
  for (int k = 0; k < 5; ++k) b.push(k, theta(k));
  std::vector<ReplayEntry> entries;
  for (std::size_t i = 0; i < b.size(); ++i) entries.push_back(b[i]);
  ReplayBuffer r = ReplayBuffer::restore(3, b.episode_count(), entries);
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r[i].ret, b[i].ret);
    EXPECT_EQ(r.age(i), b.age(i));
  }
  r.push(9, theta(9));
  b.push(9, theta(9));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r[i].ret, b[i].ret);
}

TEST(BufferDump, RoundTrip) {
  const PolicyShape shape{2, 1, 16};
  ReplayBuffer b(4);
  Rng rng(2);
  for (int k = 0; k < 6; ++k) b.push(k * 1.5, init_policy(shape, 16, rng).flatten());
  const auto path = std::filesystem::temp_directory_path() / "gogepo_buffer_dump_test.bin";
  write_buffer_dump(path, b, shape);
  const BufferDump d = read_buffer_dump(path);
  std::filesystem::remove(path);
  EXPECT_EQ(d.shape, shape);
  ASSERT_EQ(d.entries.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(d.entries[i].ret, b[i].ret);
    EXPECT_EQ(d.entries[i].episode, b[i].episode);
    EXPECT_EQ(d.entries[i].theta, b[i].theta);
  }
}

TEST(BufferDump, ForeignFileRejected) {
  const auto path = std::filesystem::temp_directory_path() / "gogepo_not_a_dump.bin";
  {
    std::ofstream os(path);
    os << "hello world, this is not a dump";
  }
  EXPECT_THROW(read_buffer_dump(path), std::runtime_error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace gogepo
