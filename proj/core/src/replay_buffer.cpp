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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "binary_io.hpp"

namespace gogepo {

namespace {
constexpr char kDumpMagic[8] = {'G', 'G', 'P', 'B', 'U', 'F', '\0', '\0'};
constexpr std::uint32_t kDumpVersion = 1;
}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(double ret, Vector theta) {
  if (!std::isfinite(ret)) throw std::domain_error("replay buffer: non-finite return");
  ++episode_;
  ReplayEntry e{ret, std::move(theta), episode_};
  if (entries_.size() < capacity_) {
    entries_.push_back(std::move(e));
  } else {
    entries_[head_] = std::move(e);
    head_ = (head_ + 1) % capacity_;
  }
}

const ReplayEntry& ReplayBuffer::operator[](std::size_t i) const {
  if (i >= entries_.size()) throw std::out_of_range("replay buffer index out of range");
  return entries_[(head_ + i) % entries_.size()];
}

std::int64_t ReplayBuffer::age(std::size_t i) const { return episode_ - (*this)[i].episode + 1; }

std::vector<double> ReplayBuffer::probabilities(double exponent) const {
  if (entries_.empty()) throw std::logic_error("replay buffer is empty");
  if (!(exponent >= 0.0)) throw std::invalid_argument("recency exponent must be >= 0");
  std::vector<double> w(entries_.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::pow(static_cast<double>(age(i)), -exponent);
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t k, double exponent,
                                                      Rng& rng) const {
  const std::vector<double> p = probabilities(exponent);
  std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
  std::vector<std::size_t> out(k);
  for (auto& i : out) i = pick(rng);
  return out;
}

std::vector<ReplayEntry> ReplayBuffer::sample(std::size_t k, double exponent, Rng& rng) const {
  std::vector<ReplayEntry> out;
  out.reserve(k);
  for (std::size_t i : sample_indices(k, exponent, rng)) out.push_back((*this)[i]);
  return out;
}

double ReplayBuffer::max_return() const {
  if (entries_.empty()) throw std::logic_error("replay buffer is empty");
  double best = entries_.front().ret;
  for (const auto& e : entries_) best = std::max(best, e.ret);
  return best;
}

double ReplayBuffer::min_return() const {
  if (entries_.empty()) throw std::logic_error("replay buffer is empty");
  double worst = entries_.front().ret;
  for (const auto& e : entries_) worst = std::min(worst, e.ret);
  return worst;
}

ReplayBuffer ReplayBuffer::restore(std::size_t capacity, std::int64_t episode_count,
                                   std::vector<ReplayEntry> entries) {
  if (entries.size() > capacity) throw std::invalid_argument("more entries than capacity");
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].episode <= entries[i - 1].episode) {
      throw std::invalid_argument("replay entries must have increasing episode indices");
    }
  }
  if (!entries.empty() && entries.back().episode > episode_count) {
    throw std::invalid_argument("replay entry newer than the episode counter");
  }
  ReplayBuffer b(capacity);
  b.episode_ = episode_count;
  b.entries_ = std::move(entries);
  return b;
}

void write_buffer_dump(const std::filesystem::path& path, const ReplayBuffer& buffer,
                       const PolicyShape& shape) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kDumpMagic, sizeof(kDumpMagic));
  io::put<std::uint32_t>(os, kDumpVersion);
  io::put<std::int32_t>(os, shape.obs_dim);
  io::put<std::int32_t>(os, shape.act_dim);
  io::put<std::int32_t>(os, shape.hidden);
  io::put<std::int32_t>(os, static_cast<std::int32_t>(shape.output));
  const auto flat = static_cast<std::uint64_t>(shape.flat_size());
  io::put<std::uint64_t>(os, flat);
  io::put<std::uint64_t>(os, buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const ReplayEntry& e = buffer[i];
    if (static_cast<std::uint64_t>(e.theta.size()) != flat) {
      throw std::invalid_argument("buffer entry does not match the policy shape");
    }
    io::put<double>(os, e.ret);
    io::put<std::int64_t>(os, e.episode);
    io::put_doubles(os, e.theta.data(), e.theta.size());
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

BufferDump read_buffer_dump(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open buffer dump " + path.string());
  try {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kDumpMagic, sizeof(magic)) != 0) {
      throw std::runtime_error("not a buffer dump");
    }
    const auto version = io::get<std::uint32_t>(is);
    if (version != kDumpVersion) {
      throw std::runtime_error("unsupported buffer dump version " + std::to_string(version));
    }
    BufferDump dump;
    dump.shape.obs_dim = io::get<std::int32_t>(is);
    dump.shape.act_dim = io::get<std::int32_t>(is);
    dump.shape.hidden = io::get<std::int32_t>(is);
    dump.shape.output = static_cast<OutputActivation>(io::get<std::int32_t>(is));
    const auto flat = io::get<std::uint64_t>(is);
    if (flat != static_cast<std::uint64_t>(dump.shape.flat_size())) {
      throw std::runtime_error("record size does not match the stored policy shape");
    }
    const auto count = io::get<std::uint64_t>(is);
    dump.entries.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      ReplayEntry e;
      e.ret = io::get<double>(is);
      e.episode = io::get<std::int64_t>(is);
      e.theta.resize(static_cast<Eigen::Index>(flat));
      io::get_doubles(is, e.theta.data(), flat);
      dump.entries.push_back(std::move(e));
    }
    return dump;
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path.string() + ": " + err.what());
  }
}

}  // namespace gogepo
