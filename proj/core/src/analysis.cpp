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

#include "gogepo/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gogepo/checkpoint.hpp"
#include "gogepo/csv_log.hpp"

namespace gogepo {

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  }
  out.back() = hi;
  return out;
}

std::vector<SweepRow> identity_sweep(const GeneratorParams& rho, const Environment& env,
                                     const RunningStat& stat, double c_min, double c_max,
                                     int n_commands, int episodes, Rng& rng) {
  if (!(c_min < c_max)) throw std::invalid_argument("identity_sweep: need c_min < c_max");
  if (n_commands < 2) throw std::invalid_argument("identity_sweep: need at least 2 commands");
  if (episodes < 1) throw std::invalid_argument("identity_sweep: episodes must be >= 1");
  std::vector<SweepRow> rows;
  for (double c : linspace(c_min, c_max, n_commands)) {
    const EvaluationResult ev = evaluate_policy(env, generate(rho, c), stat, episodes, rng);
    rows.push_back({c, ev.mean, ev.stddev, episodes});
  }
  return rows;
}

std::vector<SweepRow> identity_sweep(const std::filesystem::path& checkpoint, double c_min,
                                     double c_max, int n_commands, int episodes, Rng& rng) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  return identity_sweep(load_generator(ck), Environment::make(ck.meta("env")),
                        load_running_stat(ck), c_min, c_max, n_commands, episodes, rng);
}

Matrix Pca::project(const Matrix& points) const {
  if (points.cols() != mean.size()) {
    throw std::invalid_argument("pca: expected " + std::to_string(mean.size()) + " columns, got " +
                                std::to_string(points.cols()));
  }
  return (points.rowwise() - mean.transpose()) * axes;
}

Pca pca_fit(const Matrix& points) {
  if (points.rows() < 2) throw std::invalid_argument("pca: need at least 2 points");
  if (points.cols() < 2) throw std::invalid_argument("pca: need at least 2 dimensions");
  Pca p;
  p.mean = points.colwise().mean().transpose();
  const Matrix centered = points.rowwise() - p.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(points.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("pca: eigensolver failed");
  const Eigen::Index k = cov.rows();
  p.axes.resize(k, 2);
  p.variances.resize(2);
  for (int j = 0; j < 2; ++j) {
    // Eigen sorts eigenvalues ascending.
    Vector v = eig.eigenvectors().col(k - 1 - j);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    p.axes.col(j) = v;
    p.variances[j] = std::max(eig.eigenvalues()[k - 1 - j], 0.0);
  }
  return p;
}

Matrix pca_project(const Matrix& points) { return pca_fit(points).project(points); }

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("spearman: need at least 2 pairs");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Matrix fingerprint_matrix(const EvaluatorParams& w, std::span<const PolicyParams> policies) {
  Matrix m(static_cast<Eigen::Index>(policies.size()), w.config.fingerprint_size());
  for (std::size_t i = 0; i < policies.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = probing_actions(w, policies[i]).transpose();
  }
  return m;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto os = open_csv(path);
  os << "command,mean_return,std_return,episodes\n";
  for (const auto& r : rows) {
    os << format_number(r.command) << ',' << format_number(r.mean_return) << ','
       << format_number(r.std_return) << ',' << r.episodes << '\n';
  }
}

void write_points_csv(const std::filesystem::path& path,
                      const std::vector<FingerprintPoint>& points) {
  auto os = open_csv(path);
  os << "x,y,return,source\n";
  for (const auto& p : points) {
    os << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(p.ret) << ','
       << p.source << '\n';
  }
}

}  // namespace gogepo
