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

#pragma once

// Post-hoc analysis of trained generators: command-vs-return identity sweeps
// and 2-D PCA maps of policy fingerprints.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gogepo/envs.hpp"
#include "gogepo/evaluator.hpp"
#include "gogepo/generator.hpp"
#include "gogepo/rng.hpp"
#include "gogepo/running_stat.hpp"

namespace gogepo {

/// n evenly spaced values from lo to hi inclusive; n >= 2.
std::vector<double> linspace(double lo, double hi, int n);

struct SweepRow {
  double command = 0.0;
  double mean_return = 0.0;
  double std_return = 0.0;
  int episodes = 1;
};

/// For each of n commands evenly spaced over [c_min, c_max], rolls out the
/// noise-free generated policy `episodes` times with frozen statistics.
std::vector<SweepRow> identity_sweep(const GeneratorParams& rho, const Environment& env,
                                     const RunningStat& stat, double c_min, double c_max,
                                     int n_commands, int episodes, Rng& rng);

/// Same, reading the generator, statistics and environment from a training
/// checkpoint or generator snapshot. Throws CheckpointError if missing.
std::vector<SweepRow> identity_sweep(const std::filesystem::path& checkpoint, double c_min,
                                     double c_max, int n_commands, int episodes, Rng& rng);

/// Top-2 principal axes of a point cloud (rows are points).
struct Pca {
  Vector mean;
  Matrix axes;        // k x 2, unit columns, largest-magnitude loading positive
  Vector variances;   // sample variance along each axis, descending

  Matrix project(const Matrix& points) const;
};

/// Throws std::invalid_argument when fewer than two points or two columns.
Pca pca_fit(const Matrix& points);
Matrix pca_project(const Matrix& points);

/// Ranks starting at 1; ties get the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation (Pearson correlation of average ranks). Returns
/// 0 when either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// One probing-action vector per row.
Matrix fingerprint_matrix(const EvaluatorParams& w, std::span<const PolicyParams> policies);

struct FingerprintPoint {
  double x = 0.0;
  double y = 0.0;
  double ret = 0.0;
  std::string source;  // "buffer" or "generator@<interactions>"
};

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_points_csv(const std::filesystem::path& path,
                      const std::vector<FingerprintPoint>& points);

}  // namespace gogepo
