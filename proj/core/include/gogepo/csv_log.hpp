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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gogepo {

/// One evaluation point of a training run.
struct LogRow {
  std::int64_t interactions = 0;
  std::int64_t episode = 0;
  std::optional<double> command;
  double eval_return_mean = 0.0;
  double eval_return_std = 0.0;
  double best_buffer_return = 0.0;
  std::optional<double> loss_v;
  std::optional<double> loss_g;
};

inline constexpr const char* kLogHeader =
    "interactions,episode,command,eval_return_mean,eval_return_std,best_buffer_return,loss_V,"
    "loss_G";

/// Shortest round-trip decimal for v.
std::string format_number(double v);
std::string format_log_row(const LogRow& row);
/// Inverse of format_log_row.
LogRow parse_log_row(const std::string& line);
void write_log_csv(const std::filesystem::path& path, const std::vector<LogRow>& rows);
std::vector<LogRow> read_log_csv(const std::filesystem::path& path);

}  // namespace gogepo
