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

#include "gogepo/csv_log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gogepo {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

namespace {

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

std::string format_log_row(const LogRow& r) {
  std::ostringstream os;
  os << r.interactions << ',' << r.episode << ',' << optional_number(r.command) << ','
     << format_number(r.eval_return_mean) << ',' << format_number(r.eval_return_std) << ','
     << format_number(r.best_buffer_return) << ',' << optional_number(r.loss_v) << ','
     << optional_number(r.loss_g);
  return os.str();
}

void write_log_csv(const std::filesystem::path& path, const std::vector<LogRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << kLogHeader << '\n';
  for (const auto& r : rows) os << format_log_row(r) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

LogRow parse_log_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != 8) throw std::runtime_error("malformed log row '" + line + "'");
  LogRow r;
  r.interactions = std::stoll(f[0]);
  r.episode = std::stoll(f[1]);
  r.command = parse_optional(f[2]);
  r.eval_return_mean = std::stod(f[3]);
  r.eval_return_std = std::stod(f[4]);
  r.best_buffer_return = std::stod(f[5]);
  r.loss_v = parse_optional(f[6]);
  r.loss_g = parse_optional(f[7]);
  return r;
}

std::vector<LogRow> read_log_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kLogHeader) {
    throw std::runtime_error(path.string() + ": missing or unexpected header");
  }
  std::vector<LogRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      rows.push_back(parse_log_row(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace gogepo
