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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any selected criterion fails.
//
//   acceptance [--workdir DIR] [--criteria 1,2,...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gogepo/analysis.hpp"
#include "gogepo/ars.hpp"
#include "gogepo/trainer.hpp"
#include "gradcheck.hpp"

namespace fs = std::filesystem;
using namespace gogepo;

namespace {

constexpr int kSeeds = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string join(const std::vector<double>& v, int precision = 4) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i], precision);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void progress(const std::string& line) { std::cerr << "  " << line << std::endl; }

// Gradient correctness: tape vs central differences, < 1e-4 relative.
Outcome gradients() {
  constexpr double kTol = 1e-4;
  double worst[4] = {0, 0, 0, 0};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = gradcheck::tiny_setup(seed);
    worst[0] = std::max(worst[0], gradcheck::policy_forward(s));
    worst[1] = std::max(worst[1], gradcheck::generator_forward(s));
    worst[2] = std::max(worst[2], gradcheck::evaluator_loss_graph(s));
    worst[3] = std::max(worst[3], gradcheck::generator_loss_graph(s));
  }
  const bool ok = *std::max_element(worst, worst + 4) < kTol;
  return {ok, "max rel err policy " + fmt(worst[0], 3) + ", generator " + fmt(worst[1], 3) +
                  ", L_V " + fmt(worst[2], 3) + ", L_G " + fmt(worst[3], 3) + " (tol 1e-4)"};
}

// Hidden-unit permutations leave probing actions and V_w unchanged.
Outcome symmetry() {
  constexpr double kTol = 1e-10;
  const PolicyShape shape{2, 1, 64, OutputActivation::kLinear};
  EvaluatorConfig ec;
  ec.policy = shape;
  double worst_actions = 0.0, worst_value = 0.0;
  for (std::uint64_t pair = 0; pair < 100; ++pair) {
    Rng rng = make_stream(pair, std::uint64_t{2000});
    const PolicyParams theta = init_policy(shape, 16, rng);
    const EvaluatorParams w = init_evaluator(ec, rng);
    std::vector<int> perm(static_cast<std::size_t>(shape.hidden));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const int layer = 1 + static_cast<int>(pair % 2);
    const PolicyParams permuted = permute_hidden(theta, layer, perm);
    worst_actions = std::max(
        worst_actions, (probing_actions(w, theta) - probing_actions(w, permuted)).cwiseAbs().maxCoeff());
    worst_value = std::max(worst_value, std::abs(evaluate(w, theta) - evaluate(w, permuted)));
  }
  return {worst_actions <= kTol && worst_value <= kTol,
          "100 pairs, max |probing action diff| " + fmt(worst_actions, 3) + ", max |V diff| " +
              fmt(worst_value, 3) + " (tol 1e-10)"};
}

// Recency-weighted sampling frequencies for ages {1, 2, 3}.
Outcome recency() {
  constexpr double kTol = 0.003;
  const double expected[3] = {0.1692, 0.2643, 0.5665};  // oldest first
  ReplayBuffer buffer;
  for (int k = 0; k < 3; ++k) buffer.push(k, Vector::Zero(1));
  Rng rng = make_stream(0, Stream::kSampling);
  const std::size_t draws = 1'000'000;
  double counts[3] = {0, 0, 0};
  for (std::size_t i : buffer.sample_indices(draws, 1.1, rng)) counts[i] += 1.0;
  bool ok = true;
  std::string detail = "frequencies (age 1, 2, 3):";
  for (int age = 1; age <= 3; ++age) {
    const double f = counts[3 - age] / static_cast<double>(draws);
    ok = ok && std::abs(f - expected[3 - age]) <= kTol;
    detail += " " + fmt(f, 5);
  }
  return {ok, detail + " vs 0.5665 0.2643 0.1692 (tol 0.003)"};
}

// Evaluator regression onto a smooth function of policy behaviour.
Outcome evaluator_regression() {
  const PolicyShape shape{2, 1, 16, OutputActivation::kLinear};
  EvaluatorConfig ec;
  ec.policy = shape;
  ec.probes = 8;
  ec.hidden = 64;
  Rng rng = make_stream(0, std::uint64_t{3000});
  // Reference states the label depends on, spread like normalized
  // observations; the evaluator never sees them.
  Matrix reference(6, 2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Eigen::Index i = 0; i < reference.size(); ++i) reference.data()[i] = n(rng);

  std::vector<PolicyParams> policies;
  std::vector<double> labels;
  for (int i = 0; i < 200; ++i) {
    policies.push_back(init_policy(shape, 4, rng));
    const Matrix a = raw_actions(policies.back(), reference);
    labels.push_back(50.0 * (a.array() * 3.0).sin().mean());
  }
  const double mean = std::accumulate(labels.begin(), labels.end(), 0.0) / 200.0;
  double var = 0.0;
  for (double y : labels) var += (y - mean) * (y - mean);
  var /= 200.0;

  EvaluatorParams w = init_evaluator(ec, rng);
  AdamState opt = AdamState::for_params(w.params);
  double mse = 0.0;
  int step = 0;
  for (; step < 10000; ++step) {
    mse = evaluator_update(w, labels, policies, opt, 5e-3);
    if (mse < 0.01 * var) break;
  }
  const bool ok = mse < 0.01 * var;
  return {ok, "MSE " + fmt(mse) + " vs 1% of label variance " + fmt(0.01 * var) + " after " +
                  std::to_string(step) + " Adam steps (limit 10000)"};
}

struct RunSummary {
  double final_return = 0.0;
  double best_eval = -INFINITY;
  std::string log;
};

RunSummary summarize(const TrainerState& s, const fs::path& dir) {
  RunSummary r;
  if (!s.log.empty()) r.final_return = s.log.back().eval_return_mean;
  for (const auto& row : s.log) r.best_eval = std::max(r.best_eval, row.eval_return_mean);
  r.log = slurp(run_paths(dir).log);
  return r;
}

TrainingConfig mountaincar_config(std::uint64_t seed) {
  TrainingConfig c;
  c.env = "mountaincar";
  c.hidden = 64;
  c.budget = 100000;
  c.drive = 20.0;
  c.seed = seed;
  return c;
}

RunSummary train_logged(const TrainingConfig& c, const fs::path& dir, const std::string& label) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrainerState s = train(c, dir);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RunSummary r = summarize(s, dir);
  progress(label + " seed " + std::to_string(c.seed) + ": final " + fmt(r.final_return) + ", best eval " +
           fmt(r.best_eval) + ", " + std::to_string(s.episodes) + " episodes, " + fmt(secs, 3) + " s");
  return r;
}

class Suite {
 public:
  explicit Suite(fs::path workdir) : workdir_(std::move(workdir)) {}

  const std::vector<RunSummary>& mountaincar_default() {
    if (mountaincar_.empty()) {
      for (int seed = 0; seed < kSeeds; ++seed) {
        mountaincar_.push_back(train_logged(mountaincar_config(static_cast<std::uint64_t>(seed)),
                                            workdir_ / "mountaincar" / ("seed_" + std::to_string(seed)),
                                            "mountaincar"));
      }
    }
    return mountaincar_;
  }

  // GoGePo on MountainCar at desk scale.
  Outcome mountaincar() {
    std::vector<double> finals;
    for (const auto& r : mountaincar_default()) finals.push_back(r.final_return);
    const double med = median(finals);
    const auto good = std::count_if(finals.begin(), finals.end(), [](double x) { return x >= 60.0; });
    return {med >= 80.0 && good >= 4,
            "final returns [" + join(finals) + "], median " + fmt(med) + " (need >= 80), " +
                std::to_string(good) + "/5 >= 60 (need 4)"};
  }

  // ARS baseline with the tuned MountainCar hyperparameters.
  Outcome ars() {
    std::vector<double> finals;
    for (int seed = 0; seed < kSeeds; ++seed) {
      ArsConfig c;
      c.env = "mountaincar";
      c.hidden = 64;
      c.step_size = 0.01;
      c.directions = 1;
      c.elite_directions = 1;
      c.noise = 0.05;
      c.budget = 100000;
      c.seed = static_cast<std::uint64_t>(seed);
      const ArsState s = ars_train(c, workdir_ / "ars" / ("seed_" + std::to_string(seed)));
      finals.push_back(s.log.empty() ? 0.0 : s.log.back().eval_return_mean);
      progress("ars seed " + std::to_string(seed) + ": final " + fmt(finals.back()));
    }
    const auto good = std::count_if(finals.begin(), finals.end(), [](double x) { return x >= 90.0; });
    return {good >= 2, "final returns [" + join(finals) + "], " + std::to_string(good) +
                           "/5 >= 90 (need 2)"};
  }

  // Commanded vs achieved return on PointReacher.
  Outcome identity() {
    std::vector<double> rhos;
    for (int seed = 0; seed < kSeeds; ++seed) {
      TrainingConfig c;
      c.env = "pointreacher";
      c.hidden = 64;
      c.budget = 200000;
      c.seed = static_cast<std::uint64_t>(seed);
      const fs::path dir = workdir_ / "pointreacher" / ("seed_" + std::to_string(seed));
      const auto t0 = std::chrono::steady_clock::now();
      const TrainerState s = train(c, dir);
      const double lo = s.buffer.min_return(), hi = s.buffer.max_return();
      Rng rng = make_stream(c.seed, Stream::kEval);
      const auto rows = identity_sweep(s.generator, s.env, s.obs_stat, lo, hi, 20, 10, rng);
      write_sweep_csv(dir / "sweep.csv", rows);
      std::vector<double> commands, achieved;
      for (const auto& r : rows) {
        commands.push_back(r.command);
        achieved.push_back(r.mean_return);
      }
      rhos.push_back(spearman(commands, achieved));
      double best = -INFINITY;
      for (const auto& row : s.log) best = std::max(best, row.eval_return_mean);
      progress("pointreacher seed " + std::to_string(seed) + ": range [" + fmt(lo) + ", " + fmt(hi) +
               "], spearman " + fmt(rhos.back()) + ", best eval " + fmt(best) + ", " +
               fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3) +
               " s");
    }
    const auto good = std::count_if(rhos.begin(), rhos.end(), [](double x) { return x >= 0.8; });
    return {good >= 3, "spearman [" + join(rhos, 3) + "], " + std::to_string(good) +
                           "/5 >= 0.8 (need 3)"};
  }

  // Ablation switches run, differ from the default, and output scaling helps.
  Outcome ablations() {
    const auto& reference = mountaincar_default();
    bool distinct = true;
    std::string detail;

    std::vector<double> unscaled;
    for (int seed = 0; seed < kSeeds; ++seed) {
      TrainingConfig c = mountaincar_config(static_cast<std::uint64_t>(seed));
      c.output_scaling = false;
      const RunSummary r =
          train_logged(c, workdir_ / "no_scaling" / ("seed_" + std::to_string(seed)), "no-scaling");
      unscaled.push_back(r.final_return);
      distinct = distinct && r.log != reference[static_cast<std::size_t>(seed)].log;
    }

    TrainingConfig uniform = mountaincar_config(0);
    uniform.recency_exponent = 0.0;
    const RunSummary u = train_logged(uniform, workdir_ / "no_recency", "no-recency");
    distinct = distinct && u.log != reference[0].log;

    TrainingConfig no_drive = mountaincar_config(0);
    no_drive.drive = 0.0;
    const RunSummary d = train_logged(no_drive, workdir_ / "no_drive", "no-drive");
    distinct = distinct && d.log != reference[0].log && d.log != u.log;

    std::vector<double> base;
    for (const auto& r : reference) base.push_back(r.final_return);
    const double med_base = median(base), med_unscaled = median(unscaled);
    detail = "logs distinct: " + std::string(distinct ? "yes" : "no") + ", no-scaling median " +
             fmt(med_unscaled) + " [" + join(unscaled) + "] vs default median " + fmt(med_base) +
             ", no-recency final " + fmt(u.final_return) + ", no-drive final " + fmt(d.final_return);
    return {distinct && med_unscaled < med_base, detail};
  }

  // Same config and seed give byte-identical log and checkpoint.
  Outcome determinism() {
    TrainingConfig c = mountaincar_config(7);
    c.budget = 5000;
    const fs::path a = workdir_ / "determinism" / "a", b = workdir_ / "determinism" / "b";
    train(c, a);
    train(c, b);
    const bool log_same = slurp(run_paths(a).log) == slurp(run_paths(b).log);
    const bool ckpt_same = slurp(run_paths(a).checkpoint) == slurp(run_paths(b).checkpoint);
    const bool nonempty = !slurp(run_paths(a).log).empty();
    return {log_same && ckpt_same && nonempty,
            std::string("log ") + (log_same ? "identical" : "differs") + ", checkpoint " +
                (ckpt_same ? "identical" : "differs")};
  }

 private:
  fs::path workdir_;
  std::vector<RunSummary> mountaincar_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string workdir = (fs::temp_directory_path() / "gogepo_acceptance").string();
  std::vector<int> selected;
  app.add_option("--workdir", workdir, "Directory for training artifacts")->capture_default_str();
  app.add_option("--criteria", selected, "Subset of criteria to run (default: all)")
      ->delimiter(',')
      ->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

  fs::create_directories(workdir);
  Suite suite(workdir);
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"gradient correctness", gradients}},
      {2, {"symmetry invariance", symmetry}},
      {3, {"recency sampling", recency}},
      {4, {"evaluator regression", evaluator_regression}},
      {5, {"mountaincar generator", [&] { return suite.mountaincar(); }}},
      {6, {"mountaincar ars", [&] { return suite.ars(); }}},
      {7, {"pointreacher identity", [&] { return suite.identity(); }}},
      {8, {"ablation switches", [&] { return suite.ablations(); }}},
      {9, {"determinism", [&] { return suite.determinism(); }}},
  };

  int failures = 0;
  for (int id : selected) {
    const auto& [name, check] = criteria.at(id);
    std::cerr << "criterion " << id << " (" << name << ") running" << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << id << " " << name << ": " << (o.pass ? "PASS" : "FAIL") << " | "
              << o.detail << " [" << fmt(secs, 3) << " s]" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all selected criteria passed"
                              : std::to_string(failures) + " criterion/criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
