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

#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "gogepo/analysis.hpp"
#include "gogepo/ars.hpp"
#include "gogepo/checkpoint.hpp"
#include "gogepo/config.hpp"
#include "gogepo/csv_log.hpp"
#include "gogepo/replay_buffer.hpp"
#include "gogepo/trainer.hpp"

namespace gogepo::cli {
namespace {

namespace fs = std::filesystem;

// Errors caused by the user's input rather than by the program.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool resume = false;
};

struct EvalArgs {
  std::string checkpoint;
  std::optional<double> command;
  int episodes = 10;
  std::uint64_t seed = 0;
};

struct SweepArgs {
  std::string checkpoint;
  std::optional<double> min;
  std::optional<double> max;
  int num = 20;
  int episodes = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct PcaArgs {
  std::string checkpoint;
  std::string buffer;
  std::string out;
  std::vector<std::string> stages;
  int commands = 20;
  int episodes = 1;
  std::uint64_t seed = 0;
};

Checkpoint open_checkpoint(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("checkpoint not found: " + path);
  return load_checkpoint(path);
}

int run_train(const TrainArgs& a, std::ostream& out) {
  if (a.resume) {
    const TrainerState s = resume(a.out);
    out << "resumed " << a.out << ": " << s.interactions << " interactions, " << s.episodes
        << " episodes\n";
    return kExitOk;
  }
  TrainingConfig c = a.config.empty() ? TrainingConfig{} : parse_training_config(a.config);
  if (a.seed) c.seed = *a.seed;
  c.validate();
  const TrainerState s = train(c, a.out);
  out << "trained " << c.env << " seed " << c.seed << ": " << s.interactions << " interactions, "
      << s.episodes << " episodes";
  if (!s.log.empty()) out << ", final eval return " << format_number(s.log.back().eval_return_mean);
  out << "\n";
  return kExitOk;
}

int run_ars(const TrainArgs& a, std::ostream& out) {
  ArsConfig c = a.config.empty() ? ArsConfig{} : parse_ars_config(a.config);
  if (a.seed) c.seed = *a.seed;
  c.validate();
  const ArsState s = ars_train(c, a.out);
  out << "ars " << c.env << " seed " << c.seed << ": " << s.interactions << " interactions, "
      << s.episodes << " episodes";
  if (!s.log.empty()) out << ", final eval return " << format_number(s.log.back().eval_return_mean);
  out << "\n";
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const Checkpoint ck = open_checkpoint(a.checkpoint);
  const Environment env = Environment::make(ck.meta("env"));
  const RunningStat stat = load_running_stat(ck);
  Rng rng = make_stream(a.seed, Stream::kEval);
  PolicyParams theta;
  std::optional<double> command;
  if (ck.metadata.count("kind") && ck.meta("kind") == "ars") {
    const ArsConfig c = parse_ars_config_text(ck.meta("config"));
    const EnvSpec& spec = env.spec();
    const Vector flat = ck.arrays.at("policy/flat").row(0).transpose();
    theta = PolicyParams::unflatten(
        flat, {spec.obs_dim, spec.act_dim, c.hidden, c.output_activation});
  } else {
    const GeneratorParams rho = load_generator(ck);
    if (a.command) {
      command = *a.command;
    } else if (ck.metadata.count("buffer.max_return") && ck.metadata.count("drive")) {
      command = ck.meta_double("buffer.max_return") + ck.meta_double("drive");
    } else {
      throw UsageError("--command is required for this checkpoint");
    }
    theta = generate(rho, *command);
  }
  const EvaluationResult ev = evaluate_policy(env, theta, stat, a.episodes, rng);
  if (command) out << "command " << format_number(*command) << "\n";
  out << "episodes " << a.episodes << "\n"
      << "mean_return " << format_number(ev.mean) << "\n"
      << "std_return " << format_number(ev.stddev) << "\n";
  return kExitOk;
}

int run_sweep(const SweepArgs& a, std::ostream& out) {
  const Checkpoint ck = open_checkpoint(a.checkpoint);
  const Environment env = Environment::make(ck.meta("env"));
  const EnvSpec& spec = env.spec();
  double lo = spec.return_low;
  double hi = spec.return_high;
  if (ck.metadata.count("buffer.min_return")) {
    lo = ck.meta_double("buffer.min_return");
    hi = ck.meta_double("buffer.max_return");
  }
  if (a.min) lo = *a.min;
  if (a.max) hi = *a.max;
  if (!(lo < hi)) throw UsageError("sweep needs --min < --max");
  if (a.num < 2) throw UsageError("--num must be >= 2");
  if (a.episodes < 1) throw UsageError("--episodes must be >= 1");
  Rng rng = make_stream(a.seed, Stream::kEval);
  const auto rows = identity_sweep(load_generator(ck), env, load_running_stat(ck), lo, hi, a.num,
                                   a.episodes, rng);
  if (a.out.empty()) {
    out << "command,mean_return,std_return,episodes\n";
    for (const auto& r : rows) {
      out << format_number(r.command) << ',' << format_number(r.mean_return) << ','
          << format_number(r.std_return) << ',' << r.episodes << '\n';
    }
  } else {
    write_sweep_csv(a.out, rows);
    out << "wrote " << rows.size() << " rows to " << a.out << "\n";
  }
  return kExitOk;
}

int run_pca(const PcaArgs& a, std::ostream& out) {
  const Checkpoint ck = open_checkpoint(a.checkpoint);
  const EvaluatorParams w = load_evaluator(ck);
  fs::path buffer_path = a.buffer;
  if (buffer_path.empty()) {
    if (!ck.metadata.count("buffer_dump")) throw UsageError("--buffer is required");
    buffer_path = fs::path(a.checkpoint).parent_path() / ck.meta("buffer_dump");
  }
  if (!fs::exists(buffer_path)) throw UsageError("buffer dump not found: " + buffer_path.string());
  const BufferDump dump = read_buffer_dump(buffer_path);
  if (dump.shape.obs_dim != w.config.policy.obs_dim ||
      dump.shape.act_dim != w.config.policy.act_dim) {
    throw UsageError("buffer dump does not match the checkpoint's policy shape");
  }

  std::vector<PolicyParams> policies;
  std::vector<double> returns;
  std::vector<std::string> sources;
  double lo = 0.0, hi = 0.0;
  for (const auto& e : dump.entries) {
    policies.push_back(PolicyParams::unflatten(e.theta, dump.shape));
    returns.push_back(e.ret);
    sources.push_back("buffer");
    if (returns.size() == 1 || e.ret < lo) lo = e.ret;
    if (returns.size() == 1 || e.ret > hi) hi = e.ret;
  }
  if (policies.size() < 2) throw UsageError("buffer dump holds fewer than 2 policies");
  const Pca pca = pca_fit(fingerprint_matrix(w, policies));

  if (!a.stages.empty() && !(lo < hi)) hi = lo + 1.0;
  Rng rng = make_stream(a.seed, Stream::kEval);
  for (const auto& stage : a.stages) {
    const Checkpoint sc = open_checkpoint(stage);
    const GeneratorParams rho = load_generator(sc);
    const Environment env = Environment::make(sc.meta("env"));
    const RunningStat stat = load_running_stat(sc);
    const std::string tag = "generator@" + (sc.metadata.count("interactions")
                                                ? sc.meta("interactions")
                                                : fs::path(stage).stem().string());
    for (double c : linspace(lo, hi, a.commands)) {
      PolicyParams theta = generate(rho, c);
      returns.push_back(evaluate_policy(env, theta, stat, a.episodes, rng).mean);
      policies.push_back(std::move(theta));
      sources.push_back(tag);
    }
  }

  const Matrix xy = pca.project(fingerprint_matrix(w, policies));
  std::vector<FingerprintPoint> points;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    points.push_back({xy(r, 0), xy(r, 1), returns[i], sources[i]});
  }
  write_points_csv(a.out, points);
  out << "wrote " << points.size() << " points to " << a.out << " (explained variance "
      << format_number(pca.variances[0]) << ", " << format_number(pca.variances[1]) << ")\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Return-conditioned policy generation and baselines"};
  app.name(args.empty() ? "gogepo" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a return-conditioned generator");
  train_cmd->add_option("--config", train_args.config, "Config file (key = value lines)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", train_args.seed, "Override the config's seed");
  train_cmd->add_option("--out", train_args.out, "Output directory")->required();
  train_cmd->add_flag("--resume", train_args.resume,
                      "Continue the run saved in --out until its budget is spent");

  TrainArgs ars_args;
  auto* ars_cmd = app.add_subcommand("ars", "Train the Augmented Random Search baseline");
  ars_cmd->add_option("--config", ars_args.config, "Config file (key = value lines)")
      ->check(CLI::ExistingFile);
  ars_cmd->add_option("--seed", ars_args.seed, "Override the config's seed");
  ars_cmd->add_option("--out", ars_args.out, "Output directory")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint.bin, snapshot or policy.bin")
      ->required();
  eval_cmd->add_option("--command", eval_args.command,
                       "Return command (default: best buffer return + drive)");
  eval_cmd->add_option("--episodes", eval_args.episodes, "Evaluation episodes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval_args.seed, "Seed for environment resets")
      ->capture_default_str();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Command-vs-return identity sweep");
  sweep_cmd->add_option("--checkpoint", sweep_args.checkpoint, "Training checkpoint or snapshot")
      ->required();
  sweep_cmd->add_option("--min", sweep_args.min,
                        "Lowest command (default: lowest buffer return, else env hint)");
  sweep_cmd->add_option("--max", sweep_args.max,
                        "Highest command (default: highest buffer return, else env hint)");
  sweep_cmd->add_option("--num", sweep_args.num, "Number of commands")->capture_default_str();
  sweep_cmd->add_option("--episodes", sweep_args.episodes, "Episodes per command")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_args.seed, "Seed for environment resets")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_args.out, "Output CSV (default: stdout)");

  PcaArgs pca_args;
  auto* pca_cmd = app.add_subcommand("pca", "2-D PCA map of policy fingerprints");
  pca_cmd->add_option("--checkpoint", pca_args.checkpoint,
                      "Training checkpoint (supplies the probing states)")
      ->required();
  pca_cmd->add_option("--buffer", pca_args.buffer,
                      "Buffer dump (default: the dump referenced by the checkpoint)");
  pca_cmd->add_option("--out", pca_args.out, "Output CSV")->required();
  pca_cmd->add_option("--stage", pca_args.stages,
                      "Generator snapshot to add as generated points (repeatable)");
  pca_cmd->add_option("--commands", pca_args.commands, "Commands per snapshot")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  pca_cmd->add_option("--episodes", pca_args.episodes, "Episodes per generated policy")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pca_cmd->add_option("--seed", pca_args.seed, "Seed for environment resets")
      ->capture_default_str();

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return run_train(train_args, out);
    if (ars_cmd->parsed()) return run_ars(ars_args, out);
    if (eval_cmd->parsed()) return run_eval(eval_args, out);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args, out);
    if (pca_cmd->parsed()) return run_pca(pca_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace gogepo::cli
