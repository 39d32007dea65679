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

#include "gogepo/trainer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gogepo {
namespace {

ReplayBuffer empty_buffer(const TrainingConfig& c) {
  return ReplayBuffer(static_cast<std::size_t>(c.buffer_capacity));
}

std::string fmt(double v) { return format_number(v); }

void check_finite(const TrainerState& s, const char* what, double loss) {
  if (std::isfinite(loss)) return;
  std::ostringstream os;
  os << what << " loss became non-finite at episode " << s.episodes << " (interactions "
     << s.interactions << ", command " << s.command << ", best return "
     << (s.buffer.empty() ? 0.0 : s.buffer.max_return()) << ")";
  throw TrainingDiverged(os.str());
}

}  // namespace

GeneratorConfig generator_config(const TrainingConfig& c, const EnvSpec& env) {
  GeneratorConfig g;
  g.policy = PolicyShape{env.obs_dim, env.act_dim, c.hidden, c.output_activation};
  g.slice = c.slice;
  g.embed_dim = c.embed_dim;
  g.head_hidden = c.head_hidden;
  g.output_scaling = c.output_scaling;
  g.command_scale = c.command_scale;
  g.bias_uses_command = c.bias_uses_command;
  return g;
}

EvaluatorConfig evaluator_config(const TrainingConfig& c, const EnvSpec& env) {
  EvaluatorConfig e;
  e.policy = PolicyShape{env.obs_dim, env.act_dim, c.hidden, c.output_activation};
  e.probes = c.probes;
  e.hidden = c.value_hidden;
  return e;
}

TrainerState init_trainer(const TrainingConfig& config) {
  config.validate();
  TrainerState s{.config = config,
                 .env = Environment::make(config.env),
                 .generator = {},
                 .generator_opt = {},
                 .evaluator = {},
                 .evaluator_opt = {},
                 .buffer = empty_buffer(config),
                 .obs_stat = {},
                 .interactions = 0,
                 .episodes = 0,
                 .command = 0.0,
                 .next_eval = config.eval_interval,
                 .next_snapshot = config.snapshot_interval,
                 .noise_rng = make_stream(config.seed, Stream::kNoise),
                 .env_rng = make_stream(config.seed, Stream::kEnv),
                 .sampling_rng = make_stream(config.seed, Stream::kSampling),
                 .eval_rng = make_stream(config.seed, Stream::kEval),
                 .log = {}};
  Rng init = make_stream(config.seed, Stream::kInit);
  s.generator = init_generator(generator_config(config, s.env.spec()), init);
  s.evaluator = init_evaluator(evaluator_config(config, s.env.spec()), init);
  s.generator_opt = AdamState::for_params(s.generator.params);
  s.evaluator_opt = AdamState::for_params(s.evaluator.params);
  s.obs_stat = RunningStat(s.env.spec().obs_dim);
  s.command = next_command(s.buffer, config.drive);
  return s;
}

double next_command(const ReplayBuffer& buffer, double drive) {
  if (buffer.empty()) return 0.0;
  return buffer.max_return() + drive;
}

IterationStats train_iteration(TrainerState& s) {
  const TrainingConfig& c = s.config;
  IterationStats st;
  st.command = s.command;

  const PolicyParams theta =
      sample_policy(s.generator, s.command, NoiseSpec{c.noise}, s.noise_rng);
  const RolloutResult r = rollout(s.env, theta, s.obs_stat, s.env_rng, true);
  s.buffer.push(r.ret, theta.flatten());
  s.interactions += r.steps;
  ++s.episodes;
  st.ret = r.ret;
  st.steps = r.steps;

  const PolicyShape shape = s.generator.config.policy;
  const auto batch = static_cast<std::size_t>(c.batch_size);
  double loss_v = 0.0;
  for (int i = 0; i < c.evaluator_updates; ++i) {
    const auto entries = s.buffer.sample(batch, c.recency_exponent, s.sampling_rng);
    std::vector<double> returns;
    std::vector<PolicyParams> policies;
    returns.reserve(batch);
    policies.reserve(batch);
    for (const auto& e : entries) {
      returns.push_back(e.ret);
      policies.push_back(PolicyParams::unflatten(e.theta, shape));
    }
    const double l = evaluator_update(s.evaluator, returns, policies, s.evaluator_opt, c.evaluator_lr);
    check_finite(s, "evaluator", l);
    loss_v += l;
    ++st.evaluator_updates;
  }

  double loss_g = 0.0;
  for (int i = 0; i < c.generator_updates; ++i) {
    const auto idx = s.buffer.sample_indices(batch, c.recency_exponent, s.sampling_rng);
    std::vector<double> returns;
    returns.reserve(batch);
    for (std::size_t k : idx) returns.push_back(s.buffer[k].ret);
    const double l = generator_update(s.generator, s.evaluator, returns, s.generator_opt, c.generator_lr);
    check_finite(s, "generator", l);
    loss_g += l;
    ++st.generator_updates;
  }
  st.loss_v = st.evaluator_updates ? loss_v / st.evaluator_updates : 0.0;
  st.loss_g = st.generator_updates ? loss_g / st.generator_updates : 0.0;

  s.command = next_command(s.buffer, c.drive);
  return st;
}

double evaluation_command(const TrainerState& s) { return next_command(s.buffer, s.config.drive); }

EvaluationResult evaluate_generator(TrainerState& s) {
  const PolicyParams theta = generate(s.generator, evaluation_command(s));
  return evaluate_policy(s.env, theta, s.obs_stat, s.config.eval_episodes, s.eval_rng);
}

void run_training(TrainerState& s, const TrainCallbacks& cb,
                  std::optional<std::int64_t> max_iterations) {
  const TrainingConfig& c = s.config;
  std::int64_t done = 0;
  while (s.interactions < c.budget && (!max_iterations || done < *max_iterations)) {
    const IterationStats st = train_iteration(s);
    ++done;
    while (s.next_eval <= c.budget && s.interactions >= s.next_eval) {
      const EvaluationResult ev = evaluate_generator(s);
      LogRow row;
      row.interactions = s.next_eval;
      row.episode = s.episodes;
      row.command = evaluation_command(s);
      row.eval_return_mean = ev.mean;
      row.eval_return_std = ev.stddev;
      row.best_buffer_return = s.buffer.max_return();
      row.loss_v = st.loss_v;
      row.loss_g = st.loss_g;
      s.log.push_back(row);
      if (cb.on_log) cb.on_log(row);
      s.next_eval += c.eval_interval;
    }
    if (c.snapshot_interval > 0) {
      while (s.interactions >= s.next_snapshot) {
        if (cb.on_snapshot) cb.on_snapshot(s, s.next_snapshot);
        s.next_snapshot += c.snapshot_interval;
      }
    }
  }
}

Checkpoint make_checkpoint(const TrainerState& s, const std::string& buffer_dump_name) {
  Checkpoint ck;
  ck.metadata["kind"] = "gogepo";
  ck.metadata["config"] = s.config.to_text();
  ck.metadata["env"] = s.config.env;
  ck.metadata["seed"] = std::to_string(s.config.seed);
  ck.metadata["interactions"] = std::to_string(s.interactions);
  ck.metadata["episodes"] = std::to_string(s.episodes);
  ck.metadata["command"] = fmt(s.command);
  ck.metadata["drive"] = fmt(s.config.drive);
  ck.metadata["next_eval"] = std::to_string(s.next_eval);
  ck.metadata["next_snapshot"] = std::to_string(s.next_snapshot);
  ck.metadata["rng.noise"] = serialize_rng(s.noise_rng);
  ck.metadata["rng.env"] = serialize_rng(s.env_rng);
  ck.metadata["rng.sampling"] = serialize_rng(s.sampling_rng);
  ck.metadata["rng.eval"] = serialize_rng(s.eval_rng);
  ck.metadata["buffer_dump"] = buffer_dump_name;
  ck.metadata["buffer.episodes"] = std::to_string(s.buffer.episode_count());
  if (!s.buffer.empty()) {
    ck.metadata["buffer.max_return"] = fmt(s.buffer.max_return());
    ck.metadata["buffer.min_return"] = fmt(s.buffer.min_return());
  }
  std::ostringstream log;
  for (const auto& r : s.log) log << format_log_row(r) << '\n';
  ck.metadata["log"] = log.str();
  store_generator(ck, s.generator);
  store_evaluator(ck, s.evaluator);
  store_running_stat(ck, s.obs_stat);
  store_adam(ck, "generator_opt", s.generator_opt, s.generator.params);
  store_adam(ck, "evaluator_opt", s.evaluator_opt, s.evaluator.params);
  return ck;
}

TrainerState restore_trainer(const Checkpoint& ck, const std::filesystem::path& buffer_dump) {
  if (ck.meta("kind") != "gogepo") throw CheckpointError("not a generator training checkpoint");
  const TrainingConfig config = parse_training_config_text(ck.meta("config"));
  TrainerState s = init_trainer(config);
  s.generator = load_generator(ck);
  s.evaluator = load_evaluator(ck);
  s.generator_opt = load_adam(ck, "generator_opt", s.generator.params);
  s.evaluator_opt = load_adam(ck, "evaluator_opt", s.evaluator.params);
  s.obs_stat = load_running_stat(ck);
  s.interactions = ck.meta_int("interactions");
  s.episodes = ck.meta_int("episodes");
  s.command = ck.meta_double("command");
  s.next_eval = ck.meta_int("next_eval");
  s.next_snapshot = ck.meta_int("next_snapshot");
  s.noise_rng = deserialize_rng(ck.meta("rng.noise"));
  s.env_rng = deserialize_rng(ck.meta("rng.env"));
  s.sampling_rng = deserialize_rng(ck.meta("rng.sampling"));
  s.eval_rng = deserialize_rng(ck.meta("rng.eval"));

  BufferDump dump = read_buffer_dump(buffer_dump);
  if (!(dump.shape == s.generator.config.policy)) {
    throw CheckpointError("buffer dump policy shape does not match the checkpoint");
  }
  s.buffer = ReplayBuffer::restore(static_cast<std::size_t>(config.buffer_capacity),
                                   ck.meta_int("buffer.episodes"), std::move(dump.entries));

  std::istringstream log(ck.meta("log"));
  std::string line;
  s.log.clear();
  while (std::getline(log, line)) {
    if (!line.empty()) s.log.push_back(parse_log_row(line));
  }
  return s;
}

RunPaths run_paths(const std::filesystem::path& out_dir) {
  return {out_dir / "config.txt", out_dir / "log.csv", out_dir / "checkpoint.bin",
          out_dir / "buffer.bin"};
}

void save_run(const TrainerState& s, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const RunPaths p = run_paths(out_dir);
  {
    std::ofstream os(p.config);
    if (!os) throw std::runtime_error("cannot write " + p.config.string());
    os << s.config.to_text();
  }
  write_log_csv(p.log, s.log);
  write_buffer_dump(p.buffer, s.buffer, s.generator.config.policy);
  save_checkpoint(p.checkpoint, make_checkpoint(s, p.buffer.filename().string()));
}

TrainerState train(const TrainingConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  TrainerState s = init_trainer(config);
  {
    std::ofstream os(run_paths(out_dir).config);
    if (!os) throw std::runtime_error("cannot write " + run_paths(out_dir).config.string());
    os << config.to_text();
  }
  TrainCallbacks cb;
  cb.on_snapshot = [&](const TrainerState& st, std::int64_t boundary) {
    Checkpoint ck;
    ck.metadata["kind"] = "generator_snapshot";
    ck.metadata["env"] = st.config.env;
    ck.metadata["interactions"] = std::to_string(boundary);
    store_generator(ck, st.generator);
    store_running_stat(ck, st.obs_stat);
    save_checkpoint(out_dir / ("snapshot_" + std::to_string(boundary) + ".bin"), ck);
  };
  run_training(s, cb);
  save_run(s, out_dir);
  return s;
}

TrainerState resume(const std::filesystem::path& out_dir, std::optional<std::int64_t> max_iterations) {
  const RunPaths p = run_paths(out_dir);
  const Checkpoint ck = load_checkpoint(p.checkpoint);
  TrainerState s = restore_trainer(ck, out_dir / ck.meta("buffer_dump"));
  run_training(s, {}, max_iterations);
  save_run(s, out_dir);
  return s;
}

}  // namespace gogepo
