#include "prefrec/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <vector>

#include "CLI11.hpp"
#include "prefrec/baselines/baselines.hpp"
#include "prefrec/buffers/io.hpp"
#include "prefrec/errors.hpp"
#include "prefrec/metrics.hpp"
#include "prefrec/nn/checkpoint.hpp"
#include "prefrec/policy/agent.hpp"
#include "prefrec/policy/train.hpp"
#include "prefrec/reward/reward_model.hpp"
#include "prefrec/sim/generate.hpp"

namespace prefrec::cli {

namespace fs = std::filesystem;

std::string build_id() {
#ifdef PREFREC_BUILD_ID
  return PREFREC_BUILD_ID;
#else
  return "unversioned";
#endif
}

int worker_cap() {
  const char* raw = std::getenv("PREFREC_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  int value = 0;
  const char* end = raw;
  while (*end != '\0') ++end;
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc() || ptr != end || value < 1) {
    throw ConfigError(std::string("PREFREC_THREADS must be a positive integer, got '") + raw +
                      "'");
  }
  return value;
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void stamp_run_dir(const RunConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  write_file(out_dir + "/config.cfg", serialize_config(config));
  std::string info;
  info += "build_id " + build_id() + "\n";
  info += "seed " + std::to_string(config.seed) + "\n";
  info += "threads " + std::to_string(worker_cap()) + "\n";
  write_file(out_dir + "/run_info.txt", info);
}

struct LoadedDataset {
  ReplayBuffer replay;
  PreferenceBuffer prefs;
};

LoadedDataset load_dataset(const RunConfig& config, bool need_prefs) {
  if (config.dataset_dir.empty()) {
    throw ConfigError("dataset_dir must point at a directory written by `generate`");
  }
  const std::string prf = config.dataset_dir + "/preferences.txt";
  LoadedDataset data{
      load_transitions(config.dataset_dir + "/transitions.txt", config.replay_buffer_capacity),
      PreferenceBuffer(config.state_dim, config.action_dim, config.segment_length,
                       config.preference_buffer_capacity)};
  if (fs::exists(prf)) {
    data.prefs = load_preferences(prf, config.preference_buffer_capacity);
  } else if (need_prefs) {
    throw ConfigError("preferences file not found: " + prf);
  }
  return data;
}

// Training-state checkpoints carry the step so a resumed run can replay the
// exact step sequence. float32 holds integers exactly up to 2^24, far above
// any configured run length.
constexpr std::int64_t kMaxCheckpointStep = std::int64_t(1) << 24;

void push_step(std::vector<nn::NamedTensor>& tensors, std::int64_t step) {
  if (step < 0 || step > kMaxCheckpointStep) {
    throw IoError("checkpoint step " + std::to_string(step) + " out of range");
  }
  tensors.push_back({"meta.step", {1}, {static_cast<float>(step)}});
}

std::int64_t read_step(const std::vector<nn::NamedTensor>& tensors) {
  const nn::NamedTensor* t = nn::find_tensor(tensors, "meta.step");
  if (t == nullptr || t->data.size() != 1) throw IoError("checkpoint has no step record");
  return static_cast<std::int64_t>(t->data[0]);
}

std::vector<nn::NamedTensor> pack_agent_state(const PrefRecAgent& agent,
                                              const RewardModel& reward, std::int64_t step) {
  std::vector<nn::NamedTensor> tensors;
  nn::pack_network("policy", agent.policy, tensors);
  nn::pack_adam("policy", agent.policy_adam, tensors);
  nn::pack_network("q", agent.q, tensors);
  nn::pack_adam("q", agent.q_adam, tensors);
  nn::pack_network("q_target", agent.q_target, tensors);
  nn::pack_network("v", agent.v, tensors);
  nn::pack_adam("v", agent.v_adam, tensors);
  nn::pack_network("reward", reward.psi, tensors);
  nn::pack_adam("reward", reward.adam, tensors);
  push_step(tensors, step);
  return tensors;
}

void unpack_agent_state(const std::vector<nn::NamedTensor>& tensors, PrefRecAgent& agent,
                        RewardModel& reward) {
  nn::unpack_network("policy", tensors, agent.policy);
  nn::unpack_adam("policy", tensors, agent.policy_adam);
  nn::unpack_network("q", tensors, agent.q);
  nn::unpack_adam("q", tensors, agent.q_adam);
  nn::unpack_network("q_target", tensors, agent.q_target);
  nn::unpack_network("v", tensors, agent.v);
  nn::unpack_adam("v", tensors, agent.v_adam);
  nn::unpack_network("reward", tensors, reward.psi);
  nn::unpack_adam("reward", tensors, reward.adam);
}

std::vector<nn::NamedTensor> pack_baseline_state(const BaselineState& state,
                                                 const RewardModel* reward, std::int64_t step) {
  std::vector<nn::NamedTensor> tensors;
  nn::pack_network("policy", state.policy, tensors);
  nn::pack_adam("policy", state.policy_adam, tensors);
  for (std::size_t c = 0; c < state.critics.size(); ++c) {
    const std::string prefix = "critic" + std::to_string(c);
    nn::pack_network(prefix, state.critics[c], tensors);
    nn::pack_adam(prefix, state.critic_adams[c], tensors);
    nn::pack_network(prefix + "_target", state.critic_targets[c], tensors);
  }
  if (state.has_v) {
    nn::pack_network("v", state.v, tensors);
    nn::pack_adam("v", state.v_adam, tensors);
  }
  if (reward != nullptr) {
    nn::pack_network("reward", reward->psi, tensors);
    nn::pack_adam("reward", reward->adam, tensors);
  }
  push_step(tensors, step);
  return tensors;
}

void unpack_baseline_state(const std::vector<nn::NamedTensor>& tensors, BaselineState& state,
                           RewardModel* reward) {
  nn::unpack_network("policy", tensors, state.policy);
  nn::unpack_adam("policy", tensors, state.policy_adam);
  for (std::size_t c = 0; c < state.critics.size(); ++c) {
    const std::string prefix = "critic" + std::to_string(c);
    nn::unpack_network(prefix, tensors, state.critics[c]);
    nn::unpack_adam(prefix, tensors, state.critic_adams[c]);
    nn::unpack_network(prefix + "_target", tensors, state.critic_targets[c]);
  }
  if (state.has_v) {
    nn::unpack_network("v", tensors, state.v);
    nn::unpack_adam("v", tensors, state.v_adam);
  }
  if (reward != nullptr) {
    nn::unpack_network("reward", tensors, reward->psi);
    nn::unpack_adam("reward", tensors, reward->adam);
  }
}

RewardModel fresh_reward_model(const RunConfig& config) {
  Rng rng = Rng::stream(config.seed, "init.reward");
  return make_reward_model(config.state_dim, config.action_dim, config.hidden_dim,
                           config.hidden_layers, config.reward_lr, rng);
}

void pretrain_reward(RewardModel& reward, const PreferenceBuffer& prefs,
                     const RunConfig& config) {
  Rng rng = Rng::stream(config.seed, "pretrain");
  pretrain(reward, prefs, config.pretrain_epochs, config.preference_batch_size, rng);
}

}  // namespace

void cmd_generate(const RunConfig& config, const std::string& out_dir) {
  config.validate();
  stamp_run_dir(config, out_dir);
  Dataset dataset = generate_dataset(config);
  save_transitions(out_dir + "/transitions.txt", dataset.replay);
  save_preferences(out_dir + "/preferences.txt", dataset.prefs);
  save_session_logs(out_dir + "/heldout_logs.txt", dataset.heldout_logs, config.state_dim,
                    config.action_dim);
  std::ofstream levels = open_csv(out_dir + "/levels.csv");
  write_levels_csv(levels, dataset.depth_level_fraction, dataset.frequency_level_fraction);
  std::cout << "generated " << dataset.replay.size() << " transitions, " << dataset.prefs.size()
            << " preference pairs (" << dataset.eligible_users << " eligible users), "
            << dataset.heldout_logs.size() << " held-out logs -> " << out_dir << "\n";
}

void cmd_pretrain(const RunConfig& config, const std::string& out_dir) {
  config.validate();
  stamp_run_dir(config, out_dir);
  if (config.dataset_dir.empty()) {
    throw ConfigError("pretrain: dataset_dir must point at a directory written by `generate`");
  }
  PreferenceBuffer all =
      load_preferences(config.dataset_dir + "/preferences.txt", config.preference_buffer_capacity);
  if (all.empty()) throw ConfigError("pretrain: preference file is empty");

  // Hold out the trailing tenth for the accuracy trace; it only counts when
  // it has at least one strict label to score.
  const std::size_t n_eval = all.size() / 10;
  PreferenceBuffer train_set(all.state_dim(), all.action_dim(), all.segment_length(),
                             all.capacity());
  PreferenceBuffer eval_set(all.state_dim(), all.action_dim(), all.segment_length(),
                            all.capacity());
  bool eval_has_strict = false;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const PreferenceRecord& rec = all.at(i);
    if (i < all.size() - n_eval) {
      train_set.push(rec);
    } else {
      if (rec.y0 != rec.y1) eval_has_strict = true;
      eval_set.push(rec);
    }
  }

  RewardModel reward = fresh_reward_model(config);
  Rng rng = Rng::stream(config.seed, "pretrain");
  PretrainTrace trace = pretrain(reward, train_set, config.pretrain_epochs,
                                 config.preference_batch_size, rng,
                                 eval_has_strict ? &eval_set : nullptr);

  std::ofstream csv = open_csv(out_dir + "/pretrain.csv");
  csv << "epoch,loss,accuracy\n";
  for (std::size_t e = 0; e < trace.epoch_mean_loss.size(); ++e) {
    const double acc = e < trace.epoch_eval_accuracy.size()
                           ? trace.epoch_eval_accuracy[e]
                           : std::numeric_limits<double>::quiet_NaN();
    csv << (e + 1) << ',' << format_metric(trace.epoch_mean_loss[e]) << ','
        << format_metric(acc) << '\n';
  }

  std::vector<nn::NamedTensor> tensors;
  nn::pack_network("reward", reward.psi, tensors);
  nn::pack_adam("reward", reward.adam, tensors);
  push_step(tensors, 0);
  nn::save_checkpoint(out_dir + "/reward.ckpt", tensors);
  if (!trace.epoch_mean_loss.empty()) {
    std::cout << "pretrained reward over " << train_set.size() << " pairs, final loss "
              << format_metric(trace.epoch_mean_loss.back());
    if (!trace.epoch_eval_accuracy.empty()) {
      std::cout << ", held-out accuracy " << format_metric(trace.epoch_eval_accuracy.back());
    }
    std::cout << " -> " << out_dir << "\n";
  } else {
    std::cout << "pretrain epochs = 0; wrote the initial reward model -> " << out_dir << "\n";
  }
}

void cmd_train(const RunConfig& config, const std::string& out_dir,
               const std::string& resume_checkpoint) {
  config.validate();
  stamp_run_dir(config, out_dir);
  ensure_dir(out_dir + "/checkpoints");

  const bool finetune_enabled = config.fine_tuning && !config.no_finetune;
  bool need_prefs;
  if (config.algo == "il") {
    need_prefs = false;
  } else if (config.algo == "prefrec") {
    need_prefs = !config.no_pretrain || finetune_enabled;
  } else {
    need_prefs = !config.no_pretrain;
  }
  LoadedDataset data = load_dataset(config, need_prefs);

  std::ofstream metrics = open_csv(out_dir + "/metrics.csv");
  write_metrics_header(metrics);

  const int curve_users = std::min(config.eval_users, config.sim_heldout_users);
  std::vector<PolicySnapshot> snapshots;

  TrainHooks hooks;
  hooks.evaluate = [&](const nn::NetworkParams& policy, std::int64_t step) {
    snapshots.push_back({step, policy});
    return mean_cumulative_level(config, policy, curve_users);
  };
  hooks.on_row = [&](const MetricsRow& row) {
    write_metrics_row(metrics, row);
    std::cout << "epoch " << row.epoch << " step " << row.step;
    if (!std::isnan(row.eval_score)) std::cout << " eval " << format_metric(row.eval_score);
    std::cout << "\n";
  };

  std::vector<nn::NamedTensor> resume_tensors;
  if (!resume_checkpoint.empty()) resume_tensors = nn::load_checkpoint(resume_checkpoint);

  TrainResult result;
  if (config.algo == "prefrec") {
    PrefRecAgent agent = make_agent(config);
    RewardModel reward = fresh_reward_model(config);
    std::int64_t start_step = 0;
    if (!resume_tensors.empty()) {
      unpack_agent_state(resume_tensors, agent, reward);
      start_step = read_step(resume_tensors);
    } else if (!config.no_pretrain) {
      pretrain_reward(reward, data.prefs, config);
    }
    hooks.on_epoch_end = [&](int epoch, std::int64_t step) {
      nn::save_checkpoint(out_dir + "/checkpoints/epoch_" + std::to_string(epoch) + ".ckpt",
                          pack_agent_state(agent, reward, step));
    };
    result = train(agent, reward, data.prefs, data.replay, config, hooks, start_step);
    nn::save_checkpoint(out_dir + "/final.ckpt",
                        pack_agent_state(agent, reward, result.total_steps));
  } else {
    BaselineState state = make_baseline(config);
    const bool needs_reward = config.algo != "il";
    RewardModel reward_storage = needs_reward ? fresh_reward_model(config) : RewardModel{};
    RewardModel* reward = needs_reward ? &reward_storage : nullptr;
    std::int64_t start_step = 0;
    if (!resume_tensors.empty()) {
      unpack_baseline_state(resume_tensors, state, reward);
      start_step = read_step(resume_tensors);
    } else if (needs_reward && !config.no_pretrain) {
      pretrain_reward(*reward, data.prefs, config);
    }
    hooks.on_epoch_end = [&](int epoch, std::int64_t step) {
      nn::save_checkpoint(out_dir + "/checkpoints/epoch_" + std::to_string(epoch) + ".ckpt",
                          pack_baseline_state(state, reward, step));
    };
    result = train_baseline(state, reward, data.replay, config, hooks, start_step);
    nn::save_checkpoint(out_dir + "/final.ckpt",
                        pack_baseline_state(state, reward, result.total_steps));
  }

  if (!snapshots.empty()) {
    std::ofstream curve = open_csv(out_dir + "/curve.csv");
    write_curve_header(curve);
    for (const CurvePoint& p : learning_curve(snapshots, config, curve_users)) {
      write_curve_row(curve, {p.step, p.mean, p.stderr_users});
    }
  }
  std::cout << "trained " << config.algo << " for " << result.total_steps << " steps -> "
            << out_dir << "\n";
}

EvalReport cmd_eval(const RunConfig& config, const std::string& checkpoint_path,
                    const std::string& out_dir) {
  config.validate();
  if (config.dataset_dir.empty()) {
    throw ConfigError("eval: dataset_dir must point at a directory written by `generate`");
  }
  if (!fs::exists(checkpoint_path)) throw IoError("checkpoint not found: " + checkpoint_path);
  const std::vector<nn::NamedTensor> tensors = nn::load_checkpoint(checkpoint_path);
  nn::NetworkParams policy;
  {
    Rng rng = Rng::stream(config.seed, "init.policy");
    policy = nn::make_mlp(config.state_dim, config.hidden_dim, config.hidden_layers,
                          config.action_dim, nn::Activation::kTanh, rng);
  }
  nn::unpack_network("policy", tensors, policy);

  const std::vector<SessionLog> logs =
      load_session_logs(config.dataset_dir + "/heldout_logs.txt");
  EvalReport report = evaluate_policy(config, policy, logs);

  stamp_run_dir(config, out_dir);
  std::ofstream csv = open_csv(out_dir + "/eval.csv");
  write_eval_header(csv);
  write_eval_row(csv, {report.algo, report.task, report.seed, report.score, report.ci95,
                       report.n_users, report.users_skipped});
  std::cout << "ncis " << report.task << " score " << format_metric(report.score) << " ci95 "
            << format_metric(report.ci95) << " users " << report.n_users << " skipped "
            << report.users_skipped << "\n";
  return report;
}

void cmd_ablate(const RunConfig& config, const std::string& out_dir) {
  config.validate();
  if (config.algo != "prefrec") {
    throw ConfigError("ablate: the sweep varies tau and the reward schedule, which only the "
                      "prefrec algorithm has");
  }
  stamp_run_dir(config, out_dir);
  for (const double tau : {0.5, 0.6, 0.7, 0.8}) {
    RunConfig cell = config;
    cell.tau = tau;
    cmd_train(cell, out_dir + "/tau_" + format_metric(tau));
  }
  for (const bool with_pretrain : {true, false}) {
    for (const bool with_finetune : {true, false}) {
      RunConfig cell = config;
      cell.no_pretrain = !with_pretrain;
      cell.no_finetune = !with_finetune;
      cmd_train(cell, out_dir + std::string("/pre_") + (with_pretrain ? "on" : "off") +
                          "_fine_" + (with_finetune ? "on" : "off"));
    }
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Preference-based training for session recommenders"};
  app.require_subcommand(1);

  std::string config_path, out_dir, algo, task, checkpoint, resume;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file (key = value lines)");
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--seed", seed, "Seed override");
    cmd->add_option("--algo", algo, "Algorithm override");
    cmd->add_option("--task", task, "Task override (depth | frequency | mixture)");
  };

  add_common(app.add_subcommand("generate", "Simulate the logging policy and write a dataset"));
  add_common(app.add_subcommand("pretrain", "Fit the reward model from preference pairs"));
  CLI::App* train_cmd = app.add_subcommand("train", "Train a policy on a generated dataset");
  add_common(train_cmd);
  train_cmd->add_option("--resume", resume, "Checkpoint to resume from (epoch boundary)");
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a trained policy on held-out logs");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint, "Policy checkpoint to score")->required();
  add_common(app.add_subcommand("ablate", "Run the tau and pretrain/finetune sweeps"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    worker_cap();  // fail fast on a malformed environment override
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    if (sub->count("--seed") > 0) config.seed = seed;
    if (sub->count("--algo") > 0) config.algo = algo;
    if (sub->count("--task") > 0) config.task = task;

    const std::string name = sub->get_name();
    if (name == "generate") {
      cmd_generate(config, out_dir);
    } else if (name == "pretrain") {
      cmd_pretrain(config, out_dir);
    } else if (name == "train") {
      cmd_train(config, out_dir, resume);
    } else if (name == "eval") {
      cmd_eval(config, checkpoint, out_dir);
    } else {
      cmd_ablate(config, out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace prefrec::cli
