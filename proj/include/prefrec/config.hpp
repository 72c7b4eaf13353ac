#pragma once

#include <cstdint>
#include <string>

namespace prefrec {

/// Flat run configuration. Every hyperparameter has a config key of the
/// same name; files are `key = value` lines with `#` comments. Unknown keys
/// are rejected so typos cannot silently fall back to defaults.
struct RunConfig {
  std::string algo = "prefrec";  // prefrec | ddpg | td3 | td3_bc | il | iql
  std::string task = "depth";    // depth | frequency | mixture
  std::uint64_t seed = 1;

  int state_dim = 245;
  int action_dim = 8;
  int hidden_dim = 256;
  int hidden_layers = 2;

  std::string optimizer = "adam";
  double actor_lr = 5e-6;
  double critic_lr = 5e-5;
  double reward_lr = 5e-5;
  int batch_size = 4096;
  int preference_batch_size = 256;
  bool normalized_observations = true;
  bool gradient_clipping = false;
  bool fine_tuning = true;
  double gamma = 0.9;
  double tau = 0.7;
  double target_retention = 0.999;
  bool literal_soft_update = false;
  int segment_length = 100;
  std::uint64_t replay_buffer_capacity = 3'000'000;
  std::uint64_t preference_buffer_capacity = 20'000;
  int pretrain_epochs = 3;
  int train_epochs = 5;
  int iters_per_epoch = 0;    // 0: ceil(replay size / batch size)
  int finetune_interval = 0;  // 0: once at the end of each epoch
  int eval_interval = 0;      // 0: once per epoch
  int eval_users = 500;

  bool no_pretrain = false;
  bool no_finetune = false;
  bool naive_td = false;

  int td3_policy_delay = 2;
  double td3_noise_std = 0.2;
  double td3_noise_clip = 0.5;
  int td3_num_critics = 2;
  double td3bc_alpha = 2.5;
  double iql_beta = 3.0;
  double iql_weight_clip = 100.0;

  int sim_users = 1000;
  int sim_heldout_users = 200;
  int sim_sessions = 25;
  double sim_noise = 0.05;
  int sim_pref_pairs = 20000;
  int sim_min_requests = 200;
  int teacher_margin = 0;

  double ncis_bandwidth = 1.0;
  double ncis_weight_cap = 10.0;

  std::string dataset_dir;

  /// Throws ConfigError when any value is out of range or unsupported.
  void validate() const;
};

/// Applies `key = value` lines from a config file on top of the defaults.
RunConfig load_config(const std::string& path);

/// Applies one key=value assignment (used for file lines and overrides).
void apply_config_line(RunConfig& config, const std::string& line, const std::string& context);

/// Canonical snapshot: every key in schema order, one per line. Reloading
/// the snapshot reproduces the config exactly.
std::string serialize_config(const RunConfig& config);

}  // namespace prefrec
