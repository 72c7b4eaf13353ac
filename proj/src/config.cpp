#include "prefrec/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <vector>

#include "prefrec/errors.hpp"

namespace prefrec {

namespace {

struct Field {
  std::string_view name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(std::string_view key, const std::string& value) {
  throw ConfigError("config: bad value '" + value + "' for key '" + std::string(key) + "'");
}

template <class T>
T parse_number(std::string_view key, const std::string& value) {
  T out{};
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end) bad_value(key, value);
  return out;
}

bool parse_bool(std::string_view key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(key, value);
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <class T>
Field field(std::string_view name, T RunConfig::*member) {
  if constexpr (std::is_same_v<T, std::string>) {
    return {name, [name, member](RunConfig& c, const std::string& v) { c.*member = v; },
            [member](const RunConfig& c) { return c.*member; }};
  } else if constexpr (std::is_same_v<T, bool>) {
    return {name,
            [name, member](RunConfig& c, const std::string& v) { c.*member = parse_bool(name, v); },
            [member](const RunConfig& c) { return (c.*member) ? "true" : "false"; }};
  } else if constexpr (std::is_same_v<T, double>) {
    return {name,
            [name, member](RunConfig& c, const std::string& v) {
              c.*member = parse_number<double>(name, v);
            },
            [member](const RunConfig& c) { return format_double(c.*member); }};
  } else {
    return {name,
            [name, member](RunConfig& c, const std::string& v) {
              c.*member = parse_number<T>(name, v);
            },
            [member](const RunConfig& c) { return std::to_string(c.*member); }};
  }
}

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      field("algo", &RunConfig::algo),
      field("task", &RunConfig::task),
      field("seed", &RunConfig::seed),
      field("state_dim", &RunConfig::state_dim),
      field("action_dim", &RunConfig::action_dim),
      field("hidden_dim", &RunConfig::hidden_dim),
      field("hidden_layers", &RunConfig::hidden_layers),
      field("optimizer", &RunConfig::optimizer),
      field("actor_lr", &RunConfig::actor_lr),
      field("critic_lr", &RunConfig::critic_lr),
      field("reward_lr", &RunConfig::reward_lr),
      field("batch_size", &RunConfig::batch_size),
      field("preference_batch_size", &RunConfig::preference_batch_size),
      field("normalized_observations", &RunConfig::normalized_observations),
      field("gradient_clipping", &RunConfig::gradient_clipping),
      field("fine_tuning", &RunConfig::fine_tuning),
      field("gamma", &RunConfig::gamma),
      field("tau", &RunConfig::tau),
      field("target_retention", &RunConfig::target_retention),
      field("literal_soft_update", &RunConfig::literal_soft_update),
      field("segment_length", &RunConfig::segment_length),
      field("replay_buffer_capacity", &RunConfig::replay_buffer_capacity),
      field("preference_buffer_capacity", &RunConfig::preference_buffer_capacity),
      field("pretrain_epochs", &RunConfig::pretrain_epochs),
      field("train_epochs", &RunConfig::train_epochs),
      field("iters_per_epoch", &RunConfig::iters_per_epoch),
      field("finetune_interval", &RunConfig::finetune_interval),
      field("eval_interval", &RunConfig::eval_interval),
      field("eval_users", &RunConfig::eval_users),
      field("no_pretrain", &RunConfig::no_pretrain),
      field("no_finetune", &RunConfig::no_finetune),
      field("naive_td", &RunConfig::naive_td),
      field("td3_policy_delay", &RunConfig::td3_policy_delay),
      field("td3_noise_std", &RunConfig::td3_noise_std),
      field("td3_noise_clip", &RunConfig::td3_noise_clip),
      field("td3_num_critics", &RunConfig::td3_num_critics),
      field("td3bc_alpha", &RunConfig::td3bc_alpha),
      field("iql_beta", &RunConfig::iql_beta),
      field("iql_weight_clip", &RunConfig::iql_weight_clip),
      field("sim_users", &RunConfig::sim_users),
      field("sim_heldout_users", &RunConfig::sim_heldout_users),
      field("sim_sessions", &RunConfig::sim_sessions),
      field("sim_noise", &RunConfig::sim_noise),
      field("sim_pref_pairs", &RunConfig::sim_pref_pairs),
      field("sim_min_requests", &RunConfig::sim_min_requests),
      field("teacher_margin", &RunConfig::teacher_margin),
      field("ncis_bandwidth", &RunConfig::ncis_bandwidth),
      field("ncis_weight_cap", &RunConfig::ncis_weight_cap),
      field("dataset_dir", &RunConfig::dataset_dir),
  };
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("config: " + message);
}

}  // namespace

void apply_config_line(RunConfig& config, const std::string& raw, const std::string& context) {
  std::string line = raw;
  const std::size_t hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  line = trim(line);
  if (line.empty()) return;
  const std::size_t eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("config: " + context + ": expected 'key = value', got '" + trim(raw) + "'");
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  for (const Field& f : schema()) {
    if (f.name == key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("config: " + context + ": unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open '" + path + "'");
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    apply_config_line(config, line, path + ":" + std::to_string(line_no));
  }
  return config;
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const Field& f : schema()) {
    out.append(f.name);
    out.append(" = ");
    out.append(f.get(config));
    out.push_back('\n');
  }
  return out;
}

void RunConfig::validate() const {
  require(algo == "prefrec" || algo == "ddpg" || algo == "td3" || algo == "td3_bc" ||
              algo == "il" || algo == "iql",
          "algo must be one of prefrec, ddpg, td3, td3_bc, il, iql (got '" + algo + "')");
  require(task == "depth" || task == "frequency" || task == "mixture",
          "task must be depth, frequency or mixture (got '" + task + "')");
  require(state_dim > 0 && action_dim > 0, "state_dim and action_dim must be positive");
  require(state_dim >= action_dim + 5,
          "state_dim must be at least action_dim + 5 to hold the behavioral aggregates");
  require(hidden_dim > 0 && hidden_layers >= 1, "network shape must be positive");
  require(optimizer == "adam", "optimizer: only adam is supported");
  require(actor_lr > 0 && critic_lr > 0 && reward_lr > 0, "learning rates must be positive");
  require(batch_size > 0 && preference_batch_size > 0, "batch sizes must be positive");
  require(normalized_observations, "normalized_observations=false is not supported");
  require(!gradient_clipping,
          "gradient_clipping must stay false; non-finite gradients abort instead");
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0,1)");
  require(tau >= 0.5 && tau < 1.0, "tau must lie in [0.5,1)");
  require(target_retention >= 0.0 && target_retention <= 1.0,
          "target_retention must lie in [0,1]");
  require(segment_length > 0, "segment_length must be positive");
  require(replay_buffer_capacity > 0 && preference_buffer_capacity > 0,
          "buffer capacities must be positive");
  require(pretrain_epochs >= 0 && train_epochs >= 0, "epoch counts must be non-negative");
  require(iters_per_epoch >= 0 && finetune_interval >= 0 && eval_interval >= 0,
          "intervals must be non-negative");
  require(eval_users > 0, "eval_users must be positive");
  require(td3_policy_delay >= 1, "td3_policy_delay must be at least 1");
  require(td3_noise_std >= 0.0 && td3_noise_clip >= 0.0, "td3 noise settings must be >= 0");
  require(td3_num_critics == 1 || td3_num_critics == 2, "td3_num_critics must be 1 or 2");
  require(td3bc_alpha >= 0.0, "td3bc_alpha must be >= 0");
  require(iql_weight_clip > 0.0, "iql_weight_clip must be positive");
  require(sim_users > 0 && sim_heldout_users > 0 && sim_sessions > 0,
          "simulator population must be positive");
  require(sim_noise >= 0.0, "sim_noise must be >= 0");
  require(sim_pref_pairs >= 0, "sim_pref_pairs must be >= 0");
  require(sim_min_requests >= 0, "sim_min_requests must be >= 0");
  require(teacher_margin >= 0, "teacher_margin must be >= 0");
  require(ncis_bandwidth > 0.0 && ncis_weight_cap > 0.0,
          "ncis_bandwidth and ncis_weight_cap must be positive");
}

}  // namespace prefrec
