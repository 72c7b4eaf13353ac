#include "prefrec/eval/eval.hpp"

#include <cmath>

#include "prefrec/errors.hpp"
#include "prefrec/sim/generate.hpp"

namespace prefrec {

PropensityModel propensity_model_from(const RunConfig& config) {
  return {config.ncis_bandwidth, config.ncis_weight_cap};
}

double request_log_weight(std::span<const double> policy_action,
                          std::span<const float> logged_action, double bandwidth) {
  if (policy_action.size() != logged_action.size()) {
    throw ConfigError("request_log_weight: action dimension mismatch");
  }
  if (!(bandwidth > 0.0)) throw ConfigError("request_log_weight: bandwidth must be positive");
  double dist2 = 0.0;
  for (std::size_t i = 0; i < policy_action.size(); ++i) {
    const double d = policy_action[i] - static_cast<double>(logged_action[i]);
    dist2 += d * d;
  }
  return -dist2 / (2.0 * bandwidth * bandwidth);
}

double session_propensity(const nn::NetworkParams& policy, const Session& session,
                          const PropensityModel& model) {
  double log_sum = 0.0;
  for (const RequestRecord& req : session.requests) {
    std::vector<double> a = nn::forward(policy, std::span<const float>(req.state));
    normalize_action(a);  // scoring sees the same served direction as the simulator
    log_sum += request_log_weight(a, req.action, model.bandwidth);
  }
  return std::min(model.cap, std::exp(log_sum));
}

double self_normalized_score(std::span<const double> weights, std::span<const double> levels) {
  if (weights.size() != levels.size() || weights.empty()) {
    throw ConfigError("self_normalized_score: mismatched or empty inputs");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    num += weights[i] * levels[i];
    den += weights[i];
  }
  if (den <= 0.0) throw NumericError("self_normalized_score: weights sum to zero");
  return num / den;
}

NcisReport ncis_score(const nn::NetworkParams& policy, std::span<const SessionLog> logs,
                      const std::string& task, const PropensityModel& model) {
  if (logs.empty()) throw ConfigError("ncis_score: no users to score");
  NcisReport report;
  std::vector<double> weights, levels;
  for (const SessionLog& log : logs) {
    const EngagementLevels lv = session_levels(log);
    weights.clear();
    levels.clear();
    for (std::size_t i = 0; i < log.sessions.size(); ++i) {
      const double level = session_task_level(lv, i, task);
      if (std::isnan(level)) continue;
      weights.push_back(session_propensity(policy, log.sessions[i], model));
      levels.push_back(level);
    }
    double den = 0.0;
    for (double w : weights) den += w;
    if (weights.empty() || den <= 0.0) {
      ++report.users_skipped;
      continue;
    }
    report.per_user_scores.push_back(self_normalized_score(weights, levels));
    ++report.users_scored;
  }
  if (report.users_scored == 0) throw NumericError("ncis_score: every user was skipped");
  double sum = 0.0;
  for (double s : report.per_user_scores) sum += s;
  report.score = sum / static_cast<double>(report.users_scored);
  return report;
}

ConfidenceInterval confidence_interval(std::span<const double> per_user_scores) {
  ConfidenceInterval ci;
  const std::size_t n = per_user_scores.size();
  if (n < 2) return ci;
  double mean = 0.0;
  for (double s : per_user_scores) mean += s;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double s : per_user_scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(n - 1);
  ci.half_width = 1.96 * std::sqrt(var / static_cast<double>(n));
  ci.defined = true;
  return ci;
}

PolicyFn policy_from_network(const nn::NetworkParams& net) {
  return [net](std::span<const float> state) {
    std::vector<double> out = nn::forward(net, state);
    normalize_action(out);
    std::vector<float> action(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) action[i] = static_cast<float>(out[i]);
    return action;
  };
}

namespace {

// Scores against the user's logged history, so the level ratios measure the
// change the evaluated policy causes relative to the logging policy.
SessionStats heldout_baseline(const SimParams& params, std::int64_t index, int sessions) {
  return session_stats(behavior_log(params, index, sessions));
}

}  // namespace

double mean_cumulative_level(const RunConfig& config, const nn::NetworkParams& policy,
                             int n_users) {
  if (n_users <= 0) throw ConfigError("mean_cumulative_level: n_users must be positive");
  const SimParams params = sim_params_from(config);
  const PolicyFn fn = policy_from_network(policy);
  double total = 0.0;
  for (int u = 0; u < n_users; ++u) {
    const auto index = static_cast<std::int64_t>(config.sim_users) + u;
    const UserProfile profile = make_user(params, index);
    const SessionStats baseline = heldout_baseline(params, index, config.sim_sessions);
    Rng rng = Rng::stream(config.seed, "eval.sim", static_cast<std::uint64_t>(index));
    const SessionLog log = simulate_user(params, profile, fn, config.sim_sessions, rng);
    total += cumulative_level_score(log, config.task, baseline);
  }
  return total / static_cast<double>(n_users);
}

std::vector<CurvePoint> learning_curve(std::span<const PolicySnapshot> snapshots,
                                       const RunConfig& config, int n_users) {
  std::vector<CurvePoint> curve;
  curve.reserve(snapshots.size());
  const SimParams params = sim_params_from(config);
  std::vector<SessionStats> baselines;
  baselines.reserve(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    const auto index = static_cast<std::int64_t>(config.sim_users) + u;
    baselines.push_back(heldout_baseline(params, index, config.sim_sessions));
  }
  for (const PolicySnapshot& snap : snapshots) {
    const PolicyFn fn = policy_from_network(snap.policy);
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(n_users));
    for (int u = 0; u < n_users; ++u) {
      const auto index = static_cast<std::int64_t>(config.sim_users) + u;
      const UserProfile profile = make_user(params, index);
      Rng rng = Rng::stream(config.seed, "eval.sim", static_cast<std::uint64_t>(index));
      const SessionLog log = simulate_user(params, profile, fn, config.sim_sessions, rng);
      scores.push_back(cumulative_level_score(log, config.task, baselines[u]));
    }
    CurvePoint point;
    point.step = snap.step;
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    point.mean = mean;
    if (scores.size() >= 2) {
      double var = 0.0;
      for (double s : scores) var += (s - mean) * (s - mean);
      var /= static_cast<double>(scores.size() - 1);
      point.stderr_users = std::sqrt(var / static_cast<double>(scores.size()));
    }
    curve.push_back(point);
  }
  return curve;
}

EvalReport evaluate_policy(const RunConfig& config, const nn::NetworkParams& policy,
                           std::span<const SessionLog> heldout_logs) {
  const NcisReport ncis = ncis_score(policy, heldout_logs, config.task,
                                     propensity_model_from(config));
  EvalReport report;
  report.algo = config.algo;
  report.task = config.task;
  report.score = ncis.score;
  const ConfidenceInterval ci = confidence_interval(ncis.per_user_scores);
  report.ci95 = ci.half_width;
  report.ci_defined = ci.defined;
  report.n_users = ncis.users_scored;
  report.users_skipped = ncis.users_skipped;
  report.seed = config.seed;
  return report;
}

}  // namespace prefrec
