#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prefrec/config.hpp"
#include "prefrec/nn/network.hpp"
#include "prefrec/sim/simulator.hpp"

namespace prefrec {

/// Propensity surrogate for a deterministic continuous policy: a Gaussian
/// kernel on the distance between the policy's action and the logged one,
/// with a session-level weight cap.
struct PropensityModel {
  double bandwidth = 1.0;
  double cap = 10.0;
};

PropensityModel propensity_model_from(const RunConfig& config);

/// log of the per-request kernel weight: -|pi(s) - a|^2 / (2 h^2).
double request_log_weight(std::span<const double> policy_action,
                          std::span<const float> logged_action, double bandwidth);

/// min(cap, exp(sum of request log weights)). The network's output is first
/// rescaled to a unit direction (normalize_action), matching what serving
/// would actually show the user. Accumulates in log space so sessions with
/// hundreds of requests cannot overflow.
double session_propensity(const nn::NetworkParams& policy, const Session& session,
                          const PropensityModel& model);

/// Weighted average of per-session levels with self-normalized weights.
double self_normalized_score(std::span<const double> weights, std::span<const double> levels);

struct NcisReport {
  double score = 0.0;
  int users_scored = 0;
  int users_skipped = 0;  // no scorable session or fully underflowed weights
  std::vector<double> per_user_scores;
};

/// Mean over users of the self-normalized weighted session level.
NcisReport ncis_score(const nn::NetworkParams& policy, std::span<const SessionLog> logs,
                      const std::string& task, const PropensityModel& model);

struct ConfidenceInterval {
  double half_width = 0.0;
  bool defined = false;  // needs at least two scores
};

/// 95% half-width: 1.96 * stderr across per-user scores.
ConfidenceInterval confidence_interval(std::span<const double> per_user_scores);

/// Wraps a frozen network as a simulator policy (copies the parameters).
/// Output actions are unit directions, the same convention serving uses.
PolicyFn policy_from_network(const nn::NetworkParams& net);

/// Simulates held-out users under the policy and returns the mean
/// cumulative engagement level for the configured task. Noise streams are
/// keyed per user, so repeated calls share randomness across snapshots.
double mean_cumulative_level(const RunConfig& config, const nn::NetworkParams& policy,
                             int n_users);

struct PolicySnapshot {
  std::int64_t step = 0;
  nn::NetworkParams policy;
};

struct CurvePoint {
  std::int64_t step = 0;
  double mean = 0.0;
  double stderr_users = 0.0;
};

/// Per-snapshot mean cumulative level over held-out users (the learning
/// curve), with the across-user standard error.
std::vector<CurvePoint> learning_curve(std::span<const PolicySnapshot> snapshots,
                                       const RunConfig& config, int n_users);

struct EvalReport {
  std::string algo;
  std::string task;
  double score = 0.0;
  double ci95 = 0.0;
  bool ci_defined = false;
  int n_users = 0;
  int users_skipped = 0;
  std::uint64_t seed = 0;
};

EvalReport evaluate_policy(const RunConfig& config, const nn::NetworkParams& policy,
                           std::span<const SessionLog> heldout_logs);

}  // namespace prefrec
