#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "prefrec/config.hpp"
#include "prefrec/policy/agent.hpp"

namespace prefrec {

/// One metrics line. Loss fields are means over the window since the
/// previous row; quiet NaN marks "not measured in this window" and prints
/// as an empty cell.
struct MetricsRow {
  int epoch = 0;
  std::int64_t step = 0;
  double v_loss = std::numeric_limits<double>::quiet_NaN();
  double q_loss = std::numeric_limits<double>::quiet_NaN();
  double policy_loss = std::numeric_limits<double>::quiet_NaN();
  double reward_loss = std::numeric_limits<double>::quiet_NaN();
  double eval_score = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHooks {
  /// Scores a frozen policy snapshot; called at step 0 and every interval.
  std::function<double(const nn::NetworkParams& policy, std::int64_t step)> evaluate;
  std::function<void(const MetricsRow& row)> on_row;
  /// Called after each finished epoch (checkpointing point). The caller
  /// owns the trained state and captures whatever it needs to persist.
  std::function<void(int epoch, std::int64_t step)> on_epoch_end;
};

struct TrainResult {
  std::vector<MetricsRow> rows;
  std::int64_t total_steps = 0;
};

/// Per-iteration training step order: sample and label a replay minibatch,
/// V step, Q step, policy step, target update, then the optional reward
/// fine-tune at its cadence. start_step > 0 resumes a checkpointed run at
/// an epoch boundary and replays the identical step sequence from there.
TrainResult train(PrefRecAgent& agent, RewardModel& reward, const PreferenceBuffer& prefs,
                  const ReplayBuffer& replay, const RunConfig& config,
                  const TrainHooks& hooks = {}, std::int64_t start_step = 0);

/// Iterations per epoch after resolving the automatic setting.
std::int64_t resolve_iters_per_epoch(const RunConfig& config, std::size_t replay_size);

}  // namespace prefrec
