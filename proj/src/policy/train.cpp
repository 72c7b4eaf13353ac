#include "prefrec/policy/train.hpp"

#include <cmath>
#include <string>

#include "prefrec/errors.hpp"

namespace prefrec {

namespace {

struct WindowMean {
  double sum = 0.0;
  std::int64_t n = 0;

  void add(double x) {
    sum += x;
    ++n;
  }
  double take() {
    const double m = n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    sum = 0.0;
    n = 0;
    return m;
  }
};

}  // namespace

std::int64_t resolve_iters_per_epoch(const RunConfig& config, std::size_t replay_size) {
  if (config.iters_per_epoch > 0) return config.iters_per_epoch;
  const auto b = static_cast<std::size_t>(config.batch_size);
  return static_cast<std::int64_t>((replay_size + b - 1) / b);
}

TrainResult train(PrefRecAgent& agent, RewardModel& reward, const PreferenceBuffer& prefs,
                  const ReplayBuffer& replay, const RunConfig& config, const TrainHooks& hooks,
                  std::int64_t start_step) {
  if (replay.empty()) throw ConfigError("train: replay buffer is empty");
  const bool finetune = config.fine_tuning && !config.no_finetune;
  if (finetune && prefs.empty()) {
    throw ConfigError("train: fine-tuning enabled but the preference buffer is empty");
  }
  const std::int64_t iters = resolve_iters_per_epoch(config, replay.size());
  const std::int64_t eval_interval = config.eval_interval > 0 ? config.eval_interval : iters;
  const std::int64_t total = static_cast<std::int64_t>(config.train_epochs) * iters;
  const QMode mode = config.naive_td ? QMode::kNaiveTd : QMode::kPrefRec;
  if (start_step < 0 || start_step > total || (iters > 0 && start_step % iters != 0)) {
    throw ConfigError("train: start_step must be a past epoch boundary");
  }

  TrainResult result;
  WindowMean v_mean, q_mean, p_mean, r_mean;

  auto emit_row = [&](int epoch, std::int64_t step, bool with_losses) {
    MetricsRow row;
    row.epoch = epoch;
    row.step = step;
    if (with_losses) {
      row.v_loss = v_mean.take();
      row.q_loss = q_mean.take();
      row.policy_loss = p_mean.take();
      row.reward_loss = r_mean.take();
    }
    if (hooks.evaluate) row.eval_score = hooks.evaluate(agent.policy, step);
    if (hooks.on_row) hooks.on_row(row);
    result.rows.push_back(row);
  };

  if (start_step == 0) emit_row(0, 0, false);

  for (std::int64_t step = start_step + 1; step <= total; ++step) {
    const int epoch = static_cast<int>((step - 1) / iters) + 1;
    const std::int64_t iter_in_epoch = (step - 1) % iters + 1;
    try {
      Rng batch_rng = Rng::stream(config.seed, "replay", static_cast<std::uint64_t>(step));
      auto items = sample_batch(replay, static_cast<std::size_t>(config.batch_size), batch_rng);
      LabeledBatch labeled = label_batch(reward, std::move(items));

      v_mean.add(v_update(agent, labeled.items));
      q_mean.add(q_update(agent, labeled, mode));
      p_mean.add(policy_update(agent, labeled.items));
      soft_update_target(agent);

      const bool finetune_due =
          finetune && (config.finetune_interval > 0 ? step % config.finetune_interval == 0
                                                    : iter_in_epoch == iters);
      if (finetune_due) {
        Rng pref_rng = Rng::stream(config.seed, "finetune", static_cast<std::uint64_t>(step));
        auto pref_batch = sample_batch(
            prefs, static_cast<std::size_t>(config.preference_batch_size), pref_rng);
        r_mean.add(reward_training_step(reward, pref_batch));
      }
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + " iteration " +
                         std::to_string(iter_in_epoch) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("epoch " + std::to_string(epoch) + " iteration " +
                        std::to_string(iter_in_epoch) + ": " + e.what());
    }

    if (step % eval_interval == 0 || step == total) emit_row(epoch, step, true);
    if (iter_in_epoch == iters && hooks.on_epoch_end) hooks.on_epoch_end(epoch, step);
  }
  result.total_steps = total;
  return result;
}

}  // namespace prefrec
