#include "prefrec/baselines/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "prefrec/errors.hpp"

namespace prefrec {

namespace {

void concat_state_action(std::span<const float> s, std::span<const double> a,
                         std::vector<double>& out) {
  out.resize(s.size() + a.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(s[i]);
  for (std::size_t i = 0; i < a.size(); ++i) out[s.size() + i] = a[i];
}

void concat_state_action(std::span<const float> s, std::span<const float> a,
                         std::vector<double>& out) {
  out.resize(s.size() + a.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(s[i]);
  for (std::size_t i = 0; i < a.size(); ++i) out[s.size() + i] = static_cast<double>(a[i]);
}

struct Effective {
  int n_critics = 0;
  double noise_std = 0.0;
  double noise_clip = 0.0;
  int policy_delay = 1;
  bool needs_reward = true;
};

Effective resolve(const RunConfig& config) {
  Effective e;
  if (config.algo == "il") {
    e.needs_reward = false;
  } else if (config.algo == "iql") {
    e.n_critics = 1;
  } else if (config.algo == "ddpg") {
    e.n_critics = 1;
  } else if (config.algo == "td3" || config.algo == "td3_bc") {
    e.n_critics = config.td3_num_critics;
    e.noise_std = config.td3_noise_std;
    e.noise_clip = config.td3_noise_clip;
    e.policy_delay = config.td3_policy_delay;
  } else {
    throw ConfigError("train_baseline: '" + config.algo + "' is not a baseline algorithm");
  }
  return e;
}

}  // namespace

BaselineState make_baseline(const RunConfig& config) {
  const Effective e = resolve(config);
  BaselineState st;
  st.algo = config.algo;
  {
    Rng rng = Rng::stream(config.seed, "init.policy");
    st.policy = nn::make_mlp(config.state_dim, config.hidden_dim, config.hidden_layers,
                             config.action_dim, nn::Activation::kTanh, rng);
  }
  st.policy_adam.init_like(st.policy);
  const char* critic_tags[2] = {"init.q1", "init.q2"};
  for (int i = 0; i < e.n_critics; ++i) {
    Rng rng = Rng::stream(config.seed, critic_tags[i]);
    st.critics.push_back(nn::make_mlp(config.state_dim + config.action_dim, config.hidden_dim,
                                      config.hidden_layers, 1, nn::Activation::kIdentity, rng));
    st.critic_targets.push_back(st.critics.back());
    st.critic_adams.emplace_back();
    st.critic_adams.back().init_like(st.critics.back());
  }
  if (config.algo == "iql") {
    Rng rng = Rng::stream(config.seed, "init.v");
    st.v = nn::make_mlp(config.state_dim, config.hidden_dim, config.hidden_layers, 1,
                        nn::Activation::kIdentity, rng);
    st.v_adam.init_like(st.v);
    st.has_v = true;
  }
  return st;
}

LossGrads awbc_loss_and_grads(const nn::NetworkParams& policy,
                              std::span<const Transition* const> batch,
                              std::span<const double> weights) {
  if (batch.empty()) throw ConfigError("behavior cloning: empty batch");
  if (weights.size() != batch.size()) throw ConfigError("behavior cloning: weight count mismatch");
  LossGrads out;
  out.grads.init_like(policy);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  nn::ForwardTrace trace;
  std::vector<double> upstream;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition* t = batch[i];
    nn::forward(policy, std::span<const float>(t->state), trace);
    const double w = weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw NumericError("behavior cloning: invalid weight " + std::to_string(w));
    }
    upstream.resize(trace.output.size());
    double dist2 = 0.0;
    for (std::size_t j = 0; j < trace.output.size(); ++j) {
      const double diff = trace.output[j] - static_cast<double>(t->action[j]);
      dist2 += diff * diff;
      upstream[j] = 2.0 * w * diff * inv_n;
    }
    out.loss += w * dist2 * inv_n;
    nn::backward(policy, trace, upstream, out.grads);
  }
  if (!std::isfinite(out.loss)) throw NumericError("behavior cloning: non-finite loss");
  return out;
}

LossGrads td3bc_policy_loss_and_grads(const nn::NetworkParams& policy,
                                      const nn::NetworkParams& q_net,
                                      std::span<const Transition* const> batch, double alpha) {
  if (batch.empty()) throw ConfigError("td3_bc policy step: empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<double> input;

  double lambda = 0.0;
  if (alpha != 0.0) {
    double abs_sum = 0.0;
    for (const Transition* t : batch) {
      const std::vector<double> a = nn::forward(policy, std::span<const float>(t->state));
      concat_state_action(t->state, a, input);
      abs_sum += std::fabs(nn::forward(q_net, input)[0]);
    }
    lambda = alpha / (abs_sum * inv_n);
    if (!std::isfinite(lambda)) {
      throw NumericError("td3_bc policy step: normalizer |Q| mean is zero or non-finite");
    }
  }

  LossGrads out;
  out.grads.init_like(policy);
  nn::GradientBundle q_scratch;
  q_scratch.init_like(q_net);
  nn::ForwardTrace policy_trace, q_trace;
  std::vector<double> q_upstream = {0.0};
  std::vector<double> input_grad;
  std::vector<double> combined;
  const std::size_t d_s = batch.front()->state.size();
  for (const Transition* t : batch) {
    nn::forward(policy, std::span<const float>(t->state), policy_trace);
    concat_state_action(t->state, policy_trace.output, input);
    nn::forward(q_net, input, q_trace);
    q_upstream[0] = -lambda * inv_n;
    q_scratch.set_zero();
    nn::backward(q_net, q_trace, q_upstream, q_scratch, &input_grad);
    combined.resize(policy_trace.output.size());
    double dist2 = 0.0;
    for (std::size_t j = 0; j < policy_trace.output.size(); ++j) {
      const double diff = policy_trace.output[j] - static_cast<double>(t->action[j]);
      dist2 += diff * diff;
      combined[j] = input_grad[d_s + j] + 2.0 * diff * inv_n;
    }
    out.loss += (-lambda * q_trace.output[0] + dist2) * inv_n;
    nn::backward(policy, policy_trace, combined, out.grads);
  }
  if (!std::isfinite(out.loss)) throw NumericError("td3_bc policy step: non-finite loss");
  return out;
}

std::vector<double> iql_policy_weights(const nn::NetworkParams& q_net,
                                       const nn::NetworkParams& v_net,
                                       std::span<const Transition* const> batch, double beta,
                                       double clip) {
  std::vector<double> weights;
  weights.reserve(batch.size());
  std::vector<double> input;
  for (const Transition* t : batch) {
    concat_state_action(t->state, std::span<const float>(t->action), input);
    const double q = nn::forward(q_net, input)[0];
    const double v = nn::forward(v_net, std::span<const float>(t->state))[0];
    weights.push_back(std::min(std::exp(beta * (q - v)), clip));
  }
  return weights;
}

TrainResult train_baseline(BaselineState& state, const RewardModel* reward,
                           const ReplayBuffer& replay, const RunConfig& config,
                           const TrainHooks& hooks, std::int64_t start_step) {
  if (replay.empty()) throw ConfigError("train_baseline: replay buffer is empty");
  if (state.algo != config.algo) {
    throw ConfigError("train_baseline: state was built for '" + state.algo + "'");
  }
  const Effective eff = resolve(config);
  if (eff.needs_reward && reward == nullptr) {
    throw ConfigError("train_baseline: '" + config.algo + "' requires a reward model");
  }
  const std::int64_t iters = resolve_iters_per_epoch(config, replay.size());
  const std::int64_t eval_interval = config.eval_interval > 0 ? config.eval_interval : iters;
  const std::int64_t total = static_cast<std::int64_t>(config.train_epochs) * iters;
  if (start_step < 0 || start_step > total || (iters > 0 && start_step % iters != 0)) {
    throw ConfigError("train_baseline: start_step must be a past epoch boundary");
  }

  TrainResult result;
  double v_sum = 0.0, q_sum = 0.0, p_sum = 0.0;
  std::int64_t v_n = 0, q_n = 0, p_n = 0;

  auto emit_row = [&](int epoch, std::int64_t step, bool with_losses) {
    MetricsRow row;
    row.epoch = epoch;
    row.step = step;
    if (with_losses) {
      row.v_loss = v_n > 0 ? v_sum / static_cast<double>(v_n)
                           : std::numeric_limits<double>::quiet_NaN();
      row.q_loss = q_n > 0 ? q_sum / static_cast<double>(q_n)
                           : std::numeric_limits<double>::quiet_NaN();
      row.policy_loss = p_n > 0 ? p_sum / static_cast<double>(p_n)
                                : std::numeric_limits<double>::quiet_NaN();
      v_sum = q_sum = p_sum = 0.0;
      v_n = q_n = p_n = 0;
    }
    if (hooks.evaluate) row.eval_score = hooks.evaluate(state.policy, step);
    if (hooks.on_row) hooks.on_row(row);
    result.rows.push_back(row);
  };

  if (start_step == 0) emit_row(0, 0, false);

  std::vector<double> input;
  std::vector<double> unit_weights;
  for (std::int64_t step = start_step + 1; step <= total; ++step) {
    const int epoch = static_cast<int>((step - 1) / iters) + 1;
    const std::int64_t iter_in_epoch = (step - 1) % iters + 1;
    try {
      Rng batch_rng = Rng::stream(config.seed, "replay", static_cast<std::uint64_t>(step));
      auto items = sample_batch(replay, static_cast<std::size_t>(config.batch_size), batch_rng);

      if (config.algo == "il") {
        unit_weights.assign(items.size(), 1.0);
        LossGrads l = awbc_loss_and_grads(state.policy, items, unit_weights);
        nn::adam_step(state.policy, l.grads, state.policy_adam, config.actor_lr);
        p_sum += l.loss;
        ++p_n;
      } else if (config.algo == "iql") {
        LabeledBatch labeled = label_batch(*reward, std::move(items));
        LossGrads vl = v_loss_and_grads(state.v, state.critic_targets[0], labeled.items,
                                        config.tau);
        nn::adam_step(state.v, vl.grads, state.v_adam, config.critic_lr);
        v_sum += vl.loss;
        ++v_n;

        const std::vector<double> targets =
            v_bootstrap_targets(state.v, labeled, config.gamma);
        LossGrads ql = q_loss_and_grads(state.critics[0], labeled, targets);
        nn::adam_step(state.critics[0], ql.grads, state.critic_adams[0], config.critic_lr);
        q_sum += ql.loss;
        ++q_n;

        const std::vector<double> weights =
            iql_policy_weights(state.critics[0], state.v, labeled.items, config.iql_beta,
                               config.iql_weight_clip);
        LossGrads pl = awbc_loss_and_grads(state.policy, labeled.items, weights);
        nn::adam_step(state.policy, pl.grads, state.policy_adam, config.actor_lr);
        p_sum += pl.loss;
        ++p_n;

        nn::blend_into(state.critics[0], config.target_retention, state.critic_targets[0]);
      } else {
        LabeledBatch labeled = label_batch(*reward, std::move(items));

        std::vector<double> targets(labeled.items.size());
        const bool with_noise = eff.noise_std > 0.0;
        Rng noise_rng = Rng::stream(config.seed, "td3.noise", static_cast<std::uint64_t>(step));
        std::vector<double> next_action;
        for (std::size_t i = 0; i < labeled.items.size(); ++i) {
          const Transition* t = labeled.items[i];
          next_action = nn::forward(state.policy, std::span<const float>(t->next_state));
          if (with_noise) {
            for (double& a : next_action) {
              const double n = std::clamp(noise_rng.normal() * eff.noise_std, -eff.noise_clip,
                                          eff.noise_clip);
              a = std::clamp(a + n, -1.0, 1.0);
            }
          }
          concat_state_action(t->next_state, next_action, input);
          double q_next = nn::forward(state.critic_targets[0], input)[0];
          for (std::size_t c = 1; c < state.critic_targets.size(); ++c) {
            q_next = std::min(q_next, nn::forward(state.critic_targets[c], input)[0]);
          }
          targets[i] = labeled.rewards[i] + config.gamma * q_next;
        }

        double critic_loss_sum = 0.0;
        for (std::size_t c = 0; c < state.critics.size(); ++c) {
          LossGrads ql = q_loss_and_grads(state.critics[c], labeled, targets);
          nn::adam_step(state.critics[c], ql.grads, state.critic_adams[c], config.critic_lr);
          critic_loss_sum += ql.loss;
        }
        q_sum += critic_loss_sum / static_cast<double>(state.critics.size());
        ++q_n;

        if (step % eff.policy_delay == 0) {
          LossGrads pl =
              config.algo == "td3_bc"
                  ? td3bc_policy_loss_and_grads(state.policy, state.critics[0], labeled.items,
                                                config.td3bc_alpha)
                  : policy_loss_and_grads(state.policy, state.critics[0], labeled.items);
          nn::adam_step(state.policy, pl.grads, state.policy_adam, config.actor_lr);
          p_sum += pl.loss;
          ++p_n;
          for (std::size_t c = 0; c < state.critics.size(); ++c) {
            nn::blend_into(state.critics[c], config.target_retention, state.critic_targets[c]);
          }
        }
      }

      if (!state.policy.finite()) throw NumericError("baseline: non-finite policy parameters");
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
