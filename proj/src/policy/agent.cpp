#include "prefrec/policy/agent.hpp"

#include <cmath>
#include <string>

#include "prefrec/errors.hpp"

namespace prefrec {

namespace {

void concat_state_action(std::span<const float> s, std::span<const float> a,
                         std::vector<double>& out) {
  out.resize(s.size() + a.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(s[i]);
  for (std::size_t i = 0; i < a.size(); ++i) out[s.size() + i] = static_cast<double>(a[i]);
}

void concat_state_action(std::span<const float> s, std::span<const double> a,
                         std::vector<double>& out) {
  out.resize(s.size() + a.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(s[i]);
  for (std::size_t i = 0; i < a.size(); ++i) out[s.size() + i] = a[i];
}

}  // namespace

PrefRecAgent make_agent(const RunConfig& config) {
  PrefRecAgent agent;
  {
    Rng rng = Rng::stream(config.seed, "init.policy");
    agent.policy = nn::make_mlp(config.state_dim, config.hidden_dim, config.hidden_layers,
                                config.action_dim, nn::Activation::kTanh, rng);
  }
  {
    Rng rng = Rng::stream(config.seed, "init.q1");
    agent.q = nn::make_mlp(config.state_dim + config.action_dim, config.hidden_dim,
                           config.hidden_layers, 1, nn::Activation::kIdentity, rng);
  }
  {
    Rng rng = Rng::stream(config.seed, "init.v");
    agent.v = nn::make_mlp(config.state_dim, config.hidden_dim, config.hidden_layers, 1,
                           nn::Activation::kIdentity, rng);
  }
  agent.q_target = agent.q;
  agent.q_adam.init_like(agent.q);
  agent.v_adam.init_like(agent.v);
  agent.policy_adam.init_like(agent.policy);
  agent.gamma = config.gamma;
  agent.tau = config.tau;
  agent.target_retention = config.target_retention;
  agent.actor_lr = config.actor_lr;
  agent.critic_lr = config.critic_lr;
  agent.literal_soft_update = config.literal_soft_update;
  return agent;
}

double expectile_weight(double u, double tau) {
  return std::fabs(tau - (u < 0.0 ? 1.0 : 0.0));
}

double expectile_loss(double u, double tau) { return expectile_weight(u, tau) * u * u; }

LabeledBatch label_batch(const RewardModel& model, std::vector<const Transition*> items) {
  LabeledBatch batch;
  batch.rewards.reserve(items.size());
  for (const Transition* t : items) {
    const double r = predict_reward(model, t->state, t->action);
    if (!std::isfinite(r)) throw NumericError("label_batch: non-finite predicted reward");
    batch.rewards.push_back(r);
  }
  batch.items = std::move(items);
  return batch;
}

LossGrads v_loss_and_grads(const nn::NetworkParams& v_net, const nn::NetworkParams& q_target,
                           std::span<const Transition* const> batch, double tau) {
  if (batch.empty()) throw ConfigError("v step: empty batch");
  LossGrads out;
  out.grads.init_like(v_net);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<double> input;
  nn::ForwardTrace trace;
  std::vector<double> upstream(1);
  for (const Transition* t : batch) {
    concat_state_action(t->state, t->action, input);
    const double q_hat = nn::forward(q_target, input)[0];
    nn::forward(v_net, std::span<const float>(t->state), trace);
    const double u = q_hat - trace.output[0];
    const double w = expectile_weight(u, tau);
    out.loss += w * u * u * inv_n;
    upstream[0] = -2.0 * w * u * inv_n;
    nn::backward(v_net, trace, upstream, out.grads);
  }
  if (!std::isfinite(out.loss)) throw NumericError("v step: non-finite loss");
  return out;
}

double v_update(PrefRecAgent& agent, std::span<const Transition* const> batch) {
  LossGrads l = v_loss_and_grads(agent.v, agent.q_target, batch, agent.tau);
  nn::adam_step(agent.v, l.grads, agent.v_adam, agent.critic_lr);
  if (!agent.v.finite()) throw NumericError("v step: non-finite parameters");
  return l.loss;
}

std::vector<double> v_bootstrap_targets(const nn::NetworkParams& v_net, const LabeledBatch& batch,
                                        double gamma) {
  std::vector<double> targets(batch.items.size());
  for (std::size_t i = 0; i < batch.items.size(); ++i) {
    const double v_next =
        nn::forward(v_net, std::span<const float>(batch.items[i]->next_state))[0];
    targets[i] = batch.rewards[i] + gamma * v_next;
  }
  return targets;
}

std::vector<double> td_bootstrap_targets(const nn::NetworkParams& q_target,
                                         const nn::NetworkParams& policy,
                                         const LabeledBatch& batch, double gamma) {
  std::vector<double> targets(batch.items.size());
  std::vector<double> input;
  for (std::size_t i = 0; i < batch.items.size(); ++i) {
    const Transition* t = batch.items[i];
    const std::vector<double> a_next =
        nn::forward(policy, std::span<const float>(t->next_state));
    concat_state_action(t->next_state, a_next, input);
    targets[i] = batch.rewards[i] + gamma * nn::forward(q_target, input)[0];
  }
  return targets;
}

LossGrads q_loss_and_grads(const nn::NetworkParams& q_net, const LabeledBatch& batch,
                           std::span<const double> targets) {
  if (batch.items.empty()) throw ConfigError("q step: empty batch");
  if (targets.size() != batch.items.size()) throw ConfigError("q step: target count mismatch");
  LossGrads out;
  out.grads.init_like(q_net);
  const double inv_n = 1.0 / static_cast<double>(batch.items.size());
  std::vector<double> input;
  nn::ForwardTrace trace;
  std::vector<double> upstream(1);
  for (std::size_t i = 0; i < batch.items.size(); ++i) {
    const Transition* t = batch.items[i];
    if (!std::isfinite(targets[i])) throw NumericError("q step: non-finite target");
    concat_state_action(t->state, t->action, input);
    nn::forward(q_net, input, trace);
    const double diff = trace.output[0] - targets[i];
    out.loss += diff * diff * inv_n;
    upstream[0] = 2.0 * diff * inv_n;
    nn::backward(q_net, trace, upstream, out.grads);
  }
  if (!std::isfinite(out.loss)) throw NumericError("q step: non-finite loss");
  return out;
}

double q_update(PrefRecAgent& agent, const LabeledBatch& batch, QMode mode) {
  const std::vector<double> targets =
      mode == QMode::kPrefRec ? v_bootstrap_targets(agent.v, batch, agent.gamma)
                              : td_bootstrap_targets(agent.q_target, agent.policy, batch,
                                                     agent.gamma);
  LossGrads l = q_loss_and_grads(agent.q, batch, targets);
  nn::adam_step(agent.q, l.grads, agent.q_adam, agent.critic_lr);
  if (!agent.q.finite()) throw NumericError("q step: non-finite parameters");
  return l.loss;
}

LossGrads policy_loss_and_grads(const nn::NetworkParams& policy, const nn::NetworkParams& q_net,
                                std::span<const Transition* const> batch) {
  if (batch.empty()) throw ConfigError("policy step: empty batch");
  LossGrads out;
  out.grads.init_like(policy);
  nn::GradientBundle q_scratch;
  q_scratch.init_like(q_net);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<double> input;
  nn::ForwardTrace policy_trace, q_trace;
  std::vector<double> q_upstream = {0.0};
  std::vector<double> input_grad;
  std::vector<double> action_upstream;
  const std::size_t d_s = batch.front()->state.size();
  for (const Transition* t : batch) {
    nn::forward(policy, std::span<const float>(t->state), policy_trace);
    concat_state_action(t->state, policy_trace.output, input);
    nn::forward(q_net, input, q_trace);
    out.loss -= q_trace.output[0] * inv_n;
    q_upstream[0] = -inv_n;
    q_scratch.set_zero();
    nn::backward(q_net, q_trace, q_upstream, q_scratch, &input_grad);
    action_upstream.assign(input_grad.begin() + static_cast<std::ptrdiff_t>(d_s),
                           input_grad.end());
    nn::backward(policy, policy_trace, action_upstream, out.grads);
  }
  if (!std::isfinite(out.loss)) throw NumericError("policy step: non-finite loss");
  return out;
}

double policy_update(PrefRecAgent& agent, std::span<const Transition* const> batch) {
  LossGrads l = policy_loss_and_grads(agent.policy, agent.q, batch);
  nn::adam_step(agent.policy, l.grads, agent.policy_adam, agent.actor_lr);
  if (!agent.policy.finite()) throw NumericError("policy step: non-finite parameters");
  return l.loss;
}

void soft_update_target(PrefRecAgent& agent) {
  const double retention =
      agent.literal_soft_update ? 1.0 - agent.target_retention : agent.target_retention;
  nn::blend_into(agent.q, retention, agent.q_target);
}

}  // namespace prefrec
