#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "prefrec/buffers/buffers.hpp"
#include "prefrec/config.hpp"
#include "prefrec/nn/adam.hpp"
#include "prefrec/nn/network.hpp"
#include "prefrec/reward/reward_model.hpp"

namespace prefrec {

/// Actor-critic with a separate state-value head: Q(s,a), its slow target
/// copy, V(s) fit by expectile regression against the target Q, and a
/// deterministic tanh-squashed policy.
struct PrefRecAgent {
  nn::NetworkParams q;
  nn::NetworkParams q_target;
  nn::NetworkParams v;
  nn::NetworkParams policy;
  nn::AdamState q_adam;
  nn::AdamState v_adam;
  nn::AdamState policy_adam;

  double gamma = 0.9;
  double tau = 0.7;
  double target_retention = 0.999;
  double actor_lr = 5e-6;
  double critic_lr = 5e-5;
  bool literal_soft_update = false;
};

/// Networks draw their initial weights from per-role seed streams
/// ("init.policy", "init.q1", "init.v"), so agents that share a role share
/// its exact initialization.
PrefRecAgent make_agent(const RunConfig& config);

/// Asymmetric squared loss: |tau - [u < 0]| * u^2. tau = 0.5 halves the
/// squared error, matching the symmetric case exactly.
double expectile_loss(double u, double tau);
double expectile_weight(double u, double tau);

/// Replay batch with model-predicted rewards attached. Rewards are derived
/// immediately before use and never persisted.
struct LabeledBatch {
  std::vector<const Transition*> items;
  std::vector<double> rewards;
};

LabeledBatch label_batch(const RewardModel& model, std::vector<const Transition*> items);

struct LossGrads {
  double loss = 0.0;
  nn::GradientBundle grads;
};

/// Expectile regression of V(s) onto Q(s,a) under the target critic.
LossGrads v_loss_and_grads(const nn::NetworkParams& v_net, const nn::NetworkParams& q_target,
                           std::span<const Transition* const> batch, double tau);
double v_update(PrefRecAgent& agent, std::span<const Transition* const> batch);

/// Bootstrapped critic targets: reward + gamma * V(s') for the main path,
/// reward + gamma * Q(s', policy(s'); target) for the plain TD ablation.
std::vector<double> v_bootstrap_targets(const nn::NetworkParams& v_net, const LabeledBatch& batch,
                                        double gamma);
std::vector<double> td_bootstrap_targets(const nn::NetworkParams& q_target,
                                         const nn::NetworkParams& policy,
                                         const LabeledBatch& batch, double gamma);

/// Mean squared error of Q(s,a) against fixed targets.
LossGrads q_loss_and_grads(const nn::NetworkParams& q_net, const LabeledBatch& batch,
                           std::span<const double> targets);

enum class QMode { kPrefRec, kNaiveTd };
double q_update(PrefRecAgent& agent, const LabeledBatch& batch, QMode mode);

/// Deterministic policy gradient: minimize -mean Q(s, policy(s)) with the
/// critic frozen; the gradient flows through Q's action input only.
LossGrads policy_loss_and_grads(const nn::NetworkParams& policy, const nn::NetworkParams& q_net,
                                std::span<const Transition* const> batch);
double policy_update(PrefRecAgent& agent, std::span<const Transition* const> batch);

/// Polyak update of the target critic. With retention rho the target keeps
/// rho of itself; the literal flag instead keeps (1 - rho), reproducing the
/// written-out update rule some descriptions use.
void soft_update_target(PrefRecAgent& agent);

}  // namespace prefrec
