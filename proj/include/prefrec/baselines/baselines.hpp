#pragma once

#include <span>
#include <string>
#include <vector>

#include "prefrec/buffers/buffers.hpp"
#include "prefrec/config.hpp"
#include "prefrec/policy/agent.hpp"
#include "prefrec/policy/train.hpp"
#include "prefrec/reward/reward_model.hpp"

namespace prefrec {

/// Networks and optimizer state for one comparison agent. Which members
/// are populated depends on the algorithm: il has only the policy, ddpg
/// one critic, td3/td3_bc one or two critics, iql one critic plus V.
struct BaselineState {
  std::string algo;
  nn::NetworkParams policy;
  nn::AdamState policy_adam;
  std::vector<nn::NetworkParams> critics;
  std::vector<nn::NetworkParams> critic_targets;
  std::vector<nn::AdamState> critic_adams;
  nn::NetworkParams v;
  nn::AdamState v_adam;
  bool has_v = false;
};

/// Initialization reuses the shared per-role seed streams, so any two
/// algorithms with the same seed start from identical weights for the
/// roles they share.
BaselineState make_baseline(const RunConfig& config);

/// Advantage-weighted behavior cloning: mean_i w_i |pi(s_i) - a_i|^2.
/// Unit weights give plain behavior cloning.
LossGrads awbc_loss_and_grads(const nn::NetworkParams& policy,
                              std::span<const Transition* const> batch,
                              std::span<const double> weights);

/// Combined objective -lambda * Q(s, pi(s)) + |pi(s) - a|^2 with
/// lambda = alpha / mean |Q(s, pi(s))| over the batch; alpha = 0 yields
/// exactly the behavior-cloning gradient.
LossGrads td3bc_policy_loss_and_grads(const nn::NetworkParams& policy,
                                      const nn::NetworkParams& q_net,
                                      std::span<const Transition* const> batch, double alpha);

/// IQL policy extraction weights: min(exp(beta * (Q(s,a) - V(s))), clip).
std::vector<double> iql_policy_weights(const nn::NetworkParams& q_net,
                                       const nn::NetworkParams& v_net,
                                       std::span<const Transition* const> batch, double beta,
                                       double clip);

/// Trains the configured baseline on the replay buffer. reward may be null
/// only for il; all other algorithms label their batches with it. Shares
/// the metrics cadence and hook surface with the main training loop.
TrainResult train_baseline(BaselineState& state, const RewardModel* reward,
                           const ReplayBuffer& replay, const RunConfig& config,
                           const TrainHooks& hooks = {}, std::int64_t start_step = 0);

}  // namespace prefrec
