#pragma once

#include <span>
#include <vector>

#include "prefrec/buffers/buffers.hpp"
#include "prefrec/buffers/types.hpp"
#include "prefrec/nn/adam.hpp"
#include "prefrec/nn/network.hpp"
#include "prefrec/rng.hpp"

namespace prefrec {

/// Scalar reward head over the concatenated [state; action] vector, trained
/// from pairwise segment preferences.
struct RewardModel {
  nn::NetworkParams psi;
  nn::AdamState adam;
  double lr = 5e-5;
};

RewardModel make_reward_model(int state_dim, int action_dim, int hidden_dim, int hidden_layers,
                              double lr, Rng& init_rng);

double predict_reward(const RewardModel& model, std::span<const float> s,
                      std::span<const float> a);

/// Sum of predicted per-step rewards over the segment.
double segment_return(const RewardModel& model, const TrajectorySegment& segment);

/// P[seg1 preferred over seg0] = exp(R1) / (exp(R0) + exp(R1)), evaluated
/// with the max subtracted before exponentiation so long segments cannot
/// overflow.
double preference_probability(const RewardModel& model, const TrajectorySegment& seg0,
                              const TrajectorySegment& seg1);

struct RewardLoss {
  double loss = 0.0;
  nn::GradientBundle grads;
};

/// Mean cross-entropy of the batch labels against the pairwise preference
/// probabilities, with exact gradients for psi.
RewardLoss reward_loss_and_grads(const RewardModel& model,
                                 std::span<const PreferenceRecord* const> batch);

/// One Adam step on a preference minibatch; returns the pre-step loss.
double reward_training_step(RewardModel& model, std::span<const PreferenceRecord* const> batch);

struct PretrainTrace {
  struct Row {
    int epoch = 0;
    int iteration = 0;
    double loss = 0.0;
  };
  std::vector<Row> rows;
  std::vector<double> epoch_mean_loss;
  std::vector<double> epoch_eval_accuracy;  // filled only when an eval set is given
};

/// Epochs of minibatch training over the whole buffer (ceil(N/B) iterations
/// per epoch). epochs = 0 leaves the model untouched.
PretrainTrace pretrain(RewardModel& model, const PreferenceBuffer& prefs, int epochs,
                       int batch_size, Rng& rng, const PreferenceBuffer* eval_set = nullptr);

/// Fraction of strict-label pairs whose return ordering matches the label.
/// Equal returns count as incorrect; (0.5,0.5) pairs are excluded from the
/// denominator. Throws when the set has no strict pairs.
double prediction_accuracy(const RewardModel& model, const PreferenceBuffer& prefs);
double prediction_accuracy(const RewardModel& model,
                           std::span<const PreferenceRecord* const> pairs);

}  // namespace prefrec
