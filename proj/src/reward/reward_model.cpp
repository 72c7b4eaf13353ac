#include "prefrec/reward/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "prefrec/errors.hpp"
#include "prefrec/nn/adam.hpp"

namespace prefrec {

namespace {

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void concat_input(std::span<const float> s, std::span<const float> a, std::vector<double>& out) {
  out.resize(s.size() + a.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(s[i]);
  for (std::size_t i = 0; i < a.size(); ++i) out[s.size() + i] = static_cast<double>(a[i]);
}

}  // namespace

RewardModel make_reward_model(int state_dim, int action_dim, int hidden_dim, int hidden_layers,
                              double lr, Rng& init_rng) {
  RewardModel model;
  model.psi = nn::make_mlp(state_dim + action_dim, hidden_dim, hidden_layers, 1,
                           nn::Activation::kIdentity, init_rng);
  model.adam.init_like(model.psi);
  model.lr = lr;
  return model;
}

double predict_reward(const RewardModel& model, std::span<const float> s,
                      std::span<const float> a) {
  std::vector<double> input;
  concat_input(s, a, input);
  return nn::forward(model.psi, input)[0];
}

double segment_return(const RewardModel& model, const TrajectorySegment& segment) {
  if (segment.steps.empty()) throw ConfigError("segment_return: empty segment");
  double total = 0.0;
  std::vector<double> input;
  for (const auto& step : segment.steps) {
    concat_input(step.state, step.action, input);
    total += nn::forward(model.psi, input)[0];
  }
  return total;
}

double preference_probability(const RewardModel& model, const TrajectorySegment& seg0,
                              const TrajectorySegment& seg1) {
  const double r0 = segment_return(model, seg0);
  const double r1 = segment_return(model, seg1);
  const double m = std::max(r0, r1);
  const double e0 = std::exp(r0 - m);
  const double e1 = std::exp(r1 - m);
  return e1 / (e0 + e1);
}

RewardLoss reward_loss_and_grads(const RewardModel& model,
                                 std::span<const PreferenceRecord* const> batch) {
  if (batch.empty()) throw ConfigError("reward loss: empty batch");
  RewardLoss result;
  result.grads.init_like(model.psi);

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  std::vector<nn::ForwardTrace> traces0;
  std::vector<nn::ForwardTrace> traces1;
  std::vector<double> input;
  const std::vector<double> unit_upstream{1.0};

  for (const PreferenceRecord* rec : batch) {
    traces0.resize(rec->seg0.steps.size());
    traces1.resize(rec->seg1.steps.size());
    double r0 = 0.0, r1 = 0.0;
    for (std::size_t t = 0; t < rec->seg0.steps.size(); ++t) {
      concat_input(rec->seg0.steps[t].state, rec->seg0.steps[t].action, input);
      nn::forward(model.psi, input, traces0[t]);
      r0 += traces0[t].output[0];
    }
    for (std::size_t t = 0; t < rec->seg1.steps.size(); ++t) {
      concat_input(rec->seg1.steps[t].state, rec->seg1.steps[t].action, input);
      nn::forward(model.psi, input, traces1[t]);
      r1 += traces1[t].output[0];
    }
    const double z = r1 - r0;
    const double pair_loss = rec->y0 * softplus(z) + rec->y1 * softplus(-z);
    if (!std::isfinite(pair_loss)) {
      throw NumericError("reward loss: non-finite pair loss (returns " + std::to_string(r0) +
                         ", " + std::to_string(r1) + ")");
    }
    result.loss += pair_loss * inv_n;

    // dLoss/dz for one pair is sigmoid(z) - y1; z gets +1 from every step
    // of seg1 and -1 from every step of seg0.
    const double dz = (sigmoid(z) - rec->y1) * inv_n;
    if (dz != 0.0) {
      const std::vector<double> up1{dz};
      const std::vector<double> up0{-dz};
      for (auto& trace : traces1) nn::backward(model.psi, trace, up1, result.grads);
      for (auto& trace : traces0) nn::backward(model.psi, trace, up0, result.grads);
    }
  }
  if (!result.grads.finite()) throw NumericError("reward loss: non-finite gradient");
  return result;
}

double reward_training_step(RewardModel& model, std::span<const PreferenceRecord* const> batch) {
  RewardLoss l = reward_loss_and_grads(model, batch);
  nn::adam_step(model.psi, l.grads, model.adam, model.lr);
  if (!model.psi.finite()) throw NumericError("reward training: non-finite parameters");
  return l.loss;
}

PretrainTrace pretrain(RewardModel& model, const PreferenceBuffer& prefs, int epochs,
                       int batch_size, Rng& rng, const PreferenceBuffer* eval_set) {
  if (epochs < 0) throw ConfigError("pretrain: negative epoch count");
  if (batch_size <= 0) throw ConfigError("pretrain: batch size must be positive");
  PretrainTrace trace;
  if (epochs == 0) return trace;
  if (prefs.empty()) throw ConfigError("pretrain: preference buffer is empty");

  const std::size_t iters =
      (prefs.size() + static_cast<std::size_t>(batch_size) - 1) / static_cast<std::size_t>(batch_size);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    double epoch_sum = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
      auto batch = sample_batch(prefs, static_cast<std::size_t>(batch_size), rng);
      const double loss = reward_training_step(model, batch);
      trace.rows.push_back({epoch, static_cast<int>(it), loss});
      epoch_sum += loss;
    }
    trace.epoch_mean_loss.push_back(epoch_sum / static_cast<double>(iters));
    if (eval_set != nullptr) {
      trace.epoch_eval_accuracy.push_back(prediction_accuracy(model, *eval_set));
    }
  }
  return trace;
}

double prediction_accuracy(const RewardModel& model,
                           std::span<const PreferenceRecord* const> pairs) {
  std::size_t strict = 0, correct = 0;
  for (const PreferenceRecord* rec : pairs) {
    if (rec->y0 == rec->y1) continue;
    ++strict;
    const double r0 = segment_return(model, rec->seg0);
    const double r1 = segment_return(model, rec->seg1);
    // Equal returns never count as correct for a strict label.
    if (rec->y1 > rec->y0 ? r1 > r0 : r0 > r1) ++correct;
  }
  if (strict == 0) throw ConfigError("prediction_accuracy: no strict pairs in the set");
  return static_cast<double>(correct) / static_cast<double>(strict);
}

double prediction_accuracy(const RewardModel& model, const PreferenceBuffer& prefs) {
  std::vector<const PreferenceRecord*> pairs;
  pairs.reserve(prefs.size());
  for (std::size_t i = 0; i < prefs.size(); ++i) pairs.push_back(&prefs.at(i));
  return prediction_accuracy(model, pairs);
}

}  // namespace prefrec
