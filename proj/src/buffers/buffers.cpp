#include "prefrec/buffers/buffers.hpp"

#include <cmath>
#include <string>

#include "prefrec/errors.hpp"

namespace prefrec {

namespace {

bool all_finite(const std::vector<float>& v) {
  for (float x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool valid_label(double y0, double y1) {
  const bool strict01 = y0 == 0.0 && y1 == 1.0;
  const bool strict10 = y0 == 1.0 && y1 == 0.0;
  const bool tie = y0 == 0.5 && y1 == 0.5;
  return strict01 || strict10 || tie;
}

}  // namespace

ReplayBuffer::ReplayBuffer(int state_dim, int action_dim, std::size_t capacity)
    : state_dim_(state_dim), action_dim_(action_dim), capacity_(capacity) {
  if (state_dim <= 0 || action_dim <= 0) {
    throw ConfigError("replay buffer: dimensions must be positive");
  }
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() >= capacity_) {
    throw ConfigError("replay buffer: capacity " + std::to_string(capacity_) + " exceeded");
  }
  if (t.state.size() != static_cast<std::size_t>(state_dim_) ||
      t.next_state.size() != static_cast<std::size_t>(state_dim_) ||
      t.action.size() != static_cast<std::size_t>(action_dim_)) {
    throw ConfigError("replay buffer: transition dimensions do not match buffer (d_s=" +
                      std::to_string(state_dim_) + ", d_a=" + std::to_string(action_dim_) + ")");
  }
  if (!all_finite(t.state) || !all_finite(t.action) || !all_finite(t.next_state)) {
    throw NumericError("replay buffer: non-finite value in transition");
  }
  items_.push_back(std::move(t));
}

PreferenceBuffer::PreferenceBuffer(int state_dim, int action_dim, int segment_length,
                                   std::size_t capacity)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      segment_length_(segment_length),
      capacity_(capacity) {
  if (state_dim <= 0 || action_dim <= 0 || segment_length <= 0) {
    throw ConfigError("preference buffer: dimensions and segment length must be positive");
  }
}

void PreferenceBuffer::push(PreferenceRecord r) {
  if (items_.size() >= capacity_) {
    throw ConfigError("preference buffer: capacity " + std::to_string(capacity_) + " exceeded");
  }
  if (!valid_label(r.y0, r.y1)) {
    throw ConfigError("preference buffer: label must be (1,0), (0,1) or (0.5,0.5)");
  }
  for (const TrajectorySegment* seg : {&r.seg0, &r.seg1}) {
    if (seg->length() != static_cast<std::size_t>(segment_length_)) {
      throw ConfigError("preference buffer: segment length " + std::to_string(seg->length()) +
                        " does not match T=" + std::to_string(segment_length_));
    }
    for (const auto& step : seg->steps) {
      if (step.state.size() != static_cast<std::size_t>(state_dim_) ||
          step.action.size() != static_cast<std::size_t>(action_dim_)) {
        throw ConfigError("preference buffer: step dimensions do not match buffer");
      }
      if (!all_finite(step.state) || !all_finite(step.action)) {
        throw NumericError("preference buffer: non-finite value in segment");
      }
    }
  }
  items_.push_back(std::move(r));
}

std::vector<std::size_t> sample_indices(std::size_t buffer_size, std::size_t n, Rng& rng) {
  if (buffer_size == 0) throw ConfigError("sample_batch: buffer is empty");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::size_t>(rng.below(buffer_size));
  return idx;
}

std::vector<const Transition*> sample_batch(const ReplayBuffer& buffer, std::size_t n, Rng& rng) {
  auto idx = sample_indices(buffer.size(), n, rng);
  std::vector<const Transition*> batch(n);
  for (std::size_t i = 0; i < n; ++i) batch[i] = &buffer.at(idx[i]);
  return batch;
}

std::vector<const PreferenceRecord*> sample_batch(const PreferenceBuffer& buffer, std::size_t n,
                                                  Rng& rng) {
  auto idx = sample_indices(buffer.size(), n, rng);
  std::vector<const PreferenceRecord*> batch(n);
  for (std::size_t i = 0; i < n; ++i) batch[i] = &buffer.at(idx[i]);
  return batch;
}

}  // namespace prefrec
