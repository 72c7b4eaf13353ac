#pragma once

#include <cstddef>
#include <vector>

#include "prefrec/buffers/types.hpp"
#include "prefrec/rng.hpp"

namespace prefrec {

inline constexpr std::size_t kReplayCapacityDefault = 3'000'000;
inline constexpr std::size_t kPreferenceCapacityDefault = 20'000;

/// Transition store. Immutable after loading; overflow is an error rather
/// than a ring overwrite because datasets are generated offline to a known
/// size.
class ReplayBuffer {
 public:
  ReplayBuffer(int state_dim, int action_dim, std::size_t capacity = kReplayCapacityDefault);

  void push(Transition t);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t capacity() const { return capacity_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const Transition& at(std::size_t i) const { return items_[i]; }

 private:
  int state_dim_;
  int action_dim_;
  std::size_t capacity_;
  std::vector<Transition> items_;
};

/// Labeled segment-pair store with the same overflow policy.
class PreferenceBuffer {
 public:
  PreferenceBuffer(int state_dim, int action_dim, int segment_length,
                   std::size_t capacity = kPreferenceCapacityDefault);

  void push(PreferenceRecord r);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t capacity() const { return capacity_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  int segment_length() const { return segment_length_; }
  const PreferenceRecord& at(std::size_t i) const { return items_[i]; }

 private:
  int state_dim_;
  int action_dim_;
  int segment_length_;
  std::size_t capacity_;
  std::vector<PreferenceRecord> items_;
};

/// Uniform with-replacement draw of n indices into [0, buffer_size).
std::vector<std::size_t> sample_indices(std::size_t buffer_size, std::size_t n, Rng& rng);

std::vector<const Transition*> sample_batch(const ReplayBuffer& buffer, std::size_t n, Rng& rng);
std::vector<const PreferenceRecord*> sample_batch(const PreferenceBuffer& buffer, std::size_t n,
                                                  Rng& rng);

}  // namespace prefrec
