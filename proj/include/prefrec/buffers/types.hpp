#pragma once

#include <cstdint>
#include <vector>

namespace prefrec {

/// One recommendation request. There is deliberately no reward field:
/// rewards are always predicted by the reward model at training time.
struct Transition {
  std::vector<float> state;
  std::vector<float> action;
  std::vector<float> next_state;
  std::int64_t user_id = 0;
  std::int32_t session_index = 0;
  std::int32_t request_index = 0;
};

struct SegmentStep {
  std::vector<float> state;
  std::vector<float> action;
};

/// Fixed-length window of (state, action) pairs used as a comparison unit.
struct TrajectorySegment {
  std::vector<SegmentStep> steps;

  std::size_t length() const { return steps.size(); }
};

/// Segment pair plus teacher label. y is (1,0), (0,1) or (0.5,0.5).
struct PreferenceRecord {
  TrajectorySegment seg0;
  TrajectorySegment seg1;
  double y0 = 0.5;
  double y1 = 0.5;
};

}  // namespace prefrec
