#pragma once

#include <string>

#include "prefrec/buffers/buffers.hpp"

namespace prefrec {

/// Text formats. Floats are printed with 9 significant digits, which is
/// enough for an exact 32-bit round trip.
///
/// Transitions: header `PREFREC-TRN v1 d_s=<int> d_a=<int>`, then one line
/// per record: `user_id,session_index,request_index,<d_s>,<d_a>,<d_s>`.
///
/// Preferences: header `PREFREC-PRF v1 d_s=<int> d_a=<int> T=<int>`, then
/// per record 2T segment lines (`<d_s floats>,<d_a floats>`, first segment
/// then second) followed by a label line `y0,y1`.
void save_transitions(const std::string& path, const ReplayBuffer& buffer);
ReplayBuffer load_transitions(const std::string& path,
                              std::size_t capacity = kReplayCapacityDefault);

void save_preferences(const std::string& path, const PreferenceBuffer& buffer);
PreferenceBuffer load_preferences(const std::string& path,
                                  std::size_t capacity = kPreferenceCapacityDefault);

/// Shared float formatting used by every text artifact (metrics too).
void append_float(std::string& out, double value);

}  // namespace prefrec
