#pragma once

#include <array>
#include <string>
#include <vector>

#include "prefrec/buffers/buffers.hpp"
#include "prefrec/config.hpp"
#include "prefrec/sim/simulator.hpp"

namespace prefrec {

struct Dataset {
  ReplayBuffer replay;
  PreferenceBuffer prefs;
  std::vector<SessionLog> heldout_logs;
  std::array<double, 6> depth_level_fraction{};
  std::array<double, 6> frequency_level_fraction{};
  int eligible_users = 0;
};

/// Simulates the whole population under the logging policy: training users
/// fill the replay buffer and (for those with a long enough history) the
/// teacher-labeled preference pairs; held-out users keep their raw session
/// logs for offline evaluation. User indices [0, sim_users) train, the next
/// sim_heldout_users are held out.
Dataset generate_dataset(const RunConfig& config);

/// Replays one user's logged behavior (used by tests and evaluation).
SessionLog behavior_log(const SimParams& params, std::int64_t user_index, int horizon_sessions);

/// Session-log file: header `PREFREC-LOG v1 d_s=<int> d_a=<int>`, then per
/// user a `user <id> <n_sessions>` line, per session a
/// `session <start_ts> <exit_ts> <n_requests>` line followed by request
/// lines `<ts>,<d_s floats>,<d_a floats>`.
void save_session_logs(const std::string& path, const std::vector<SessionLog>& logs,
                       int state_dim, int action_dim);
std::vector<SessionLog> load_session_logs(const std::string& path, int* state_dim = nullptr,
                                          int* action_dim = nullptr);

}  // namespace prefrec
