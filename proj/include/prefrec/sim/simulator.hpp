#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prefrec/config.hpp"
#include "prefrec/rng.hpp"

namespace prefrec {

/// Session-based user simulator. A user carries a hidden unit-norm taste
/// vector and a hidden engagement level in [0,1]; actions aligned with the
/// taste push engagement up, misaligned ones pull it down. Engagement maps
/// monotonically to session depth and inversely to the revisit gap.
struct SimParams {
  int state_dim = 32;
  int action_dim = 8;
  int sessions = 25;
  double noise = 0.05;
  std::uint64_t seed = 1;

  int static_dim() const { return state_dim - action_dim - 4; }

  static constexpr double kDepthMin = 1.0;
  static constexpr double kDepthMax = 9.0;
  static constexpr double kDepthClamp = 12.0;
  static constexpr double kGapMinSeconds = 600.0;
  static constexpr double kGapMaxSeconds = 86400.0;
  static constexpr std::int64_t kRequestSeconds = 10;
  static constexpr double kEngagementGain = 0.08;
  static constexpr double kAlignReference = 0.5;
  static constexpr double kTasteEmaBeta = 0.1;
  static constexpr double kDepthEmaBeta = 0.3;
  static constexpr double kGapEmaBeta = 0.3;
  static constexpr double kFeedbackEmaBeta = 0.1;

  // Logging-policy session phases (focused vs wandering browsing).
  static constexpr double kPhaseStay = 0.8;
  static constexpr double kFocusMix = 0.97;
  static constexpr double kWanderDrop = 0.45;
  static constexpr double kMixFloor = 0.02;
};

SimParams sim_params_from(const RunConfig& config);

struct UserProfile {
  std::int64_t user_id = 0;
  std::vector<float> static_features;
  std::vector<double> latent_preference;  // unit norm
  double init_engagement = 0.5;
  double behavior_mix = 0.5;  // fraction of taste vs noise in logged actions
};

/// Users are a pure function of (seed, index); index 0.. spans training
/// users first, then held-out users.
UserProfile make_user(const SimParams& params, std::int64_t user_index);

struct RequestRecord {
  std::vector<float> state;
  std::vector<float> action;
  std::int64_t timestamp = 0;
};

struct Session {
  std::int64_t start_ts = 0;
  std::int64_t exit_ts = 0;
  double engagement_start = 0.0;
  std::vector<RequestRecord> requests;
};

struct SessionLog {
  std::int64_t user_id = 0;
  std::vector<Session> sessions;

  std::size_t total_requests() const;
};

using PolicyFn = std::function<std::vector<float>(std::span<const float> state)>;

/// Actions are recommendation directions: only where they point matters, not
/// how hard the network drives them. Rescales to unit length in place; a
/// near-zero vector (norm below 1e-9) is left untouched rather than blown up.
void normalize_action(std::vector<float>& action);
void normalize_action(std::vector<double>& action);

/// Serving normalizes every policy action with normalize_action before the
/// user reacts to it, so policies compete on direction alone.
SessionLog simulate_user(const SimParams& params, const UserProfile& profile,
                         const PolicyFn& policy, int horizon_sessions, Rng& rng);

/// The logging policy: a noisy, partially aligned recommender. Mixes the
/// user's taste with a fresh random direction per request. The mix ratio
/// moves session to session between a focused phase (near-pure taste,
/// kFocusMix) and a wandering phase (profile mix lowered by kWanderDrop);
/// the phase persists across sessions with probability kPhaseStay. Focused
/// stretches raise engagement and produce the deep sessions in a log, so
/// alignment and session quality covary the way they do in real traffic.
/// Owns its noise stream, taken by value.
PolicyFn behavior_policy(const UserProfile& profile, Rng rng);

struct SessionStats {
  std::vector<double> depths;  // requests per session
  std::vector<double> gaps;    // seconds from exit i to start i+1; size n-1
  double depth_avg = 0.0;
  double gap_avg = 0.0;
  bool gap_defined = false;  // false for single-session logs
};

SessionStats session_stats(const SessionLog& log);

enum class LevelKind { kDepth, kFrequency };

/// Six-level quantization of a per-session statistic against the user's
/// own average: depth uses floor(x_i / x_avg), frequency the reciprocal
/// ratio floor(x_avg / x_i); both clipped to [0,5].
int engagement_level(double x_i, double x_avg, LevelKind kind);

struct EngagementLevels {
  std::vector<int> depth;      // one per session
  std::vector<int> frequency;  // one per session except the last
};

EngagementLevels session_levels(const SessionLog& log);

/// Levels of `log` measured against another log's averages. Used to score
/// a policy's sessions relative to the user's logged history, so deeper or
/// more frequent sessions than the logging policy's register above level 1
/// instead of being normalized away by the evaluated log's own mean.
EngagementLevels session_levels_vs(const SessionLog& log, const SessionStats& baseline);

/// Per-session score for one task. depth and frequency return their level;
/// mixture averages the two so the result stays within [0,5]. Returns NaN
/// where the task level is undefined (frequency of the final session).
double session_task_level(const EngagementLevels& levels, std::size_t session_index,
                          const std::string& task);

/// Sum of session_task_level over the whole log, skipping undefined ones.
double cumulative_level_score(const SessionLog& log, const std::string& task);

/// Same sum with levels taken against a baseline log's averages.
double cumulative_level_score(const SessionLog& log, const std::string& task,
                              const SessionStats& baseline);

/// Teacher-side cumulative sum over the sessions that overlap the request
/// window [request_begin, request_begin + request_count). For the mixture
/// task this sums depth and frequency levels outright.
double segment_level_sum(const SessionLog& log, const EngagementLevels& levels,
                         const std::string& task, std::size_t request_begin,
                         std::size_t request_count);

/// (y0, y1): (0,1) when sum1 > sum0 + margin, (1,0) for the mirror case,
/// (0.5,0.5) when the difference is within the margin.
std::pair<double, double> teacher_label(double sum0, double sum1, double margin);

}  // namespace prefrec
