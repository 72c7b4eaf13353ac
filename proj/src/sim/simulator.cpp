#include "prefrec/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prefrec/errors.hpp"

namespace prefrec {

namespace {

double clip01(double x) { return std::min(1.0, std::max(0.0, x)); }

double dot(std::span<const float> a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

double normalized_log_gap(double gap_seconds) {
  const double lo = std::log(SimParams::kGapMinSeconds);
  const double hi = std::log(2.0 * SimParams::kGapMaxSeconds);
  return clip01((std::log(gap_seconds) - lo) / (hi - lo));
}

}  // namespace

SimParams sim_params_from(const RunConfig& config) {
  SimParams p;
  p.state_dim = config.state_dim;
  p.action_dim = config.action_dim;
  p.sessions = config.sim_sessions;
  p.noise = config.sim_noise;
  p.seed = config.seed;
  if (p.static_dim() <= 0) {
    throw ConfigError("simulator: state_dim leaves no room for static features");
  }
  return p;
}

UserProfile make_user(const SimParams& params, std::int64_t user_index) {
  Rng rng = Rng::stream(params.seed, "user.profile", static_cast<std::uint64_t>(user_index));
  UserProfile u;
  u.user_id = user_index + 1;
  u.static_features.resize(static_cast<std::size_t>(params.static_dim()));
  for (float& x : u.static_features) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  u.latent_preference = rng.unit_vector(params.action_dim);
  u.init_engagement = rng.uniform(0.3, 0.6);
  u.behavior_mix = rng.uniform(0.05, 0.7);
  return u;
}

std::size_t SessionLog::total_requests() const {
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.requests.size();
  return n;
}

namespace {

template <typename T>
void normalize_direction(std::vector<T>& v) {
  double norm2 = 0.0;
  for (T x : v) norm2 += static_cast<double>(x) * static_cast<double>(x);
  const double norm = std::sqrt(norm2);
  if (norm < 1e-9) return;
  for (T& x : v) x = static_cast<T>(static_cast<double>(x) / norm);
}

}  // namespace

void normalize_action(std::vector<float>& action) { normalize_direction(action); }
void normalize_action(std::vector<double>& action) { normalize_direction(action); }

PolicyFn behavior_policy(const UserProfile& profile, Rng rng) {
  const std::vector<double> taste = profile.latent_preference;
  const double mix = profile.behavior_mix;
  // Session boundaries are read off the state: the progress feature (last
  // component, written as r/depth by simulate_user) climbs strictly within
  // a session, so a non-increase marks the first request of a new one.
  double last_progress = std::numeric_limits<double>::infinity();
  bool started = false;
  bool focused = false;
  double session_mix = mix;
  return [taste, mix, rng, last_progress, started, focused,
          session_mix](std::span<const float> state) mutable {
    const double progress = static_cast<double>(state[state.size() - 1]);
    if (progress <= last_progress) {
      if (!started) {
        started = true;
        focused = rng.uniform(0.0, 1.0) < 0.5;
      } else if (rng.uniform(0.0, 1.0) >= SimParams::kPhaseStay) {
        focused = !focused;
      }
      session_mix = focused ? SimParams::kFocusMix
                            : std::max(SimParams::kMixFloor, mix - SimParams::kWanderDrop);
    }
    last_progress = progress;
    const std::vector<double> direction = rng.unit_vector(static_cast<int>(taste.size()));
    std::vector<float> action(taste.size());
    double norm2 = 0.0;
    std::vector<double> blended(taste.size());
    for (std::size_t i = 0; i < taste.size(); ++i) {
      blended[i] = session_mix * taste[i] + (1.0 - session_mix) * direction[i];
      norm2 += blended[i] * blended[i];
    }
    const double inv = 1.0 / std::sqrt(std::max(norm2, 1e-12));
    for (std::size_t i = 0; i < taste.size(); ++i)
      action[i] = static_cast<float>(blended[i] * inv);
    return action;
  };
}

SessionLog simulate_user(const SimParams& params, const UserProfile& profile,
                         const PolicyFn& policy, int horizon_sessions, Rng& rng) {
  if (horizon_sessions < 1) throw ConfigError("simulate_user: horizon must be at least 1");
  const auto d_a = static_cast<std::size_t>(params.action_dim);
  const auto d_static = static_cast<std::size_t>(params.static_dim());

  SessionLog log;
  log.user_id = profile.user_id;
  log.sessions.reserve(static_cast<std::size_t>(horizon_sessions));

  double engagement = profile.init_engagement;
  std::vector<double> taste_ema(d_a, 0.0);
  double depth_ema = 0.5;
  double gap_ema = 0.5;
  double feedback_ema = 0.0;
  std::int64_t now = 0;

  std::vector<float> state(static_cast<std::size_t>(params.state_dim));
  std::copy(profile.static_features.begin(), profile.static_features.end(), state.begin());

  for (int si = 0; si < horizon_sessions; ++si) {
    Session session;
    session.start_ts = now;
    session.engagement_start = engagement;

    // Depth is emergent: the user keeps issuing requests while the session
    // target, recomputed from the live engagement after every request,
    // stays ahead of the request count. Engaging recommendations therefore
    // lengthen the very session they are served in.
    const double depth_jitter = params.noise * 8.0 * rng.normal();
    const int depth_cap = static_cast<int>(SimParams::kDepthClamp);

    session.requests.reserve(static_cast<std::size_t>(depth_cap));
    int depth = 0;
    for (int r = 1; r <= depth_cap; ++r) {
      for (std::size_t i = 0; i < d_a; ++i)
        state[d_static + i] = static_cast<float>(taste_ema[i]);
      state[d_static + d_a] = static_cast<float>(depth_ema);
      state[d_static + d_a + 1] = static_cast<float>(gap_ema);
      state[d_static + d_a + 2] = static_cast<float>(feedback_ema);
      state[d_static + d_a + 3] =
          static_cast<float>(static_cast<double>(r) / SimParams::kDepthClamp);

      RequestRecord rec;
      rec.state = state;
      rec.action = policy(state);
      if (rec.action.size() != d_a) {
        throw ConfigError("simulate_user: policy returned an action of wrong dimension");
      }
      normalize_action(rec.action);
      rec.timestamp = now + (r - 1) * SimParams::kRequestSeconds;

      const double align = dot(rec.action, profile.latent_preference);
      const double align_eff = std::min(align, 1.0);
      const double feedback =
          std::clamp(align_eff + params.noise * rng.normal(), -1.0, 1.0);
      for (std::size_t i = 0; i < d_a; ++i) {
        taste_ema[i] = (1.0 - SimParams::kTasteEmaBeta) * taste_ema[i] +
                       SimParams::kTasteEmaBeta * feedback * static_cast<double>(rec.action[i]);
      }
      feedback_ema = (1.0 - SimParams::kFeedbackEmaBeta) * feedback_ema +
                     SimParams::kFeedbackEmaBeta * feedback;
      engagement = clip01(engagement +
                          SimParams::kEngagementGain * (align_eff - SimParams::kAlignReference) +
                          params.noise * 0.2 * rng.normal());
      session.requests.push_back(std::move(rec));

      depth = r;
      const double target =
          std::clamp(SimParams::kDepthMin +
                         engagement * (SimParams::kDepthMax - SimParams::kDepthMin) +
                         depth_jitter,
                     SimParams::kDepthMin, SimParams::kDepthClamp);
      if (static_cast<double>(r) + 0.5 >= target) break;
    }
    session.exit_ts = now + static_cast<std::int64_t>(depth) * SimParams::kRequestSeconds;

    const double depth_norm =
        (static_cast<double>(depth) - SimParams::kDepthMin) /
        (SimParams::kDepthClamp - SimParams::kDepthMin);
    depth_ema = (1.0 - SimParams::kDepthEmaBeta) * depth_ema + SimParams::kDepthEmaBeta * depth_norm;

    const double gap_scale = std::exp(params.noise * 2.0 * rng.normal());
    const double gap_raw =
        SimParams::kGapMinSeconds +
        (1.0 - engagement) * (SimParams::kGapMaxSeconds - SimParams::kGapMinSeconds) * gap_scale;
    const double gap = std::clamp(gap_raw, SimParams::kGapMinSeconds,
                                  2.0 * SimParams::kGapMaxSeconds);
    gap_ema = (1.0 - SimParams::kGapEmaBeta) * gap_ema +
              SimParams::kGapEmaBeta * normalized_log_gap(gap);
    now = session.exit_ts + static_cast<std::int64_t>(std::llround(gap));

    log.sessions.push_back(std::move(session));
  }
  return log;
}

SessionStats session_stats(const SessionLog& log) {
  if (log.sessions.empty()) throw ConfigError("session_stats: log has no sessions");
  SessionStats stats;
  stats.depths.reserve(log.sessions.size());
  for (const auto& s : log.sessions) {
    if (s.requests.empty()) throw ConfigError("session_stats: session has no requests");
    stats.depths.push_back(static_cast<double>(s.requests.size()));
  }
  double depth_sum = 0.0;
  for (double d : stats.depths) depth_sum += d;
  stats.depth_avg = depth_sum / static_cast<double>(stats.depths.size());

  if (log.sessions.size() >= 2) {
    stats.gap_defined = true;
    stats.gaps.reserve(log.sessions.size() - 1);
    double gap_sum = 0.0;
    for (std::size_t i = 0; i + 1 < log.sessions.size(); ++i) {
      const double gap =
          static_cast<double>(log.sessions[i + 1].start_ts - log.sessions[i].exit_ts);
      if (gap <= 0.0) throw NumericError("session_stats: non-positive revisit gap");
      stats.gaps.push_back(gap);
      gap_sum += gap;
    }
    stats.gap_avg = gap_sum / static_cast<double>(stats.gaps.size());
  }
  return stats;
}

int engagement_level(double x_i, double x_avg, LevelKind kind) {
  if (kind == LevelKind::kDepth) {
    if (x_avg <= 0.0) throw ConfigError("engagement_level: average depth must be positive");
    return static_cast<int>(std::clamp(std::floor(x_i / x_avg), 0.0, 5.0));
  }
  if (x_i <= 0.0) throw ConfigError("engagement_level: revisit interval must be positive");
  return static_cast<int>(std::clamp(std::floor(x_avg / x_i), 0.0, 5.0));
}

namespace {

EngagementLevels levels_against(const SessionStats& own, const SessionStats& reference) {
  EngagementLevels levels;
  levels.depth.reserve(own.depths.size());
  for (double d : own.depths) {
    levels.depth.push_back(engagement_level(d, reference.depth_avg, LevelKind::kDepth));
  }
  if (own.gap_defined && reference.gap_defined) {
    levels.frequency.reserve(own.gaps.size());
    for (double g : own.gaps) {
      levels.frequency.push_back(engagement_level(g, reference.gap_avg, LevelKind::kFrequency));
    }
  }
  return levels;
}

}  // namespace

EngagementLevels session_levels(const SessionLog& log) {
  const SessionStats stats = session_stats(log);
  return levels_against(stats, stats);
}

EngagementLevels session_levels_vs(const SessionLog& log, const SessionStats& baseline) {
  return levels_against(session_stats(log), baseline);
}

double session_task_level(const EngagementLevels& levels, std::size_t session_index,
                          const std::string& task) {
  const bool has_freq = session_index < levels.frequency.size();
  if (task == "depth") return levels.depth.at(session_index);
  if (task == "frequency") {
    if (!has_freq) return std::numeric_limits<double>::quiet_NaN();
    return levels.frequency[session_index];
  }
  if (task == "mixture") {
    if (!has_freq) return std::numeric_limits<double>::quiet_NaN();
    return 0.5 * (levels.depth.at(session_index) + levels.frequency[session_index]);
  }
  throw ConfigError("unknown task '" + task + "'");
}

namespace {

double sum_task_levels(const SessionLog& log, const EngagementLevels& levels,
                       const std::string& task) {
  double total = 0.0;
  for (std::size_t i = 0; i < log.sessions.size(); ++i) {
    const double l = session_task_level(levels, i, task);
    if (!std::isnan(l)) total += l;
  }
  return total;
}

}  // namespace

double cumulative_level_score(const SessionLog& log, const std::string& task) {
  return sum_task_levels(log, session_levels(log), task);
}

double cumulative_level_score(const SessionLog& log, const std::string& task,
                              const SessionStats& baseline) {
  return sum_task_levels(log, session_levels_vs(log, baseline), task);
}

double segment_level_sum(const SessionLog& log, const EngagementLevels& levels,
                         const std::string& task, std::size_t request_begin,
                         std::size_t request_count) {
  if (task != "depth" && task != "frequency" && task != "mixture") {
    throw ConfigError("unknown task '" + task + "'");
  }
  double total = 0.0;
  std::size_t first = 0;
  for (std::size_t i = 0; i < log.sessions.size(); ++i) {
    const std::size_t n = log.sessions[i].requests.size();
    const bool overlaps = first < request_begin + request_count && request_begin < first + n;
    if (overlaps) {
      if (task == "depth" || task == "mixture") total += levels.depth.at(i);
      if ((task == "frequency" || task == "mixture") && i < levels.frequency.size()) {
        total += levels.frequency[i];
      }
    }
    first += n;
  }
  return total;
}

std::pair<double, double> teacher_label(double sum0, double sum1, double margin) {
  if (sum1 > sum0 + margin) return {0.0, 1.0};
  if (sum0 > sum1 + margin) return {1.0, 0.0};
  return {0.5, 0.5};
}

}  // namespace prefrec
