#include "prefrec/sim/generate.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "prefrec/buffers/io.hpp"
#include "prefrec/errors.hpp"

namespace prefrec {

SessionLog behavior_log(const SimParams& params, std::int64_t user_index, int horizon_sessions) {
  const UserProfile profile = make_user(params, user_index);
  const auto idx = static_cast<std::uint64_t>(user_index);
  PolicyFn policy = behavior_policy(profile, Rng::stream(params.seed, "gen.behavior", idx));
  Rng sim_rng = Rng::stream(params.seed, "gen.sim", idx);
  return simulate_user(params, profile, policy, horizon_sessions, sim_rng);
}

namespace {

void append_transitions(ReplayBuffer& replay, const SessionLog& log) {
  std::vector<std::pair<const RequestRecord*, std::int32_t>> flat;  // request, session index
  for (std::size_t si = 0; si < log.sessions.size(); ++si) {
    for (const auto& req : log.sessions[si].requests) {
      flat.emplace_back(&req, static_cast<std::int32_t>(si));
    }
  }
  for (std::size_t j = 0; j + 1 < flat.size(); ++j) {
    Transition t;
    t.user_id = log.user_id;
    t.session_index = flat[j].second;
    t.request_index = static_cast<std::int32_t>(j);
    t.state = flat[j].first->state;
    t.action = flat[j].first->action;
    t.next_state = flat[j + 1].first->state;
    replay.push(std::move(t));
  }
}

TrajectorySegment extract_segment(const SessionLog& log, std::size_t begin, std::size_t count) {
  TrajectorySegment seg;
  seg.steps.reserve(count);
  std::size_t index = 0;
  for (const auto& session : log.sessions) {
    for (const auto& req : session.requests) {
      if (index >= begin && index < begin + count) {
        seg.steps.push_back({req.state, req.action});
      }
      ++index;
    }
  }
  if (seg.steps.size() != count) {
    throw ConfigError("extract_segment: window exceeds the user's history");
  }
  return seg;
}

}  // namespace

Dataset generate_dataset(const RunConfig& config) {
  config.validate();
  const SimParams params = sim_params_from(config);
  const auto t_len = static_cast<std::size_t>(config.segment_length);
  const std::size_t min_requests =
      std::max<std::size_t>(t_len, static_cast<std::size_t>(config.sim_min_requests));

  Dataset out{ReplayBuffer(config.state_dim, config.action_dim, config.replay_buffer_capacity),
              PreferenceBuffer(config.state_dim, config.action_dim, config.segment_length,
                               config.preference_buffer_capacity),
              {},
              {},
              {},
              0};

  std::vector<SessionLog> eligible_logs;
  std::vector<EngagementLevels> eligible_levels;
  std::array<std::int64_t, 6> depth_counts{};
  std::array<std::int64_t, 6> freq_counts{};
  std::int64_t depth_total = 0, freq_total = 0;

  for (int u = 0; u < config.sim_users; ++u) {
    SessionLog log = behavior_log(params, u, config.sim_sessions);
    append_transitions(out.replay, log);
    const EngagementLevels levels = session_levels(log);
    for (int l : levels.depth) {
      depth_counts[static_cast<std::size_t>(l)] += 1;
      ++depth_total;
    }
    for (int l : levels.frequency) {
      freq_counts[static_cast<std::size_t>(l)] += 1;
      ++freq_total;
    }
    if (log.total_requests() >= min_requests) {
      eligible_logs.push_back(std::move(log));
      eligible_levels.push_back(levels);
    }
  }
  out.eligible_users = static_cast<int>(eligible_logs.size());
  for (std::size_t l = 0; l < 6; ++l) {
    out.depth_level_fraction[l] =
        depth_total > 0 ? static_cast<double>(depth_counts[l]) / depth_total : 0.0;
    out.frequency_level_fraction[l] =
        freq_total > 0 ? static_cast<double>(freq_counts[l]) / freq_total : 0.0;
  }

  if (config.sim_pref_pairs > 0) {
    if (eligible_logs.size() < 2) {
      throw ConfigError("generate_dataset: fewer than two users have history >= " +
                        std::to_string(min_requests) +
                        " requests; lengthen sim_sessions or lower the bar");
    }
    Rng pair_rng = Rng::stream(config.seed, "gen.pairs");
    const double margin = static_cast<double>(config.teacher_margin);
    for (int p = 0; p < config.sim_pref_pairs; ++p) {
      const std::size_t a = static_cast<std::size_t>(pair_rng.below(eligible_logs.size()));
      std::size_t b = static_cast<std::size_t>(pair_rng.below(eligible_logs.size() - 1));
      if (b >= a) ++b;
      const std::size_t n_a = eligible_logs[a].total_requests();
      const std::size_t n_b = eligible_logs[b].total_requests();
      const std::size_t start_a =
          static_cast<std::size_t>(pair_rng.below(n_a - t_len + 1));
      const std::size_t start_b =
          static_cast<std::size_t>(pair_rng.below(n_b - t_len + 1));

      PreferenceRecord rec;
      rec.seg0 = extract_segment(eligible_logs[a], start_a, t_len);
      rec.seg1 = extract_segment(eligible_logs[b], start_b, t_len);
      const double sum0 =
          segment_level_sum(eligible_logs[a], eligible_levels[a], config.task, start_a, t_len);
      const double sum1 =
          segment_level_sum(eligible_logs[b], eligible_levels[b], config.task, start_b, t_len);
      const auto [y0, y1] = teacher_label(sum0, sum1, margin);
      rec.y0 = y0;
      rec.y1 = y1;
      out.prefs.push(std::move(rec));
    }
  }

  out.heldout_logs.reserve(static_cast<std::size_t>(config.sim_heldout_users));
  for (int u = 0; u < config.sim_heldout_users; ++u) {
    out.heldout_logs.push_back(
        behavior_log(params, static_cast<std::int64_t>(config.sim_users) + u,
                     config.sim_sessions));
  }
  return out;
}

void save_session_logs(const std::string& path, const std::vector<SessionLog>& logs,
                       int state_dim, int action_dim) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "PREFREC-LOG v1 d_s=" << state_dim << " d_a=" << action_dim << "\n";
  std::string line;
  for (const SessionLog& log : logs) {
    out << "user " << log.user_id << " " << log.sessions.size() << "\n";
    for (const Session& s : log.sessions) {
      out << "session " << s.start_ts << " " << s.exit_ts << " " << s.requests.size() << "\n";
      for (const RequestRecord& r : s.requests) {
        line = std::to_string(r.timestamp);
        for (float x : r.state) {
          line.push_back(',');
          append_float(line, x);
        }
        for (float x : r.action) {
          line.push_back(',');
          append_float(line, x);
        }
        line.push_back('\n');
        out << line;
      }
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

[[noreturn]] void log_fail(const std::string& path, std::size_t line_no, const char* what) {
  throw IoError(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<SessionLog> load_session_logs(const std::string& path, int* state_dim,
                                          int* action_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw IoError(path + ": missing header");
  ++line_no;
  int d_s = 0, d_a = 0;
  if (std::sscanf(line.c_str(), "PREFREC-LOG v1 d_s=%d d_a=%d", &d_s, &d_a) != 2 || d_s <= 0 ||
      d_a <= 0) {
    throw IoError(path + ":1: bad session log header");
  }
  if (state_dim != nullptr) *state_dim = d_s;
  if (action_dim != nullptr) *action_dim = d_a;

  std::vector<SessionLog> logs;
  while (std::getline(in, line)) {
    ++line_no;
    SessionLog log;
    long long user_id = 0, n_sessions = 0;
    if (std::sscanf(line.c_str(), "user %lld %lld", &user_id, &n_sessions) != 2 ||
        n_sessions < 0) {
      log_fail(path, line_no, "expected 'user <id> <sessions>'");
    }
    log.user_id = user_id;
    log.sessions.reserve(static_cast<std::size_t>(n_sessions));
    for (long long si = 0; si < n_sessions; ++si) {
      if (!std::getline(in, line)) log_fail(path, line_no, "truncated session header");
      ++line_no;
      Session session;
      long long start = 0, exit_ts = 0, n_requests = 0;
      if (std::sscanf(line.c_str(), "session %lld %lld %lld", &start, &exit_ts, &n_requests) !=
              3 ||
          n_requests < 1) {
        log_fail(path, line_no, "expected 'session <start> <exit> <requests>'");
      }
      session.start_ts = start;
      session.exit_ts = exit_ts;
      session.requests.reserve(static_cast<std::size_t>(n_requests));
      for (long long ri = 0; ri < n_requests; ++ri) {
        if (!std::getline(in, line)) log_fail(path, line_no, "truncated request list");
        ++line_no;
        RequestRecord rec;
        const char* p = line.data();
        const char* end = p + line.size();
        auto res = std::from_chars(p, end, rec.timestamp);
        if (res.ec != std::errc()) log_fail(path, line_no, "expected timestamp");
        p = res.ptr;
        rec.state.resize(static_cast<std::size_t>(d_s));
        rec.action.resize(static_cast<std::size_t>(d_a));
        for (auto* vec : {&rec.state, &rec.action}) {
          for (float& x : *vec) {
            if (p == end || *p != ',') log_fail(path, line_no, "record has too few fields");
            ++p;
            const auto fres = std::from_chars(p, end, x);
            if (fres.ec != std::errc()) log_fail(path, line_no, "expected number");
            p = fres.ptr;
          }
        }
        if (p != end) log_fail(path, line_no, "unexpected trailing fields");
        session.requests.push_back(std::move(rec));
      }
      log.sessions.push_back(std::move(session));
    }
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace prefrec
