#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "prefrec/buffers/io.hpp"
#include "prefrec/errors.hpp"
#include "prefrec/sim/generate.hpp"
#include "prefrec/sim/simulator.hpp"

using namespace prefrec;

namespace {

SimParams small_params(double noise = 0.05, std::uint64_t seed = 1) {
  SimParams p;
  p.state_dim = 16;
  p.action_dim = 4;
  p.sessions = 10;
  p.noise = noise;
  p.seed = seed;
  return p;
}

PolicyFn aligned_policy(const UserProfile& profile, double sign) {
  std::vector<float> action(profile.latent_preference.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    action[i] = static_cast<float>(sign * profile.latent_preference[i]);
  }
  return [action](std::span<const float>) { return action; };
}

// Hand-built log: per-session depths and the revisit gaps between them.
SessionLog manual_log(const std::vector<int>& depths, const std::vector<std::int64_t>& gaps) {
  SessionLog log;
  log.user_id = 1;
  std::int64_t now = 0;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    Session s;
    s.start_ts = now;
    for (int r = 0; r < depths[i]; ++r) {
      RequestRecord rec;
      rec.state = {0.1f, 0.2f};
      rec.action = {0.5f};
      rec.timestamp = now + r * 10;
      s.requests.push_back(rec);
    }
    s.exit_ts = now + depths[i] * 10;
    now = s.exit_ts + (i < gaps.size() ? gaps[i] : 0);
    log.sessions.push_back(std::move(s));
  }
  return log;
}

bool logs_equal(const SessionLog& a, const SessionLog& b) {
  if (a.user_id != b.user_id || a.sessions.size() != b.sessions.size()) return false;
  for (std::size_t i = 0; i < a.sessions.size(); ++i) {
    const Session& sa = a.sessions[i];
    const Session& sb = b.sessions[i];
    if (sa.start_ts != sb.start_ts || sa.exit_ts != sb.exit_ts) return false;
    if (sa.requests.size() != sb.requests.size()) return false;
    for (std::size_t r = 0; r < sa.requests.size(); ++r) {
      if (sa.requests[r].timestamp != sb.requests[r].timestamp) return false;
      if (sa.requests[r].state != sb.requests[r].state) return false;
      if (sa.requests[r].action != sb.requests[r].action) return false;
    }
  }
  return true;
}

double mean_depth(const SessionLog& log) {
  double sum = 0.0;
  for (const Session& s : log.sessions) sum += static_cast<double>(s.requests.size());
  return sum / static_cast<double>(log.sessions.size());
}

}  // namespace

TEST_CASE("normalize_action: rescales to unit length, guards near-zero input") {
  std::vector<double> d = {3.0, 0.0, -4.0};
  normalize_action(d);
  CHECK(d[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(d[1] == 0.0);
  CHECK(d[2] == doctest::Approx(-0.8).epsilon(1e-15));

  std::vector<float> f = {0.0f, 2.0f, 0.0f};
  normalize_action(f);
  CHECK(f[1] == 1.0f);

  std::vector<float> tiny = {1e-12f, -1e-12f};
  const std::vector<float> before = tiny;
  normalize_action(tiny);
  CHECK(tiny == before);
}

TEST_CASE("simulate_user: logged actions are the policy's direction at unit norm") {
  const SimParams params = small_params(0.05);
  const UserProfile profile = make_user(params, 2);
  // A policy that shouts: same direction as the user's taste, scaled 7x.
  const PolicyFn loud = aligned_policy(profile, 7.0);
  Rng rng = Rng::stream(params.seed, "gen.sim", 2);
  const SessionLog log = simulate_user(params, profile, loud, 6, rng);
  for (const Session& s : log.sessions) {
    for (const RequestRecord& r : s.requests) {
      double norm2 = 0.0;
      for (std::size_t i = 0; i < r.action.size(); ++i) {
        norm2 += static_cast<double>(r.action[i]) * static_cast<double>(r.action[i]);
        CHECK(r.action[i] * static_cast<float>(profile.latent_preference[i]) >= 0.0f);
      }
      CHECK(std::sqrt(norm2) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("simulate_user: aligned actions never lower engagement at zero noise") {
  const SimParams params = small_params(0.0);
  for (std::int64_t u = 0; u < 10; ++u) {
    const UserProfile profile = make_user(params, u);
    Rng rng = Rng::stream(params.seed, "gen.sim", static_cast<std::uint64_t>(u));
    const SessionLog log = simulate_user(params, profile, aligned_policy(profile, 1.0), 15, rng);
    for (std::size_t i = 1; i < log.sessions.size(); ++i) {
      CHECK(log.sessions[i].engagement_start >= log.sessions[i - 1].engagement_start);
    }
    CHECK(log.sessions.back().engagement_start > log.sessions.front().engagement_start);
  }
}

TEST_CASE("simulate_user: noisy aligned runs still trend upward") {
  const SimParams params = small_params(0.05);
  double first_third = 0.0, last_third = 0.0;
  for (std::int64_t u = 0; u < 20; ++u) {
    const UserProfile profile = make_user(params, u);
    Rng rng = Rng::stream(params.seed, "gen.sim", static_cast<std::uint64_t>(u));
    const SessionLog log = simulate_user(params, profile, aligned_policy(profile, 1.0), 15, rng);
    for (int i = 0; i < 5; ++i) first_third += log.sessions[i].engagement_start;
    for (int i = 10; i < 15; ++i) last_third += log.sessions[i].engagement_start;
  }
  CHECK(last_third > first_third);
}

TEST_CASE("simulate_user: oracle beats adversarial depth over 100 paired users") {
  const SimParams params = small_params(0.05);
  double oracle_depth = 0.0, adversarial_depth = 0.0;
  for (std::int64_t u = 0; u < 100; ++u) {
    const UserProfile profile = make_user(params, u);
    Rng rng_a = Rng::stream(params.seed, "gen.sim", static_cast<std::uint64_t>(u));
    Rng rng_b = Rng::stream(params.seed, "gen.sim", static_cast<std::uint64_t>(u));
    oracle_depth += mean_depth(simulate_user(params, profile, aligned_policy(profile, 1.0), 10, rng_a));
    adversarial_depth +=
        mean_depth(simulate_user(params, profile, aligned_policy(profile, -1.0), 10, rng_b));
  }
  CHECK(oracle_depth > adversarial_depth);
}

TEST_CASE("simulate_user: fixed seed reproduces the log bit for bit") {
  for (double noise : {0.0, 0.05}) {
    const SimParams params = small_params(noise);
    const SessionLog a = behavior_log(params, 3, 8);
    const SessionLog b = behavior_log(params, 3, 8);
    CHECK(logs_equal(a, b));
  }
}

TEST_CASE("simulate_user: structural invariants of the emitted log") {
  const SimParams params = small_params(0.05);
  const SessionLog log = behavior_log(params, 5, 12);
  REQUIRE(log.sessions.size() == 12);
  std::int64_t prev_ts = -1;
  for (std::size_t i = 0; i < log.sessions.size(); ++i) {
    const Session& s = log.sessions[i];
    REQUIRE(!s.requests.empty());
    if (i > 0) CHECK(s.start_ts > log.sessions[i - 1].exit_ts);
    for (const RequestRecord& r : s.requests) {
      CHECK(r.timestamp > prev_ts);
      prev_ts = r.timestamp;
      REQUIRE(static_cast<int>(r.state.size()) == params.state_dim);
      REQUIRE(static_cast<int>(r.action.size()) == params.action_dim);
      for (float v : r.state) CHECK(std::fabs(v) <= 1.0 + 1e-9);
      for (float v : r.action) CHECK(std::fabs(v) <= 1.0 + 1e-9);
    }
    CHECK(s.exit_ts >= s.requests.back().timestamp);
  }
}

TEST_CASE("make_user: unit taste, bounded engagement, reproducible profiles") {
  const SimParams params = small_params();
  for (std::int64_t u = 0; u < 20; ++u) {
    const UserProfile a = make_user(params, u);
    const UserProfile b = make_user(params, u);
    CHECK(a.static_features == b.static_features);
    CHECK(a.latent_preference == b.latent_preference);
    double norm2 = 0.0;
    for (double x : a.latent_preference) norm2 += x * x;
    CHECK(std::fabs(std::sqrt(norm2) - 1.0) < 1e-12);
    CHECK(a.init_engagement >= 0.3);
    CHECK(a.init_engagement <= 0.6);
    CHECK(a.behavior_mix >= 0.05);
    CHECK(a.behavior_mix <= 0.7);
    CHECK(a.user_id == u + 1);
  }
}

TEST_CASE("session_stats: depths [3,5] average to 4 and gaps come from timestamps") {
  const SessionLog log = manual_log({3, 5}, {3600});
  const SessionStats stats = session_stats(log);
  CHECK(stats.depth_avg == 4.0);
  CHECK(stats.depths == std::vector<double>{3.0, 5.0});
  REQUIRE(stats.gap_defined);
  REQUIRE(stats.gaps.size() == 1);
  CHECK(stats.gaps[0] == 3600.0);
  CHECK(stats.gap_avg == 3600.0);
}

TEST_CASE("session_stats: single session flags the gap as undefined") {
  const SessionLog log = manual_log({4}, {});
  const SessionStats stats = session_stats(log);
  CHECK(stats.depth_avg == 4.0);
  CHECK(!stats.gap_defined);
  CHECK(stats.gaps.empty());
}

TEST_CASE("session_stats: seeded log matches a hand recount") {
  const SimParams params = small_params(0.05);
  const SessionLog log = behavior_log(params, 9, 10);
  const SessionStats stats = session_stats(log);
  REQUIRE(stats.depths.size() == log.sessions.size());
  double depth_sum = 0.0;
  for (std::size_t i = 0; i < log.sessions.size(); ++i) {
    CHECK(stats.depths[i] == static_cast<double>(log.sessions[i].requests.size()));
    depth_sum += stats.depths[i];
  }
  CHECK(stats.depth_avg ==
        doctest::Approx(depth_sum / static_cast<double>(log.sessions.size())).epsilon(1e-15));
  REQUIRE(stats.gaps.size() == log.sessions.size() - 1);
  double gap_sum = 0.0;
  for (std::size_t i = 0; i + 1 < log.sessions.size(); ++i) {
    const double gap =
        static_cast<double>(log.sessions[i + 1].start_ts - log.sessions[i].exit_ts);
    CHECK(stats.gaps[i] == gap);
    gap_sum += gap;
  }
  CHECK(stats.gap_avg ==
        doctest::Approx(gap_sum / static_cast<double>(stats.gaps.size())).epsilon(1e-15));
}

TEST_CASE("session_stats: malformed logs are rejected") {
  SessionLog empty;
  CHECK_THROWS_AS((void)session_stats(empty), ConfigError);

  SessionLog no_requests = manual_log({2}, {});
  no_requests.sessions.push_back(Session{100, 110, 0.5, {}});
  CHECK_THROWS_AS((void)session_stats(no_requests), ConfigError);

  SessionLog overlapping = manual_log({2, 2}, {60});
  overlapping.sessions[1].start_ts = overlapping.sessions[0].exit_ts;  // zero gap
  CHECK_THROWS_AS((void)session_stats(overlapping), NumericError);
}

TEST_CASE("engagement_level: quantization formula and clipping") {
  CHECK(engagement_level(4.0, 4.0, LevelKind::kDepth) == 1);
  CHECK(engagement_level(250.0, 100.0, LevelKind::kDepth) == 2);
  CHECK(engagement_level(50.0, 100.0, LevelKind::kDepth) == 0);
  CHECK(engagement_level(1000.0, 100.0, LevelKind::kDepth) == 5);
  CHECK(engagement_level(3.0 * 3600.0, 24.0 * 3600.0, LevelKind::kFrequency) == 5);
  CHECK(engagement_level(24.0 * 3600.0, 24.0 * 3600.0, LevelKind::kFrequency) == 1);
  CHECK(engagement_level(48.0 * 3600.0, 24.0 * 3600.0, LevelKind::kFrequency) == 0);
  CHECK_THROWS_AS((void)engagement_level(1.0, 0.0, LevelKind::kDepth), ConfigError);
  CHECK_THROWS_AS((void)engagement_level(0.0, 100.0, LevelKind::kFrequency), ConfigError);
}

TEST_CASE("engagement_level: monotone in the session statistic") {
  int prev = -1;
  for (double d = 0.0; d <= 30.0; d += 0.5) {
    const int level = engagement_level(d, 4.0, LevelKind::kDepth);
    CHECK(level >= prev);
    CHECK(level >= 0);
    CHECK(level <= 5);
    prev = level;
  }
  prev = 6;
  for (double gap = 600.0; gap <= 86400.0; gap += 600.0) {
    const int level = engagement_level(gap, 7200.0, LevelKind::kFrequency);
    CHECK(level <= prev);
    CHECK(level >= 0);
    CHECK(level <= 5);
    prev = level;
  }
}

TEST_CASE("teacher_label: examples, margin band, and the swap mirror") {
  CHECK(teacher_label(10.0, 4.0, 0.0) == std::pair{1.0, 0.0});
  CHECK(teacher_label(4.0, 10.0, 0.0) == std::pair{0.0, 1.0});
  CHECK(teacher_label(7.0, 7.0, 0.0) == std::pair{0.5, 0.5});
  CHECK(teacher_label(4.0, 5.0, 1.0) == std::pair{0.5, 0.5});
  CHECK(teacher_label(4.0, 5.5, 1.0) == std::pair{0.0, 1.0});
  Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.0, 20.0);
    const double b = rng.uniform(0.0, 20.0);
    const double margin = static_cast<double>(rng.below(3));
    const auto [y0, y1] = teacher_label(a, b, margin);
    const auto [z0, z1] = teacher_label(b, a, margin);
    CHECK(y0 == z1);
    CHECK(y1 == z0);
    CHECK(y0 + y1 == 1.0);
  }
}

TEST_CASE("session_levels: per-session quantization of a hand-built log") {
  const SessionLog log = manual_log({2, 4, 6}, {3600, 7200});
  const EngagementLevels levels = session_levels(log);
  CHECK(levels.depth == std::vector<int>{0, 1, 1});  // avg depth 4
  CHECK(levels.frequency == std::vector<int>{1, 0});  // avg gap 5400
}

TEST_CASE("session_task_level: tasks, undefined frequency tail, mixture midpoint") {
  const SessionLog log = manual_log({2, 4, 6}, {3600, 7200});
  const EngagementLevels levels = session_levels(log);
  CHECK(session_task_level(levels, 0, "depth") == 0.0);
  CHECK(session_task_level(levels, 1, "depth") == 1.0);
  CHECK(session_task_level(levels, 0, "frequency") == 1.0);
  CHECK(std::isnan(session_task_level(levels, 2, "frequency")));
  CHECK(session_task_level(levels, 0, "mixture") == 0.5);
  CHECK(std::isnan(session_task_level(levels, 2, "mixture")));
  CHECK_THROWS_AS((void)session_task_level(levels, 0, "banana"), ConfigError);
}

TEST_CASE("cumulative_level_score: own-average and baseline-referenced forms") {
  const SessionLog log = manual_log({2, 4, 6}, {3600, 7200});
  CHECK(cumulative_level_score(log, "depth") == 2.0);       // 0 + 1 + 1
  CHECK(cumulative_level_score(log, "frequency") == 1.0);   // 1 + 0
  CHECK(cumulative_level_score(log, "mixture") == 1.0);     // 0.5 + 0.5

  // The single-argument form is the self-baseline special case.
  const SessionStats own = session_stats(log);
  for (const char* task : {"depth", "frequency", "mixture"}) {
    CHECK(cumulative_level_score(log, task) == cumulative_level_score(log, task, own));
  }

  // Against a weaker history the same sessions score higher.
  const SessionLog weaker = manual_log({2, 2}, {10800});
  const SessionStats baseline = session_stats(weaker);
  CHECK(cumulative_level_score(log, "depth", baseline) == 6.0);      // 1 + 2 + 3
  CHECK(cumulative_level_score(log, "frequency", baseline) == 4.0);  // 3 + 1
}

TEST_CASE("segment_level_sum: only sessions overlapping the window count") {
  const SessionLog log = manual_log({2, 4, 6}, {3600, 7200});
  const EngagementLevels levels = session_levels(log);
  // Request index ranges: session 0 -> [0,2), session 1 -> [2,6), session 2 -> [6,12).
  CHECK(segment_level_sum(log, levels, "depth", 0, 2) == 0.0);
  CHECK(segment_level_sum(log, levels, "depth", 1, 2) == 1.0);   // sessions 0 and 1
  CHECK(segment_level_sum(log, levels, "depth", 6, 6) == 1.0);   // session 2 only
  CHECK(segment_level_sum(log, levels, "depth", 0, 12) == 2.0);  // everything
  CHECK(segment_level_sum(log, levels, "frequency", 0, 12) == 1.0);
  // Mixture sums depth and frequency levels outright.
  CHECK(segment_level_sum(log, levels, "mixture", 0, 12) == 3.0);
  CHECK(segment_level_sum(log, levels, "mixture", 2, 4) == 1.0);  // session 1: depth 1 + freq 0
  CHECK_THROWS_AS((void)segment_level_sum(log, levels, "banana", 0, 2), ConfigError);
}

namespace {

RunConfig generation_config() {
  RunConfig c;
  c.state_dim = 16;
  c.action_dim = 4;
  c.hidden_dim = 8;
  c.sim_users = 10;
  c.sim_heldout_users = 3;
  c.sim_sessions = 6;
  c.sim_noise = 0.05;
  c.sim_pref_pairs = 12;
  c.sim_min_requests = 5;
  c.segment_length = 3;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("generate_dataset: reloaded counts match the configuration") {
  const RunConfig c = generation_config();
  const Dataset data = generate_dataset(c);

  CHECK(static_cast<int>(data.prefs.size()) == c.sim_pref_pairs);
  CHECK(static_cast<int>(data.heldout_logs.size()) == c.sim_heldout_users);
  CHECK(data.eligible_users > 1);
  CHECK(data.eligible_users <= c.sim_users);

  // Replay size: every request but each user's last becomes a transition.
  const SimParams params = sim_params_from(c);
  std::size_t want = 0;
  for (int u = 0; u < c.sim_users; ++u) {
    want += behavior_log(params, u, c.sim_sessions).total_requests() - 1;
  }
  CHECK(data.replay.size() == want);

  // Held-out users sit after the training block in index order.
  for (int u = 0; u < c.sim_heldout_users; ++u) {
    CHECK(data.heldout_logs[u].user_id == c.sim_users + u + 1);
  }

  // Labels are well-formed and segments have the configured length.
  for (std::size_t i = 0; i < data.prefs.size(); ++i) {
    const PreferenceRecord& r = data.prefs.at(i);
    CHECK(r.y0 + r.y1 == 1.0);
    CHECK(r.seg0.length() == static_cast<std::size_t>(c.segment_length));
    CHECK(r.seg1.length() == static_cast<std::size_t>(c.segment_length));
  }

  // Level histograms are reported, not asserted beyond being distributions.
  const double depth_mass =
      std::accumulate(data.depth_level_fraction.begin(), data.depth_level_fraction.end(), 0.0);
  const double freq_mass = std::accumulate(data.frequency_level_fraction.begin(),
                                           data.frequency_level_fraction.end(), 0.0);
  CHECK(depth_mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(freq_mass == doctest::Approx(1.0).epsilon(1e-12));

  // Round trip through the file formats preserves the counts.
  const auto dir = std::filesystem::temp_directory_path();
  const auto trn = (dir / "prefrec_gen_trn.txt").string();
  const auto prf = (dir / "prefrec_gen_prf.txt").string();
  save_transitions(trn, data.replay);
  save_preferences(prf, data.prefs);
  CHECK(load_transitions(trn).size() == data.replay.size());
  CHECK(load_preferences(prf).size() == data.prefs.size());
  std::filesystem::remove(trn);
  std::filesystem::remove(prf);
}

TEST_CASE("generate_dataset: determinism across calls") {
  const RunConfig c = generation_config();
  const Dataset a = generate_dataset(c);
  const Dataset b = generate_dataset(c);
  REQUIRE(a.replay.size() == b.replay.size());
  for (std::size_t i = 0; i < a.replay.size(); i += 7) {
    CHECK(a.replay.at(i).state == b.replay.at(i).state);
    CHECK(a.replay.at(i).action == b.replay.at(i).action);
    CHECK(a.replay.at(i).user_id == b.replay.at(i).user_id);
  }
  REQUIRE(a.prefs.size() == b.prefs.size());
  for (std::size_t i = 0; i < a.prefs.size(); ++i) {
    CHECK(a.prefs.at(i).y0 == b.prefs.at(i).y0);
    CHECK(a.prefs.at(i).seg0.steps[0].state == b.prefs.at(i).seg0.steps[0].state);
  }
  REQUIRE(a.heldout_logs.size() == b.heldout_logs.size());
  for (std::size_t i = 0; i < a.heldout_logs.size(); ++i) {
    CHECK(logs_equal(a.heldout_logs[i], b.heldout_logs[i]));
  }
}

TEST_CASE("generate_dataset: zero pairs still writes a valid empty preference file") {
  RunConfig c = generation_config();
  c.sim_pref_pairs = 0;
  const Dataset data = generate_dataset(c);
  CHECK(data.prefs.empty());
  const auto path = (std::filesystem::temp_directory_path() / "prefrec_gen_empty.txt").string();
  save_preferences(path, data.prefs);
  const PreferenceBuffer reloaded = load_preferences(path);
  CHECK(reloaded.empty());
  CHECK(reloaded.segment_length() == c.segment_length);
  std::filesystem::remove(path);
}

TEST_CASE("generate_dataset: infeasible eligibility bar is reported as a config error") {
  RunConfig c = generation_config();
  c.sim_min_requests = 100000;
  CHECK_THROWS_AS((void)generate_dataset(c), ConfigError);
}

TEST_CASE("policy ordering: oracle >= behavior >= adversarial against the logged history") {
  const SimParams params = small_params(0.05, 21);
  const int sessions = 8;
  double oracle_total = 0.0, behavior_total = 0.0, adversarial_total = 0.0;
  for (std::int64_t u = 0; u < 30; ++u) {
    const UserProfile profile = make_user(params, u);
    const SessionLog logged = behavior_log(params, u, sessions);
    const SessionStats baseline = session_stats(logged);

    Rng rng_o = Rng::stream(params.seed, "eval.sim", static_cast<std::uint64_t>(u));
    Rng rng_a = Rng::stream(params.seed, "eval.sim", static_cast<std::uint64_t>(u));
    const SessionLog oracle_run =
        simulate_user(params, profile, aligned_policy(profile, 1.0), sessions, rng_o);
    const SessionLog adversarial_run =
        simulate_user(params, profile, aligned_policy(profile, -1.0), sessions, rng_a);

    oracle_total += cumulative_level_score(oracle_run, "depth", baseline);
    behavior_total += cumulative_level_score(logged, "depth", baseline);
    adversarial_total += cumulative_level_score(adversarial_run, "depth", baseline);
  }
  CHECK(oracle_total >= behavior_total);
  CHECK(behavior_total >= adversarial_total);
  CHECK(oracle_total > adversarial_total);
}

TEST_CASE("session log files: round trip and malformed input") {
  const SimParams params = small_params(0.05, 31);
  std::vector<SessionLog> logs;
  for (std::int64_t u = 0; u < 3; ++u) logs.push_back(behavior_log(params, u, 4));
  const auto path = (std::filesystem::temp_directory_path() / "prefrec_logs.txt").string();
  save_session_logs(path, logs, params.state_dim, params.action_dim);
  int d_s = 0, d_a = 0;
  const std::vector<SessionLog> loaded = load_session_logs(path, &d_s, &d_a);
  CHECK(d_s == params.state_dim);
  CHECK(d_a == params.action_dim);
  REQUIRE(loaded.size() == logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) CHECK(logs_equal(logs[i], loaded[i]));

  {
    std::ofstream f(path, std::ios::trunc);
    f << "PREFREC-LOG v2 d_s=4 d_a=2\n";
  }
  CHECK_THROWS_AS((void)load_session_logs(path), IoError);
  CHECK_THROWS_AS((void)load_session_logs("/nonexistent/logs.txt"), IoError);
  std::filesystem::remove(path);
}
