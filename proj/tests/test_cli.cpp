#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "prefrec/buffers/io.hpp"
#include "prefrec/cli/commands.hpp"
#include "prefrec/config.hpp"
#include "prefrec/errors.hpp"
#include "prefrec/nn/checkpoint.hpp"
#include "prefrec/reward/reward_model.hpp"
#include "prefrec/sim/generate.hpp"

using namespace prefrec;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"prefrec"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("prefrec_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

RunConfig tiny_config() {
  RunConfig c;
  c.algo = "prefrec";
  c.task = "depth";
  c.seed = 5;
  c.state_dim = 10;
  c.action_dim = 3;
  c.hidden_dim = 16;
  c.hidden_layers = 1;
  c.actor_lr = 1e-3;
  c.critic_lr = 1e-3;
  c.reward_lr = 1e-3;
  c.batch_size = 16;
  c.preference_batch_size = 8;
  c.target_retention = 0.9;
  c.segment_length = 3;
  c.pretrain_epochs = 1;
  c.train_epochs = 2;
  c.iters_per_epoch = 4;
  c.eval_users = 2;
  c.sim_users = 12;
  c.sim_heldout_users = 4;
  c.sim_sessions = 6;
  c.sim_pref_pairs = 20;
  c.sim_min_requests = 3;
  return c;
}

std::string write_config(const RunConfig& config, const std::string& name) {
  const std::string path =
      (fs::temp_directory_path() / ("prefrec_cli_" + name + ".cfg")).string();
  std::ofstream out(path, std::ios::trunc);
  out << serialize_config(config);
  return path;
}

bool nets_equal(const nn::NetworkParams& a, const nn::NetworkParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].w != b.layers[i].w || a.layers[i].b != b.layers[i].b) return false;
  }
  return true;
}

// One shared dataset for the commands that need generated files.
const std::string& shared_dataset() {
  static const std::string dir = [] {
    const std::string d = fresh_dir("dataset");
    const std::string cfg = write_config(tiny_config(), "dataset");
    REQUIRE(run({"generate", "--config", cfg, "--out", d}) == 0);
    return d;
  }();
  return dir;
}

RunConfig tiny_config_with_data() {
  RunConfig c = tiny_config();
  c.dataset_dir = shared_dataset();
  return c;
}

}  // namespace

TEST_CASE("config files: round trip, comments, and rejection of unknown keys") {
  const RunConfig c = tiny_config();
  const std::string path = write_config(c, "roundtrip");
  const RunConfig reloaded = load_config(path);
  CHECK(serialize_config(reloaded) == serialize_config(c));

  const std::string commented =
      (fs::temp_directory_path() / "prefrec_cli_commented.cfg").string();
  {
    std::ofstream out(commented, std::ios::trunc);
    out << "# a comment line\n\nalgo = il\nbatch_size = 64\n";
  }
  const RunConfig partial = load_config(commented);
  CHECK(partial.algo == "il");
  CHECK(partial.batch_size == 64);
  CHECK(partial.seed == RunConfig{}.seed);

  RunConfig scratch;
  CHECK_THROWS_AS(apply_config_line(scratch, "bogus_key = 3", "test"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(scratch, "no equals sign", "test"), ConfigError);
  CHECK_THROWS_AS(apply_config_line(scratch, "batch_size = banana", "test"), ConfigError);
  CHECK_THROWS_AS((void)load_config("/nonexistent/prefrec.cfg"), IoError);
}

TEST_CASE("cli: help, missing arguments, and unknown values exit with usage codes") {
  CHECK(run({"--help"}) == 0);
  CHECK(run({}) == 2);
  CHECK(run({"train"}) == 2);                       // --out is required
  CHECK(run({"frobnicate", "--out", "/tmp/x"}) == 2);
  CHECK(run({"eval", "--out", "/tmp/x"}) == 2);     // --checkpoint is required

  const std::string cfg = write_config(tiny_config(), "badalgo");
  CHECK(run({"train", "--config", cfg, "--out", fresh_dir("badalgo"), "--algo", "sac"}) == 2);
  CHECK(run({"train", "--config", cfg, "--out", fresh_dir("badtask"), "--task", "banana"}) == 2);

  const std::string badkey = (fs::temp_directory_path() / "prefrec_cli_badkey.cfg").string();
  {
    std::ofstream out(badkey, std::ios::trunc);
    out << "not_a_real_key = 1\n";
  }
  CHECK(run({"generate", "--config", badkey, "--out", fresh_dir("badkey")}) == 2);
}

TEST_CASE("cli: PREFREC_THREADS is validated and recorded") {
  const std::string cfg = write_config(tiny_config(), "threads");
  setenv("PREFREC_THREADS", "zippy", 1);
  CHECK(run({"generate", "--config", cfg, "--out", fresh_dir("threads_bad")}) == 2);
  setenv("PREFREC_THREADS", "0", 1);
  CHECK(run({"generate", "--config", cfg, "--out", fresh_dir("threads_zero")}) == 2);
  setenv("PREFREC_THREADS", "2", 1);
  const std::string dir = fresh_dir("threads_ok");
  CHECK(run({"generate", "--config", cfg, "--out", dir}) == 0);
  CHECK(read_file(dir + "/run_info.txt").find("threads 2") != std::string::npos);
  unsetenv("PREFREC_THREADS");
}

TEST_CASE("generate: stamps and writes a complete, reloadable dataset directory") {
  const std::string dir = shared_dataset();
  for (const char* f : {"/config.cfg", "/run_info.txt", "/transitions.txt",
                        "/preferences.txt", "/heldout_logs.txt", "/levels.csv"}) {
    CAPTURE(f);
    CHECK(fs::exists(dir + f));
  }
  const RunConfig c = tiny_config();
  CHECK(read_file(dir + "/config.cfg") == serialize_config(c));
  const std::string info = read_file(dir + "/run_info.txt");
  CHECK(info.find("seed 5") != std::string::npos);
  CHECK(info.find("build_id ") != std::string::npos);

  CHECK(load_transitions(dir + "/transitions.txt").size() > 0);
  CHECK(load_preferences(dir + "/preferences.txt").size() == 20);
  CHECK(load_session_logs(dir + "/heldout_logs.txt").size() == 4);

  const std::vector<std::string> levels = read_lines(dir + "/levels.csv");
  REQUIRE(levels.size() >= 2);
  CHECK(levels[0].find("level") != std::string::npos);
}

TEST_CASE("generate: deterministic bytes, seed override, empty pair set") {
  const std::string cfg = write_config(tiny_config(), "gen2");
  const std::string dir = fresh_dir("gen2");
  REQUIRE(run({"generate", "--config", cfg, "--out", dir}) == 0);
  CHECK(read_file(dir + "/transitions.txt") == read_file(shared_dataset() + "/transitions.txt"));
  CHECK(read_file(dir + "/preferences.txt") == read_file(shared_dataset() + "/preferences.txt"));
  CHECK(read_file(dir + "/heldout_logs.txt") ==
        read_file(shared_dataset() + "/heldout_logs.txt"));

  const std::string reseeded = fresh_dir("gen_reseeded");
  REQUIRE(run({"generate", "--config", cfg, "--out", reseeded, "--seed", "123"}) == 0);
  CHECK(read_file(reseeded + "/run_info.txt").find("seed 123") != std::string::npos);
  CHECK(read_file(reseeded + "/transitions.txt") != read_file(dir + "/transitions.txt"));

  RunConfig no_pairs = tiny_config();
  no_pairs.sim_pref_pairs = 0;
  const std::string np_cfg = write_config(no_pairs, "gen_nopairs");
  const std::string np_dir = fresh_dir("gen_nopairs");
  REQUIRE(run({"generate", "--config", np_cfg, "--out", np_dir}) == 0);
  CHECK(load_preferences(np_dir + "/preferences.txt").empty());
}

TEST_CASE("pretrain: trace file, checkpoint, and the zero-epoch identity") {
  const RunConfig base = tiny_config_with_data();

  SUBCASE("one epoch writes a finite loss and a bounded accuracy") {
    const std::string cfg = write_config(base, "pre1");
    const std::string dir = fresh_dir("pre1");
    REQUIRE(run({"pretrain", "--config", cfg, "--out", dir}) == 0);
    CHECK(fs::exists(dir + "/reward.ckpt"));
    const std::vector<std::string> lines = read_lines(dir + "/pretrain.csv");
    REQUIRE(lines.size() == 2);  // header + one epoch
    CHECK(lines[0] == "epoch,loss,accuracy");
    std::istringstream row(lines[1]);
    std::string epoch, loss, acc;
    std::getline(row, epoch, ',');
    std::getline(row, loss, ',');
    std::getline(row, acc, ',');
    CHECK(epoch == "1");
    CHECK(std::stod(loss) > 0.0);
    CHECK(std::stod(loss) < 10.0);
    if (!acc.empty()) {
      CHECK(std::stod(acc) >= 0.0);
      CHECK(std::stod(acc) <= 1.0);
    }
  }

  SUBCASE("zero epochs checkpoints the untouched initial model") {
    RunConfig c = base;
    c.pretrain_epochs = 0;
    const std::string cfg = write_config(c, "pre0");
    const std::string dir = fresh_dir("pre0");
    REQUIRE(run({"pretrain", "--config", cfg, "--out", dir}) == 0);
    CHECK(read_lines(dir + "/pretrain.csv") == std::vector<std::string>{"epoch,loss,accuracy"});

    Rng rng = Rng::stream(c.seed, "init.reward");
    const RewardModel fresh = make_reward_model(c.state_dim, c.action_dim, c.hidden_dim,
                                                c.hidden_layers, c.reward_lr, rng);
    nn::NetworkParams psi = fresh.psi;
    nn::unpack_network("reward", nn::load_checkpoint(dir + "/reward.ckpt"), psi);
    CHECK(nets_equal(psi, fresh.psi));
  }

  SUBCASE("missing or empty preference data is a config error") {
    RunConfig c = base;
    c.dataset_dir = "";
    CHECK(run({"pretrain", "--config", write_config(c, "pre_nodata"), "--out",
               fresh_dir("pre_nodata")}) == 2);

    RunConfig empty_pairs = tiny_config();
    empty_pairs.sim_pref_pairs = 0;
    const std::string data_dir = fresh_dir("pre_empty_data");
    REQUIRE(run({"generate", "--config", write_config(empty_pairs, "pre_empty_gen"), "--out",
                 data_dir}) == 0);
    empty_pairs.dataset_dir = data_dir;
    CHECK(run({"pretrain", "--config", write_config(empty_pairs, "pre_empty"), "--out",
               fresh_dir("pre_empty")}) == 2);
  }
}

TEST_CASE("train: run directory contents and metrics cadence") {
  const RunConfig c = tiny_config_with_data();
  const std::string cfg = write_config(c, "train1");
  const std::string dir = fresh_dir("train1");
  REQUIRE(run({"train", "--config", cfg, "--out", dir}) == 0);

  for (const char* f : {"/config.cfg", "/run_info.txt", "/metrics.csv", "/curve.csv",
                        "/final.ckpt", "/checkpoints/epoch_1.ckpt", "/checkpoints/epoch_2.ckpt"}) {
    CAPTURE(f);
    CHECK(fs::exists(dir + f));
  }
  CHECK(read_file(dir + "/config.cfg") == serialize_config(c));

  const std::vector<std::string> metrics = read_lines(dir + "/metrics.csv");
  REQUIRE(metrics.size() == 4);  // header + step 0 + one row per epoch
  CHECK(metrics[0] == "epoch,step,v_loss,q_loss,policy_loss,reward_loss,eval_score");
  CHECK(metrics[1].rfind("0,0,", 0) == 0);
  CHECK(metrics[2].rfind("1,4,", 0) == 0);
  CHECK(metrics[3].rfind("2,8,", 0) == 0);

  const std::vector<std::string> curve = read_lines(dir + "/curve.csv");
  REQUIRE(curve.size() == 4);  // header + the three evaluated snapshots
  CHECK(curve[1].rfind("0,", 0) == 0);
  CHECK(curve[2].rfind("4,", 0) == 0);
  CHECK(curve[3].rfind("8,", 0) == 0);
}

TEST_CASE("train: identical seeds give identical artifacts, resume included") {
  const RunConfig c = tiny_config_with_data();
  const std::string cfg = write_config(c, "train_det");
  const std::string a = fresh_dir("train_det_a");
  const std::string b = fresh_dir("train_det_b");
  REQUIRE(run({"train", "--config", cfg, "--out", a}) == 0);
  REQUIRE(run({"train", "--config", cfg, "--out", b}) == 0);
  CHECK(read_file(a + "/metrics.csv") == read_file(b + "/metrics.csv"));
  CHECK(read_file(a + "/final.ckpt") == read_file(b + "/final.ckpt"));
  CHECK(read_file(a + "/curve.csv") == read_file(b + "/curve.csv"));

  RunConfig first_half = c;
  first_half.train_epochs = 1;
  const std::string half_dir = fresh_dir("train_det_half");
  REQUIRE(run({"train", "--config", write_config(first_half, "train_det_half"), "--out",
               half_dir}) == 0);
  const std::string resumed = fresh_dir("train_det_resumed");
  REQUIRE(run({"train", "--config", cfg, "--out", resumed, "--resume",
               half_dir + "/checkpoints/epoch_1.ckpt"}) == 0);
  CHECK(read_file(resumed + "/final.ckpt") == read_file(a + "/final.ckpt"));

  CHECK(run({"train", "--config", cfg, "--out", fresh_dir("train_det_badresume"), "--resume",
             half_dir + "/missing.ckpt"}) == 2);
}

TEST_CASE("train: baselines run through the same surface") {
  for (const std::string algo : {"ddpg", "il", "iql"}) {
    CAPTURE(algo);
    RunConfig c = tiny_config_with_data();
    c.algo = algo;
    c.train_epochs = 1;
    const std::string dir = fresh_dir("train_" + algo);
    REQUIRE(run({"train", "--config", write_config(c, "train_" + algo), "--out", dir}) == 0);
    CHECK(fs::exists(dir + "/final.ckpt"));
    CHECK(read_lines(dir + "/metrics.csv").size() == 3);  // header + steps 0 and 4
  }
}

TEST_CASE("train: runaway learning rate surfaces as a numerical failure") {
  RunConfig c = tiny_config_with_data();
  c.algo = "il";
  c.actor_lr = 1e38;
  c.train_epochs = 2;
  const std::string dir = fresh_dir("train_blowup");
  CHECK(run({"train", "--config", write_config(c, "train_blowup"), "--out", dir}) == 3);
}

TEST_CASE("eval: scores a checkpoint and reproduces itself") {
  const RunConfig c = tiny_config_with_data();
  const std::string train_dir = fresh_dir("eval_train");
  REQUIRE(run({"train", "--config", write_config(c, "eval_train"), "--out", train_dir}) == 0);

  const std::string cfg = write_config(c, "eval_run");
  const std::string dir = fresh_dir("eval_run");
  REQUIRE(run({"eval", "--config", cfg, "--out", dir, "--checkpoint",
               train_dir + "/final.ckpt"}) == 0);
  const std::vector<std::string> lines = read_lines(dir + "/eval.csv");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "algo,task,seed,score,ci95,users_scored,users_skipped");
  CHECK(lines[1].rfind("prefrec,depth,5,", 0) == 0);

  // The library-level call returns the same report the CSV row was built from.
  const EvalReport direct = cli::cmd_eval(c, train_dir + "/final.ckpt", fresh_dir("eval_dup"));
  std::istringstream row(lines[1]);
  std::string field;
  for (int i = 0; i < 3; ++i) std::getline(row, field, ',');
  std::getline(row, field, ',');
  CHECK(std::stod(field) == doctest::Approx(direct.score).epsilon(1e-12));
  CHECK(direct.score >= 0.0);
  CHECK(direct.score <= 5.0);

  CHECK(run({"eval", "--config", cfg, "--out", fresh_dir("eval_missing"), "--checkpoint",
             train_dir + "/nope.ckpt"}) == 2);
}

TEST_CASE("ablate: the tau sweep and the schedule grid share one surface") {
  RunConfig c = tiny_config_with_data();
  c.train_epochs = 1;
  const std::string cfg = write_config(c, "ablate");
  const std::string dir = fresh_dir("ablate");
  REQUIRE(run({"ablate", "--config", cfg, "--out", dir}) == 0);

  const std::vector<std::string> cells = {"tau_0.5",     "tau_0.6",      "tau_0.7",
                                          "tau_0.8",     "pre_on_fine_on", "pre_on_fine_off",
                                          "pre_off_fine_on", "pre_off_fine_off"};
  for (const std::string& cell : cells) {
    CAPTURE(cell);
    CHECK(fs::exists(dir + "/" + cell + "/final.ckpt"));
    CHECK(fs::exists(dir + "/" + cell + "/metrics.csv"));
    CHECK(fs::exists(dir + "/" + cell + "/config.cfg"));
  }
  for (const char* tau : {"0.5", "0.6", "0.7", "0.8"}) {
    const std::string snapshot = read_file(dir + "/tau_" + tau + "/config.cfg");
    CHECK(snapshot.find(std::string("tau = ") + tau) != std::string::npos);
  }
  CHECK(read_file(dir + "/pre_off_fine_on/config.cfg").find("no_pretrain = true") !=
        std::string::npos);
  CHECK(read_file(dir + "/pre_on_fine_off/config.cfg").find("no_finetune = true") !=
        std::string::npos);
  CHECK(read_file(dir + "/pre_on_fine_on/config.cfg").find("no_pretrain = false") !=
        std::string::npos);

  RunConfig il = c;
  il.algo = "il";
  CHECK(run({"ablate", "--config", write_config(il, "ablate_il"), "--out",
             fresh_dir("ablate_il")}) == 2);
}
