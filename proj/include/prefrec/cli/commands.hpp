#pragma once

#include <string>

#include "prefrec/config.hpp"
#include "prefrec/eval/eval.hpp"

namespace prefrec::cli {

/// Git-describe string baked in at compile time.
std::string build_id();

/// Worker cap from PREFREC_THREADS (default 1). Throws ConfigError on a
/// value that is not a positive integer.
int worker_cap();

/// Each command validates its config, creates the output directory, and
/// stamps it with the resolved config snapshot plus build/seed info, so a
/// run directory alone is enough to reproduce the run.
void cmd_generate(const RunConfig& config, const std::string& out_dir);
void cmd_pretrain(const RunConfig& config, const std::string& out_dir);
void cmd_train(const RunConfig& config, const std::string& out_dir,
               const std::string& resume_checkpoint = "");
EvalReport cmd_eval(const RunConfig& config, const std::string& checkpoint_path,
                    const std::string& out_dir);
void cmd_ablate(const RunConfig& config, const std::string& out_dir);

/// Full argument parse and dispatch; returns the process exit code
/// (0 success, 2 config error, 3 numerical failure).
int run_cli(int argc, const char* const* argv);

}  // namespace prefrec::cli
