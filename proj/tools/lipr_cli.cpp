// SPDX-License-Identifier: Apache-2.0
//
// CLI front end; links only the shared-library C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "lipr/lipr_c.h"

namespace {

struct CommonFlags {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  int workers = 1;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--seed", flags.seed, "RNG seed override")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--workers", flags.workers, "concurrent sweep workers")
      ->check(CLI::PositiveNumber);
}

int run_command(const CommonFlags& flags, int (*command)(lipr_run*)) {
  char errbuf[512] = {0};
  lipr_run* run = nullptr;
  int rc = lipr_open(flags.config.c_str(), &run, errbuf, sizeof errbuf);
  if (rc != LIPR_OK) {
    std::fprintf(stderr, "error: %s\n", errbuf);
    return rc;
  }
  lipr_set_out_dir(run, flags.out.c_str());
  lipr_set_workers(run, flags.workers);
  if (flags.seed_set) lipr_set_seed(run, flags.seed);
  rc = command(run);
  if (rc != LIPR_OK) std::fprintf(stderr, "error: %s\n", lipr_last_error(run));
  lipr_close(run);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PINN training and bound-verification toolkit"};
  app.require_subcommand(1);

  CommonFlags train_f, sweep_f, verify_f, grad_f;
  CLI::App* train = app.add_subcommand("train", "train one network");
  CLI::App* sweep = app.add_subcommand("sweep", "run a sample-count ladder");
  CLI::App* verify = app.add_subcommand("verify", "check the generalization bound");
  CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference oracle check");
  add_common(train, train_f);
  add_common(sweep, sweep_f);
  add_common(verify, verify_f);
  add_common(grad, grad_f);

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return run_command(train_f, lipr_train);
  if (sweep->parsed()) return run_command(sweep_f, lipr_sweep);
  if (verify->parsed()) return run_command(verify_f, lipr_verify);
  return run_command(grad_f, lipr_gradcheck);
}
