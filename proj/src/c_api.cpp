// SPDX-License-Identifier: Apache-2.0

#include "lipr/lipr_c.h"

#include <cstring>
#include <string>

#include "lipr/run.hpp"

struct lipr_run {
  lipr::RunConfig cfg;
  std::string last_error;
};

namespace {

int finish(lipr_run* run, const lipr::RunOutcome& outcome) {
  run->last_error = outcome.code == lipr::kRunOk ? "" : outcome.message;
  return outcome.code;
}

}  // namespace

extern "C" {

int lipr_open(const char* config_path, lipr_run** out, char* errbuf,
              int errlen) {
  auto report = [&](const std::string& msg) {
    if (errbuf && errlen > 0) {
      std::strncpy(errbuf, msg.c_str(), static_cast<std::size_t>(errlen) - 1);
      errbuf[errlen - 1] = '\0';
    }
  };
  if (!config_path || !out) {
    report("null argument");
    return LIPR_ERR_ARGUMENT;
  }
  *out = nullptr;
  try {
    auto run = new lipr_run;
    run->cfg = lipr::load_config(config_path);
    *out = run;
    return LIPR_OK;
  } catch (const std::exception& e) {
    report(e.what());
    return LIPR_ERR_CONFIG;
  }
}

void lipr_close(lipr_run* run) { delete run; }

int lipr_set_seed(lipr_run* run, uint64_t seed) {
  if (!run) return LIPR_ERR_ARGUMENT;
  run->cfg.seed = seed;
  return LIPR_OK;
}

int lipr_set_out_dir(lipr_run* run, const char* dir) {
  if (!run || !dir) return LIPR_ERR_ARGUMENT;
  run->cfg.out_dir = dir;
  return LIPR_OK;
}

int lipr_set_workers(lipr_run* run, int workers) {
  if (!run || workers < 1) return LIPR_ERR_ARGUMENT;
  run->cfg.workers = workers;
  return LIPR_OK;
}

int lipr_train(lipr_run* run) {
  if (!run) return LIPR_ERR_ARGUMENT;
  return finish(run, lipr::cmd_train(run->cfg));
}

int lipr_sweep(lipr_run* run) {
  if (!run) return LIPR_ERR_ARGUMENT;
  return finish(run, lipr::cmd_sweep(run->cfg));
}

int lipr_verify(lipr_run* run) {
  if (!run) return LIPR_ERR_ARGUMENT;
  return finish(run, lipr::cmd_verify(run->cfg));
}

int lipr_gradcheck(lipr_run* run) {
  if (!run) return LIPR_ERR_ARGUMENT;
  return finish(run, lipr::cmd_gradcheck(run->cfg));
}

const char* lipr_last_error(const lipr_run* run) {
  return run ? run->last_error.c_str() : "null handle";
}

}  // extern "C"
