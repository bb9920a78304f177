// SPDX-License-Identifier: Apache-2.0
//
// Command implementations behind the CLI: training runs, ladder sweeps,
// bound verification, and gradient checking. All artifact writers.

#ifndef LIPR_RUN_HPP
#define LIPR_RUN_HPP

#include <string>
#include <vector>

#include "lipr/config.hpp"

namespace lipr {

// Error codes shared with the C API.
enum RunCode {
  kRunOk = 0,
  kRunConfigError = 1,
  kRunIoError = 2,
  kRunNumericError = 3,
  kRunCheckFailed = 4,
};

struct RunOutcome {
  int code = kRunOk;
  std::string message;
};

// One sweep/train data row; metric fields are NaN when the run failed.
struct RunRow {
  int m_r = 0;
  int m_b1 = 0, m_b2 = 0, m_b3 = 0;
  std::uint64_t seed = 0;
  double loss_final = 0.0;
  double l2 = 0.0, h1 = 0.0;
  double l2_l2 = 0.0, l2_h1 = 0.0;  // parabolic only; NaN otherwise
  long long wall_ms = 0;
  bool ok = true;
};

// Fixed schema: m_r, m_b1, m_b2, m_b3, seed, loss_final, l2, h1, l2_l2,
// l2_h1, wall_ms, status. NaN metrics serialize as empty fields.
std::string csv_header();
std::string csv_row(const RunRow& row);
std::vector<RunRow> read_csv(const std::string& path);

RunOutcome cmd_train(const RunConfig& cfg);
RunOutcome cmd_sweep(const RunConfig& cfg);
RunOutcome cmd_verify(const RunConfig& cfg);
RunOutcome cmd_gradcheck(const RunConfig& cfg);

}  // namespace lipr

#endif  // LIPR_RUN_HPP
