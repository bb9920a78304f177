// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: a sectioned key-value file ([problem], [network],
// [train], [loss], [sweep], [verify]). Unknown sections or keys are
// errors.

#ifndef LIPR_CONFIG_HPP
#define LIPR_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace lipr {

struct RunConfig {
  // [problem]
  std::string problem_kind = "poisson";  // poisson | heat
  std::string exact = "tanh(x)";
  double nu = 1.0;
  double time_horizon = 1.0;
  double x_lo = -1.0;
  double x_hi = 1.0;

  // [network]
  std::vector<int> widths = {1, 50, 50, 1};
  bool residual = false;
  std::string wrapper = "none";  // none | dirichlet_zero

  // [train]
  int adam_epochs = 1000;
  int batch_size = 0;  // 0 = full batch
  int lbfgs_iters = 200;
  double adam_lr = 1e-3;
  int adam_patience = 0;
  double adam_rel_improvement = 1e-4;
  std::string generator = "equidistant";  // equidistant | uniform
  int m_r = 100;
  int m_b1 = 2;
  int eval_nx = 10000;
  int eval_nt = 200;

  // [loss]
  std::string schedule = "constant";  // constant|poisson_lipr|heat_lipr|theory
  double lambda_r = 1.0;
  double lambda_b = 1.0;
  double lambda_r_reg = 0.0;
  double lambda_b_reg = 0.0;
  double alpha = 1.0;
  double c_r = 0.5, C_r = 1.0;
  double c_b = 1.0, C_b = 1.0;

  // [sweep]
  std::vector<int> ladder;  // m_r values (poisson) or m_b1 values (heat)
  int repeats = 3;

  // [verify]
  int verify_nets = 20;
  int verify_n = 100;
  int verify_trials = 2000;
  double verify_lo = 0.0;
  double verify_hi = 1.0;
  double verify_c = 1.0;
  int verify_grid = 0;  // 0 = automatic

  // command-line overrides, not file keys
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int workers = 1;

  bool regularized() const {
    return schedule != "constant" || lambda_r_reg > 0.0 || lambda_b_reg > 0.0;
  }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Parses the sectioned key-value format; '#' and ';' start comments.
// Throws std::invalid_argument with file/line context on unknown keys or
// malformed values.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

}  // namespace lipr

#endif  // LIPR_CONFIG_HPP
