// SPDX-License-Identifier: Apache-2.0
//
// Adam and L-BFGS (two-loop recursion, strong Wolfe line search) and the
// consecutive Adam -> L-BFGS training pipeline.

#ifndef LIPR_OPTIM_HPP
#define LIPR_OPTIM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lipr/loss.hpp"

namespace lipr {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  int step = 0;
  Eigen::VectorXd m, v;

  AdamState(Eigen::Index n, const AdamConfig& c = {})
      : cfg(c), m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

// Bias-corrected update in place. Throws std::runtime_error on a non-finite
// gradient entry.
void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grad);

struct LbfgsConfig {
  int history = 10;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 25;
  int max_iters = 2000;
  double grad_tol = 1e-9;  // on the max norm
};

struct LbfgsReport {
  int iterations = 0;
  double final_value = 0.0;
  double grad_inf_norm = 0.0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<double> values;  // accepted loss sequence
};

// Oracle fills grad and returns the value; it must be deterministic.
using LossOracle =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Minimizes in place; on line-search failure returns the best iterate seen.
LbfgsReport lbfgs_minimize(const LossOracle& oracle, Eigen::VectorXd& params,
                           const LbfgsConfig& cfg = {});

struct TrainPlan {
  int adam_epochs = 0;
  int batch_size = 0;  // 0 = full batch
  int lbfgs_max_iters = 0;
  double grad_tol = 1e-9;
  std::uint64_t seed = 0;
  AdamConfig adam;
  // Optional plateau stop for the Adam phase (epochs are a maximum): stop
  // when the best epoch loss has not improved by rel_improvement within
  // `patience` epochs. patience = 0 disables.
  int adam_patience = 0;
  double adam_rel_improvement = 1e-4;
};

struct HistoryRow {
  std::string phase;  // "adam" | "lbfgs"
  int step;
  double loss;
};

struct TrainResult {
  Network net;
  std::vector<HistoryRow> history;
  double final_loss = 0.0;  // full-batch loss of the returned network
  bool aborted_nan = false;
  LbfgsReport lbfgs;
};

TrainResult train(const Network& init, const PdeProblem& problem,
                  const TrainingSet& ts, const LossWeights& weights,
                  bool regularized, const TrainPlan& plan);

}  // namespace lipr

#endif  // LIPR_OPTIM_HPP
