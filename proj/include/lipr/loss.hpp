// SPDX-License-Identifier: Apache-2.0
//
// Empirical PINN loss, its Lipschitz-regularized variant, and the weight
// schedules (experiment presets and the theoretical lambda-hat laws).

#ifndef LIPR_LOSS_HPP
#define LIPR_LOSS_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lipr/forward.hpp"
#include "lipr/sampling.hpp"

namespace lipr {

struct LossWeights {
  double lambda_r = 1.0;
  std::vector<double> lambda_b;      // one per boundary group
  double lambda_r_reg = 0.0;
  std::vector<double> lambda_b_reg;  // one per boundary group

  void validate(std::size_t n_groups) const;
};

enum class ScheduleKind { constant, poisson_lipr, heat_lipr, theory };

struct ScheduleResult {
  LossWeights weights;
  double C_m = 0.0;  // theory kind only
};

// m_b holds the per-group counts; the theory schedule uses their sum as the
// boundary sample count of the bound.
ScheduleResult holder_schedule(ScheduleKind kind, int m_r,
                               const std::vector<int>& m_b,
                               const DistributionConstants& constants,
                               const LossWeights& base);

struct LossBreakdown {
  double residual_term = 0.0;
  std::vector<double> boundary_terms;
  double reg_residual_term = 0.0;        // lambda_r^R * max_i |grad L[h]|_inf^2
  std::vector<double> reg_boundary_terms;
  int argmax_residual_point = -1;        // global training-set index
  std::vector<int> argmax_boundary_point;
};

struct LossResult {
  double value = 0.0;
  Eigen::VectorXd grad;  // empty when gradient not requested
  LossBreakdown parts;
};

struct LossOptions {
  bool want_grad = true;
  bool regularized = false;  // include the LIPR max terms
  // Mini-batch: residual-point indices to use; all points when absent.
  // Boundary groups always enter in full (their counts are small).
  const std::vector<int>* residual_subset = nullptr;
  int chunk = 256;  // forward/backward block size; affects speed only
};

LossResult evaluate_loss(const Network& net, const PdeProblem& problem,
                         const TrainingSet& ts, const LossWeights& weights,
                         const LossOptions& opts = {});

// Spec-named entry points.
LossResult pinn_loss(const Network& net, const PdeProblem& problem,
                     const TrainingSet& ts, const LossWeights& weights,
                     bool want_grad = true);
LossResult lipr_loss(const Network& net, const PdeProblem& problem,
                     const TrainingSet& ts, const LossWeights& weights,
                     bool want_grad = true);

}  // namespace lipr

#endif  // LIPR_LOSS_HPP
