// SPDX-License-Identifier: Apache-2.0
//
// Error metrics (discrete L2/H1 and Bochner norms), convergence-rate
// fitting, Holder constant estimation, and the bound-verification
// harnesses.

#ifndef LIPR_ANALYSIS_HPP
#define LIPR_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "lipr/loss.hpp"

namespace lipr {

struct ErrorReport {
  double l2 = 0.0;
  double h1 = 0.0;
  // Parabolic Bochner values: L2(0,T;L2) and L2(0,T;H1), spatial gradient
  // only. Zero for elliptic problems.
  double l2_l2 = 0.0;
  double l2_h1 = 0.0;
  int grid_nx = 0;
  int grid_nt = 0;
};

// Composite-trapezoid errors of the network against the problem's exact
// solution; nx (and nt for space-time) are point counts per axis.
ErrorReport discrete_error(const Network& net, const PdeProblem& problem,
                           int nx = 10000, int nt = 200);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;   // in log space
  double residual = 0.0;    // sum of squared log residuals
};

// Least squares on (log m, log e); throws on fewer than two pairs or
// nonpositive entries.
RateFit fit_rate(const std::vector<double>& m, const std::vector<double>& e);

// Holder coefficient estimate from samples f(x) on a 1D grid. alpha = 1
// uses adjacent difference quotients (gradient sup on a convex domain);
// alpha < 1 takes the max pairwise quotient.
double estimate_holder(const std::vector<double>& x,
                       const std::vector<double>& f, double alpha);

struct BoundReport {
  double C_m = 0.0;
  double lambda_r_reg_hat = 0.0;
  double lambda_b_reg_hat = 0.0;
  double eps_r = 0.0;
  double eps_b = 0.0;
  double holder_res = 0.0;  // [L[h]]_alpha on the probe grid
  double holder_bnd = 0.0;  // [B[h]]_alpha on the boundary
  double holder_f = 0.0;
  double holder_g = 0.0;
  double loss_empirical = 0.0;
  double lhs = 0.0;         // quadrature expected PINN loss
  double rhs = 0.0;
  double slack = 0.0;       // rhs - lhs; nonnegative up to quadrature error
  double c_prime_term = 0.0;  // the additive data-constant part of rhs
};

// Verifies the covering-based generalization inequality for a trained (or
// arbitrary) network on a 1D elliptic problem. The covering radii and the
// lhs quadrature share one probe grid, so the covering hypothesis holds on
// that grid by construction. grid_n = 0 picks 10x the training count.
BoundReport check_lemma_bound(const Network& net, const PdeProblem& problem,
                              const TrainingSet& ts,
                              const LossWeights& weights,
                              const DistributionConstants& constants,
                              int grid_n = 0);

struct SamplingExperiment {
  int n = 0;
  int trials = 0;
  double threshold = 0.0;   // sqrt(d) c^(-1/s) n^(-1/(2s))
  double bound = 0.0;       // 1 - sqrt(n)(1 - 1/sqrt(n))^n
  double empirical = 0.0;   // NaN when trials = 0
};

// Covering-radius coverage experiment for iid uniform samples on [lo, hi].
SamplingExperiment sampling_probability_experiment(int n, int trials,
                                                   double lo, double hi,
                                                   double c,
                                                   std::uint64_t seed = 0);

}  // namespace lipr

#endif  // LIPR_ANALYSIS_HPP
