// SPDX-License-Identifier: Apache-2.0

#include "lipr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lipr/forward.hpp"
#include "lipr/rng.hpp"
#include "lipr/sampling.hpp"

namespace lipr {

namespace {

double trap_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

}  // namespace

ErrorReport discrete_error(const Network& net, const PdeProblem& problem,
                           int nx, int nt) {
  if (nx < 2) throw std::invalid_argument("discrete_error: nx < 2");
  ErrorReport rep;
  rep.grid_nx = nx;
  const int dim = problem.dim();
  const std::vector<double> xs = equidistant(problem.x_lo, problem.x_hi, nx);
  const double hx = (problem.x_hi - problem.x_lo) / (nx - 1);

  if (problem.op.kind == OperatorKind::elliptic_nondivergence) {
    if (dim != 1) throw std::invalid_argument("discrete_error: dim");
    double s0 = 0.0, s1 = 0.0;
    const int chunk = 1024;
    Eigen::MatrixXd pts(1, chunk);
    for (int start = 0; start < nx; start += chunk) {
      const int n = std::min(chunk, nx - start);
      for (int q = 0; q < n; ++q) pts(0, q) = xs[start + q];
      const Eigen::MatrixXd jets = forward_batch(net, pts.leftCols(n));
      const JetLayout& L = jet_layout(1);
      for (int q = 0; q < n; ++q) {
        const double x[1] = {xs[start + q]};
        const Jet3 ex = problem.exact_jet(x);
        const double ev = jets(0, q) - ex.value();
        const double ed = jets(L.idx1(0), q) - ex.d1(0);
        const double w = trap_weight(start + q, nx) * hx;
        s0 += w * ev * ev;
        s1 += w * ed * ed;
      }
    }
    rep.l2 = std::sqrt(s0);
    rep.h1 = std::sqrt(s0 + s1);
    return rep;
  }

  // Parabolic: tensor grid over [x_lo, x_hi] x [0, T].
  if (nt < 2) throw std::invalid_argument("discrete_error: nt < 2");
  rep.grid_nt = nt;
  const std::vector<double> tts = equidistant(0.0, problem.time_horizon, nt);
  const double ht = problem.time_horizon / (nt - 1);
  double s0 = 0.0, s1 = 0.0;
  Eigen::MatrixXd pts(2, nx);
  const JetLayout& L = jet_layout(2);
  for (int it = 0; it < nt; ++it) {
    for (int q = 0; q < nx; ++q) {
      pts(0, q) = xs[q];
      pts(1, q) = tts[it];
    }
    const Eigen::MatrixXd jets = forward_batch(net, pts);
    const double wt = trap_weight(it, nt) * ht;
    for (int q = 0; q < nx; ++q) {
      const double xt[2] = {xs[q], tts[it]};
      const Jet3 ex = problem.exact_jet(xt);
      const double ev = jets(0, q) - ex.value();
      const double ed = jets(L.idx1(0), q) - ex.d1(0);
      const double w = wt * trap_weight(q, nx) * hx;
      s0 += w * ev * ev;
      s1 += w * ed * ed;
    }
  }
  rep.l2_l2 = std::sqrt(s0);
  rep.l2_h1 = std::sqrt(s0 + s1);
  rep.l2 = rep.l2_l2;
  rep.h1 = rep.l2_h1;
  return rep;
}

RateFit fit_rate(const std::vector<double>& m, const std::vector<double>& e) {
  if (m.size() != e.size() || m.size() < 2)
    throw std::invalid_argument("fit_rate: need >= 2 pairs");
  const int n = static_cast<int>(m.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (m[i] <= 0.0 || e[i] <= 0.0)
      throw std::invalid_argument("fit_rate: nonpositive entry");
    lx[i] = std::log(m[i]);
    ly[i] = std::log(e[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  RateFit fit;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_rate: degenerate m");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    fit.residual += r * r;
  }
  return fit;
}

double estimate_holder(const std::vector<double>& x,
                       const std::vector<double>& f, double alpha) {
  if (x.size() != f.size() || x.size() < 2)
    throw std::invalid_argument("estimate_holder: need >= 2 samples");
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("estimate_holder: alpha out of (0, 1]");
  double best = 0.0;
  if (alpha == 1.0) {
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double dx = std::abs(x[i] - x[i - 1]);
      if (dx > 0.0) best = std::max(best, std::abs(f[i] - f[i - 1]) / dx);
    }
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        const double dx = std::abs(x[i] - x[j]);
        if (dx > 0.0) {
          best = std::max(best,
                          std::abs(f[i] - f[j]) / std::pow(dx, alpha));
        }
      }
    }
  }
  return best;
}

BoundReport check_lemma_bound(const Network& net, const PdeProblem& problem,
                              const TrainingSet& ts,
                              const LossWeights& weights,
                              const DistributionConstants& constants,
                              int grid_n) {
  if (problem.dim() != 1 ||
      problem.op.kind != OperatorKind::elliptic_nondivergence)
    throw std::invalid_argument("check_lemma_bound: 1d elliptic only");
  constants.validate();
  weights.validate(ts.boundary.size());
  const double alpha = constants.alpha;
  const int m_r = ts.m_r();
  const int m_b = ts.m_b(0);
  if (grid_n <= 0) grid_n = std::max(1000, 10 * m_r);

  BoundReport rep;

  // Shared probe grid: covering radius and lhs quadrature use the same
  // points, so the covering hypothesis holds on the grid by construction.
  const std::vector<double> grid =
      equidistant(problem.x_lo, problem.x_hi, grid_n);
  const std::vector<double> res_pts(
      ts.residual_points.data(), ts.residual_points.data() + m_r);
  {
    std::vector<double> sorted = res_pts;
    std::sort(sorted.begin(), sorted.end());
    double worst = 0.0;
    for (double gx : grid) {
      auto it = std::lower_bound(sorted.begin(), sorted.end(), gx);
      double d = std::numeric_limits<double>::infinity();
      if (it != sorted.end()) d = std::min(d, *it - gx);
      if (it != sorted.begin()) d = std::min(d, gx - *(it - 1));
      worst = std::max(worst, d);
    }
    rep.eps_r = worst;
  }
  for (double bx : {problem.x_lo, problem.x_hi}) {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_b; ++i)
      d = std::min(d, std::abs(ts.boundary[0].points(0, i) - bx));
    rep.eps_b = std::max(rep.eps_b, d);
  }

  // Network and data quantities along the probe grid.
  const OperatorSpec& op = problem.op;
  double lhs_res = 0.0;
  const double hx = (problem.x_hi - problem.x_lo) / (grid_n - 1);
  const double len = problem.x_hi - problem.x_lo;
  for (int i = 0; i < grid_n; ++i) {
    const double x[1] = {grid[i]};
    const Jet3 hj = evaluate(net, x);
    const Jet3 ej = problem.exact_jet(x);
    const double r = residual(op, hj) - residual(op, ej);
    lhs_res += trap_weight(i, grid_n) * hx * r * r;
    rep.holder_res = std::max(
        rep.holder_res, std::abs(residual_gradient(op, hj)[0]));
    rep.holder_f = std::max(rep.holder_f,
                            std::abs(residual_gradient(op, ej)[0]));
  }
  if (alpha < 1.0) {
    // Pairwise quotient on a thinned grid (the gradient sup above is the
    // alpha = 1 specialization).
    std::vector<double> xs, rs, fs;
    for (int i = 0; i < grid_n; i += std::max(1, grid_n / 500)) {
      const double x[1] = {grid[i]};
      xs.push_back(grid[i]);
      rs.push_back(residual(op, evaluate(net, x)));
      fs.push_back(problem.f(x));
    }
    rep.holder_res = estimate_holder(xs, rs, alpha);
    rep.holder_f = estimate_holder(xs, fs, alpha);
  }

  // Boundary of the interval: two points.
  {
    const double lo[1] = {problem.x_lo}, hi[1] = {problem.x_hi};
    const double dist = std::pow(len, alpha);
    rep.holder_bnd =
        std::abs(evaluate(net, hi).value() - evaluate(net, lo).value()) /
        dist;
    rep.holder_g = std::abs(problem.g(hi) - problem.g(lo)) / dist;
  }

  // Expected loss (lhs): uniform measures on the interval and on the
  // two-point boundary.
  const double lb = weights.lambda_b.empty() ? 0.0 : weights.lambda_b[0];
  double bnd_mean = 0.0;
  {
    const double lo[1] = {problem.x_lo}, hi[1] = {problem.x_hi};
    const double e0 = evaluate(net, lo).value() - problem.g(lo);
    const double e1 = evaluate(net, hi).value() - problem.g(hi);
    bnd_mean = 0.5 * (e0 * e0 + e1 * e1);
  }
  rep.lhs = weights.lambda_r * lhs_res / len + lb * bnd_mean;

  // Empirical loss and the covering constant.
  rep.loss_empirical = pinn_loss(net, problem, ts, weights, false).value;
  rep.C_m = 3.0 * std::max(constants.C_r * m_r * std::pow(rep.eps_r, 1.0),
                           constants.C_b * m_b);  // d = 1: eps_b^(d-1) = 1
  const double er2a = std::pow(rep.eps_r, 2.0 * alpha);
  const double eb2a = rep.eps_b > 0.0 ? std::pow(rep.eps_b, 2.0 * alpha) : 0.0;
  rep.c_prime_term = 3.0 * weights.lambda_r * er2a * rep.holder_f *
                         rep.holder_f +
                     3.0 * lb * eb2a * rep.holder_g * rep.holder_g;
  rep.rhs = rep.C_m * rep.loss_empirical +
            3.0 * weights.lambda_r * er2a * rep.holder_res * rep.holder_res +
            3.0 * lb * eb2a * rep.holder_bnd * rep.holder_bnd +
            rep.c_prime_term;
  rep.slack = rep.rhs - rep.lhs;

  const auto sched = holder_schedule(ScheduleKind::theory, m_r, {m_b},
                                     constants, weights);
  rep.lambda_r_reg_hat = sched.weights.lambda_r_reg;
  rep.lambda_b_reg_hat =
      sched.weights.lambda_b_reg.empty() ? 0.0 : sched.weights.lambda_b_reg[0];
  return rep;
}

SamplingExperiment sampling_probability_experiment(int n, int trials,
                                                   double lo, double hi,
                                                   double c,
                                                   std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sampling experiment: n < 2");
  SamplingExperiment ex;
  ex.n = n;
  ex.trials = trials;
  const double s = 1.0;  // uniform law on an interval: d = 1
  ex.threshold = std::pow(c, -1.0 / s) * std::pow(n, -1.0 / (2.0 * s));
  const double rn = std::sqrt(static_cast<double>(n));
  ex.bound = 1.0 - rn * std::pow(1.0 - 1.0 / rn, n);
  if (trials <= 0) {
    ex.empirical = std::numeric_limits<double>::quiet_NaN();
    return ex;
  }
  Eigen::VectorXd vlo(1), vhi(1);
  vlo << lo;
  vhi << hi;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd pts =
        iid_uniform_box(vlo, vhi, n, seed + static_cast<std::uint64_t>(t));
    std::vector<double> x(pts.data(), pts.data() + n);
    if (covering_radius(x, lo, hi, 2000) <= ex.threshold) ++hits;
  }
  ex.empirical = static_cast<double>(hits) / trials;
  return ex;
}

}  // namespace lipr
