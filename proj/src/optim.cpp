// SPDX-License-Identifier: Apache-2.0

#include "lipr/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lipr/rng.hpp"

namespace lipr {

void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grad) {
  if (!grad.allFinite()) {
    throw std::runtime_error("adam_step: non-finite gradient");
  }
  const AdamConfig& c = state.cfg;
  ++state.step;
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * grad;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(c.beta1, state.step);
  const double bc2 = 1.0 - std::pow(c.beta2, state.step);
  params.array() -= c.lr * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + c.eps);
}

namespace {

struct CurvaturePair {
  Eigen::VectorXd s, y;
  double rho;
};

// Cubic interpolation minimizer for the bracket [a, b] given values and
// directional derivatives at both ends; falls back to bisection when the
// interpolant is ill-conditioned or lands outside the safeguard interval.
double interp_cubic(double a, double fa, double ga, double b, double fb,
                    double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  if (disc >= 0.0) {
    const double d2 = std::sqrt(disc) * (b > a ? 1.0 : -1.0);
    const double denom = gb - ga + 2.0 * d2;
    if (denom != 0.0) {
      double t = b - (b - a) * (gb + d2 - d1) / denom;
      const double lo = std::min(a, b), hi = std::max(a, b);
      const double margin = 0.1 * (hi - lo);
      if (std::isfinite(t) && t > lo + margin && t < hi - margin) return t;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

LbfgsReport lbfgs_minimize(const LossOracle& oracle, Eigen::VectorXd& params,
                           const LbfgsConfig& cfg) {
  LbfgsReport rep;
  const Eigen::Index n = params.size();
  Eigen::VectorXd x = params;
  Eigen::VectorXd g(n), g_trial(n);
  double f = oracle(x, g);
  rep.values.push_back(f);

  Eigen::VectorXd best_x = x;
  double best_f = f;

  std::deque<CurvaturePair> pairs;
  Eigen::VectorXd d(n), x_trial(n);
  std::vector<double> alpha_coef;

  auto phi_eval = [&](double alpha, double& gd) {
    x_trial = x + alpha * d;
    const double val = oracle(x_trial, g_trial);
    gd = g_trial.dot(d);
    return val;
  };

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    rep.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
    if (rep.grad_inf_norm <= cfg.grad_tol) {
      rep.converged = true;
      break;
    }

    // Two-loop recursion with gamma scaling of the seed Hessian.
    d = -g;
    alpha_coef.assign(pairs.size(), 0.0);
    for (std::size_t i = pairs.size(); i-- > 0;) {
      alpha_coef[i] = pairs[i].rho * pairs[i].s.dot(d);
      d -= alpha_coef[i] * pairs[i].y;
    }
    if (!pairs.empty()) {
      const CurvaturePair& last = pairs.back();
      d *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double beta = pairs[i].rho * pairs[i].y.dot(d);
      d += (alpha_coef[i] - beta) * pairs[i].s;
    }
    double gd0 = g.dot(d);
    if (!(gd0 < 0.0)) {  // not a descent direction: restart from steepest
      pairs.clear();
      d = -g;
      gd0 = -g.squaredNorm();
    }

    // Strong Wolfe line search (bracket then zoom). A unit step is only a
    // good guess once curvature pairs exist; on cold starts scale by the
    // gradient so the first probe stays in a sane range.
    const double f0 = f;
    double a_prev = 0.0, f_prev = f0, g_prev = gd0;
    double alpha = pairs.empty() ? std::min(1.0, 1.0 / d.norm()) : 1.0;
    double a_lo = 0.0, f_lo = 0.0, g_lo = 0.0;
    double a_hi = 0.0, f_hi = 0.0, g_hi = 0.0;
    bool bracketed = false, accepted = false;
    double fa = 0.0, ga = 0.0;
    int trials = 0;

    while (trials < cfg.max_line_search) {
      ++trials;
      fa = phi_eval(alpha, ga);
      if (fa > f0 + cfg.c1 * alpha * gd0 || (trials > 1 && fa >= f_prev)) {
        a_lo = a_prev; f_lo = f_prev; g_lo = g_prev;
        a_hi = alpha; f_hi = fa; g_hi = ga;
        bracketed = true;
        break;
      }
      if (std::abs(ga) <= -cfg.c2 * gd0) {
        accepted = true;
        break;
      }
      if (ga >= 0.0) {
        a_lo = alpha; f_lo = fa; g_lo = ga;
        a_hi = a_prev; f_hi = f_prev; g_hi = g_prev;
        bracketed = true;
        break;
      }
      a_prev = alpha; f_prev = fa; g_prev = ga;
      alpha *= 2.0;
    }
    while (bracketed && !accepted && trials < cfg.max_line_search) {
      ++trials;
      alpha = interp_cubic(a_lo, f_lo, g_lo, a_hi, f_hi, g_hi);
      fa = phi_eval(alpha, ga);
      if (fa > f0 + cfg.c1 * alpha * gd0 || fa >= f_lo) {
        a_hi = alpha; f_hi = fa; g_hi = ga;
      } else {
        if (std::abs(ga) <= -cfg.c2 * gd0) {
          accepted = true;
          break;
        }
        if (ga * (a_hi - a_lo) >= 0.0) {
          a_hi = a_lo; f_hi = f_lo; g_hi = g_lo;
        }
        a_lo = alpha; f_lo = fa; g_lo = ga;
      }
      if (std::abs(a_hi - a_lo) * d.norm() < 1e-16 * (1.0 + x.norm())) break;
    }
    if (!accepted && bracketed && a_lo > 0.0 && f_lo < f0) {
      // Armijo-only fallback: the zoom ran out of trials but a_lo already
      // gives sufficient decrease. Re-evaluate to restore the trial state.
      alpha = a_lo;
      fa = phi_eval(alpha, ga);
      if (fa < f0) accepted = true;
    }

    if (!accepted) {
      // Retry from steepest descent: stale curvature pairs are the usual
      // culprit.
      if (!pairs.empty()) {
        pairs.clear();
        --iter;
        continue;
      }
      // Armijo-only backtracking along -g. At a kink of a max-type term the
      // Wolfe curvature condition can be unattainable even though descent
      // steps exist.
      d = -g;
      gd0 = -g.squaredNorm();
      double alpha_bt = std::min(1.0, 1.0 / d.norm());
      for (int k = 0; k < 40 && !accepted; ++k, alpha_bt *= 0.5) {
        fa = phi_eval(alpha_bt, ga);
        if (fa < f0) {
          alpha = alpha_bt;
          accepted = true;
        }
      }
      if (!accepted) {
        rep.line_search_failed = true;
        break;
      }
    }

    Eigen::VectorXd s = alpha * d;
    Eigen::VectorXd y = g_trial - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(pairs.size()) > cfg.history) pairs.pop_front();
    }
    x = x_trial;
    f = fa;
    g = g_trial;
    rep.values.push_back(f);
    ++rep.iterations;
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }

  if (f <= best_f) {
    params = x;
    rep.final_value = f;
  } else {
    params = best_x;
    rep.final_value = best_f;
  }
  rep.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
  return rep;
}

TrainResult train(const Network& init, const PdeProblem& problem,
                  const TrainingSet& ts, const LossWeights& weights,
                  bool regularized, const TrainPlan& plan) {
  TrainResult out;
  out.net = init;
  Eigen::VectorXd params =
      Eigen::Map<const Eigen::VectorXd>(out.net.params.data(),
                                        static_cast<Eigen::Index>(out.net.params.size()));
  auto sync = [&] {
    std::copy(params.data(), params.data() + params.size(),
              out.net.params.begin());
  };

  const int m_r = static_cast<int>(ts.m_r());
  LossOptions full_opts;
  full_opts.want_grad = true;
  full_opts.regularized = regularized;

  // Adam phase: minibatches over residual points, reshuffled each epoch.
  AdamState adam(params.size(), plan.adam);
  Rng shuffle_rng(plan.seed ^ 0xa02bdbf7bb3c0a7ull);
  std::vector<int> order(m_r);
  std::iota(order.begin(), order.end(), 0);
  const int bs = (plan.batch_size <= 0 || plan.batch_size >= m_r)
                     ? m_r
                     : plan.batch_size;
  double best_epoch_loss = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  for (int epoch = 1; epoch <= plan.adam_epochs; ++epoch) {
    if (bs < m_r) {
      for (int i = m_r - 1; i > 0; --i) {
        const int j = static_cast<int>(shuffle_rng.below(
            static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
      }
    }
    double epoch_loss = 0.0;
    int batches = 0;
    bool bad = false;
    std::vector<int> subset;
    for (int start = 0; start < m_r; start += bs) {
      const int count = std::min(bs, m_r - start);
      LossOptions opts = full_opts;
      if (bs < m_r) {
        subset.assign(order.begin() + start, order.begin() + start + count);
        opts.residual_subset = &subset;
      }
      sync();
      LossResult lr = evaluate_loss(out.net, problem, ts, weights, opts);
      if (!std::isfinite(lr.value) || !lr.grad.allFinite()) {
        bad = true;
        break;
      }
      adam_step(adam, params, lr.grad);
      epoch_loss += lr.value;
      ++batches;
    }
    if (bad) {
      out.aborted_nan = true;
      sync();
      out.history.push_back({"adam", epoch,
                             std::numeric_limits<double>::quiet_NaN()});
      out.final_loss = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    epoch_loss /= batches;
    out.history.push_back({"adam", epoch, epoch_loss});
    if (plan.adam_patience > 0) {
      if (epoch_loss <
          best_epoch_loss * (1.0 - plan.adam_rel_improvement)) {
        best_epoch_loss = epoch_loss;
        stale_epochs = 0;
      } else if (++stale_epochs >= plan.adam_patience) {
        break;
      }
    }
  }
  sync();

  // L-BFGS refinement on the full batch.
  if (plan.lbfgs_max_iters > 0) {
    LossOracle oracle = [&](const Eigen::VectorXd& p, Eigen::VectorXd& grad) {
      std::copy(p.data(), p.data() + p.size(), out.net.params.begin());
      LossResult lr = evaluate_loss(out.net, problem, ts, weights, full_opts);
      grad = lr.grad;
      return lr.value;
    };
    LbfgsConfig cfg;
    cfg.max_iters = plan.lbfgs_max_iters;
    cfg.grad_tol = plan.grad_tol;
    out.lbfgs = lbfgs_minimize(oracle, params, cfg);
    sync();
    for (int i = 0; i < static_cast<int>(out.lbfgs.values.size()); ++i) {
      out.history.push_back({"lbfgs", i, out.lbfgs.values[i]});
    }
  }

  LossOptions eval_opts = full_opts;
  eval_opts.want_grad = false;
  out.final_loss =
      evaluate_loss(out.net, problem, ts, weights, eval_opts).value;
  return out;
}

}  // namespace lipr
