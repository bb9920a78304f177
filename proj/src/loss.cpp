// SPDX-License-Identifier: Apache-2.0

#include "lipr/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace lipr {

void LossWeights::validate(std::size_t n_groups) const {
  if (lambda_r < 0 || lambda_r_reg < 0)
    throw std::invalid_argument("loss weights: negative weight");
  for (double v : lambda_b)
    if (v < 0) throw std::invalid_argument("loss weights: negative weight");
  for (double v : lambda_b_reg)
    if (v < 0) throw std::invalid_argument("loss weights: negative weight");
  if (lambda_b.size() != n_groups)
    throw std::invalid_argument("loss weights: lambda_b size mismatch");
  if (!lambda_b_reg.empty() && lambda_b_reg.size() != n_groups)
    throw std::invalid_argument("loss weights: lambda_b_reg size mismatch");
}

ScheduleResult holder_schedule(ScheduleKind kind, int m_r,
                               const std::vector<int>& m_b,
                               const DistributionConstants& constants,
                               const LossWeights& base) {
  if (m_r < 1) throw std::invalid_argument("schedule: m_r must be >= 1");
  ScheduleResult out;
  out.weights = base;
  out.weights.lambda_b_reg.assign(m_b.size(), 0.0);
  switch (kind) {
    case ScheduleKind::constant:
      out.weights.lambda_b_reg = base.lambda_b_reg;
      if (out.weights.lambda_b_reg.empty())
        out.weights.lambda_b_reg.assign(m_b.size(), 0.0);
      return out;
    case ScheduleKind::poisson_lipr:
      out.weights.lambda_r_reg = std::pow(m_r, -1.5);
      return out;
    case ScheduleKind::heat_lipr:
      out.weights.lambda_r_reg = 2.0 / m_r;
      for (std::size_t j = 0; j < m_b.size(); ++j) {
        if (m_b[j] < 1) throw std::invalid_argument("schedule: empty group");
        out.weights.lambda_b_reg[j] = 1.0 / (m_b[j] * std::sqrt(double(m_r)));
      }
      return out;
    case ScheduleKind::theory: {
      constants.validate();
      const double d = constants.d;
      const double alpha = constants.alpha;
      const double kr = constants.C_r / constants.c_r;
      if (constants.d == 1) {
        out.C_m = 3.0 * kr * std::sqrt(double(m_r));
        out.weights.lambda_r_reg = base.lambda_r *
                                   std::pow(constants.c_r, -2.0 * alpha) / kr *
                                   std::pow(double(m_r), -alpha - 0.5);
        // d = 1: lambda_b^R = 0 (all boundary points available)
        return out;
      }
      int mb_total = 0;
      for (int v : m_b) mb_total += v;
      if (mb_total < 1)
        throw std::invalid_argument("schedule: theory kind needs m_b >= 1");
      const double kb = constants.C_b / constants.c_b;
      out.C_m = 3.0 * std::max(kr * std::pow(std::sqrt(d), d) *
                                   std::sqrt(double(m_r)),
                               kb * std::pow(std::sqrt(d), d - 1.0) *
                                   std::sqrt(double(mb_total)));
      out.weights.lambda_r_reg =
          3.0 * base.lambda_r * std::pow(d, alpha) *
          std::pow(constants.c_r, -2.0 * alpha / d) *
          std::pow(double(m_r), -alpha / d) / out.C_m;
      const double lb = base.lambda_b.empty() ? 1.0 : base.lambda_b.front();
      const double lam_b_reg = 3.0 * lb * std::pow(d, alpha) *
                               std::pow(constants.c_b, -2.0 * alpha / (d - 1)) *
                               std::pow(double(mb_total), -alpha / (d - 1)) /
                               out.C_m;
      for (auto& v : out.weights.lambda_b_reg) v = lam_b_reg;
      return out;
    }
  }
  throw std::logic_error("schedule: unreachable");
}

namespace {

struct MaxTracker {
  double best = -1.0;   // squared inf-norm
  int point = -1;       // index within the scanned sequence
  int comp = 0;
  double comp_value = 0.0;  // signed value of the argmax component
};

// Update with the gradient vector of one point; strict > keeps the lowest
// index on ties.
void consider(MaxTracker& t, int point_index, const std::vector<double>& g) {
  double best_abs = -1.0;
  int best_c = 0;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (std::abs(g[c]) > best_abs) {
      best_abs = std::abs(g[c]);
      best_c = static_cast<int>(c);
    }
  const double sq = best_abs * best_abs;
  if (sq > t.best) {
    t.best = sq;
    t.point = point_index;
    t.comp = best_c;
    t.comp_value = g[best_c];
  }
}

}  // namespace

LossResult evaluate_loss(const Network& net, const PdeProblem& problem,
                         const TrainingSet& ts, const LossWeights& weights,
                         const LossOptions& opts) {
  const int dim = problem.dim();
  if (net.arch.input_dim() != dim)
    throw std::invalid_argument("loss: network/problem dimension mismatch");
  weights.validate(ts.boundary.size());
  const JetLayout& L = jet_layout(dim);
  const int nch = L.nch;

  const ChannelFunctional F_res = residual_functional(problem.op);
  std::vector<ChannelFunctional> F_grad;
  if (opts.regularized)
    for (int c = 0; c < dim; ++c)
      F_grad.push_back(residual_gradient_functional(problem.op, c));

  LossResult out;
  out.parts.boundary_terms.assign(ts.boundary.size(), 0.0);
  out.parts.reg_boundary_terms.assign(ts.boundary.size(), 0.0);
  out.parts.argmax_boundary_point.assign(ts.boundary.size(), -1);
  const bool want_grad = opts.want_grad;
  if (want_grad)
    out.grad = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(param_count(net.arch)));

  // --- residual term -------------------------------------------------------
  std::vector<int> all_idx;
  const std::vector<int>* subset = opts.residual_subset;
  if (!subset) {
    all_idx.resize(ts.m_r());
    for (int i = 0; i < ts.m_r(); ++i) all_idx[i] = i;
    subset = &all_idx;
  }
  const int m = static_cast<int>(subset->size());
  if (m == 0 && weights.lambda_r > 0)
    throw std::invalid_argument("loss: no residual points with lambda_r > 0");

  MaxTracker res_max;
  std::vector<double> gtmp(dim);
  const int chunk = std::max(1, opts.chunk);
  // Tapes persist across evaluations; chunk shapes repeat so the buffers
  // inside are reused without reallocation.
  static thread_local ForwardTape tape_r, tape_b, tape_pt;
  static thread_local Eigen::MatrixXd pts, cot;
  double res_sum = 0.0;
  for (int start = 0; start < m; start += chunk) {
    const int n = std::min(chunk, m - start);
    pts.resize(dim, n);
    for (int q = 0; q < n; ++q)
      pts.col(q) = ts.residual_points.col((*subset)[start + q]);
    ForwardTape& tape = tape_r;
    Eigen::MatrixXd jets = forward_batch(net, pts, want_grad ? &tape : nullptr);

    if (want_grad) {
      cot.resize(nch, n);
      cot.setZero();
    }
    for (int q = 0; q < n; ++q) {
      const double r =
          F_res.apply(jets.col(q).data()) - problem.f(std::span<const double>(
                                                pts.col(q).data(), dim));
      res_sum += r * r;
      if (want_grad && weights.lambda_r > 0) {
        const double scale = 2.0 * weights.lambda_r / m * r;
        for (int c = 0; c < nch; ++c) cot(c, q) = scale * F_res.w[c];
      }
      if (opts.regularized && weights.lambda_r_reg > 0) {
        for (int c = 0; c < dim; ++c)
          gtmp[c] = F_grad[c].apply(jets.col(q).data());
        consider(res_max, (*subset)[start + q], gtmp);
      }
    }
    if (want_grad && weights.lambda_r > 0)
      out.grad += backward_batch(net, tape, cot);
  }
  out.parts.residual_term = m > 0 ? weights.lambda_r / m * res_sum : 0.0;

  // --- boundary data terms -------------------------------------------------
  std::vector<MaxTracker> bnd_max(ts.boundary.size());
  for (std::size_t gix = 0; gix < ts.boundary.size(); ++gix) {
    const auto& group = ts.boundary[gix];
    const int mb = static_cast<int>(group.points.cols());
    const double lam = weights.lambda_b.at(gix);
    const double lam_reg =
        gix < weights.lambda_b_reg.size() ? weights.lambda_b_reg[gix] : 0.0;
    const int tc = group.desc.tangent_coord();
    const bool track_reg = opts.regularized && lam_reg > 0 && tc >= 0;
    if (mb == 0) {
      if (lam > 0)
        throw std::invalid_argument("loss: empty boundary group with weight");
      continue;
    }
    ForwardTape& tape = tape_b;
    Eigen::MatrixXd jets =
        forward_batch(net, group.points, want_grad ? &tape : nullptr);
    Eigen::MatrixXd cot;
    if (want_grad) cot = Eigen::MatrixXd::Zero(nch, mb);
    double sum = 0.0;
    for (int q = 0; q < mb; ++q) {
      const double diff =
          jets(0, q) -
          problem.g(std::span<const double>(group.points.col(q).data(), dim));
      sum += diff * diff;
      if (want_grad && lam > 0) cot(0, q) = 2.0 * lam / mb * diff;
      if (track_reg) {
        gtmp.assign(1, jets(L.idx1(tc), q));
        consider(bnd_max[gix], q, gtmp);
      }
    }
    out.parts.boundary_terms[gix] = lam / mb * sum;
    if (want_grad && lam > 0) out.grad += backward_batch(net, tape, cot);
  }

  // --- regularization max terms -------------------------------------------
  if (opts.regularized && weights.lambda_r_reg > 0 && res_max.point >= 0) {
    out.parts.reg_residual_term = weights.lambda_r_reg * res_max.best;
    out.parts.argmax_residual_point = res_max.point;
    if (want_grad) {
      ForwardTape& tape = tape_pt;
      Eigen::MatrixXd pt = ts.residual_points.col(res_max.point);
      forward_batch(net, pt, &tape);
      Eigen::MatrixXd cot(nch, 1);
      const auto& Fg = F_grad[res_max.comp];
      const double scale = 2.0 * weights.lambda_r_reg * res_max.comp_value;
      for (int c = 0; c < nch; ++c) cot(c, 0) = scale * Fg.w[c];
      out.grad += backward_batch(net, tape, cot);
    }
  }
  for (std::size_t gix = 0; gix < ts.boundary.size(); ++gix) {
    if (bnd_max[gix].point < 0) continue;
    const double lam_reg = weights.lambda_b_reg[gix];
    out.parts.reg_boundary_terms[gix] = lam_reg * bnd_max[gix].best;
    out.parts.argmax_boundary_point[gix] = bnd_max[gix].point;
    if (want_grad) {
      const int tc = ts.boundary[gix].desc.tangent_coord();
      ForwardTape& tape = tape_pt;
      Eigen::MatrixXd pt = ts.boundary[gix].points.col(bnd_max[gix].point);
      forward_batch(net, pt, &tape);
      Eigen::MatrixXd cot = Eigen::MatrixXd::Zero(nch, 1);
      cot(L.idx1(tc), 0) = 2.0 * lam_reg * bnd_max[gix].comp_value;
      out.grad += backward_batch(net, tape, cot);
    }
  }

  out.value = out.parts.residual_term + out.parts.reg_residual_term;
  for (double v : out.parts.boundary_terms) out.value += v;
  for (double v : out.parts.reg_boundary_terms) out.value += v;
  return out;
}

LossResult pinn_loss(const Network& net, const PdeProblem& problem,
                     const TrainingSet& ts, const LossWeights& weights,
                     bool want_grad) {
  LossOptions opts;
  opts.want_grad = want_grad;
  opts.regularized = false;
  return evaluate_loss(net, problem, ts, weights, opts);
}

LossResult lipr_loss(const Network& net, const PdeProblem& problem,
                     const TrainingSet& ts, const LossWeights& weights,
                     bool want_grad) {
  LossOptions opts;
  opts.want_grad = want_grad;
  opts.regularized = true;
  return evaluate_loss(net, problem, ts, weights, opts);
}

}  // namespace lipr
