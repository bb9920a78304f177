// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance gate: one pass/fail line per criterion; exit code
// is the number of failures. Criteria 3-5 run full training studies and
// dominate the runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "lipr/analysis.hpp"
#include "lipr/forward.hpp"
#include "lipr/optim.hpp"
#include "lipr/rng.hpp"

namespace {

using namespace lipr;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%d/9] %-22s %s  (%s)  [%.1f s]\n", idx, name,
              pass ? "pass" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double rel(double got, double want) {
  return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-6});
}

// ---- 1: jets and loss gradients against central differences --------------
void criterion1() {
  const auto t0 = Clock::now();
  double worst_jet = 0.0;
  for (int c = 0; c < 20; ++c) {
    const std::uint64_t seed = static_cast<std::uint64_t>(c);
    Architecture a;
    a.widths = (c % 2 == 0) ? std::vector<int>{1, 12, 12, 1}
                            : std::vector<int>{2, 10, 1};
    a.residual = c % 4 == 0;
    Network net = xavier_init(a, seed);
    const int dim = a.input_dim();
    Rng rng(seed ^ 0x5bf03635u);
    std::vector<double> x(dim);
    for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-0.9, 0.9);
    const double h = 1e-4;
    const Jet3 base = forward_jet(net, x);
    for (int i = 0; i < dim; ++i) {
      std::vector<double> xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const Jet3 jp = forward_jet(net, xp);
      const Jet3 jm = forward_jet(net, xm);
      worst_jet = std::max(
          worst_jet, rel(base.d1(i), (jp.value() - jm.value()) / (2 * h)));
      for (int j = 0; j < dim; ++j) {
        worst_jet = std::max(
            worst_jet, rel(base.d2(i, j), (jp.d1(j) - jm.d1(j)) / (2 * h)));
        for (int k = j; k < dim; ++k)
          worst_jet = std::max(
              worst_jet,
              rel(base.d3(i, j, k), (jp.d2(j, k) - jm.d2(j, k)) / (2 * h)));
      }
    }
  }

  double worst_grad = 0.0;
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::iid_uniform, 16, 2, 101);
  LossWeights w;
  w.lambda_b = {1.0};
  w.lambda_r_reg = 0.1;
  w.lambda_b_reg = {0.05};
  for (int c = 0; c < 4; ++c) {
    Architecture a;
    a.widths = {1, 8, 1};
    Network net = xavier_init(a, 200 + c);
    for (bool reg : {false, true}) {
      LossOptions opts;
      opts.regularized = reg;
      const LossResult lr = evaluate_loss(net, p, ts, w, opts);
      LossOptions vo = opts;
      vo.want_grad = false;
      Rng pick(static_cast<std::uint64_t>(300 + c));
      const double h = 1e-6;
      for (int k = 0; k < 10; ++k) {
        const std::size_t i = pick.below(net.params.size());
        Network np = net, nm = net;
        np.params[i] += h;
        nm.params[i] -= h;
        const double fd = (evaluate_loss(np, p, ts, w, vo).value -
                           evaluate_loss(nm, p, ts, w, vo).value) /
                          (2 * h);
        worst_grad =
            std::max(worst_grad, rel(lr.grad[static_cast<Eigen::Index>(i)], fd));
      }
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(1, "derivative oracle", worst_jet < 1e-4 && worst_grad < 1e-5 && secs < 10,
         "jet " + fmt(worst_jet) + " <= 1e-4, grad " + fmt(worst_grad) +
             " <= 1e-5",
         secs);
}

// ---- 2: manufactured identity against hand-derived forcing ---------------
void criterion2() {
  const auto t0 = Clock::now();
  const double pi = std::numbers::pi;
  double worst = 0.0;

  // -u'' for u = tanh(x): f = 2 tanh(x)(1 - tanh(x)^2).
  {
    PdeProblem p = PdeProblem::poisson1d("tanh(x)");
    for (int i = 0; i < 1000; ++i) {
      const double x = -1.0 + 2.0 * i / 999.0;
      const double t = std::tanh(x);
      const double want = 2.0 * t * (1.0 - t * t);
      worst = std::max(worst, std::abs(p.f(std::span<const double>(&x, 1)) - want));
    }
  }
  // -u'' for u = (1-x^2) sin(6 pi x).
  {
    PdeProblem p = PdeProblem::poisson1d("(1-x^2)*sin(6*pi*x)");
    for (int i = 0; i < 1000; ++i) {
      const double x = -1.0 + 2.0 * i / 999.0;
      const double s = std::sin(6 * pi * x), c = std::cos(6 * pi * x);
      const double want =
          2.0 * s + 24.0 * pi * x * c + 36.0 * pi * pi * (1.0 - x * x) * s;
      worst = std::max(worst, std::abs(p.f(std::span<const double>(&x, 1)) - want));
    }
  }
  // -u_t + u_xx for u = sin(pi x) e^{-t}: f = (1 - pi^2) sin(pi x) e^{-t}.
  {
    PdeProblem p = PdeProblem::heat1d("sin(pi*x)*exp(-t)", 1.0, 1.0);
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
      const double xt[2] = {rng.uniform(-1.0, 1.0), rng.uniform(0.0, 1.0)};
      const double want =
          (1.0 - pi * pi) * std::sin(pi * xt[0]) * std::exp(-xt[1]);
      worst =
          std::max(worst, std::abs(p.f(std::span<const double>(xt, 2)) - want));
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(2, "manufactured identity", worst < 1e-12 && secs < 5,
         "max |L[u*] - f| = " + fmt(worst) + " < 1e-12", secs);
}

// ---- shared training helper ----------------------------------------------
struct StudyResult {
  ErrorReport err;
  double final_loss = 0.0;
};

StudyResult run_case(const PdeProblem& p, const TrainingSet& ts,
                     const Architecture& a, const LossWeights& w,
                     bool regularized, const TrainPlan& plan, int nx, int nt) {
  TrainResult r = train(xavier_init(a, plan.seed), p, ts, w, regularized, plan);
  return {discrete_error(r.net, p, nx, nt), r.final_loss};
}

// ---- 3: Poisson tanh, plain PINN, best-seed L2 ---------------------------
void criterion3() {
  const auto t0 = Clock::now();
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::equidistant, 100, 2, 0);
  Architecture a;
  a.widths = {1, 50, 50, 1};
  a.residual = true;
  LossWeights w;
  w.lambda_b = {1.0};
  double best = std::numeric_limits<double>::infinity();
  for (int seed = 1; seed <= 3; ++seed) {
    TrainPlan plan;
    plan.adam_epochs = 25000;
    plan.lbfgs_max_iters = 2000;
    plan.seed = static_cast<std::uint64_t>(seed);
    best = std::min(best, run_case(p, ts, a, w, false, plan, 10000, 0).err.l2);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(3, "poisson tanh L2", best <= 1e-4,
         "best-seed L2 = " + fmt(best) + " <= 1e-4", secs);
}

// ---- 4: LIPR Poisson convergence slopes ----------------------------------
void criterion4() {
  const auto t0 = Clock::now();
  PdeProblem p = PdeProblem::poisson1d("(1-x^2)*sin(6*pi*x)");
  Architecture a;
  a.widths = {1, 100, 100, 1};
  a.residual = true;
  a.wrapper = Wrapper::poisson1d_dirichlet_zero;
  const std::vector<int> ladder = {50, 160, 500, 1600, 5000};
  std::vector<double> l2sum(ladder.size(), 0.0), h1sum(ladder.size(), 0.0);
  for (int seed = 1; seed <= 3; ++seed) {
    // The regularized max term defeats a cold-started line search; pretrain
    // one sharp unregularized fit per seed (m = 500 already resolves the
    // oscillation), then descend each rung's regularized loss from it.
    LossWeights w0;
    w0.lambda_b = {1.0};
    TrainingSet ts500 = make_training_set(p, Generator::equidistant, 500, 2, 0);
    TrainPlan pre;
    pre.adam_epochs = 1000;
    pre.lbfgs_max_iters = 1500;
    pre.seed = static_cast<std::uint64_t>(seed);
    TrainResult sharp = train(xavier_init(a, pre.seed), p, ts500, w0, false, pre);
    // An occasional initialization lands on the spectral-bias plateau
    // (loss ~1e2 instead of ~1e-2); restart deterministically when it does.
    for (int attempt = 1; attempt < 3 && sharp.final_loss > 1.0; ++attempt) {
      pre.seed = static_cast<std::uint64_t>(seed + 100 * attempt);
      sharp = train(xavier_init(a, pre.seed), p, ts500, w0, false, pre);
    }
    for (std::size_t r = 0; r < ladder.size(); ++r) {
      const int m = ladder[r];
      TrainingSet ts = make_training_set(p, Generator::equidistant, m, 2, 0);
      LossWeights w = w0;
      w.lambda_r_reg = std::pow(static_cast<double>(m), -1.5);
      w.lambda_b_reg = {0.0};
      TrainPlan fin;
      fin.adam_epochs = 200;
      fin.lbfgs_max_iters = 300;
      fin.seed = static_cast<std::uint64_t>(seed + 1000 + m);
      TrainResult res = train(sharp.net, p, ts, w, true, fin);
      const ErrorReport e = discrete_error(res.net, p, 10000, 0);
      l2sum[r] += e.l2 / 3.0;
      h1sum[r] += e.h1 / 3.0;
    }
  }
  std::vector<double> ms, l2s, h1s;
  for (std::size_t r = 0; r < ladder.size(); ++r) {
    ms.push_back(ladder[r]);
    l2s.push_back(l2sum[r]);
    h1s.push_back(h1sum[r]);
    std::printf("    m_r %5d: mean L2 %.4g, mean H1 %.4g\n", ladder[r],
                l2sum[r], h1sum[r]);
    std::fflush(stdout);
  }
  const RateFit fl2 = fit_rate(ms, l2s);
  const RateFit fh1 = fit_rate(ms, h1s);
  const bool pass = fl2.slope >= -1.4 && fl2.slope <= -0.6 &&
                    fh1.slope >= -1.4 && fh1.slope <= -0.5;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(4, "LIPR poisson slopes", pass,
         "L2 slope " + fmt(fl2.slope) + " in [-1.4,-0.6], H1 slope " +
             fmt(fh1.slope) + " in [-1.4,-0.5]",
         secs);
}

// ---- 5: heat convergence slopes ------------------------------------------
void criterion5() {
  const auto t0 = Clock::now();
  PdeProblem p = PdeProblem::heat1d("sin(pi*x)*exp(-t)", 1.0, 1.0);
  Architecture a;
  a.widths = {2, 50, 50, 1};
  const std::vector<int> mb1s = {5, 10, 20, 40, 80};
  std::vector<double> l2l2sum(mb1s.size(), 0.0), l2h1sum(mb1s.size(), 0.0);
  LossWeights w0;
  w0.lambda_b = {1.0, 1.0, 1.0};
  for (int seed = 1; seed <= 3; ++seed) {
    // As in criterion 4, warm-start each rung from one sharp unregularized
    // fit per seed; mini-batch Adam in the regularized phase gives the large
    // rungs proportionally more steps, matching their tighter optima.
    TrainingSet tsA = make_training_set(p, Generator::iid_uniform, 800, 20,
                                        static_cast<std::uint64_t>(seed) * 7919);
    TrainPlan pre;
    pre.adam_epochs = 1000;
    pre.lbfgs_max_iters = 800;
    pre.seed = static_cast<std::uint64_t>(seed);
    TrainResult sharp = train(xavier_init(a, pre.seed), p, tsA, w0, false, pre);
    for (std::size_t r = 0; r < mb1s.size(); ++r) {
      const int mb1 = mb1s[r];
      const int m_r = 2 * mb1 * mb1;
      TrainingSet ts = make_training_set(
          p, Generator::iid_uniform, m_r, mb1,
          static_cast<std::uint64_t>(seed) * 7919 + mb1);
      LossWeights w = w0;
      w.lambda_r_reg = 2.0 / m_r;
      const double sq = std::sqrt(static_cast<double>(m_r));
      w.lambda_b_reg = {1.0 / (mb1 * sq), 1.0 / (mb1 * sq),
                        1.0 / (2.0 * mb1 * sq)};
      TrainPlan fin;
      fin.adam_epochs = 400;
      fin.batch_size = 100;
      fin.lbfgs_max_iters = 800;
      fin.seed = static_cast<std::uint64_t>(seed + 1000 + mb1);
      TrainResult res = train(sharp.net, p, ts, w, true, fin);
      const ErrorReport e = discrete_error(res.net, p, 400, 200);
      l2l2sum[r] += e.l2_l2 / 3.0;
      l2h1sum[r] += e.l2_h1 / 3.0;
    }
  }
  std::vector<double> ms, l2l2s, l2h1s;
  for (std::size_t r = 0; r < mb1s.size(); ++r) {
    ms.push_back(2.0 * mb1s[r] * mb1s[r]);
    l2l2s.push_back(l2l2sum[r]);
    l2h1s.push_back(l2h1sum[r]);
    std::printf("    m_r %5d: mean L2L2 %.4g, mean L2H1 %.4g\n",
                2 * mb1s[r] * mb1s[r], l2l2sum[r], l2h1sum[r]);
    std::fflush(stdout);
  }
  const RateFit f0 = fit_rate(ms, l2l2s);
  const RateFit f1 = fit_rate(ms, l2h1s);
  const bool pass = f0.slope >= -1.4 && f0.slope <= -0.6 && f1.slope >= -1.2 &&
                    f1.slope <= -0.3;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(5, "heat slopes", pass,
         "L2L2 slope " + fmt(f0.slope) + " in [-1.4,-0.6], L2H1 slope " +
             fmt(f1.slope) + " in [-1.2,-0.3]",
         secs);
}

// ---- 6: covering generalization bound ------------------------------------
void criterion6() {
  const auto t0 = Clock::now();
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::equidistant, 100, 2, 0);
  LossWeights w;
  w.lambda_b = {1.0};
  DistributionConstants dc = DistributionConstants::uniform_interval(2.0);
  Architecture a;
  a.widths = {1, 50, 50, 1};
  a.residual = true;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    const BoundReport b =
        check_lemma_bound(xavier_init(a, 1 + i), p, ts, w, dc);
    worst = std::min(worst, b.slack);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(6, "lemma bound slack", worst >= -1e-9 && secs < 60,
         "worst slack " + fmt(worst) + " >= -1e-9 over 20 nets", secs);
}

// ---- 7: covering probability ---------------------------------------------
void criterion7() {
  const auto t0 = Clock::now();
  const SamplingExperiment ex =
      sampling_probability_experiment(100, 2000, 0.0, 1.0, 1.0, 0);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(7, "covering probability",
         ex.empirical >= ex.bound - 0.01 && std::abs(ex.bound - 0.999734) < 1e-6 &&
             secs < 30,
         "empirical " + fmt(ex.empirical) + " >= " + fmt(ex.bound) + " - 0.01",
         secs);
}

// ---- 8: theory schedule scaling law --------------------------------------
void criterion8() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  const std::vector<std::pair<int, double>> cases = {{1, 1.0}, {2, 1.0},
                                                     {2, 0.5}};
  for (const auto& [d, alpha] : cases) {
    DistributionConstants dc;
    dc.d = d;
    dc.alpha = alpha;
    LossWeights base;
    base.lambda_b = {1.0};
    double ref = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int m = static_cast<int>(std::pow(10.0, 2 + k));
      const ScheduleResult s =
          holder_schedule(ScheduleKind::theory, m, {2}, dc, base);
      const double scaled =
          s.weights.lambda_r_reg * std::pow(m, 0.5 + alpha / d);
      if (k == 0)
        ref = scaled;
      else
        worst = std::max(worst, std::abs(scaled - ref) / std::abs(ref));
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(8, "schedule law", worst < 1e-9 && secs < 1,
         "max rel drift of lambda_hat * m^(1/2+alpha/d) = " + fmt(worst) +
             " < 1e-9",
         secs);
}

// ---- 9: optimizer unit oracles -------------------------------------------
void criterion9() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;

  // Quadratic: L-BFGS reaches the minimum in at most two iterations.
  {
    LossOracle f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      g = x;
      return 0.5 * x.squaredNorm();
    };
    Eigen::VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    LbfgsConfig cfg;
    cfg.max_iters = 10;
    cfg.grad_tol = 1e-12;
    const LbfgsReport r = lbfgs_minimize(f, x, cfg);
    pass = pass && r.final_value <= 1e-10 && r.iterations <= 2;
    detail += "quad " + std::to_string(r.iterations) + " iters";
  }
  // Rosenbrock.
  {
    LossOracle f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
      g.resize(2);
      g[0] = -2 * a - 400 * x[0] * b;
      g[1] = 200 * b;
      return a * a + 100 * b * b;
    };
    Eigen::VectorXd x(2);
    x << -1.2, 1.0;
    LbfgsConfig cfg;
    cfg.max_iters = 100;
    cfg.grad_tol = 1e-14;
    const LbfgsReport r = lbfgs_minimize(f, x, cfg);
    pass = pass && r.final_value < 1e-8 && r.iterations <= 100;
    detail += ", rosenbrock f " + fmt(r.final_value);
  }
  // Adam single step against the hand-computed update.
  {
    AdamConfig cfg;
    Eigen::VectorXd p(2), g(2);
    p << 0.3, -0.7;
    g << 0.2, -0.1;
    AdamState st(2, cfg);
    Eigen::VectorXd got = p;
    adam_step(st, got, g);
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double m = (1 - cfg.beta1) * g[i];
      const double v = (1 - cfg.beta2) * g[i] * g[i];
      const double mh = m / (1 - cfg.beta1);
      const double vh = v / (1 - cfg.beta2);
      const double want = p[i] - cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
      worst = std::max(worst, std::abs(got[i] - want));
    }
    pass = pass && worst < 1e-12;
    detail += ", adam step err " + fmt(worst);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(9, "optimizer oracles", pass && secs < 5, detail, secs);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion8();
  criterion9();
  criterion7();
  criterion6();
  criterion3();
  criterion4();
  criterion5();
  std::printf("%s (%d/9 criteria passed)\n", failures == 0 ? "ACCEPT" : "REJECT",
              9 - failures);
  return failures;
}
