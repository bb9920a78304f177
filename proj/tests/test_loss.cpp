// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lipr/loss.hpp"
#include "lipr/rng.hpp"

using namespace lipr;

namespace {

Network zero_net(std::vector<int> widths) {
  Architecture a;
  a.widths = std::move(widths);
  Network n;
  n.arch = a;
  n.params.assign(param_count(a), 0.0);
  return n;
}

// u(x) = tanh(x) as a 1-1-1 network.
Network tanh_net() {
  Network n = zero_net({1, 1, 1});
  const Architecture& a = n.arch;
  n.params[weight_offset(a, 1)] = 1.0;
  n.params[weight_offset(a, 2)] = 1.0;
  return n;
}

LossWeights unit_weights(std::size_t groups, double reg_r = 0.0,
                         double reg_b = 0.0) {
  LossWeights w;
  w.lambda_b.assign(groups, 1.0);
  w.lambda_r_reg = reg_r;
  w.lambda_b_reg.assign(groups, reg_b);
  return w;
}

}  // namespace

TEST_CASE("zero network loss equals the data means") {
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::equidistant, 100, 2, 0);
  Network net = zero_net({1, 8, 1});
  LossResult lr = pinn_loss(net, p, ts, unit_weights(1), false);

  double f2 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x[1] = {ts.residual_points(0, i)};
    f2 += p.f(x) * p.f(x);
  }
  const double t1 = std::tanh(1.0);
  const double want = f2 / 100.0 + t1 * t1;
  CHECK(lr.value == doctest::Approx(want).epsilon(1e-13));
  CHECK(lr.parts.boundary_terms[0] ==
        doctest::Approx(t1 * t1).epsilon(1e-13));
}

TEST_CASE("a representable solution drives the loss to zero") {
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::equidistant, 50, 2, 0);
  LossResult lr = pinn_loss(tanh_net(), p, ts, unit_weights(1), true);
  CHECK(lr.value < 1e-24);
  CHECK(lr.grad.lpNorm<Eigen::Infinity>() < 1e-11);
}

TEST_CASE("loss is homogeneous in the data weights") {
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::iid_uniform, 40, 2, 9);
  Network net = xavier_init(Architecture{{1, 10, 1}, false, Wrapper::none}, 4);
  LossWeights w1 = unit_weights(1);
  LossWeights w3 = w1;
  w3.lambda_r *= 3.0;
  w3.lambda_b[0] *= 3.0;
  const double v1 = pinn_loss(net, p, ts, w1, false).value;
  const double v3 = pinn_loss(net, p, ts, w3, false).value;
  CHECK(v3 == doctest::Approx(3.0 * v1).epsilon(1e-13));
}

TEST_CASE("regularized loss dominates the plain loss") {
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::equidistant, 30, 2, 0);
  Network net = xavier_init(Architecture{{1, 12, 1}, false, Wrapper::none}, 2);
  LossWeights w = unit_weights(1, 0.3, 0.2);
  const double plain = pinn_loss(net, p, ts, w, false).value;
  const double reg = lipr_loss(net, p, ts, w, false).value;
  CHECK(reg >= plain);
  // Zero regularization weights collapse the two.
  LossWeights w0 = unit_weights(1, 0.0, 0.0);
  CHECK(lipr_loss(net, p, ts, w0, false).value ==
        doctest::Approx(pinn_loss(net, p, ts, w0, false).value).epsilon(1e-15));
}

TEST_CASE("regularizer value for the tanh network") {
  // Residual of u = tanh is -u''; its x-derivative is -u''' with maximum
  // magnitude 2 attained at x = 0, so the max term is lambda * 4.
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::equidistant, 3, 2, 0);
  LossWeights w = unit_weights(1, 0.25, 0.0);
  LossResult lr = lipr_loss(tanh_net(), p, ts, w, false);
  CHECK(lr.parts.reg_residual_term == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lr.parts.argmax_residual_point == 1);  // the interior point x = 0
}

TEST_CASE("experiment schedules") {
  DistributionConstants dc = DistributionConstants::uniform_interval(2.0);
  LossWeights base = unit_weights(1);

  auto s1 = holder_schedule(ScheduleKind::poisson_lipr, 100, {2}, dc, base);
  CHECK(s1.weights.lambda_r_reg == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(s1.weights.lambda_b_reg[0] == 0.0);

  LossWeights base3 = unit_weights(3);
  auto s2 =
      holder_schedule(ScheduleKind::heat_lipr, 200, {10, 10, 20}, dc, base3);
  CHECK(s2.weights.lambda_r_reg == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(s2.weights.lambda_b_reg[0] ==
        doctest::Approx(1.0 / (10.0 * std::sqrt(200.0))).epsilon(1e-14));
  CHECK(s2.weights.lambda_b_reg[2] ==
        doctest::Approx(1.0 / (20.0 * std::sqrt(200.0))).epsilon(1e-14));
}

TEST_CASE("theory schedule in one dimension") {
  // c_r = 1/2, C_r = 1, alpha = 1: kappa_r = C_r / c_r = 2, so
  // C_m = 3 * 2 * sqrt(100) = 60 and
  // lambda_r^R = c_r^-2 * kappa_r^-1 * m^-3/2 = 4 * 0.5 * 1e-3 = 2e-3.
  DistributionConstants dc = DistributionConstants::uniform_interval(2.0);
  auto s = holder_schedule(ScheduleKind::theory, 100, {2}, dc, unit_weights(1));
  CHECK(s.C_m == doctest::Approx(60.0).epsilon(1e-14));
  CHECK(s.weights.lambda_r_reg == doctest::Approx(2e-3).epsilon(1e-13));
  CHECK(s.weights.lambda_b_reg[0] == 0.0);
}

TEST_CASE("theory schedule decay law") {
  // lambda_r^R(m) * m^(1/2 + alpha/d) must be constant in m.
  const struct {
    int d;
    double alpha;
  } cases[] = {{1, 1.0}, {2, 1.0}, {2, 0.5}};
  for (const auto& c : cases) {
    DistributionConstants dc;
    dc.d = c.d;
    dc.alpha = c.alpha;
    double ref = 0.0;
    for (int m : {100, 400, 1600, 6400}) {
      auto s = holder_schedule(ScheduleKind::theory, m, {std::max(2, m / 10)},
                               dc, unit_weights(1));
      const double scaled =
          s.weights.lambda_r_reg * std::pow(m, 0.5 + c.alpha / c.d);
      if (ref == 0.0) {
        ref = scaled;
      } else {
        CHECK(std::abs(scaled - ref) < 1e-9 * std::abs(ref));
      }
    }
  }
}

TEST_CASE("loss gradients match finite differences") {
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::iid_uniform, 12, 2, 17);
  Network net = xavier_init(Architecture{{1, 6, 6, 1}, true, Wrapper::none}, 5);
  LossWeights w = unit_weights(1, 0.1, 0.05);

  for (bool regularized : {false, true}) {
    LossOptions opts;
    opts.regularized = regularized;
    LossResult lr = evaluate_loss(net, p, ts, w, opts);
    LossOptions vopts = opts;
    vopts.want_grad = false;
    Rng pick(31);
    const double h = 1e-6;
    for (int k = 0; k < 25; ++k) {
      const std::size_t i = pick.below(net.params.size());
      Network np = net, nm = net;
      np.params[i] += h;
      nm.params[i] -= h;
      const double fd = (evaluate_loss(np, p, ts, w, vopts).value -
                         evaluate_loss(nm, p, ts, w, vopts).value) /
                        (2.0 * h);
      const double got = lr.grad[static_cast<Eigen::Index>(i)];
      const double scale = std::max({std::abs(fd), std::abs(got), 1e-6});
      CHECK(std::abs(got - fd) / scale < 1e-5);
    }
  }
}

TEST_CASE("heat problem loss gradient with boundary regularizers") {
  PdeProblem p = PdeProblem::heat1d("sin(pi*x)*exp(-t)", 1.0, 1.0);
  TrainingSet ts = make_training_set(p, Generator::iid_uniform, 18, 3, 23);
  Architecture a{{2, 6, 1}, false, Wrapper::none};
  Network net = xavier_init(a, 29);
  LossWeights w = unit_weights(3, 0.2, 0.1);

  LossOptions opts;
  opts.regularized = true;
  LossResult lr = evaluate_loss(net, p, ts, w, opts);
  LossOptions vopts = opts;
  vopts.want_grad = false;
  Rng pick(7);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = pick.below(net.params.size());
    Network np = net, nm = net;
    np.params[i] += h;
    nm.params[i] -= h;
    const double fd = (evaluate_loss(np, p, ts, w, vopts).value -
                       evaluate_loss(nm, p, ts, w, vopts).value) /
                      (2.0 * h);
    const double got = lr.grad[static_cast<Eigen::Index>(i)];
    const double scale = std::max({std::abs(fd), std::abs(got), 1e-6});
    CHECK(std::abs(got - fd) / scale < 1e-5);
  }
}

TEST_CASE("mini-batch subsets") {
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet ts = make_training_set(p, Generator::iid_uniform, 20, 2, 3);
  Network net = xavier_init(Architecture{{1, 8, 1}, false, Wrapper::none}, 6);
  LossWeights w = unit_weights(1);

  std::vector<int> all(20);
  std::iota(all.begin(), all.end(), 0);
  LossOptions opts;
  opts.residual_subset = &all;
  const double with_subset = evaluate_loss(net, p, ts, w, opts).value;
  const double without = evaluate_loss(net, p, ts, w).value;
  CHECK(with_subset == doctest::Approx(without).epsilon(1e-15));

  // A batch normalizes by its own size: the two halves average to the full
  // residual term (boundary terms enter both).
  std::vector<int> lohalf(all.begin(), all.begin() + 10);
  std::vector<int> hihalf(all.begin() + 10, all.end());
  LossOptions o1, o2;
  o1.residual_subset = &lohalf;
  o2.residual_subset = &hihalf;
  const double r1 = evaluate_loss(net, p, ts, w, o1).parts.residual_term;
  const double r2 = evaluate_loss(net, p, ts, w, o2).parts.residual_term;
  const double rf = evaluate_loss(net, p, ts, w).parts.residual_term;
  CHECK(0.5 * (r1 + r2) == doctest::Approx(rf).epsilon(1e-13));
}

TEST_CASE("weight validation") {
  LossWeights w = unit_weights(1);
  CHECK_NOTHROW(w.validate(1));
  CHECK_THROWS(w.validate(2));  // group count mismatch
  w.lambda_r = -1.0;
  CHECK_THROWS(w.validate(1));
}
