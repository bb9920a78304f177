// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lipr/sampling.hpp"

using namespace lipr;

TEST_CASE("equidistant grids") {
  CHECK(equidistant(-1.0, 1.0, 1) == std::vector<double>{0.0});
  CHECK(equidistant(-1.0, 1.0, 3) == std::vector<double>{-1.0, 0.0, 1.0});
  const std::vector<double> g = equidistant(-1.0, 1.0, 9);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] - g[i - 1] == doctest::Approx(0.25).epsilon(1e-15));
  }
  CHECK_THROWS(equidistant(0.0, 1.0, 0));
}

TEST_CASE("iid uniform sampling: determinism, range, first moment") {
  Eigen::VectorXd lo(1), hi(1);
  lo << -1.0;
  hi << 1.0;
  const Eigen::MatrixXd a = iid_uniform_box(lo, hi, 2000, 42);
  const Eigen::MatrixXd b = iid_uniform_box(lo, hi, 2000, 42);
  const Eigen::MatrixXd c = iid_uniform_box(lo, hi, 2000, 43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.minCoeff() >= -1.0);
  CHECK(a.maxCoeff() <= 1.0);
  // 4-sigma band around the mean: sigma = (1/sqrt(3)) / sqrt(m).
  CHECK(std::abs(a.mean()) < 4.0 / std::sqrt(3.0 * 2000.0));
}

TEST_CASE("training sets for the 1d elliptic problem") {
  PdeProblem p = PdeProblem::poisson1d("tanh(x)");
  TrainingSet eq = make_training_set(p, Generator::equidistant, 100, 2, 7);
  CHECK(eq.m_r() == 100);
  REQUIRE(eq.boundary.size() == 1);
  CHECK(eq.m_b(0) == 2);
  CHECK(eq.residual_points(0, 0) == -1.0);
  CHECK(eq.residual_points(0, 99) == 1.0);
  CHECK(eq.boundary[0].points(0, 0) == -1.0);
  CHECK(eq.boundary[0].points(0, 1) == 1.0);

  TrainingSet un = make_training_set(p, Generator::iid_uniform, 50, 2, 7);
  TrainingSet un2 = make_training_set(p, Generator::iid_uniform, 50, 2, 7);
  CHECK(un.residual_points == un2.residual_points);
  CHECK(un.residual_points.minCoeff() >= -1.0);
  CHECK(un.residual_points.maxCoeff() <= 1.0);
}

TEST_CASE("training sets for the heat problem") {
  PdeProblem p = PdeProblem::heat1d("sin(pi*x)*exp(-t)", 1.0, 1.0);
  const int mb1 = 10;
  TrainingSet ts =
      make_training_set(p, Generator::iid_uniform, 2 * mb1 * mb1, mb1, 3);
  CHECK(ts.m_r() == 200);
  REQUIRE(ts.boundary.size() == 3);
  CHECK(ts.m_b(0) == mb1);
  CHECK(ts.m_b(1) == mb1);
  CHECK(ts.m_b(2) == 2 * mb1);
  for (int i = 0; i < mb1; ++i) {
    CHECK(ts.boundary[0].points(0, i) == -1.0);  // left edge: x = -1
    CHECK(ts.boundary[1].points(0, i) == 1.0);   // right edge: x = +1
  }
  for (int i = 0; i < 2 * mb1; ++i) {
    CHECK(ts.boundary[2].points(1, i) == 0.0);  // initial slab: t = 0
  }
  CHECK(ts.residual_points.row(1).minCoeff() >= 0.0);
  CHECK(ts.residual_points.row(1).maxCoeff() <= 1.0);
}

TEST_CASE("covering radius oracles") {
  CHECK(covering_radius({0.0}, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(covering_radius({-1.0, 0.0, 1.0}, -1.0, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-3));
  // Adding a point can only shrink the fill distance.
  std::vector<double> pts = {-0.8, 0.1, 0.9};
  const double before = covering_radius(pts, -1.0, 1.0);
  pts.push_back(-0.3);
  CHECK(covering_radius(pts, -1.0, 1.0) <= before + 1e-12);

  Eigen::MatrixXd one(2, 1);
  one << 0.0, 0.5;
  const double r2 = covering_radius_2d(one, {-1.0, 0.0}, {1.0, 1.0});
  // Farthest corner from (0, 0.5) is distance sqrt(1 + 0.25).
  CHECK(r2 == doctest::Approx(std::sqrt(1.25)).epsilon(1e-2));
}

TEST_CASE("voronoi masses: exact 1d values") {
  const std::vector<double> m = voronoi_masses({-1.0, 0.0, 1.0}, -1.0, 1.0);
  REQUIRE(m.size() == 3);
  CHECK(m[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m[2] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("voronoi masses sum to one and obey the ball bound") {
  // Uniform on [-1, 1]: mu(B_eps(x)) <= C_r eps with C_r = 2 / len = 1,
  // and each Voronoi cell sits inside the eps-ball of its site when eps is
  // the covering radius.
  const DistributionConstants dc = DistributionConstants::uniform_interval(2.0);
  CHECK(dc.C_r == doctest::Approx(1.0));
  CHECK(dc.c_r == doctest::Approx(0.5));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Eigen::VectorXd lo(1), hi(1);
    lo << -1.0;
    hi << 1.0;
    const Eigen::MatrixXd pts = iid_uniform_box(lo, hi, 30, seed);
    std::vector<double> x(pts.data(), pts.data() + 30);
    const std::vector<double> masses = voronoi_masses(x, -1.0, 1.0);
    const double eps = covering_radius(x, -1.0, 1.0);
    const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (double g : masses) CHECK(g <= dc.C_r * eps + 1e-3);
  }
}

TEST_CASE("2d voronoi masses: seeded monte carlo sanity") {
  Eigen::MatrixXd pts(2, 2);
  pts << -0.5, 0.5, 0.5, 0.5;  // sites at x = -/+ 0.5, same t
  const std::vector<double> m =
      voronoi_masses_2d(pts, {-1.0, 0.0}, {1.0, 1.0}, 200000, 11);
  REQUIRE(m.size() == 2);
  CHECK(m[0] + m[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m[0] == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("distribution constants validate") {
  DistributionConstants dc;
  CHECK_NOTHROW(dc.validate());
  dc.alpha = 1.5;
  CHECK_THROWS(dc.validate());
  dc = DistributionConstants{};
  dc.c_r = 0.0;
  CHECK_THROWS(dc.validate());
}
