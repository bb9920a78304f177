// SPDX-License-Identifier: Apache-2.0

#include "lipr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lipr/rng.hpp"

namespace lipr {

DistributionConstants DistributionConstants::uniform_interval(double len,
                                                              double alpha) {
  DistributionConstants c;
  c.c_r = 1.0 / len;       // mass of a partition cell of side eps
  c.C_r = 2.0 / len;       // mu(B_eps cap U) <= 2 eps / len
  c.c_b = 1.0;
  c.C_b = 1.0;             // point masses: mu(B_eps cap Gamma) <= 1
  c.d = 1;
  c.alpha = alpha;
  return c;
}

void DistributionConstants::validate() const {
  if (c_r <= 0 || C_r < c_r || c_b <= 0 || C_b < c_b)
    throw std::invalid_argument("distribution constants: need 0 < c <= C");
  if (alpha <= 0 || alpha > 1)
    throw std::invalid_argument("distribution constants: alpha in (0,1]");
  if (d < 1 || d > 3)
    throw std::invalid_argument("distribution constants: d in 1..3");
}

std::vector<double> equidistant(double lo, double hi, int m) {
  if (m < 1) throw std::invalid_argument("equidistant: m must be >= 1");
  std::vector<double> pts(m);
  if (m == 1) {
    pts[0] = 0.5 * (lo + hi);
    return pts;
  }
  const double h = (hi - lo) / (m - 1);
  for (int i = 0; i < m; ++i) pts[i] = lo + h * i;
  pts[m - 1] = hi;  // exact endpoint regardless of rounding
  return pts;
}

Eigen::MatrixXd iid_uniform_box(const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, int m,
                                std::uint64_t seed) {
  if (m < 0) throw std::invalid_argument("iid_uniform: m must be >= 0");
  const int d = static_cast<int>(lo.size());
  Eigen::MatrixXd pts(d, m);
  Rng rng(seed);
  for (int p = 0; p < m; ++p)
    for (int c = 0; c < d; ++c) pts(c, p) = rng.uniform(lo[c], hi[c]);
  return pts;
}

TrainingSet make_training_set(const PdeProblem& problem, Generator gen,
                              int m_r, int m_b1, std::uint64_t seed) {
  const int dim = problem.dim();
  TrainingSet ts;
  ts.generator = gen;
  ts.seed = seed;

  if (problem.op.kind == OperatorKind::elliptic_nondivergence) {
    if (dim != 1)
      throw std::invalid_argument("make_training_set: only 1D elliptic");
    if (gen == Generator::equidistant) {
      auto xs = equidistant(problem.x_lo, problem.x_hi, m_r);
      ts.residual_points.resize(1, m_r);
      for (int i = 0; i < m_r; ++i) ts.residual_points(0, i) = xs[i];
    } else {
      Eigen::VectorXd lo(1), hi(1);
      lo << problem.x_lo;
      hi << problem.x_hi;
      ts.residual_points = iid_uniform_box(lo, hi, m_r, seed);
    }
    // d = 1: all boundary points are available; both endpoints, no sampling.
    Eigen::MatrixXd ends(1, 2);
    ends << problem.x_lo, problem.x_hi;
    ts.boundary.push_back({problem.boundary_groups.at(0), ends});
    return ts;
  }

  // Parabolic: residual points in (x_lo,x_hi) x (0,T]; boundary groups
  // Gamma_1/Gamma_2 on the time edges, Gamma_3 on the initial slab.
  if (gen == Generator::equidistant)
    throw std::invalid_argument(
        "make_training_set: equidistant generator is 1D-only");
  const double T = problem.time_horizon;
  Eigen::VectorXd lo(2), hi(2);
  lo << problem.x_lo, 0.0;
  hi << problem.x_hi, T;
  ts.residual_points = iid_uniform_box(lo, hi, m_r, seed);

  const int m_b2 = m_b1;
  const int m_b3 = 2 * m_b1;
  Eigen::MatrixXd g1(2, m_b1), g2(2, m_b2), g3(2, m_b3);
  {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    for (int i = 0; i < m_b1; ++i) {
      g1(0, i) = problem.x_lo;
      g1(1, i) = rng.uniform(0.0, T);
    }
    for (int i = 0; i < m_b2; ++i) {
      g2(0, i) = problem.x_hi;
      g2(1, i) = rng.uniform(0.0, T);
    }
    for (int i = 0; i < m_b3; ++i) {
      g3(0, i) = rng.uniform(problem.x_lo, problem.x_hi);
      g3(1, i) = 0.0;
    }
  }
  ts.boundary.push_back({problem.boundary_groups.at(0), g1});
  ts.boundary.push_back({problem.boundary_groups.at(1), g2});
  ts.boundary.push_back({problem.boundary_groups.at(2), g3});
  return ts;
}

double covering_radius(const std::vector<double>& points, double lo,
                       double hi, int resolution) {
  if (points.empty())
    throw std::invalid_argument("covering_radius: empty point set");
  std::vector<double> s = points;
  std::sort(s.begin(), s.end());
  double worst = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double x =
        resolution == 1 ? 0.5 * (lo + hi)
                        : lo + (hi - lo) * i / (resolution - 1);
    auto it = std::lower_bound(s.begin(), s.end(), x);
    double d = std::numeric_limits<double>::infinity();
    if (it != s.end()) d = std::min(d, *it - x);
    if (it != s.begin()) d = std::min(d, x - *(it - 1));
    worst = std::max(worst, d);
  }
  return worst;
}

double covering_radius_2d(const Eigen::MatrixXd& points,
                          const Eigen::Vector2d& lo,
                          const Eigen::Vector2d& hi, int resolution) {
  if (points.cols() == 0)
    throw std::invalid_argument("covering_radius: empty point set");
  double worst = 0.0;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      Eigen::Vector2d x(lo[0] + (hi[0] - lo[0]) * i / (resolution - 1),
                        lo[1] + (hi[1] - lo[1]) * j / (resolution - 1));
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index p = 0; p < points.cols(); ++p)
        best = std::min(best, (points.col(p) - x).norm());
      worst = std::max(worst, best);
    }
  return worst;
}

std::vector<double> voronoi_masses(const std::vector<double>& points,
                                   double lo, double hi) {
  if (points.empty())
    throw std::invalid_argument("voronoi_masses: empty point set");
  const std::size_t n = points.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<double> mass(n, 0.0);
  const double len = hi - lo;
  double left = lo;
  for (std::size_t k = 0; k < n; ++k) {
    const double right =
        k + 1 < n ? 0.5 * (points[order[k]] + points[order[k + 1]]) : hi;
    mass[order[k]] += (right - left) / len;
    left = right;
  }
  return mass;
}

std::vector<double> voronoi_masses_2d(const Eigen::MatrixXd& points,
                                      const Eigen::Vector2d& lo,
                                      const Eigen::Vector2d& hi,
                                      int n_samples, std::uint64_t seed) {
  if (points.cols() == 0)
    throw std::invalid_argument("voronoi_masses: empty point set");
  std::vector<std::size_t> hits(points.cols(), 0);
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    Eigen::Vector2d x(rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]));
    Eigen::Index best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (Eigen::Index p = 0; p < points.cols(); ++p) {
      const double d = (points.col(p) - x).squaredNorm();
      if (d < bd) {
        bd = d;
        best = p;
      }
    }
    ++hits[best];
  }
  std::vector<double> mass(points.cols());
  for (Eigen::Index p = 0; p < points.cols(); ++p)
    mass[p] = static_cast<double>(hits[p]) / n_samples;
  return mass;
}

}  // namespace lipr
