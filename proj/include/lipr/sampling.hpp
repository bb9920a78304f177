// SPDX-License-Identifier: Apache-2.0
//
// Training-point generation and the covering/Voronoi machinery used by the
// bound-verification harness.

#ifndef LIPR_SAMPLING_HPP
#define LIPR_SAMPLING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "lipr/pde.hpp"

namespace lipr {

enum class Generator { equidistant, iid_uniform };

struct TrainingSet {
  Eigen::MatrixXd residual_points;  // dim x m_r
  struct Group {
    BoundaryGroup desc;
    Eigen::MatrixXd points;  // dim x m_b,j
  };
  std::vector<Group> boundary;
  Generator generator = Generator::equidistant;
  std::uint64_t seed = 0;

  int m_r() const { return static_cast<int>(residual_points.cols()); }
  int m_b(std::size_t j) const {
    return static_cast<int>(boundary[j].points.cols());
  }
};

// Constants of the sampling distributions entering the generalization
// bound, plus the Holder exponent used by the bound calculators.
struct DistributionConstants {
  double c_r = 0.5, C_r = 1.0;
  double c_b = 1.0, C_b = 1.0;
  int d = 1;
  double alpha = 1.0;

  // Derived values for the uniform law on an interval of length `len`
  // (density 1/len; mu(B_eps) <= 2*eps/len).
  static DistributionConstants uniform_interval(double len, double alpha = 1.0);
  void validate() const;
};

// m points on [lo, hi], both endpoints included for m >= 2; midpoint for
// m = 1. Throws on m = 0.
std::vector<double> equidistant(double lo, double hi, int m);

// iid uniform points on an axis-aligned box; deterministic given seed.
Eigen::MatrixXd iid_uniform_box(const Eigen::VectorXd& lo,
                                const Eigen::VectorXd& hi, int m,
                                std::uint64_t seed);

// Residual + boundary points for a problem. Equidistant is only defined for
// 1D problems; the d=1 boundary is always the deterministic endpoint pair.
TrainingSet make_training_set(const PdeProblem& problem, Generator gen,
                              int m_r, int m_b1, std::uint64_t seed);

// Max over a probe grid of the distance to the nearest sample (the grid
// fill distance). 1D form over an interval.
double covering_radius(const std::vector<double>& points, double lo,
                       double hi, int resolution = 10000);
// 2D form over a rectangle; resolution counts probes per axis.
double covering_radius_2d(const Eigen::MatrixXd& points,
                          const Eigen::Vector2d& lo,
                          const Eigen::Vector2d& hi, int resolution = 316);

// Probability mass of each Voronoi cell under the uniform measure.
// 1D: exact via sorted midpoints. 2D: seeded Monte Carlo.
std::vector<double> voronoi_masses(const std::vector<double>& points,
                                   double lo, double hi);
std::vector<double> voronoi_masses_2d(const Eigen::MatrixXd& points,
                                      const Eigen::Vector2d& lo,
                                      const Eigen::Vector2d& hi,
                                      int n_samples, std::uint64_t seed);

}  // namespace lipr

#endif  // LIPR_SAMPLING_HPP
