// SPDX-License-Identifier: Apache-2.0
//
// Problem definitions: constant-coefficient linear second-order operators
// applied to jets, Dirichlet boundary descriptors, and manufactured data
// derived from a closed-form exact solution.

#ifndef LIPR_PDE_HPP
#define LIPR_PDE_HPP

#include <span>
#include <vector>

#include "lipr/expr.hpp"
#include "lipr/jet.hpp"

namespace lipr {

enum class OperatorKind { elliptic_nondivergence, parabolic };

// Sign conventions: elliptic residual is sum_ij a_ij D_ij u + sum_i b_i D_i u
// + c u (Poisson -u_xx = f means a = -1); the parabolic residual is
// -D_t u + nu * sum_i D_ii u over the spatial coordinates, with t the last
// input coordinate.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::elliptic_nondivergence;
  int dim = 1;  // total input dimension (space + time for parabolic)
  double a[3][3]{};
  double b[3]{};
  double c = 0.0;
  double nu = 1.0;

  int spatial_dim() const {
    return kind == OperatorKind::parabolic ? dim - 1 : dim;
  }
  int time_index() const { return dim - 1; }

  static OperatorSpec poisson1d();
  static OperatorSpec heat1d(double nu);

  // Throws std::invalid_argument on asymmetric a or a degenerate principal
  // part for the elliptic kind.
  void validate() const;
};

// The residual (or a component of its input-space gradient) is a linear
// functional over the stored jet channels; keeping the weight vector
// explicit makes loss cotangent seeding a scaled copy.
struct ChannelFunctional {
  int dim = 1;
  std::vector<double> w;  // one weight per unique channel

  double apply(const double* channels) const {
    double s = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) s += w[c] * channels[c];
    return s;
  }
  double apply(const Jet3& j) const { return apply(j.channels()); }
};

ChannelFunctional residual_functional(const OperatorSpec& op);
// d/dx_coord of the residual, as a functional over order<=3 channels.
ChannelFunctional residual_gradient_functional(const OperatorSpec& op,
                                               int coord);

double residual(const OperatorSpec& op, const Jet3& jet);
std::vector<double> residual_gradient(const OperatorSpec& op, const Jet3& jet);

// Boundary pieces of the domain; geometry is derived from the problem
// domain. tangent_coord is the coordinate along which the group extends
// (-1 for the d=1 endpoint pair, which is a finite point set).
enum class BoundaryKind { endpoints_1d, left_time_edge, right_time_edge, initial_slab };

struct BoundaryGroup {
  BoundaryKind kind;
  int tangent_coord() const {
    switch (kind) {
      case BoundaryKind::endpoints_1d: return -1;
      case BoundaryKind::left_time_edge:
      case BoundaryKind::right_time_edge: return 1;  // t
      case BoundaryKind::initial_slab: return 0;     // x
    }
    return -1;
  }
};

struct PdeProblem {
  OperatorSpec op;
  double x_lo = -1.0;
  double x_hi = 1.0;
  double time_horizon = 0.0;  // parabolic only
  Expr exact;
  std::vector<BoundaryGroup> boundary_groups;

  int dim() const { return op.dim; }

  Jet3 exact_jet(std::span<const double> x) const {
    return exact.eval(x, op.dim);
  }
  // Manufactured forcing: f = residual of the exact solution.
  double f(std::span<const double> x) const {
    return residual(op, exact_jet(x));
  }
  // Dirichlet data: g = exact restricted to the boundary.
  double g(std::span<const double> x) const { return exact.value(x); }

  static PdeProblem poisson1d(const std::string& exact_expr,
                              double x_lo = -1.0, double x_hi = 1.0);
  static PdeProblem heat1d(const std::string& exact_expr, double nu = 1.0,
                           double time_horizon = 1.0, double x_lo = -1.0,
                           double x_hi = 1.0);
};

}  // namespace lipr

#endif  // LIPR_PDE_HPP
