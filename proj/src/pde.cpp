// SPDX-License-Identifier: Apache-2.0

#include "lipr/pde.hpp"

#include <cmath>
#include <stdexcept>

namespace lipr {

OperatorSpec OperatorSpec::poisson1d() {
  OperatorSpec op;
  op.kind = OperatorKind::elliptic_nondivergence;
  op.dim = 1;
  op.a[0][0] = -1.0;
  return op;
}

OperatorSpec OperatorSpec::heat1d(double nu) {
  OperatorSpec op;
  op.kind = OperatorKind::parabolic;
  op.dim = 2;
  op.nu = nu;
  return op;
}

void OperatorSpec::validate() const {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("operator: dimension must be 1..3");
  if (kind == OperatorKind::elliptic_nondivergence) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (a[i][j] != a[j][i])
          throw std::invalid_argument("operator: a must be symmetric");
    // Uniform ellipticity up to the overall sign convention: the principal
    // part must be definite (all eigenvalues of one sign, none zero).
    // dim <= 2 here, so check via trace/determinant.
    if (dim == 1) {
      if (a[0][0] == 0.0)
        throw std::invalid_argument("operator: degenerate principal part");
    } else if (dim >= 2) {
      const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
      if (det <= 0.0)
        throw std::invalid_argument("operator: principal part not definite");
    }
  } else {
    if (dim < 2)
      throw std::invalid_argument("operator: parabolic needs a time coordinate");
    if (nu == 0.0)
      throw std::invalid_argument("operator: nu must be nonzero");
  }
}

namespace {

// A term coef * D^(idx[0..order-1]) u, with ordered (not symmetry-reduced)
// indices; compiling sums duplicates into the unique channel weights.
struct DerivTerm {
  int order;
  int idx[3];
  double coef;
};

std::vector<DerivTerm> operator_terms(const OperatorSpec& op) {
  std::vector<DerivTerm> terms;
  if (op.kind == OperatorKind::elliptic_nondivergence) {
    if (op.c != 0.0) terms.push_back({0, {0, 0, 0}, op.c});
    for (int i = 0; i < op.dim; ++i)
      if (op.b[i] != 0.0) terms.push_back({1, {i, 0, 0}, op.b[i]});
    for (int i = 0; i < op.dim; ++i)
      for (int j = 0; j < op.dim; ++j)
        if (op.a[i][j] != 0.0) terms.push_back({2, {i, j, 0}, op.a[i][j]});
  } else {
    terms.push_back({1, {op.time_index(), 0, 0}, -1.0});
    for (int i = 0; i < op.spatial_dim(); ++i)
      terms.push_back({2, {i, i, 0}, op.nu});
  }
  return terms;
}

ChannelFunctional compile(int dim, const std::vector<DerivTerm>& terms) {
  const JetLayout& L = jet_layout(dim);
  ChannelFunctional F;
  F.dim = dim;
  F.w.assign(L.nch, 0.0);
  for (const DerivTerm& t : terms) {
    int ch = 0;
    switch (t.order) {
      case 0: ch = 0; break;
      case 1: ch = L.idx1(t.idx[0]); break;
      case 2: ch = L.idx2(t.idx[0], t.idx[1]); break;
      case 3: ch = L.idx3(t.idx[0], t.idx[1], t.idx[2]); break;
      default: throw std::logic_error("residual term order out of range");
    }
    F.w[ch] += t.coef;
  }
  return F;
}

}  // namespace

ChannelFunctional residual_functional(const OperatorSpec& op) {
  op.validate();
  return compile(op.dim, operator_terms(op));
}

ChannelFunctional residual_gradient_functional(const OperatorSpec& op,
                                               int coord) {
  op.validate();
  if (coord < 0 || coord >= op.dim)
    throw std::invalid_argument("residual gradient: coordinate out of range");
  std::vector<DerivTerm> terms = operator_terms(op);
  for (DerivTerm& t : terms) {
    t.idx[t.order] = coord;
    ++t.order;
  }
  return compile(op.dim, terms);
}

double residual(const OperatorSpec& op, const Jet3& jet) {
  if (jet.dim() != op.dim)
    throw std::invalid_argument("residual: jet dimension mismatch");
  return residual_functional(op).apply(jet);
}

std::vector<double> residual_gradient(const OperatorSpec& op,
                                      const Jet3& jet) {
  if (jet.dim() != op.dim)
    throw std::invalid_argument("residual gradient: jet dimension mismatch");
  std::vector<double> g(op.dim);
  for (int c = 0; c < op.dim; ++c)
    g[c] = residual_gradient_functional(op, c).apply(jet);
  return g;
}

PdeProblem PdeProblem::poisson1d(const std::string& exact_expr, double x_lo,
                                 double x_hi) {
  PdeProblem p;
  p.op = OperatorSpec::poisson1d();
  p.x_lo = x_lo;
  p.x_hi = x_hi;
  p.exact = Expr::parse(exact_expr);
  p.boundary_groups = {{BoundaryKind::endpoints_1d}};
  return p;
}

PdeProblem PdeProblem::heat1d(const std::string& exact_expr, double nu,
                              double time_horizon, double x_lo, double x_hi) {
  PdeProblem p;
  p.op = OperatorSpec::heat1d(nu);
  p.x_lo = x_lo;
  p.x_hi = x_hi;
  p.time_horizon = time_horizon;
  p.exact = Expr::parse(exact_expr);
  p.boundary_groups = {{BoundaryKind::left_time_edge},
                       {BoundaryKind::right_time_edge},
                       {BoundaryKind::initial_slab}};
  return p;
}

}  // namespace lipr
