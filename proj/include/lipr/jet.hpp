// SPDX-License-Identifier: Apache-2.0
//
// Third-order jets over up to three input coordinates. A jet carries the
// value and all partial derivatives of orders 1-3 at a point, stored in a
// symmetry-unique channel layout so that propagating a jet through layers
// is a per-channel linear operation plus pointwise composition.

#ifndef LIPR_JET_HPP
#define LIPR_JET_HPP

#include <array>
#include <cassert>
#include <cmath>
#include <cstring>

namespace lipr {

// Channel layout: [value | d1 (dim) | d2 unique pairs i<=j | d3 unique
// triples i<=j<=k]. The redundant symmetric entries are never stored.
struct JetLayout {
  int dim = 1;
  int n2 = 1;   // number of unique second-order entries
  int n3 = 1;   // number of unique third-order entries
  int nch = 4;  // total channels
  int p2[3][3]{};
  int p3[3][3][3]{};

  explicit JetLayout(int d = 1) : dim(d) {
    assert(d >= 1 && d <= 3);
    n2 = d * (d + 1) / 2;
    n3 = d * (d + 1) * (d + 2) / 6;
    nch = 1 + d + n2 + n3;
    int c = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        p2[i][j] = p2[j][i] = c++;
      }
    c = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        for (int k = j; k < d; ++k) {
          p3[i][j][k] = p3[i][k][j] = p3[j][i][k] = c;
          p3[j][k][i] = p3[k][i][j] = p3[k][j][i] = c;
          ++c;
        }
  }

  int off1() const { return 1; }
  int off2() const { return 1 + dim; }
  int off3() const { return 1 + dim + n2; }
  int idx1(int i) const { return 1 + i; }
  int idx2(int i, int j) const { return off2() + p2[i][j]; }
  int idx3(int i, int j, int k) const { return off3() + p3[i][j][k]; }
};

inline const JetLayout& jet_layout(int dim) {
  static const JetLayout l1(1), l2(2), l3(3);
  assert(dim >= 1 && dim <= 3);
  return dim == 1 ? l1 : (dim == 2 ? l2 : l3);
}

constexpr int kMaxJetChannels = 20;  // dim = 3

// Low-level kernels on raw channel arrays. `out` must not alias inputs.

// out = u * w (Leibniz through order 3).
inline void jet_mul(const JetLayout& L, const double* u, const double* w,
                    double* out) {
  const int d = L.dim;
  out[0] = u[0] * w[0];
  for (int i = 0; i < d; ++i)
    out[L.idx1(i)] = u[L.idx1(i)] * w[0] + u[0] * w[L.idx1(i)];
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      out[L.idx2(i, j)] = u[L.idx2(i, j)] * w[0] + u[0] * w[L.idx2(i, j)] +
                          u[L.idx1(i)] * w[L.idx1(j)] +
                          u[L.idx1(j)] * w[L.idx1(i)];
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k)
        out[L.idx3(i, j, k)] =
            u[L.idx3(i, j, k)] * w[0] + u[0] * w[L.idx3(i, j, k)] +
            u[L.idx2(i, j)] * w[L.idx1(k)] + u[L.idx2(i, k)] * w[L.idx1(j)] +
            u[L.idx2(j, k)] * w[L.idx1(i)] + u[L.idx1(i)] * w[L.idx2(j, k)] +
            u[L.idx1(j)] * w[L.idx2(i, k)] + u[L.idx1(k)] * w[L.idx2(i, j)];
}

// Adjoint of jet_mul with respect to u, for fixed w: ubar += dP/du^T pbar.
inline void jet_mul_backward(const JetLayout& L, const double* w,
                             const double* pbar, double* ubar) {
  const int d = L.dim;
  ubar[0] += pbar[0] * w[0];
  for (int i = 0; i < d; ++i) {
    const double pb = pbar[L.idx1(i)];
    ubar[L.idx1(i)] += pb * w[0];
    ubar[0] += pb * w[L.idx1(i)];
  }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double pb = pbar[L.idx2(i, j)];
      ubar[L.idx2(i, j)] += pb * w[0];
      ubar[0] += pb * w[L.idx2(i, j)];
      ubar[L.idx1(i)] += pb * w[L.idx1(j)];
      ubar[L.idx1(j)] += pb * w[L.idx1(i)];
    }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k) {
        const double pb = pbar[L.idx3(i, j, k)];
        ubar[L.idx3(i, j, k)] += pb * w[0];
        ubar[0] += pb * w[L.idx3(i, j, k)];
        ubar[L.idx2(i, j)] += pb * w[L.idx1(k)];
        ubar[L.idx2(i, k)] += pb * w[L.idx1(j)];
        ubar[L.idx2(j, k)] += pb * w[L.idx1(i)];
        ubar[L.idx1(i)] += pb * w[L.idx2(j, k)];
        ubar[L.idx1(j)] += pb * w[L.idx2(i, k)];
        ubar[L.idx1(k)] += pb * w[L.idx2(i, j)];
      }
}

// out = g(z) by Faa di Bruno through order 3; g0..g3 are the derivatives of
// the univariate map at z's value.
inline void jet_compose(const JetLayout& L, const double* z, double g0,
                        double g1, double g2, double g3, double* out) {
  const int d = L.dim;
  out[0] = g0;
  for (int i = 0; i < d; ++i) out[L.idx1(i)] = g1 * z[L.idx1(i)];
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      out[L.idx2(i, j)] =
          g2 * z[L.idx1(i)] * z[L.idx1(j)] + g1 * z[L.idx2(i, j)];
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k)
        out[L.idx3(i, j, k)] =
            g3 * z[L.idx1(i)] * z[L.idx1(j)] * z[L.idx1(k)] +
            g2 * (z[L.idx2(i, j)] * z[L.idx1(k)] +
                  z[L.idx2(i, k)] * z[L.idx1(j)] +
                  z[L.idx2(j, k)] * z[L.idx1(i)]) +
            g1 * z[L.idx3(i, j, k)];
}

// Adjoint of jet_compose: zbar += (dT/dz)^T tbar. Needs derivatives up to
// order 4 since the value channel feeds every g coefficient.
inline void jet_compose_backward(const JetLayout& L, const double* z,
                                 const double* tbar, double g1, double g2,
                                 double g3, double g4, double* zbar) {
  const int d = L.dim;
  double v = tbar[0] * g1;
  for (int i = 0; i < d; ++i) {
    const double tb = tbar[L.idx1(i)];
    v += tb * g2 * z[L.idx1(i)];
    zbar[L.idx1(i)] += tb * g1;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double tb = tbar[L.idx2(i, j)];
      v += tb * (g3 * z[L.idx1(i)] * z[L.idx1(j)] + g2 * z[L.idx2(i, j)]);
      zbar[L.idx1(i)] += tb * g2 * z[L.idx1(j)];
      zbar[L.idx1(j)] += tb * g2 * z[L.idx1(i)];
      zbar[L.idx2(i, j)] += tb * g1;
    }
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k) {
        const double tb = tbar[L.idx3(i, j, k)];
        const double zi = z[L.idx1(i)], zj = z[L.idx1(j)], zk = z[L.idx1(k)];
        v += tb * (g4 * zi * zj * zk +
                   g3 * (z[L.idx2(i, j)] * zk + z[L.idx2(i, k)] * zj +
                         z[L.idx2(j, k)] * zi) +
                   g2 * z[L.idx3(i, j, k)]);
        zbar[L.idx1(i)] += tb * (g3 * zj * zk + g2 * z[L.idx2(j, k)]);
        zbar[L.idx1(j)] += tb * (g3 * zi * zk + g2 * z[L.idx2(i, k)]);
        zbar[L.idx1(k)] += tb * (g3 * zi * zj + g2 * z[L.idx2(i, j)]);
        zbar[L.idx2(i, j)] += tb * g2 * zk;
        zbar[L.idx2(i, k)] += tb * g2 * zj;
        zbar[L.idx2(j, k)] += tb * g2 * zi;
        zbar[L.idx3(i, j, k)] += tb * g1;
      }
  zbar[0] += v;
}

// Derivatives of tanh at u via t = tanh(u); closed forms in t avoid
// cancellation. g4 is only needed by the reverse pass.
struct TanhDerivs {
  double g0, g1, g2, g3, g4;
};
inline TanhDerivs tanh_derivs(double u) {
  const double t = std::tanh(u);
  const double s = 1.0 - t * t;
  return {t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0),
          s * (16.0 * t - 24.0 * t * t * t)};
}

// Value-plus-derivatives bundle at one point.
class Jet3 {
 public:
  explicit Jet3(int dim = 1) : dim_(dim) { ch_.fill(0.0); }

  static Jet3 constant(int dim, double v) {
    Jet3 j(dim);
    j.ch_[0] = v;
    return j;
  }
  // Seed jet of the input coordinate `coord` with value v.
  static Jet3 variable(int dim, int coord, double v) {
    Jet3 j(dim);
    j.ch_[0] = v;
    j.ch_[jet_layout(dim).idx1(coord)] = 1.0;
    return j;
  }

  int dim() const { return dim_; }
  const JetLayout& layout() const { return jet_layout(dim_); }

  double value() const { return ch_[0]; }
  double& value() { return ch_[0]; }
  double d1(int i) const { return ch_[layout().idx1(i)]; }
  double& d1(int i) { return ch_[layout().idx1(i)]; }
  double d2(int i, int j) const { return ch_[layout().idx2(i, j)]; }
  double& d2(int i, int j) { return ch_[layout().idx2(i, j)]; }
  double d3(int i, int j, int k) const { return ch_[layout().idx3(i, j, k)]; }
  double& d3(int i, int j, int k) { return ch_[layout().idx3(i, j, k)]; }

  double* channels() { return ch_.data(); }
  const double* channels() const { return ch_.data(); }

  bool finite() const {
    for (int c = 0; c < layout().nch; ++c)
      if (!std::isfinite(ch_[c])) return false;
    return true;
  }

  Jet3& operator+=(const Jet3& o) {
    assert(dim_ == o.dim_);
    for (int c = 0; c < layout().nch; ++c) ch_[c] += o.ch_[c];
    return *this;
  }
  Jet3& operator-=(const Jet3& o) {
    assert(dim_ == o.dim_);
    for (int c = 0; c < layout().nch; ++c) ch_[c] -= o.ch_[c];
    return *this;
  }
  Jet3& operator*=(double s) {
    for (int c = 0; c < layout().nch; ++c) ch_[c] *= s;
    return *this;
  }

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator*(Jet3 a, double s) { return a *= s; }
  friend Jet3 operator*(double s, Jet3 a) { return a *= s; }
  friend Jet3 operator-(Jet3 a) { return a *= -1.0; }
  friend Jet3 operator+(Jet3 a, double c) {
    a.ch_[0] += c;
    return a;
  }
  friend Jet3 operator+(double c, Jet3 a) { return a + c; }
  friend Jet3 operator-(Jet3 a, double c) { return a + (-c); }
  friend Jet3 operator-(double c, const Jet3& a) { return (-a) + c; }

  friend Jet3 operator*(const Jet3& a, const Jet3& b) {
    assert(a.dim_ == b.dim_);
    Jet3 out(a.dim_);
    jet_mul(a.layout(), a.ch_.data(), b.ch_.data(), out.ch_.data());
    return out;
  }

 private:
  int dim_;
  std::array<double, kMaxJetChannels> ch_;
};

// g applied to a jet given the first three derivatives of g at j.value().
inline Jet3 compose(const Jet3& j, double g0, double g1, double g2,
                    double g3) {
  Jet3 out(j.dim());
  jet_compose(j.layout(), j.channels(), g0, g1, g2, g3, out.channels());
  return out;
}

inline Jet3 tanh(const Jet3& j) {
  const TanhDerivs g = tanh_derivs(j.value());
  return compose(j, g.g0, g.g1, g.g2, g.g3);
}
inline Jet3 sin(const Jet3& j) {
  const double s = std::sin(j.value()), c = std::cos(j.value());
  return compose(j, s, c, -s, -c);
}
inline Jet3 cos(const Jet3& j) {
  const double s = std::sin(j.value()), c = std::cos(j.value());
  return compose(j, c, -s, -c, s);
}
inline Jet3 exp(const Jet3& j) {
  const double e = std::exp(j.value());
  return compose(j, e, e, e, e);
}
inline Jet3 reciprocal(const Jet3& j) {
  const double v = j.value();
  const double iv = 1.0 / v;
  return compose(j, iv, -iv * iv, 2.0 * iv * iv * iv,
                 -6.0 * iv * iv * iv * iv);
}
inline Jet3 operator/(const Jet3& a, const Jet3& b) {
  return a * reciprocal(b);
}
inline Jet3 pow(const Jet3& j, double p) {
  const double v = j.value();
  // A zero falling-factorial coefficient must not touch pow(0, negative).
  auto term = [&](double coef, double e) {
    return coef == 0.0 ? 0.0 : coef * std::pow(v, e);
  };
  return compose(j, std::pow(v, p), term(p, p - 1.0),
                 term(p * (p - 1.0), p - 2.0),
                 term(p * (p - 1.0) * (p - 2.0), p - 3.0));
}

}  // namespace lipr

#endif  // LIPR_JET_HPP
