// SPDX-License-Identifier: Apache-2.0

#include "lipr/forward.hpp"

#include <stdexcept>

namespace lipr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMap = Eigen::Map<
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

RowMajorMap weight_matrix(const Network& net, int l) {
  const auto& w = net.arch.widths;
  return RowMajorMap(net.params.data() + weight_offset(net.arch, l), w[l],
                     w[l - 1]);
}

// Jet of (1 - x^2) at x; zero beyond second order.
void boundary_factor_jet(const JetLayout& L, double x, double* out) {
  for (int c = 0; c < L.nch; ++c) out[c] = 0.0;
  out[0] = 1.0 - x * x;
  out[L.idx1(0)] = -2.0 * x;
  out[L.idx2(0, 0)] = -2.0;
}

}  // namespace

Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& points,
                              ForwardTape* tape) {
  const Architecture& arch = net.arch;
  arch.validate();
  const int dim = arch.input_dim();
  if (points.rows() != dim)
    throw std::invalid_argument(
        "forward_batch: point dimension " + std::to_string(points.rows()) +
        " does not match network input width " + std::to_string(dim));
  if (net.params.size() != param_count(arch))
    throw std::invalid_argument("forward_batch: parameter vector length "
                                "does not match architecture");

  const JetLayout& L = jet_layout(dim);
  const int nch = L.nch;
  const int B = static_cast<int>(points.cols());
  const int nchB = nch * B;
  const int nlayers = arch.num_layers();

  // Reuse the caller's tape storage between calls; with constant shapes the
  // resize calls below are no-ops and no heap traffic occurs.
  ForwardTape local;
  ForwardTape& T = tape ? *tape : local;
  T.arch = arch;
  T.nch = nch;
  T.npts = B;
  T.inputs.resize(nchB, dim);
  T.inputs.setZero();
  for (int p = 0; p < B; ++p)
    for (int c = 0; c < dim; ++c) {
      T.inputs(p * nch, c) = points(c, p);
      T.inputs(p * nch + L.idx1(c), c) = 1.0;
    }
  T.pre.resize(nlayers);
  T.post.resize(nlayers);

  const MatrixXd* prev = &T.inputs;
  for (int l = 1; l <= nlayers; ++l) {
    const int nout = arch.widths[l];
    MatrixXd& Z = T.pre[l - 1];
    Z.resize(nchB, nout);
    Z.noalias() = (*prev) * weight_matrix(net, l).transpose();
    const double* b = net.params.data() + bias_offset(net.arch, l);
    for (int j = 0; j < nout; ++j)
      for (int p = 0; p < B; ++p) Z(p * nch, j) += b[j];
    if (l == nlayers) break;

    MatrixXd& A = T.post[l - 1];
    A.resize(nchB, nout);
    for (int j = 0; j < nout; ++j) {
      const double* zc = Z.data() + static_cast<std::ptrdiff_t>(j) * nchB;
      double* ac = A.data() + static_cast<std::ptrdiff_t>(j) * nchB;
      for (int p = 0; p < B; ++p) {
        const TanhDerivs g = tanh_derivs(zc[p * nch]);
        jet_compose(L, zc + p * nch, g.g0, g.g1, g.g2, g.g3, ac + p * nch);
      }
    }
    if (l == 1 && arch.residual) {
      // skip term 1*x into the second hidden pre-activation (n_0 = 1)
      for (int j = 0; j < nout; ++j)
        A.col(j) += T.inputs.col(0);
    }
    prev = &A;
  }

  // n_L = 1: reshape the final pre-activation into nch x B.
  MatrixXd out(nch, B);
  {
    const MatrixXd& ZL = T.pre[nlayers - 1];
    for (int p = 0; p < B; ++p)
      out.col(p) = ZL.col(0).segment(p * nch, nch);
  }

  if (arch.wrapper == Wrapper::poisson1d_dirichlet_zero) {
    T.wrapper_jets.resize(nch, B);
    MatrixXd wrapped(nch, B);
    std::array<double, kMaxJetChannels> w{};
    for (int p = 0; p < B; ++p) {
      boundary_factor_jet(L, points(0, p), w.data());
      T.wrapper_jets.col(p) = Eigen::Map<const VectorXd>(w.data(), nch);
      jet_mul(L, out.col(p).data(), w.data(), wrapped.col(p).data());
    }
    out = std::move(wrapped);
  }
  if (tape) T.output = out;
  return out;
}

Eigen::VectorXd backward_batch(const Network& net, const ForwardTape& tape,
                               const Eigen::MatrixXd& cot) {
  const Architecture& arch = tape.arch;
  const int dim = arch.input_dim();
  const JetLayout& L = jet_layout(dim);
  const int nch = tape.nch;
  const int B = tape.npts;
  const int nchB = nch * B;
  const int nlayers = arch.num_layers();
  if (cot.rows() != nch || cot.cols() != B)
    throw std::invalid_argument("backward_batch: cotangent shape mismatch");

  VectorXd grad = VectorXd::Zero(static_cast<Eigen::Index>(param_count(arch)));

  // Per-layer adjoint buffers persist across calls; with constant shapes the
  // resizes are no-ops.
  static thread_local std::vector<MatrixXd> ws_zbar, ws_abar, ws_wbar;
  if (static_cast<int>(ws_zbar.size()) <= nlayers) {
    ws_zbar.resize(nlayers + 1);
    ws_abar.resize(nlayers + 1);
    ws_wbar.resize(nlayers + 1);
  }

  // Seed the adjoint of the final pre-activation.
  MatrixXd& Zlast = ws_zbar[nlayers];
  Zlast.resize(nchB, 1);
  if (arch.wrapper == Wrapper::poisson1d_dirichlet_zero) {
    Zlast.setZero();
    for (int p = 0; p < B; ++p)
      jet_mul_backward(L, tape.wrapper_jets.col(p).data(), cot.col(p).data(),
                       Zlast.data() + p * nch);
  } else {
    for (int p = 0; p < B; ++p)
      Zlast.col(0).segment(p * nch, nch) = cot.col(p);
  }

  for (int l = nlayers; l >= 1; --l) {
    const MatrixXd& Aprev = (l == 1) ? tape.inputs : tape.post[l - 2];
    const MatrixXd& Zbar = ws_zbar[l];
    const int nout = arch.widths[l];
    const int nin = arch.widths[l - 1];

    // W-bar accumulates channel dot products over the batch in one product.
    MatrixXd& Wbar = ws_wbar[l];
    Wbar.resize(nout, nin);
    Wbar.noalias() = Zbar.transpose() * Aprev;
    double* gw = grad.data() + weight_offset(arch, l);
    for (int j = 0; j < nout; ++j)
      for (int k = 0; k < nin; ++k) gw[j * nin + k] += Wbar(j, k);
    double* gb = grad.data() + bias_offset(arch, l);
    for (int j = 0; j < nout; ++j) {
      double s = 0.0;
      for (int p = 0; p < B; ++p) s += Zbar(p * nch, j);
      gb[j] += s;
    }
    if (l == 1) break;

    MatrixXd& Abar = ws_abar[l];
    Abar.resize(nchB, nin);
    Abar.noalias() = Zbar * weight_matrix(net, l);
    // Through the activation; the residual skip adds a constant jet and
    // contributes nothing to the pre-activation adjoint.
    const MatrixXd& Zprev = tape.pre[l - 2];
    MatrixXd& Znext = ws_zbar[l - 1];
    Znext.resize(nchB, nin);
    Znext.setZero();
    for (int j = 0; j < nin; ++j) {
      const double* zc = Zprev.data() + static_cast<std::ptrdiff_t>(j) * nchB;
      const double* abc = Abar.data() + static_cast<std::ptrdiff_t>(j) * nchB;
      double* zbc = Znext.data() + static_cast<std::ptrdiff_t>(j) * nchB;
      for (int p = 0; p < B; ++p) {
        const TanhDerivs g = tanh_derivs(zc[p * nch]);
        jet_compose_backward(L, zc + p * nch, abc + p * nch, g.g1, g.g2, g.g3,
                             g.g4, zbc + p * nch);
      }
    }
  }
  return grad;
}

Jet3 forward_jet(const Network& net, std::span<const double> x) {
  Eigen::MatrixXd pts(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) pts(i, 0) = x[i];
  Eigen::MatrixXd out = forward_batch(net, pts);
  Jet3 j(static_cast<int>(x.size()));
  for (int c = 0; c < j.layout().nch; ++c) j.channels()[c] = out(c, 0);
  return j;
}

Jet3 forward_jet_taped(const Network& net, std::span<const double> x,
                       ForwardTape& tape) {
  Eigen::MatrixXd pts(x.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) pts(i, 0) = x[i];
  Eigen::MatrixXd out = forward_batch(net, pts, &tape);
  Jet3 j(static_cast<int>(x.size()));
  for (int c = 0; c < j.layout().nch; ++c) j.channels()[c] = out(c, 0);
  return j;
}

Eigen::VectorXd param_gradient(const Network& net, const ForwardTape& tape,
                               const Jet3& cotangent) {
  Eigen::MatrixXd cot(tape.nch, tape.npts);
  if (cotangent.layout().nch != tape.nch || tape.npts != 1)
    throw std::invalid_argument("param_gradient: cotangent shape mismatch");
  for (int c = 0; c < tape.nch; ++c) cot(c, 0) = cotangent.channels()[c];
  return backward_batch(net, tape, cot);
}

Jet3 evaluate(const Network& net, std::span<const double> x) {
  return forward_jet(net, x);
}

}  // namespace lipr
