// SPDX-License-Identifier: Apache-2.0
//
// Jet propagation engine: pushes order-3 input jets through the layers of a
// tanh network and, on request, records a tape for reverse accumulation of
// d(scalar)/d(parameters) where the scalar is any function of the output
// jet channels.

#ifndef LIPR_FORWARD_HPP
#define LIPR_FORWARD_HPP

#include <Eigen/Dense>
#include <vector>

#include "lipr/network.hpp"

namespace lipr {

// Record of one batched forward evaluation. Immutable after forward_batch.
// Per-point channel blocks are stacked: matrix row p*nch+c is channel c of
// point p.
struct ForwardTape {
  Architecture arch;
  int nch = 0;
  int npts = 0;
  Eigen::MatrixXd inputs;                // (nch*B) x n_0 input jets
  std::vector<Eigen::MatrixXd> pre;      // Z^l, (nch*B) x n_l, l = 1..L
  std::vector<Eigen::MatrixXd> post;     // A^l after activation (+ skip)
  Eigen::MatrixXd wrapper_jets;          // nch x B, jets of (1-x^2)
  Eigen::MatrixXd output;                // nch x B final output jets
};

// points: dim x B, one column per evaluation point. Returns nch x B output
// jet channels. When tape is non-null the full forward record is stored.
// Throws std::invalid_argument on a dimension mismatch.
Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& points,
                              ForwardTape* tape = nullptr);

// Reverse pass: gradient of sum_{p,c} cot(c,p) * output(c,p) with respect to
// the flat parameter vector. cot must be nch x npts (columns beyond the
// first `active` ones may simply be zero). Deterministic accumulation.
Eigen::VectorXd backward_batch(const Network& net, const ForwardTape& tape,
                               const Eigen::MatrixXd& cot);

Jet3 forward_jet(const Network& net, std::span<const double> x);
Jet3 forward_jet_taped(const Network& net, std::span<const double> x,
                       ForwardTape& tape);

// Single-point convenience over backward_batch: cotangent given as a Jet3
// whose channels seed the corresponding output channels.
Eigen::VectorXd param_gradient(const Network& net, const ForwardTape& tape,
                               const Jet3& cotangent);

}  // namespace lipr

#endif  // LIPR_FORWARD_HPP
