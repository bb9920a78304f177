// SPDX-License-Identifier: Apache-2.0

#ifndef LIPR_NETWORK_HPP
#define LIPR_NETWORK_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lipr/jet.hpp"

namespace lipr {

enum class Wrapper {
  none,
  // Multiplies the network output by (1 - x^2) so homogeneous Dirichlet
  // conditions on [-1, 1] hold for any parameters.
  poisson1d_dirichlet_zero,
};

struct Architecture {
  std::vector<int> widths;  // n_0 ... n_L
  bool residual = false;    // identity skip into the second hidden layer
  Wrapper wrapper = Wrapper::none;

  int input_dim() const { return widths.front(); }
  int num_layers() const { return static_cast<int>(widths.size()) - 1; }

  // Throws std::invalid_argument on a malformed architecture.
  void validate() const;
};

// Flat parameter order: W^1 (row-major), b^1, W^2, b^2, ..., W^L, b^L.
struct Network {
  Architecture arch;
  std::vector<double> params;
};

std::size_t param_count(const Architecture& arch);

// Offset of W^l / b^l in the flat vector (l is 1-based).
std::size_t weight_offset(const Architecture& arch, int l);
std::size_t bias_offset(const Architecture& arch, int l);

// Uniform Glorot on [-sqrt(6/(n_in+n_out)), +...]; biases zero.
Network xavier_init(const Architecture& arch, std::uint64_t seed);

// Forward evaluation with derivatives; applies the residual skip and the
// boundary wrapper when configured. Declared here, implemented by the jet
// propagation engine (forward.hpp).
Jet3 evaluate(const Network& net, std::span<const double> x);

// Checkpoint: versioned text document, parameters at 17 significant digits.
void save_checkpoint(const Network& net, std::uint64_t seed,
                     const std::string& path);
Network load_checkpoint(const std::string& path,
                        std::uint64_t* seed_out = nullptr);

}  // namespace lipr

#endif  // LIPR_NETWORK_HPP
