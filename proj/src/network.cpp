// SPDX-License-Identifier: Apache-2.0

#include "lipr/network.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lipr/rng.hpp"

namespace lipr {

void Architecture::validate() const {
  if (widths.size() < 3)
    throw std::invalid_argument("architecture: need at least 2 layers");
  if (widths.front() < 1 || widths.front() > 3)
    throw std::invalid_argument("architecture: input width must be 1..3");
  if (widths.back() != 1)
    throw std::invalid_argument("architecture: output width must be 1");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("architecture: widths must be >= 1");
  if (residual && widths.front() != 1)
    throw std::invalid_argument(
        "architecture: residual skip requires scalar input");
  if (wrapper == Wrapper::poisson1d_dirichlet_zero && widths.front() != 1)
    throw std::invalid_argument(
        "architecture: boundary wrapper requires scalar input");
}

std::size_t param_count(const Architecture& arch) {
  std::size_t n = 0;
  for (std::size_t l = 1; l < arch.widths.size(); ++l)
    n += static_cast<std::size_t>(arch.widths[l]) * arch.widths[l - 1] +
         arch.widths[l];
  return n;
}

std::size_t weight_offset(const Architecture& arch, int l) {
  std::size_t off = 0;
  for (int q = 1; q < l; ++q)
    off += static_cast<std::size_t>(arch.widths[q]) * arch.widths[q - 1] +
           arch.widths[q];
  return off;
}

std::size_t bias_offset(const Architecture& arch, int l) {
  return weight_offset(arch, l) +
         static_cast<std::size_t>(arch.widths[l]) * arch.widths[l - 1];
}

Network xavier_init(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  Network net;
  net.arch = arch;
  net.params.assign(param_count(arch), 0.0);
  Rng rng(seed);
  for (int l = 1; l <= arch.num_layers(); ++l) {
    const int nin = arch.widths[l - 1];
    const int nout = arch.widths[l];
    const double a = std::sqrt(6.0 / (nin + nout));
    double* w = net.params.data() + weight_offset(arch, l);
    for (int i = 0; i < nout * nin; ++i) w[i] = rng.uniform(-a, a);
    // biases stay zero
  }
  return net;
}

namespace {
constexpr const char* kMagic = "liprnet-checkpoint";
constexpr int kVersion = 1;

const char* wrapper_name(Wrapper w) {
  return w == Wrapper::none ? "none" : "poisson1d_dirichlet_zero";
}
Wrapper wrapper_from_name(const std::string& s) {
  if (s == "none") return Wrapper::none;
  if (s == "poisson1d_dirichlet_zero") return Wrapper::poisson1d_dirichlet_zero;
  throw std::runtime_error("checkpoint: unknown wrapper '" + s + "'");
}
}  // namespace

void save_checkpoint(const Network& net, std::uint64_t seed,
                     const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("checkpoint: cannot write " + path);
  f << kMagic << " " << kVersion << "\n";
  f << "widths";
  for (int w : net.arch.widths) f << " " << w;
  f << "\n";
  f << "residual " << (net.arch.residual ? 1 : 0) << "\n";
  f << "wrapper " << wrapper_name(net.arch.wrapper) << "\n";
  f << "seed " << seed << "\n";
  f << "params " << net.params.size() << "\n";
  char buf[40];
  for (double v : net.params) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    f << buf << "\n";
  }
  if (!f) throw std::runtime_error("checkpoint: write failed for " + path);
}

Network load_checkpoint(const std::string& path, std::uint64_t* seed_out) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("checkpoint: cannot read " + path);
  std::string magic;
  int version = 0;
  f >> magic >> version;
  if (magic != kMagic || version != kVersion)
    throw std::runtime_error("checkpoint: bad header in " + path);

  Network net;
  std::string key;
  f >> key;
  if (key != "widths") throw std::runtime_error("checkpoint: expected widths");
  std::string line;
  std::getline(f, line);
  std::istringstream ws(line);
  int w;
  while (ws >> w) net.arch.widths.push_back(w);

  int residual = 0;
  std::string wrapper;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  f >> key >> residual;
  if (key != "residual") throw std::runtime_error("checkpoint: expected residual");
  f >> key >> wrapper;
  if (key != "wrapper") throw std::runtime_error("checkpoint: expected wrapper");
  f >> key >> seed;
  if (key != "seed") throw std::runtime_error("checkpoint: expected seed");
  f >> key >> n;
  if (key != "params") throw std::runtime_error("checkpoint: expected params");
  net.arch.residual = residual != 0;
  net.arch.wrapper = wrapper_from_name(wrapper);
  net.arch.validate();
  if (n != param_count(net.arch))
    throw std::runtime_error("checkpoint: parameter count mismatch");
  net.params.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(f >> net.params[i]))
      throw std::runtime_error("checkpoint: truncated parameter array");
  if (seed_out) *seed_out = seed;
  return net;
}

}  // namespace lipr
