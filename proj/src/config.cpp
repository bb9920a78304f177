// SPDX-License-Identifier: Apache-2.0

#include "lipr/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lipr {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& what) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " +
                              what);
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stoi(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad integer");
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("bad boolean '" + v + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  using Setter = std::function<void(RunConfig&, const std::string&)>;
  auto d = [](double RunConfig::* f) {
    return Setter([f](RunConfig& c, const std::string& v) { c.*f = std::stod(v); });
  };
  auto i = [](int RunConfig::* f) {
    return Setter([f](RunConfig& c, const std::string& v) { c.*f = std::stoi(v); });
  };
  auto s = [](std::string RunConfig::* f) {
    return Setter([f](RunConfig& c, const std::string& v) { c.*f = v; });
  };
  auto b = [](bool RunConfig::* f) {
    return Setter([f](RunConfig& c, const std::string& v) { c.*f = parse_bool(v); });
  };
  auto il = [](std::vector<int> RunConfig::* f) {
    return Setter(
        [f](RunConfig& c, const std::string& v) { c.*f = parse_int_list(v); });
  };

  const std::map<std::string, std::map<std::string, Setter>> schema = {
      {"problem",
       {{"kind", s(&RunConfig::problem_kind)},
        {"exact", s(&RunConfig::exact)},
        {"nu", d(&RunConfig::nu)},
        {"time_horizon", d(&RunConfig::time_horizon)},
        {"x_lo", d(&RunConfig::x_lo)},
        {"x_hi", d(&RunConfig::x_hi)}}},
      {"network",
       {{"widths", il(&RunConfig::widths)},
        {"residual", b(&RunConfig::residual)},
        {"wrapper", s(&RunConfig::wrapper)}}},
      {"train",
       {{"adam_epochs", i(&RunConfig::adam_epochs)},
        {"batch_size", i(&RunConfig::batch_size)},
        {"lbfgs_iters", i(&RunConfig::lbfgs_iters)},
        {"adam_lr", d(&RunConfig::adam_lr)},
        {"adam_patience", i(&RunConfig::adam_patience)},
        {"adam_rel_improvement", d(&RunConfig::adam_rel_improvement)},
        {"generator", s(&RunConfig::generator)},
        {"m_r", i(&RunConfig::m_r)},
        {"m_b1", i(&RunConfig::m_b1)},
        {"eval_nx", i(&RunConfig::eval_nx)},
        {"eval_nt", i(&RunConfig::eval_nt)}}},
      {"loss",
       {{"schedule", s(&RunConfig::schedule)},
        {"lambda_r", d(&RunConfig::lambda_r)},
        {"lambda_b", d(&RunConfig::lambda_b)},
        {"lambda_r_reg", d(&RunConfig::lambda_r_reg)},
        {"lambda_b_reg", d(&RunConfig::lambda_b_reg)},
        {"alpha", d(&RunConfig::alpha)},
        {"c_r", d(&RunConfig::c_r)},
        {"C_r", d(&RunConfig::C_r)},
        {"c_b", d(&RunConfig::c_b)},
        {"C_b", d(&RunConfig::C_b)}}},
      {"sweep",
       {{"ladder", il(&RunConfig::ladder)},
        {"repeats", i(&RunConfig::repeats)}}},
      {"verify",
       {{"nets", i(&RunConfig::verify_nets)},
        {"n", i(&RunConfig::verify_n)},
        {"trials", i(&RunConfig::verify_trials)},
        {"lo", d(&RunConfig::verify_lo)},
        {"hi", d(&RunConfig::verify_hi)},
        {"c", d(&RunConfig::verify_c)},
        {"grid_n", i(&RunConfig::verify_grid)}}},
  };

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema.count(section))
        fail(origin, lineno, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    if (section.empty()) fail(origin, lineno, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = schema.at(section);
    auto it = keys.find(key);
    if (it == keys.end())
      fail(origin, lineno, "unknown key '" + key + "' in [" + section + "]");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      fail(origin, lineno,
           "bad value for '" + key + "': " + std::string(e.what()));
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void RunConfig::validate() const {
  auto bad = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("config field '" + field + "': " + why);
  };
  if (problem_kind != "poisson" && problem_kind != "heat")
    bad("problem.kind", "must be poisson or heat");
  if (exact.empty()) bad("problem.exact", "must be nonempty");
  if (x_hi <= x_lo) bad("problem.x_hi", "must exceed x_lo");
  if (problem_kind == "heat" && time_horizon <= 0.0)
    bad("problem.time_horizon", "must be positive");
  if (widths.size() < 3) bad("network.widths", "need at least one hidden layer");
  if (wrapper != "none" && wrapper != "dirichlet_zero")
    bad("network.wrapper", "must be none or dirichlet_zero");
  if (generator != "equidistant" && generator != "uniform")
    bad("train.generator", "must be equidistant or uniform");
  if (adam_epochs < 0) bad("train.adam_epochs", "must be >= 0");
  if (lbfgs_iters < 0) bad("train.lbfgs_iters", "must be >= 0");
  if (m_r < 1) bad("train.m_r", "must be >= 1");
  if (m_b1 < 1) bad("train.m_b1", "must be >= 1");
  if (eval_nx < 2) bad("train.eval_nx", "must be >= 2");
  if (schedule != "constant" && schedule != "poisson_lipr" &&
      schedule != "heat_lipr" && schedule != "theory")
    bad("loss.schedule", "unknown schedule kind");
  if (lambda_r < 0 || lambda_b < 0 || lambda_r_reg < 0 || lambda_b_reg < 0)
    bad("loss.lambda", "weights must be >= 0");
  if (alpha <= 0.0 || alpha > 1.0) bad("loss.alpha", "must lie in (0, 1]");
  if (repeats < 1) bad("sweep.repeats", "must be >= 1");
  for (int v : ladder)
    if (v < 1) bad("sweep.ladder", "entries must be >= 1");
  if (workers < 1) bad("workers", "must be >= 1");
}

}  // namespace lipr
