// SPDX-License-Identifier: Apache-2.0

#include "lipr/run.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lipr/analysis.hpp"
#include "lipr/optim.hpp"
#include "lipr/rng.hpp"

namespace lipr {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_field(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

PdeProblem build_problem(const RunConfig& cfg) {
  if (cfg.problem_kind == "poisson") {
    return PdeProblem::poisson1d(cfg.exact, cfg.x_lo, cfg.x_hi);
  }
  return PdeProblem::heat1d(cfg.exact, cfg.nu, cfg.time_horizon, cfg.x_lo,
                            cfg.x_hi);
}

Architecture build_arch(const RunConfig& cfg) {
  Architecture a;
  a.widths = cfg.widths;
  a.residual = cfg.residual;
  if (cfg.wrapper == "dirichlet_zero") {
    if (cfg.problem_kind != "poisson" || cfg.x_lo != -1.0 || cfg.x_hi != 1.0)
      throw std::invalid_argument(
          "config field 'network.wrapper': dirichlet_zero requires the "
          "poisson problem on [-1, 1]");
    a.wrapper = Wrapper::poisson1d_dirichlet_zero;
  }
  a.validate();
  return a;
}

DistributionConstants build_constants(const RunConfig& cfg) {
  DistributionConstants dc;
  dc.c_r = cfg.c_r;
  dc.C_r = cfg.C_r;
  dc.c_b = cfg.c_b;
  dc.C_b = cfg.C_b;
  dc.d = cfg.problem_kind == "heat" ? 2 : 1;
  dc.alpha = cfg.alpha;
  return dc;
}

ScheduleKind schedule_kind(const std::string& name) {
  if (name == "poisson_lipr") return ScheduleKind::poisson_lipr;
  if (name == "heat_lipr") return ScheduleKind::heat_lipr;
  if (name == "theory") return ScheduleKind::theory;
  return ScheduleKind::constant;
}

TrainPlan build_plan(const RunConfig& cfg, std::uint64_t seed) {
  TrainPlan plan;
  plan.adam_epochs = cfg.adam_epochs;
  plan.batch_size = cfg.batch_size;
  plan.lbfgs_max_iters = cfg.lbfgs_iters;
  plan.seed = seed;
  plan.adam.lr = cfg.adam_lr;
  plan.adam_patience = cfg.adam_patience;
  plan.adam_rel_improvement = cfg.adam_rel_improvement;
  return plan;
}

struct SingleRun {
  RunRow row;
  Network net;
  std::vector<HistoryRow> history;
  LossWeights weights;
};

SingleRun single_run(const RunConfig& cfg, int m_r, int m_b1,
                     std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SingleRun out;
  out.row.seed = seed;
  out.row.l2_l2 = std::numeric_limits<double>::quiet_NaN();
  out.row.l2_h1 = std::numeric_limits<double>::quiet_NaN();

  PdeProblem problem = build_problem(cfg);
  TrainingSet ts = make_training_set(
      problem,
      cfg.generator == "uniform" ? Generator::iid_uniform
                                 : Generator::equidistant,
      m_r, m_b1, seed);
  out.row.m_r = ts.m_r();
  out.row.m_b1 = ts.m_b(0);
  out.row.m_b2 = ts.boundary.size() > 1 ? ts.m_b(1) : 0;
  out.row.m_b3 = ts.boundary.size() > 2 ? ts.m_b(2) : 0;

  std::vector<int> m_b;
  for (std::size_t j = 0; j < ts.boundary.size(); ++j) m_b.push_back(ts.m_b(j));
  LossWeights base;
  base.lambda_r = cfg.lambda_r;
  base.lambda_b.assign(ts.boundary.size(), cfg.lambda_b);
  base.lambda_r_reg = cfg.lambda_r_reg;
  base.lambda_b_reg.assign(ts.boundary.size(), cfg.lambda_b_reg);
  out.weights = holder_schedule(schedule_kind(cfg.schedule), ts.m_r(), m_b,
                                build_constants(cfg), base)
                    .weights;

  Network init = xavier_init(build_arch(cfg), seed);
  TrainResult tr = train(init, problem, ts, out.weights, cfg.regularized(),
                         build_plan(cfg, seed));
  out.net = tr.net;
  out.history = tr.history;
  out.row.loss_final = tr.final_loss;
  if (tr.aborted_nan || !std::isfinite(tr.final_loss)) {
    out.row.ok = false;
    out.row.l2 = out.row.h1 = std::numeric_limits<double>::quiet_NaN();
  } else {
    const ErrorReport err =
        discrete_error(tr.net, problem, cfg.eval_nx, cfg.eval_nt);
    out.row.l2 = err.l2;
    out.row.h1 = err.h1;
    if (problem.op.kind == OperatorKind::parabolic) {
      out.row.l2_l2 = err.l2_l2;
      out.row.l2_h1 = err.l2_h1;
    }
  }
  out.row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return out;
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

void append_config_echo(std::ostringstream& m, const RunConfig& cfg) {
  m << "problem.kind = " << cfg.problem_kind << "\n"
    << "problem.exact = " << cfg.exact << "\n"
    << "network.widths =";
  for (int w : cfg.widths) m << ' ' << w;
  m << "\n"
    << "network.residual = " << (cfg.residual ? "true" : "false") << "\n"
    << "network.wrapper = " << cfg.wrapper << "\n"
    << "train.generator = " << cfg.generator << "\n"
    << "train.adam_epochs = " << cfg.adam_epochs << "\n"
    << "train.batch_size = " << cfg.batch_size << "\n"
    << "train.lbfgs_iters = " << cfg.lbfgs_iters << "\n"
    << "loss.schedule = " << cfg.schedule << "\n"
    << "seed = " << cfg.seed << "\n";
}

void append_weights(std::ostringstream& m, const LossWeights& w) {
  m << "weights.lambda_r = " << fmt(w.lambda_r) << "\n";
  for (std::size_t j = 0; j < w.lambda_b.size(); ++j)
    m << "weights.lambda_b" << (j + 1) << " = " << fmt(w.lambda_b[j]) << "\n";
  m << "weights.lambda_r_reg = " << fmt(w.lambda_r_reg) << "\n";
  for (std::size_t j = 0; j < w.lambda_b_reg.size(); ++j)
    m << "weights.lambda_b" << (j + 1) << "_reg = " << fmt(w.lambda_b_reg[j])
      << "\n";
}

}  // namespace

std::string csv_header() {
  return "m_r,m_b1,m_b2,m_b3,seed,loss_final,l2,h1,l2_l2,l2_h1,wall_ms,"
         "status";
}

std::string csv_row(const RunRow& r) {
  std::ostringstream out;
  out << r.m_r << ',' << r.m_b1 << ',' << r.m_b2 << ',' << r.m_b3 << ','
      << r.seed << ',' << fmt(r.loss_final) << ',' << fmt(r.l2) << ','
      << fmt(r.h1) << ',' << fmt(r.l2_l2) << ',' << fmt(r.l2_h1) << ','
      << r.wall_ms << ',' << (r.ok ? "ok" : "failed");
  return out.str();
}

std::vector<RunRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw std::runtime_error("unexpected CSV header in " + path);
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    while (f.size() < 12) f.push_back("");
    RunRow r;
    r.m_r = std::stoi(f[0]);
    r.m_b1 = std::stoi(f[1]);
    r.m_b2 = std::stoi(f[2]);
    r.m_b3 = std::stoi(f[3]);
    r.seed = std::stoull(f[4]);
    r.loss_final = parse_field(f[5]);
    r.l2 = parse_field(f[6]);
    r.h1 = parse_field(f[7]);
    r.l2_l2 = parse_field(f[8]);
    r.l2_h1 = parse_field(f[9]);
    r.wall_ms = std::stoll(f[10]);
    r.ok = f[11] == "ok";
    rows.push_back(r);
  }
  return rows;
}

RunOutcome cmd_train(const RunConfig& cfg) {
  try {
    const auto dir = ensure_out_dir(cfg);
    SingleRun run = single_run(cfg, cfg.m_r, cfg.m_b1, cfg.seed);

    write_text(dir / "metrics.csv",
               csv_header() + "\n" + csv_row(run.row) + "\n");
    {
      std::ostringstream h;
      h << "phase,step,loss\n";
      for (const auto& row : run.history)
        h << row.phase << ',' << row.step << ',' << fmt(row.loss) << "\n";
      write_text(dir / "history.csv", h.str());
    }
    save_checkpoint(run.net, cfg.seed, (dir / "checkpoint.txt").string());
    std::ostringstream m;
    m << "command = train\n";
    append_config_echo(m, cfg);
    append_weights(m, run.weights);
    m << "result.loss_final = " << fmt(run.row.loss_final) << "\n"
      << "result.l2 = " << fmt(run.row.l2) << "\n"
      << "result.h1 = " << fmt(run.row.h1) << "\n"
      << "result.l2_l2 = " << fmt(run.row.l2_l2) << "\n"
      << "result.l2_h1 = " << fmt(run.row.l2_h1) << "\n"
      << "result.wall_ms = " << run.row.wall_ms << "\n"
      << "result.status = " << (run.row.ok ? "ok" : "failed") << "\n";
    write_text(dir / "manifest.txt", m.str());

    if (!run.row.ok)
      return {kRunNumericError, "training aborted on a non-finite loss"};
    return {};
  } catch (const std::invalid_argument& e) {
    return {kRunConfigError, e.what()};
  } catch (const std::exception& e) {
    return {kRunIoError, e.what()};
  }
}

RunOutcome cmd_sweep(const RunConfig& cfg) {
  try {
    if (cfg.ladder.empty())
      throw std::invalid_argument("config field 'sweep.ladder': empty");
    const auto dir = ensure_out_dir(cfg);
    const bool heat = cfg.problem_kind == "heat";

    struct Job {
      int m_r, m_b1;
      std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int entry : cfg.ladder) {
      const int m_b1 = heat ? entry : cfg.m_b1;
      const int m_r = heat ? 2 * entry * entry : entry;
      for (int rep = 0; rep < cfg.repeats; ++rep) {
        jobs.push_back({m_r, m_b1, cfg.seed + static_cast<std::uint64_t>(rep)});
      }
    }

    std::vector<RunRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          rows[i] = single_run(cfg, jobs[i].m_r, jobs[i].m_b1, jobs[i].seed).row;
        } catch (const std::exception&) {
          rows[i].m_r = jobs[i].m_r;
          rows[i].m_b1 = jobs[i].m_b1;
          rows[i].seed = jobs[i].seed;
          rows[i].ok = false;
          rows[i].loss_final = rows[i].l2 = rows[i].h1 = rows[i].l2_l2 =
              rows[i].l2_h1 = std::numeric_limits<double>::quiet_NaN();
        }
      }
    };
    {
      const int n_workers =
          std::min<int>(cfg.workers, static_cast<int>(jobs.size()));
      std::vector<std::thread> pool;
      for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();
    }

    // Ladder-order rows, then per-m arithmetic means over ok repeats.
    std::ostringstream csv;
    csv << csv_header() << "\n";
    for (const RunRow& r : rows) csv << csv_row(r) << "\n";
    write_text(dir / "metrics.csv", csv.str());

    std::vector<double> ms, mean_a, mean_b;  // a: l2 / l2_l2, b: h1 / l2_h1
    std::ostringstream means;
    means << "m_r,mean_" << (heat ? "l2_l2" : "l2") << ",mean_"
          << (heat ? "l2_h1" : "h1") << ",ok_repeats\n";
    bool any_failed = false;
    for (std::size_t e = 0; e < cfg.ladder.size(); ++e) {
      double s_a = 0.0, s_b = 0.0;
      int n_ok = 0;
      int m_r = 0;
      for (int rep = 0; rep < cfg.repeats; ++rep) {
        const RunRow& r = rows[e * cfg.repeats + rep];
        m_r = r.m_r;
        if (!r.ok) {
          any_failed = true;
          continue;
        }
        s_a += heat ? r.l2_l2 : r.l2;
        s_b += heat ? r.l2_h1 : r.h1;
        ++n_ok;
      }
      means << m_r << ',';
      if (n_ok > 0) {
        ms.push_back(m_r);
        mean_a.push_back(s_a / n_ok);
        mean_b.push_back(s_b / n_ok);
        means << fmt(s_a / n_ok) << ',' << fmt(s_b / n_ok);
      } else {
        means << ',';
      }
      means << ',' << n_ok << "\n";
    }
    write_text(dir / "means.csv", means.str());

    std::ostringstream m;
    m << "command = sweep\n";
    append_config_echo(m, cfg);
    m << "sweep.entries = " << cfg.ladder.size() << "\n"
      << "sweep.repeats = " << cfg.repeats << "\n";
    if (ms.size() >= 2) {
      const RateFit fa = fit_rate(ms, mean_a);
      const RateFit fb = fit_rate(ms, mean_b);
      m << "slope." << (heat ? "l2_l2" : "l2") << " = " << fmt(fa.slope)
        << "\n"
        << "slope." << (heat ? "l2_h1" : "h1") << " = " << fmt(fb.slope)
        << "\n";
    }
    write_text(dir / "manifest.txt", m.str());

    if (ms.size() < cfg.ladder.size())
      return {kRunNumericError, "some ladder entries had no successful run"};
    if (any_failed) return {kRunOk, "completed with failed repeats"};
    return {};
  } catch (const std::invalid_argument& e) {
    return {kRunConfigError, e.what()};
  } catch (const std::exception& e) {
    return {kRunIoError, e.what()};
  }
}

RunOutcome cmd_verify(const RunConfig& cfg) {
  try {
    const auto dir = ensure_out_dir(cfg);
    PdeProblem problem = build_problem(cfg);
    if (problem.op.kind != OperatorKind::elliptic_nondivergence)
      throw std::invalid_argument(
          "config field 'problem.kind': verify requires poisson");
    TrainingSet ts = make_training_set(
        problem,
        cfg.generator == "uniform" ? Generator::iid_uniform
                                   : Generator::equidistant,
        cfg.m_r, cfg.m_b1, cfg.seed);
    LossWeights w;
    w.lambda_r = cfg.lambda_r;
    w.lambda_b = {cfg.lambda_b};
    const DistributionConstants dc = build_constants(cfg);

    std::ostringstream rep;
    rep << "command = verify\n";
    bool pass = true;
    double worst_slack = std::numeric_limits<double>::infinity();
    Architecture a = build_arch(cfg);
    for (int i = 0; i < cfg.verify_nets; ++i) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i) + 1;
      const BoundReport b = check_lemma_bound(xavier_init(a, seed), problem,
                                              ts, w, dc, cfg.verify_grid);
      worst_slack = std::min(worst_slack, b.slack);
      rep << "bound.seed" << seed << ".C_m = " << fmt(b.C_m)
          << "  eps_r = " << fmt(b.eps_r) << "  lhs = " << fmt(b.lhs)
          << "  rhs = " << fmt(b.rhs) << "  slack = " << fmt(b.slack) << "\n";
      if (b.slack < -1e-9) pass = false;
    }
    rep << "bound.worst_slack = " << fmt(worst_slack) << "\n";

    const SamplingExperiment ex = sampling_probability_experiment(
        cfg.verify_n, cfg.verify_trials, cfg.verify_lo, cfg.verify_hi,
        cfg.verify_c, cfg.seed);
    rep << "sampling.n = " << ex.n << "\n"
        << "sampling.trials = " << ex.trials << "\n"
        << "sampling.threshold = " << fmt(ex.threshold) << "\n"
        << "sampling.bound = " << fmt(ex.bound) << "\n";
    if (ex.trials > 0) {
      rep << "sampling.empirical = " << fmt(ex.empirical) << "\n";
      if (!(ex.empirical >= ex.bound - 0.01)) pass = false;
    }
    rep << "verdict = " << (pass ? "pass" : "fail") << "\n";
    write_text(dir / "verify.txt", rep.str());
    if (!pass) return {kRunCheckFailed, "verification thresholds violated"};
    return {};
  } catch (const std::invalid_argument& e) {
    return {kRunConfigError, e.what()};
  } catch (const std::exception& e) {
    return {kRunIoError, e.what()};
  }
}

RunOutcome cmd_gradcheck(const RunConfig& cfg) {
  try {
    const auto dir = ensure_out_dir(cfg);
    double worst_jet = 0.0;

    // Jet channels against central differences of lower-order channels.
    for (int c = 0; c < 20; ++c) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(c);
      Architecture a;
      a.widths = (c % 2 == 0) ? std::vector<int>{1, 12, 12, 1}
                              : std::vector<int>{2, 10, 1};
      a.residual = c % 4 == 0;
      Network net = xavier_init(a, seed);
      const int dim = a.input_dim();
      Rng rng(seed ^ 0x5bf03635u);
      std::vector<double> x(dim);
      for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-0.9, 0.9);
      const double h = 1e-4;
      const Jet3 base = forward_jet(net, x);
      for (int i = 0; i < dim; ++i) {
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const Jet3 jp = forward_jet(net, xp);
        const Jet3 jm = forward_jet(net, xm);
        auto rel = [](double got, double want) {
          return std::abs(got - want) /
                 std::max({std::abs(got), std::abs(want), 1e-6});
        };
        worst_jet = std::max(
            worst_jet, rel(base.d1(i), (jp.value() - jm.value()) / (2 * h)));
        for (int j = 0; j < dim; ++j) {
          worst_jet = std::max(
              worst_jet, rel(base.d2(i, j), (jp.d1(j) - jm.d1(j)) / (2 * h)));
          for (int k = j; k < dim; ++k)
            worst_jet = std::max(worst_jet,
                                 rel(base.d3(i, j, k),
                                     (jp.d2(j, k) - jm.d2(j, k)) / (2 * h)));
        }
      }
    }

    // Loss parameter gradients against finite differences.
    double worst_grad = 0.0;
    PdeProblem p = PdeProblem::poisson1d("tanh(x)");
    TrainingSet ts = make_training_set(p, Generator::iid_uniform, 16, 2,
                                       cfg.seed + 101);
    LossWeights w;
    w.lambda_b = {1.0};
    w.lambda_r_reg = 0.1;
    w.lambda_b_reg = {0.05};
    for (int c = 0; c < 4; ++c) {
      Architecture a;
      a.widths = {1, 8, 1};
      Network net = xavier_init(a, cfg.seed + 200 + c);
      for (bool reg : {false, true}) {
        LossOptions opts;
        opts.regularized = reg;
        const LossResult lr = evaluate_loss(net, p, ts, w, opts);
        LossOptions vo = opts;
        vo.want_grad = false;
        Rng pick(cfg.seed + 300 + c);
        const double h = 1e-6;
        for (int k = 0; k < 10; ++k) {
          const std::size_t i = pick.below(net.params.size());
          Network np = net, nm = net;
          np.params[i] += h;
          nm.params[i] -= h;
          const double fd = (evaluate_loss(np, p, ts, w, vo).value -
                             evaluate_loss(nm, p, ts, w, vo).value) /
                            (2 * h);
          const double got = lr.grad[static_cast<Eigen::Index>(i)];
          worst_grad = std::max(
              worst_grad, std::abs(got - fd) /
                              std::max({std::abs(got), std::abs(fd), 1e-6}));
        }
      }
    }

    const bool pass = worst_jet < 1e-4 && worst_grad < 1e-5;
    std::ostringstream rep;
    rep << "command = gradcheck\n"
        << "jet.max_rel_error = " << fmt(worst_jet) << "  (tolerance 1e-4)\n"
        << "loss_grad.max_rel_error = " << fmt(worst_grad)
        << "  (tolerance 1e-5)\n"
        << "verdict = " << (pass ? "pass" : "fail") << "\n";
    write_text(dir / "gradcheck.txt", rep.str());
    if (!pass) return {kRunCheckFailed, "finite-difference check failed"};
    return {};
  } catch (const std::invalid_argument& e) {
    return {kRunConfigError, e.what()};
  } catch (const std::exception& e) {
    return {kRunIoError, e.what()};
  }
}

}  // namespace lipr
