#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "pipeline.hpp"

namespace setobs {

struct McRun {
  std::uint64_t seed = 0;
  bool boundary = false;
  Vector x0;
  SignalVector w;
  bool contained = true;
  int violations = 0;
  double worst_quadratic_form = 0.0;
  double eps1_worst_ratio = 0.0;
  double woodbury_max = 0.0;
};

struct McSummary {
  int runs = 0;
  int contained_runs = 0;
  int boundary_runs = 0;
  double containment_rate = 0.0;
  double min_margin = 0.0;  // 1 - worst quadratic form over all runs
  double max_margin = 0.0;
  double eps1_worst_ratio = 0.0;
  double woodbury_max = 0.0;
  std::vector<McRun> details;
};

inline std::uint64_t mc_run_seed(std::uint64_t seed, int run) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(run)};
  std::uint32_t out[2];
  sq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// w = c_w + L sum_q lambda_q a_q sin(omega_q t + phi_q) with L L' = K_w, ||a_q|| <= 1 and
// sum lambda_q = 1, so w(t) stays inside E(c_w, K_w) by construction
template <class Rng>
SignalVector sample_admissible_input(const ScenarioConfig& cfg, Rng& rng) {
  require(cfg.Kw.is_constant(), ErrorCode::invalid_parameter, "input sampling needs a constant input shape");
  require(cfg.mc.terms >= 1 && cfg.mc.omega_max > 0.0, ErrorCode::invalid_parameter, "bad sampler options");
  const Index nw = cfg.sys.nw();
  const Matrix Kw = cfg.Kw(0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(Kw));
  const Matrix L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::exponential_distribution<double> ex(1.0);
  const int Q = cfg.mc.terms;
  std::vector<double> lam(static_cast<std::size_t>(Q));
  double sum = 0.0;
  for (double& v : lam) sum += (v = ex(rng) + 1e-12);
  SignalVector w = cfg.cw;
  for (int q = 0; q < Q; ++q) {
    const Vector a = L * sample_unit_ball(rng, nw) * (lam[static_cast<std::size_t>(q)] / sum);
    const double om = cfg.mc.omega_max * (0.05 + 0.95 * u01(rng));
    const double ph = 2.0 * std::numbers::pi * u01(rng);
    for (Index i = 0; i < nw; ++i)
      w.comps[static_cast<std::size_t>(i)].terms.push_back(SignalTerm::sine(a(i), om, ph));
  }
  return w;
}

inline McRun mc_single(const ObserverDesign& d, std::uint64_t seed, int run, bool boundary) {
  McRun r;
  r.seed = mc_run_seed(seed, run);
  r.boundary = boundary;
  std::mt19937_64 rng(r.seed);
  const Ellipsoid X0 = d.cfg.initial_set();
  r.x0 = boundary ? sample_on_boundary(X0, rng) : sample_in_ellipsoid(X0, rng);
  r.w = sample_admissible_input(d.cfg, rng);
  RunOptions opt;
  opt.check_eps1 = true;
  opt.keep_sets = false;
  const RunResult res = run_pipeline(d, r.x0, r.w, opt);
  r.contained = res.contained_all;
  r.violations = res.violations;
  r.worst_quadratic_form = res.worst_quadratic_form;
  r.eps1_worst_ratio = res.eps1_worst_ratio;
  r.woodbury_max = res.woodbury_max;
  return r;
}

inline McSummary monte_carlo_containment(const ObserverDesign& d, int runs, std::uint64_t seed, int threads = 1) {
  require(runs >= 0, ErrorCode::invalid_parameter, "run count must be nonnegative");
  McSummary s;
  s.runs = runs;
  if (runs == 0) return s;
  const int nb = static_cast<int>(std::lround(d.cfg.mc.boundary_fraction * runs));
  s.details.resize(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < runs; i = next++) s.details[static_cast<std::size_t>(i)] = mc_single(d, seed, i, i < nb);
  };
  const int nt = std::max(1, std::min(threads, runs));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  double worst = 0.0, best = std::numeric_limits<double>::infinity();
  for (const McRun& r : s.details) {
    s.contained_runs += r.contained ? 1 : 0;
    s.boundary_runs += r.boundary ? 1 : 0;
    worst = std::max(worst, r.worst_quadratic_form);
    best = std::min(best, r.worst_quadratic_form);
    s.eps1_worst_ratio = std::max(s.eps1_worst_ratio, r.eps1_worst_ratio);
    s.woodbury_max = std::max(s.woodbury_max, r.woodbury_max);
  }
  s.containment_rate = static_cast<double>(s.contained_runs) / runs;
  s.min_margin = 1.0 - worst;
  s.max_margin = 1.0 - best;
  return s;
}

}  // namespace setobs
