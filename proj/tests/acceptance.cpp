// End-to-end acceptance checks, one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <setobs/certify.hpp>
#include <setobs/monte_carlo.hpp>

using namespace setobs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Matrix randn(std::mt19937_64& rng, Index r, Index c) {
  std::normal_distribution<double> nd;
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = nd(rng);
  return M;
}

Matrix random_spd(std::mt19937_64& rng, Index n) {
  const Matrix A = randn(rng, n, n);
  return symmetrize(A * A.transpose() + 0.1 * Matrix::Identity(n, n));
}

LtiSystem random_system(std::mt19937_64& rng, bool zero_D) {
  std::uniform_int_distribution<int> dn(2, 6), dm(1, 3);
  const Index n = dn(rng), nw = dm(rng), ny = dm(rng);
  return LtiSystem{randn(rng, n, n), randn(rng, n, nw), randn(rng, ny, n),
                   zero_D ? Matrix::Zero(ny, nw) : randn(rng, ny, nw)};
}

int default_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Context {
  std::string cli;
  fs::path work;
  McSummary mc1;
  double mc1_seconds = 0.0;
  bool mc1_done = false;
};

void ensure_mc1(Context& c) {
  if (c.mc1_done) return;
  const ObserverDesign d = prepare_design(builtin_scenario("example1"));
  const auto t0 = std::chrono::steady_clock::now();
  c.mc1 = monte_carlo_containment(d, 200, d.cfg.seed, default_threads());
  c.mc1_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.mc1_done = true;
}

Outcome criterion1(Context& c) {
  ensure_mc1(c);
  const McSummary& s = c.mc1;
  Outcome o;
  o.pass = s.runs == 200 && s.contained_runs == 200 && s.containment_rate == 1.0;
  o.detail = "example1 200 runs, containment rate " + fmt(s.containment_rate) + ", " +
             std::to_string(s.boundary_runs) + " boundary starts, worst margin " + fmt(s.min_margin) + ", " +
             fmt(c.mc1_seconds) + " s";
  return o;
}

// y(t) = sum amp sin(w t + phase) with exact derivatives
struct ToneSum {
  std::vector<double> amp, w, phase;
  double offset = 0.0;
  double deriv(int k, double t) const {
    double s = k == 0 ? offset : 0.0;
    for (std::size_t q = 0; q < amp.size(); ++q)
      s += amp[q] * std::pow(w[q], k) * std::sin(w[q] * t + phase[q] + k * std::numbers::pi / 2.0);
    return s;
  }
  double deriv_bound(int k) const {
    double s = 0.0;
    for (std::size_t q = 0; q < amp.size(); ++q) s += std::abs(amp[q]) * std::pow(w[q], k);
    return s;
  }
};

double hgo_envelope_ratio(int l, const ToneSum& y) {
  const double eps = 0.02, h = 2e-5;
  const HgoConfig c = design_hgo(l, eps);
  const DecayConstants dc = decay_constants(c);
  const double delta = y.deriv_bound(l + 1) * dc.K * eps / dc.a;
  HgoState s = initial_hgo_state(c, Vector::Constant(1, y.deriv(0, 0.0)));
  Vector e0(l + 1);
  for (int k = 0; k <= l; ++k) e0(k) = y.deriv(k, 0.0) - s.zhat[0](k);
  const double z0 = e0.norm();
  const HgoStepper st(c, h);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    st.step(s, Vector::Constant(1, y.deriv(0, (i + 0.5) * h)));
    const double t = (i + 1) * h;
    for (int k = 0; k <= l; ++k)
      worst = std::max(worst, std::abs(y.deriv(k, t) - s.zhat[0](k)) / hgo_error_envelope(k, l, eps, dc, delta, z0, t));
  }
  return worst;
}

Outcome criterion2(Context& c) {
  ensure_mc1(c);
  Outcome o;
  const double r = c.mc1.eps1_worst_ratio;
  const std::vector<ToneSum> sigs = {{{0.8}, {1.3}, {0.0}, 0.5}, {{0.3, -0.2}, {2.1, 0.7}, {0.4, 1.1}, -0.1}};
  double hgo = 0.0;
  for (int l = 0; l <= 2; ++l)
    for (const ToneSum& y : sigs) hgo = std::max(hgo, hgo_envelope_ratio(l, y));
  o.pass = r <= 1.0 && hgo <= 1.0;
  o.detail = "worst |x1-x1hat|/eps1 over the inner grid " + fmt(r) + ", worst hgo error/envelope for l<=2 " + fmt(hgo);
  return o;
}

Outcome criterion3(Context&) {
  const ObserverDesign d = prepare_design(builtin_scenario("example2"));
  const RunResult run = run_pipeline(d);
  const CertificateReport r = certify(d, run);
  Outcome o;
  std::ostringstream os;
  const int K = static_cast<int>(run.rows.size()) - 1;
  bool checks = true;
  for (const char* name : {"p2_lower", "p2_upper_sequence", "shape_sandwich"}) {
    const CertificateCheck* ch = r.check(name);
    const bool ok = ch && ch->passed && ch->evaluated > 0;
    checks = checks && ok;
    os << name << (ok ? " ok" : " FAILED") << ", ";
  }
  const bool fbar = r.alpha_lo == 0.1 && r.alpha_hi == 0.9 && r.beta_hi == 0.0 && r.f_bar < 1.0 - r.beta_hi;
  os << "f_bar " << fmt(r.f_bar) << " vs 1-beta_hi " << fmt(1.0 - r.beta_hi) << ", ";
  double head = 0.0, tail = 0.0;
  for (int k = 0; k <= K; ++k) {
    double& m = k <= 50 ? head : tail;
    m = std::max(m, run.rows[static_cast<std::size_t>(k)].trP);
  }
  const bool bounded = std::isfinite(tail) && tail <= 1.05 * head;
  os << "max trP after step 50 / max up to 50 = " << fmt(tail / head) << ", " << K << " steps, case " << r.case_name;
  if (!r.assumptions_hold) os << ", realized alpha or beta left the declared range";
  o.pass = K == 500 && checks && fbar && bounded && r.consistent;
  o.detail = os.str();
  return o;
}

Outcome criterion4(Context&) {
  std::mt19937_64 rng(404);
  int a_bad = 0, b_bad = 0, g_bad = 0;
  double a_gap = 0.0, b_dist = 0.0, g_gap = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index n = 1 + t % 4;
    const Matrix A4 = randn(rng, n, n) * 0.5, P = random_spd(rng, n), M = random_spd(rng, n);
    const double dt = 0.05 + 0.01 * (t % 10);
    const Matrix Phi = expm(A4 * dt);
    const Matrix prop = Phi * P * Phi.transpose();
    const double a = alpha_k(M, A4, P, dt).alpha;
    auto obj = [&](double x) { return (prop / x + dt * M / (1.0 - x)).trace(); };
    double best = 1e300;
    for (int i = 1; i < 10000; ++i) best = std::min(best, obj(i * 1e-4));
    const double gap = (obj(a) - best) / std::max(1.0, best);
    a_gap = std::max(a_gap, gap);
    if (gap > 1e-8) ++a_bad;
  }
  for (int t = 0; t < 100; ++t) {
    const Index n2 = 1 + t % 4, ny = 1 + (t / 4) % 3;
    const Matrix P = random_spd(rng, n2), G = random_spd(rng, ny), C2 = randn(rng, ny, n2);
    const BetaObjective f(P, C2, G);
    const double b = optimize_beta(P, C2, G);
    double best = 1e300, arg = 0.0;
    for (int i = 1; i < 100000; ++i) {
      const double x = i * 1e-5;
      const double v = f(x);
      if (v < best) best = v, arg = x;
    }
    const double dist = std::abs(b - arg);
    b_dist = std::max(b_dist, dist);
    if (dist > 1e-4) ++b_bad;
  }
  for (int t = 0; t < 100; ++t) {
    const Index n1 = 1 + t % 5, n2 = 1 + (t * 3) % 5;
    const double t1 = random_spd(rng, n1).trace(), t2 = random_spd(rng, n2).trace();
    const SplitFactor s = trace_optimal_split(t1, t2);
    const double opt = s.first() * t1 + s.second() * t2;
    double worst = -1e300;
    for (int i = 1; i <= 50000; ++i) {
      const double g = 1.0 + i * 1e-3;
      worst = std::max(worst, opt - (g * t1 + g / (g - 1.0) * t2));
    }
    g_gap = std::max(g_gap, worst);
    if (worst > 1e-9 * opt) ++g_bad;
  }
  Outcome o;
  o.pass = a_bad == 0 && b_bad == 0 && g_bad == 0;
  o.detail = "alpha worst gap " + fmt(a_gap) + " (" + std::to_string(a_bad) + " bad), beta worst argmin distance " +
             fmt(b_dist) + " (" + std::to_string(b_bad) + " bad), g* worst excess " + fmt(g_gap) + " (" +
             std::to_string(g_bad) + " bad)";
  return o;
}

Outcome criterion5(Context&) {
  const LtiSystem s2 = builtin_scenario("example2").sys, s1 = builtin_scenario("example1").sys;
  const Decomposition d2 = decompose(s2);
  bool ok = d2.n1 == 1 && d2.n2 == 2;
  if (ok) {
    ok = ok && std::abs(d2.A1(0, 0) - 2.0) <= 1e-10;
    ok = ok && spectrum_mismatch(eigenvalues(d2.A4), {Pole(-17, 0), Pole(-20, 0)}) <= 1e-10;
  }
  double resid = std::max(decomposition_residual(s1, decompose(s1)), decomposition_residual(s2, d2));
  bool recursion = true;
  std::mt19937_64 rng(505);
  for (int t = 0; t < 100; ++t) {
    const LtiSystem s = random_system(rng, t % 3 == 0);
    resid = std::max(resid, decomposition_residual(s, decompose(s)));
    const SubspaceRecursion r = weakly_unobservable_recursion(s);
    recursion = recursion && r.monotone && r.iterations <= s.n();
  }
  for (const LtiSystem* s : {&s1, &s2}) {
    const SubspaceRecursion r = weakly_unobservable_recursion(*s);
    recursion = recursion && r.monotone && r.iterations <= s->n();
  }
  Outcome o;
  o.pass = ok && resid <= 1e-10 && recursion;
  o.detail = std::string("example2 blocks ") + (ok ? "ok" : "WRONG") + ", worst round-trip residual " + fmt(resid) +
             ", recursion " + (recursion ? "monotone within n steps" : "FAILED");
  return o;
}

Outcome criterion6(Context&) {
  const Decomposition d2 = decompose(builtin_scenario("example2").sys);
  const UioDesign u = design_uio(d2, 1, {Pole(-3.0, 0.0)});
  const bool ex2 = u.F.rows() == 1 && u.F.cols() == 2 && std::abs(u.F(0, 0) - 3.0) <= 1e-9 &&
                   std::abs(u.F(0, 1) - 1.0) <= 1e-9 && std::abs(u.E(0, 0) + 3.0) <= 1e-9;
  double resid = u.constraint_residual;
  int designs = 1;
  for (const char* name : {"example1", "example2", "synthetic", "synthetic_unstable"}) {
    const ObserverDesign d = prepare_design(builtin_scenario(name));
    if (d.n1() == 0) continue;
    resid = std::max(resid, d.uio.constraint_residual);
    ++designs;
  }
  std::mt19937_64 rng(606);
  for (int t = 0; t < 50; ++t) {
    const Index n1 = 1 + t % 4, m = 1 + t % 2, r = m + n1 + 1;
    std::vector<Pole> poles;
    for (Index i = 0; i < n1; ++i) poles.emplace_back(-1.0 - static_cast<double>(i), 0.0);
    const Matrix A1 = randn(rng, n1, n1), Ol = randn(rng, r, n1), Gl = randn(rng, r, m), B1p = randn(rng, n1, m);
    resid = std::max(resid, solve_uio_gain(Ol, Gl, A1, B1p, poles).constraint_residual);
    ++designs;
  }
  Outcome o;
  o.pass = ex2 && resid <= 1e-8;
  o.detail = "example2 F=[" + fmt(u.F(0, 0)) + "," + fmt(u.F.cols() > 1 ? u.F(0, 1) : 0.0) + "] E=" + fmt(u.E(0, 0)) +
             ", worst constraint residual " + fmt(resid) + " over " + std::to_string(designs) + " designs";
  return o;
}

Outcome criterion7(Context&) {
  double worst = 0.0;
  int updates = 0, runs = 0;
  for (const char* name : {"example1", "example2", "synthetic", "synthetic_unstable"}) {
    const ObserverDesign d = prepare_design(builtin_scenario(name));
    const RunResult r = run_pipeline(d);
    worst = std::max(worst, r.woodbury_max);
    updates += r.updates;
    ++runs;
    for (std::size_t k = 1; k < r.steps.size(); ++k) worst = std::max(worst, r.steps[k].woodbury);
  }
  for (const char* name : {"synthetic", "synthetic_unstable"}) {
    const ObserverDesign d = prepare_design(builtin_scenario(name));
    const McSummary s = monte_carlo_containment(d, 20, d.cfg.seed, default_threads());
    worst = std::max(worst, s.woodbury_max);
    runs += s.runs;
  }
  Outcome o;
  o.pass = updates > 0 && worst <= 1e-9;
  o.detail = "worst relative Woodbury mismatch " + fmt(worst) + " over " + std::to_string(runs) + " runs (" +
             std::to_string(updates) + " updates in the nominal runs)";
  return o;
}

std::vector<double> trace_series(const ScenarioConfig& c) {
  const ObserverDesign d = prepare_design(c);
  RunOptions opt;
  opt.keep_sets = false;
  const RunResult r = run_pipeline(d, opt);
  std::vector<double> out;
  for (const TraceRow& row : r.rows) out.push_back(row.trP);
  return out;
}

double max_rel_change(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::abs(a[i]));
  return m;
}

Outcome criterion8(Context&) {
  std::ostringstream os;
  bool pass = true;
  for (const char* name : {"example1", "example2"}) {
    const ScenarioConfig base = builtin_scenario(name);
    const std::vector<double> ref = trace_series(base);
    os << name << ":";
    const std::vector<std::pair<const char*, std::function<void(ScenarioConfig&)>>> knobs = {
        {"hgo", [](ScenarioConfig& c) { c.substeps.hgo *= 2; }},
        {"quad", [](ScenarioConfig& c) { c.substeps.quad *= 2; }},
        {"plant", [](ScenarioConfig& c) { c.substeps.plant *= 2; }}};
    for (const auto& [label, tweak] : knobs) {
      ScenarioConfig c = base;
      tweak(c);
      const double m = max_rel_change(ref, trace_series(c));
      pass = pass && m < 1e-6;
      os << " " << label << " " << fmt(m);
    }
    os << "; ";
  }
  Outcome o;
  o.pass = pass;
  o.detail = "max relative trP change when doubling substeps, " + os.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Outcome criterion9(Context& c) {
  Outcome o;
  if (c.cli.empty()) return {false, "no --cli binary given"};
  const fs::path a = c.work / "demo_a", b = c.work / "demo_b";
  fs::remove_all(a);
  fs::remove_all(b);
  for (const fs::path& dir : {a, b}) {
    const std::string cmd = "\"" + c.cli + "\" demo --example 1 --out \"" + dir.string() + "\" > \"" +
                            (dir.string() + ".log") + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, "demo exited with status " + std::to_string(rc) + ", see " + dir.string() + ".log"};
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return {false, e.path().filename().string() + " differs"};
    ++files;
  }
  o.pass = files > 0 && fs::exists(a / "trace.csv");
  o.detail = std::to_string(files) + " CSV files byte-identical across two demo runs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  Context ctx;
  std::string work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--cli", ctx.cli, "path to the setobs executable");
  app.add_option("--work", work, "scratch directory");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);
  ctx.work = work;
  fs::create_directories(ctx.work);

  const std::vector<std::pair<const char*, Outcome (*)(Context&)>> all = {
      {"containment", criterion1}, {"eps1 validity", criterion2}, {"boundedness", criterion3},
      {"optimizer fidelity", criterion4}, {"decomposition", criterion5}, {"uio synthesis", criterion6},
      {"woodbury identity", criterion7}, {"substep convergence", criterion8}, {"determinism", criterion9}};
  int failures = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = all[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << all[i].first << "): " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
