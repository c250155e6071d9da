#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "decomposition.hpp"
#include "derivative_bounds.hpp"
#include "ellipsoid.hpp"
#include "fusion.hpp"
#include "hgo.hpp"
#include "plant.hpp"
#include "scenario.hpp"
#include "strong_observer.hpp"
#include "weak_observer.hpp"

namespace setobs {

// everything that does not depend on the realized trajectory
struct ObserverDesign {
  ScenarioConfig cfg;
  SubspaceRecursion vstar;
  Decomposition dec;
  std::optional<DerivativeOrder> order;
  int l = 0;
  HgoConfig hgo;
  DecayConstants decay;
  UioDesign uio;
  ErrorBoundParams bound;
  Epsilon1Profile eps1;
  std::vector<double> input_bounds;
  double init_norm = 0.0;
  double y_deriv_bound = 0.0;
  double zbar0 = 0.0;
  HgoStepper hgo_step;
  UioStepper uio_step;
  PropagationKernel kernel;
  int steps = 0;
  int inner = 0;     // inner steps per dt
  int quad = 0;      // quadrature intervals per dt
  int ratio = 0;     // inner steps per quadrature interval
  double h_inner = 0.0, h_quad = 0.0;
  std::vector<std::string> warnings;

  Index n1() const { return dec.n1; }
  Index n2() const { return dec.n2; }
  double eps1_at_quad(int node) const { return n1() > 0 ? eps1.node(static_cast<std::size_t>(node)) : 0.0; }
  double eps1_at_inner(long long m) const {
    if (n1() == 0) return 0.0;
    return eps1.at(static_cast<std::size_t>(m / ratio), static_cast<std::size_t>(m % ratio), static_cast<std::size_t>(ratio));
  }
};

inline ObserverDesign prepare_design(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  ObserverDesign d;
  d.cfg = cfg;
  d.vstar = weakly_unobservable_recursion(cfg.sys, cfg.rank_tol);
  d.dec = build_decomposition(cfg.sys, d.vstar.basis);
  d.warnings = d.dec.warnings;
  d.steps = cfg.steps();
  d.inner = cfg.substeps.hgo;
  d.quad = cfg.substeps.quad;
  d.ratio = d.inner / d.quad;
  d.h_inner = cfg.dt / d.inner;
  d.h_quad = cfg.dt / d.quad;
  const Matrix K0p = symmetrize(d.dec.P1 * cfg.K0 * d.dec.P1.transpose());
  d.init_norm = std::sqrt(spectral_norm(K0p));
  if (d.dec.n1 > 0) {
    if (cfg.hgo.l) {
      d.l = *cfg.hgo.l;
      require(d.l >= 0, ErrorCode::invalid_parameter, "derivative order must be nonnegative");
    } else {
      d.order = select_derivative_order(d.dec, -1, cfg.rank_tol);
      d.l = d.order->l;
      if (!d.order->rank_test_agrees) d.warnings.push_back("rank-increment test disagrees with the selected order");
    }
    d.hgo = design_hgo(d.l, cfg.hgo.eps, cfg.hgo.pole, cfg.sys.ny());
    d.decay = decay_constants(d.hgo);
    d.uio = design_uio(d.dec, d.l, cfg.uio, cfg.rank_tol);
    if (!d.uio.exact_placement) d.warnings.push_back("requested observer poles not placed; using a stabilizing gain");
    d.input_bounds = input_derivative_bounds(cfg, d.l + 1);
    const Ellipsoid x0 = cfg.initial_set();
    d.y_deriv_bound = cfg.hgo.y_deriv_bound
                          ? *cfg.hgo.y_deriv_bound
                          : output_derivative_bound(cfg.sys, x0, d.input_bounds, d.l + 1, cfg.horizon).max();
    d.zbar0 = cfg.hgo.zbar0 ? *cfg.hgo.zbar0 : initial_derivative_error_bound(cfg.sys, x0, d.input_bounds, d.l);
    d.bound = make_error_bound_params(d.hgo, d.decay, d.uio, d.y_deriv_bound, d.zbar0, d.init_norm);
    d.eps1 = Epsilon1Profile(d.bound, d.uio.E, d.h_quad, cfg.horizon);
    d.hgo_step = HgoStepper(d.hgo, d.h_inner);
    d.uio_step = UioStepper(d.uio, d.h_inner);
  }
  if (d.dec.n2 > 0) d.kernel = PropagationKernel(d.dec.A4, d.dec.B2p, cfg.dt, d.quad);
  return d;
}

struct TraceRow {
  double t = 0.0;
  Vector x_true, xhat, lo, hi;
  double trP = 0.0, vol = 0.0, eps1 = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0, mu = 0.0;
  bool contained = true, skipped = true;

  bool operator==(const TraceRow& o) const {
    return t == o.t && x_true == o.x_true && xhat == o.xhat && lo == o.lo && hi == o.hi && trP == o.trP &&
           vol == o.vol && eps1 == o.eps1 && alpha == o.alpha && beta == o.beta && gamma == o.gamma && mu == o.mu &&
           contained == o.contained && skipped == o.skipped;
  }
};

struct RunOptions {
  bool check_eps1 = false;       // compare the strong-observer error with eps1 on the inner grid
  bool throw_on_violation = false;
  bool keep_sets = true;
  bool step_log = false;
  double slack = kMembershipSlack;
};

struct StepData {
  double alpha = 0.0, beta = 0.0;
  SplitFactor gamma, mu;
  bool has_gamma = false, has_mu = false;
  bool skipped = true;
  std::optional<Matrix> G;  // measurement noise shape when the update was applicable
  double eps1 = 0.0;
  double woodbury = 0.0;
};

struct RunResult {
  std::vector<TraceRow> rows;
  std::vector<Ellipsoid> sets;
  std::vector<Matrix> P2;
  std::vector<StepData> steps;  // index k, entry 0 describes the initial set
  bool contained_all = true;
  int violations = 0;
  double worst_quadratic_form = 0.0;
  double eps1_worst_ratio = 0.0;
  double woodbury_max = 0.0;
  int updates = 0;
  std::vector<std::string> log;
};

namespace detail {

inline TraceRow make_row(double t, const Vector& x, const Ellipsoid& E, double eps1, const StepData& sd, double slack,
                         double& qf) {
  TraceRow r;
  r.t = t;
  r.x_true = x;
  r.xhat = E.center();
  const AxisBounds ab = axis_bounds(E);
  r.lo = ab.lo;
  r.hi = ab.hi;
  r.trP = E.shape().trace();
  r.vol = std::exp(log_volume(E));
  r.eps1 = eps1;
  r.alpha = sd.alpha;
  r.beta = sd.beta;
  r.gamma = sd.has_gamma ? sd.gamma.first() : 0.0;
  r.mu = sd.has_mu ? sd.mu.first() : 0.0;
  qf = E.quadratic_form(x);
  r.contained = qf <= 1.0 + slack;
  r.skipped = sd.skipped;
  return r;
}

inline std::string dump_state(int k, double t, const Vector& x, const Ellipsoid& E, double qf) {
  std::ostringstream os;
  os.precision(17);
  os << "step " << k << " t=" << t << " quadratic form " << qf << "\n x_true = " << x.transpose()
     << "\n center = " << E.center().transpose() << "\n shape =\n" << E.shape();
  return os.str();
}

}  // namespace detail

// Algorithm 1 on one realization of x(0) and w
inline RunResult run_pipeline(const ObserverDesign& d, const Vector& x0_true, const SignalVector& w,
                              const RunOptions& opt = {}) {
  const ScenarioConfig& cfg = d.cfg;
  const LtiSystem& sys = cfg.sys;
  const Decomposition& dec = d.dec;
  const Index n1 = dec.n1, n2 = dec.n2;
  require(x0_true.size() == sys.n(), ErrorCode::invalid_dimension, "initial state size mismatch");
  require(w.size() == sys.nw(), ErrorCode::invalid_dimension, "input size mismatch");
  RunResult res;
  auto log = [&](const char* s) {
    if (opt.step_log) res.log.emplace_back(s);
  };
  auto wfun = [&](double t) { return w(t); };

  Vector x = x0_true;
  Vector yv;
  auto measure = [&](double t) { return Vector(sys.C * x + sys.D * w(t)); };

  // t = 0 setup
  Vector x1hat = dec.W.transpose() * cfg.x0_hat;
  WeakState ws;
  ws.x2hat = dec.V.transpose() * cfg.x0_hat;
  ws.P2hat = symmetrize(dec.V.transpose() * cfg.K0 * dec.V);
  HgoState hs;
  Vector zhat;
  if (n1 > 0) {
    hs = initial_hgo_state(d.hgo, measure(0.0));
    assemble_z_hat(d.hgo, hs, zhat);
  }

  auto fuse_now = [&](double eps, StepData& sd) {
    if (n1 > 0 && n2 > 0) {
      const FusedEstimate f = fuse(x1hat, eps, ws, dec);
      sd.mu = f.mu;
      sd.has_mu = true;
      return f.set;
    }
    return fuse(x1hat, eps, ws, dec).set;
  };

  auto record = [&](int k, double t, const Ellipsoid& E, double eps, const StepData& sd) {
    double qf = 0.0;
    TraceRow row = detail::make_row(t, x, E, eps, sd, opt.slack, qf);
    res.worst_quadratic_form = std::max(res.worst_quadratic_form, qf);
    if (!row.contained) {
      res.contained_all = false;
      ++res.violations;
      if (opt.throw_on_violation) fail(ErrorCode::containment_violation, detail::dump_state(k, t, x, E, qf));
    }
    res.rows.push_back(std::move(row));
    if (opt.keep_sets) {
      res.sets.push_back(E);
      res.P2.push_back(ws.P2hat);
    }
    res.steps.push_back(sd);
  };

  {
    StepData sd;
    sd.eps1 = n1 > 0 ? d.eps1_at_quad(0) : 0.0;
    const Ellipsoid E = fuse_now(sd.eps1, sd);
    record(0, 0.0, E, sd.eps1, sd);
  }

  const std::size_t Nq = static_cast<std::size_t>(d.quad) + 1;
  StepInputs in;
  in.x1hat.resize(Nq);
  in.eps1.resize(Nq);
  in.cw.resize(Nq);
  in.Kw.resize(Nq);
  const double hp = d.h_inner / cfg.substeps.plant;

  for (int k = 1; k <= d.steps; ++k) {
    const double t0 = (k - 1) * cfg.dt;
    const long long m0 = static_cast<long long>(k - 1) * d.inner;
    // continuous blocks over [t_{k-1}, t_k]
    log("continuous");
    for (int j = 0; j < d.inner; ++j) {
      const double t = t0 + j * d.h_inner;
      if (j % d.ratio == 0) {
        const std::size_t q = static_cast<std::size_t>(j / d.ratio);
        in.x1hat[q] = x1hat;
        in.eps1[q] = n1 > 0 ? d.eps1_at_quad(static_cast<int>((k - 1) * d.quad + static_cast<int>(q))) : 0.0;
        in.cw[q] = cfg.cw(t);
        in.Kw[q] = cfg.Kw(t);
      }
      if (n1 > 0) {
        yv = measure(t);
        d.uio_step.step(x1hat, zhat);
        d.hgo_step.step(hs, yv);
        assemble_z_hat(d.hgo, hs, zhat);
      }
      for (int s = 0; s < cfg.substeps.plant; ++s) rk4_step(sys, x, wfun, t + s * hp, hp);
      if (opt.check_eps1 && n1 > 0) {
        const double e = (dec.W.transpose() * x - x1hat).norm();
        const double bound = d.eps1_at_inner(m0 + j + 1);
        res.eps1_worst_ratio = std::max(res.eps1_worst_ratio, e / bound);
      }
    }
    const double tk = k * cfg.dt;
    in.x1hat[Nq - 1] = x1hat;
    in.eps1[Nq - 1] = n1 > 0 ? d.eps1_at_quad(k * d.quad) : 0.0;
    in.cw[Nq - 1] = cfg.cw(tk);
    in.Kw[Nq - 1] = cfg.Kw(tk);
    in.y = measure(tk);

    StepData sd;
    sd.eps1 = in.eps1[Nq - 1];
    if (n2 > 0) {
      SplitFactor g{1.0};
      if (n1 > 0) {
        log("gamma");
        g = gamma_k(in.Kw[Nq - 1], sd.eps1, n1);
        sd.gamma = g;
        sd.has_gamma = true;
      }
      log("alpha");
      log("propagate");
      const Propagation pr = d.kernel.propagate(ws, in, n1, n1 > 0 ? &g : nullptr);
      sd.alpha = pr.alpha;
      log("gate");
      const Matrix Ku = build_Ku(g, sd.eps1, in.Kw[Nq - 1], n1);
      const Matrix G = symmetrize(dec.D2p * Ku * dec.D2p.transpose());
      if (update_applicable(dec.C2, G)) {
        sd.G = G;
        log("beta");
        const double beta = optimize_beta(pr.P2_pred, dec.C2, G);
        log("update");
        const Vector uh = n1 > 0 ? build_u_hat(x1hat, in.cw[Nq - 1]) : in.cw[Nq - 1];
        UpdateResult up = measurement_update(pr.x2_pred, pr.P2_pred, dec.C2, dec.D2p, in.y, uh, G, beta);
        ws = std::move(up.state);
        sd.beta = beta;
        sd.skipped = false;
        sd.woodbury = up.woodbury_residual;
        res.woodbury_max = std::max(res.woodbury_max, up.woodbury_residual);
        ++res.updates;
      } else {
        ws.x2hat = pr.x2_pred;
        ws.P2hat = pr.P2_pred;
        sd.beta = 0.0;
        sd.skipped = true;
      }
      ws.k = k;
    }
    log("fuse");
    const Ellipsoid E = fuse_now(sd.eps1, sd);
    record(k, tk, E, sd.eps1, sd);
  }
  return res;
}

inline RunResult run_pipeline(const ObserverDesign& d, const RunOptions& opt = {}) {
  return run_pipeline(d, d.cfg.initial_truth(), d.cfg.w_true, opt);
}

}  // namespace setobs
