#pragma once

#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "certificate.hpp"
#include "pipeline.hpp"

namespace setobs {

struct CertificateCheck {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // worst normalized margin, <= 1 when passing
  int first_failure = -1;
  int evaluated = 0;
};

struct CertificateReport {
  std::string mode;
  double alpha_lo = 0.0, alpha_hi = 0.0, beta_lo = 0.0, beta_hi = 0.0;
  double w_lo = 0.0, w_hi = 0.0;
  double eps1_lo = 0.0, eps1_hi = 0.0;
  double gamma1_lo = 0.0, gamma1_hi = 0.0, gamma2_lo = 0.0, gamma2_hi = 0.0;
  double mu1_lo = 0.0, mu1_hi = 0.0, mu2_lo = 0.0, mu2_hi = 0.0;
  double b2 = 0.0, c2 = 0.0, d2 = 0.0;
  double lambda2_hi = 0.0, a2_hi = 0.0, lambda2_lo = 0.0, a2_lo = 0.0;
  double kappa1 = 0.0, kappa2 = 0.0;
  double f_bar = 0.0, q_bar = 0.0, q_lo = 0.0, p2_lo = 0.0, p20 = 0.0;
  std::vector<double> p2_hi_seq;
  double p2_hi = std::numeric_limits<double>::infinity();
  double rho_lo = 0.0;
  int rho_windows = 0, rho_excluded = 0;
  int r = 0;
  double phi = 0.0;
  double remark3_lhs = 0.0, remark3_rhs = 0.0;
  bool remark3_holds = false;
  Matrix P_lo, P_hi;
  bool has_P_bounds = false;
  std::string case_name = "none";
  std::string reason;
  std::vector<CertificateCheck> checks;
  std::vector<std::string> warnings;
  bool assumptions_hold = true;  // realized constants inside the declared or harvested ranges
  bool consistent = true;        // every bound held against the run

  const CertificateCheck* check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

// tracks value <= bound, recording the worst ratio value / bound
class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name, double rel_tol = 1e-9) : tol_(rel_tol) { c_.name = std::move(name); }

  void leq(int k, double value, double bound) {
    ++c_.evaluated;
    const double ratio = bound > 0.0 ? value / bound : (value <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (!(value <= bound + tol_ * std::abs(bound))) {
      if (c_.passed) c_.first_failure = k;
      c_.passed = false;
    }
    if (std::isnan(ratio) || ratio > c_.worst) c_.worst = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
  }

  void geq(int k, double value, double bound) {
    ++c_.evaluated;
    const double ratio = value > 0.0 ? bound / value : (bound <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (!(value >= bound - tol_ * std::abs(bound))) {
      if (c_.passed) c_.first_failure = k;
      c_.passed = false;
    }
    if (std::isnan(ratio) || ratio > c_.worst) c_.worst = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
  }

  CertificateCheck done() const { return c_; }

 private:
  CertificateCheck c_;
  double tol_;
};

inline double sigma_min_full_row(const Matrix& M) {
  if (M.rows() == 0 || M.rows() > M.cols()) return 0.0;
  return sigma_min(M);
}

}  // namespace detail

// Assumption-4 constants, declared or taken from the realized run
inline AssumptionConstants assumption_constants(const ObserverDesign& d, const RunResult& run) {
  const CertificateOptions& co = d.cfg.cert;
  AssumptionConstants c;
  double wlo = std::numeric_limits<double>::infinity(), whi = 0.0;
  const int nodes = d.steps * d.quad;
  for (int i = 0; i <= nodes; ++i) {
    const Matrix K = d.cfg.Kw(i * d.h_quad);
    wlo = std::min(wlo, min_eig_sym(K));
    whi = std::max(whi, max_eig_sym(K));
  }
  c.w_lo = wlo;
  c.w_hi = whi;
  double alo = 1.0, ahi = 0.0, blo = 1.0, bhi = 0.0;
  for (std::size_t k = 1; k < run.steps.size(); ++k) {
    alo = std::min(alo, run.steps[k].alpha);
    ahi = std::max(ahi, run.steps[k].alpha);
    blo = std::min(blo, run.steps[k].beta);
    bhi = std::max(bhi, run.steps[k].beta);
  }
  if (run.steps.size() <= 1) alo = ahi = 0.5, blo = bhi = 0.0;
  const auto [ha_lo, ha_hi] = harvest_range(alo, ahi, co.harvest_margin);
  const auto [hb_lo, hb_hi] = harvest_range(blo, bhi, co.harvest_margin);
  if (co.mode == CertificateOptions::Mode::declared) {
    c.mode = "declared";
    c.alpha_lo = co.alpha_lo.value_or(ha_lo);
    c.alpha_hi = co.alpha_hi.value_or(ha_hi);
    c.beta_lo = co.beta_lo.value_or(hb_lo);
    c.beta_hi = co.beta_hi.value_or(hb_hi);
  } else {
    c.mode = "harvested (empirical)";
    c.alpha_lo = ha_lo;
    c.alpha_hi = ha_hi;
    c.beta_lo = hb_lo;
    c.beta_hi = hb_hi;
  }
  return c;
}

inline CertificateReport certify(const ObserverDesign& d, const RunResult& run) {
  require(run.P2.size() == run.rows.size() && run.sets.size() == run.rows.size(), ErrorCode::invalid_parameter,
          "certification needs a run that kept its sets");
  const ScenarioConfig& cfg = d.cfg;
  const Decomposition& dec = d.dec;
  const Index n1 = dec.n1, n2 = dec.n2;
  const int K = static_cast<int>(run.rows.size()) - 1;
  CertificateReport rep;

  const AssumptionConstants ac = assumption_constants(d, run);
  rep.mode = ac.mode;
  rep.alpha_lo = ac.alpha_lo;
  rep.alpha_hi = ac.alpha_hi;
  rep.beta_lo = ac.beta_lo;
  rep.beta_hi = ac.beta_hi;
  rep.w_lo = ac.w_lo;
  rep.w_hi = ac.w_hi;
  if (n2 == 0) rep.alpha_lo = rep.alpha_hi = rep.beta_lo = rep.beta_hi = 0.0;

  if (n1 > 0) {
    const Epsilon1Range er = epsilon1_uniform_bounds(d.eps1, d.bound, d.uio.E, cfg.cert.eps1_floor);
    rep.eps1_lo = er.lo;
    rep.eps1_hi = er.hi;
  }

  GammaBounds gb;
  if (n1 > 0 && n2 > 0) {
    const double nw = static_cast<double>(cfg.sys.nw());
    gb = gamma_bounds(nw * rep.w_lo, nw * rep.w_hi, rep.eps1_lo, rep.eps1_hi, n1);
    rep.gamma1_lo = gb.g1_lo();
    rep.gamma1_hi = gb.g1_hi();
    rep.gamma2_lo = gb.g2_lo();
    rep.gamma2_hi = gb.g2_hi();
  }

  double p2_hi = std::numeric_limits<double>::infinity();
  double p2_lo = 0.0;
  if (n2 == 0) {
    rep.case_name = "none";
    rep.reason = "no_weak_subsystem";
  } else {
    rep.b2 = spectral_norm(dec.B2p);
    rep.c2 = dec.C2.size() > 0 ? spectral_norm(dec.C2) : 0.0;
    rep.d2 = detail::sigma_min_full_row(dec.D2p);
    const EnvelopePair env = exponential_envelopes(dec.A4, cfg.cert.envelope_margin);
    rep.lambda2_hi = env.upper.lambda;
    rep.a2_hi = env.upper.a;
    rep.lambda2_lo = env.lower.lambda;
    rep.a2_lo = env.lower.a;
    rep.kappa1 = grammian_kappa(dec.A4, cfg.dt, d.quad);
    rep.kappa2 = detail::sigma_min_full_row(dec.B2p);
    const double tol = default_rank_tol(dec.B2p);
    if (!(rep.kappa2 > tol)) {
      rep.warnings.push_back("input map of the weak subsystem lacks full row rank, lower shape bound unavailable");
      rep.kappa2 = 0.0;
    }
    rep.p20 = spectral_norm(symmetrize(dec.P1 * cfg.K0 * dec.P1.transpose()));

    Lemma5Inputs in{};
    in.upper = env.upper;
    in.alpha_lo = rep.alpha_lo;
    in.alpha_hi = rep.alpha_hi;
    in.beta_lo = rep.beta_lo;
    in.beta_hi = rep.beta_hi;
    if (n1 > 0) {
      in.u_max = std::max(rep.gamma1_hi * rep.eps1_hi * rep.eps1_hi, rep.gamma2_hi * rep.w_hi);
      in.u_min = std::min(rep.gamma1_lo * rep.eps1_lo * rep.eps1_lo, rep.gamma2_lo * rep.w_lo);
    } else {
      in.u_max = rep.w_hi;
      in.u_min = rep.w_lo;
    }
    in.b2 = rep.b2;
    in.c2 = rep.c2;
    in.d2 = rep.d2;
    in.kappa1 = rep.kappa1;
    in.kappa2 = rep.kappa2;
    in.dt = cfg.dt;
    in.p20 = rep.p20;
    const Lemma5 l5 = lemma5_bounds(in, K);
    rep.f_bar = l5.f_bar;
    rep.q_bar = l5.q_bar;
    rep.q_lo = l5.q_lo;
    rep.p2_lo = l5.p2_lo;
    rep.p2_hi_seq = l5.p2_hi_seq;
    p2_lo = l5.p2_lo;

    const Remark3 r3 = remark3(env.upper, rep.alpha_lo, rep.beta_hi, cfg.dt);
    rep.remark3_lhs = r3.lhs;
    rep.remark3_rhs = r3.rhs;
    rep.remark3_holds = r3.holds;

    rep.r = cfg.cert.r.value_or(static_cast<int>(n2));
    std::vector<std::optional<Matrix>> G;
    for (int k = 1; k <= K; ++k) G.push_back(run.steps[static_cast<std::size_t>(k)].G);
    const RhoResult rr = grammian_rho(dec, G, rep.r, cfg.dt);
    rep.rho_lo = rr.rho;
    rep.rho_windows = rr.windows;
    rep.rho_excluded = rr.excluded;
    if (rr.excluded > 0)
      rep.warnings.push_back(std::to_string(rr.excluded) + " observability windows excluded for skipped updates");

    if (l5.f_bar < 1.0 - rep.beta_hi) {
      rep.case_name = "lemma6";
      p2_hi = lemma6_uniform_bound(l5, rep.beta_hi);
    } else if (!(rr.rho > 0.0)) {
      rep.reason = "rho_lo_zero";
    } else if (!(rep.beta_lo > 0.0)) {
      rep.reason = "beta_lo_zero";
    } else if (!(l5.p2_lo > 0.0)) {
      rep.reason = "p2_lo_unavailable";
    } else {
      rep.case_name = "lemma7";
      const Lemma7 l7 = lemma7_uniform_bound(l5, env.lower, rep.alpha_lo, rep.alpha_hi, rep.beta_lo, rep.beta_hi, rr.rho,
                                             rep.r, cfg.dt);
      rep.phi = l7.phi;
      p2_hi = l7.p2_hi;
    }
    if (rep.case_name != "none") rep.p2_hi = p2_hi;
  }

  // Theorem 2 block bounds
  const bool have_p = n2 == 0 || (rep.case_name != "none" && p2_lo > 0.0 && std::isfinite(p2_hi));
  const bool have_eps = n1 == 0 || rep.eps1_lo > 0.0;
  if (have_p && have_eps) {
    const Theorem2 t2 = theorem2_bounds(rep.eps1_lo, rep.eps1_hi, p2_lo, p2_hi, dec.P1inv, n1, n2);
    if (n1 > 0 && n2 > 0) {
      rep.mu1_lo = t2.mu1_lo();
      rep.mu1_hi = t2.mu1_hi();
      rep.mu2_lo = t2.mu2_lo();
      rep.mu2_hi = t2.mu2_hi();
    }
    rep.P_lo = t2.P_lo;
    rep.P_hi = t2.P_hi;
    rep.has_P_bounds = true;
  } else if (rep.case_name != "none" && !(p2_lo > 0.0)) {
    rep.warnings.push_back("lower shape bound is zero, shape sandwich unavailable");
  }

  // checks against the run
  if (n2 > 0) {
    detail::CheckBuilder a("alpha_in_range"), b("beta_in_range");
    for (int k = 1; k <= K; ++k) {
      const StepData& s = run.steps[static_cast<std::size_t>(k)];
      a.geq(k, s.alpha, rep.alpha_lo);
      a.leq(k, s.alpha, rep.alpha_hi);
      b.geq(k, s.beta, rep.beta_lo);
      b.leq(k, s.beta, rep.beta_hi);
    }
    rep.checks.push_back(a.done());
    rep.checks.push_back(b.done());
    rep.assumptions_hold = rep.checks[0].passed && rep.checks[1].passed;
  }
  std::vector<std::size_t> soundness;
  auto add = [&](const detail::CheckBuilder& cb) {
    soundness.push_back(rep.checks.size());
    rep.checks.push_back(cb.done());
  };
  if (n1 > 0 && n2 > 0) {
    detail::CheckBuilder g("gamma_bracket"), m("mu_bracket");
    for (int k = 1; k <= K; ++k) {
      const StepData& s = run.steps[static_cast<std::size_t>(k)];
      if (s.has_gamma) {
        g.geq(k, s.gamma.first(), rep.gamma1_lo);
        g.leq(k, s.gamma.first(), rep.gamma1_hi);
        g.geq(k, s.gamma.second(), rep.gamma2_lo);
        g.leq(k, s.gamma.second(), rep.gamma2_hi);
      }
      if (rep.has_P_bounds && s.has_mu) {
        m.geq(k, s.mu.first(), rep.mu1_lo);
        m.leq(k, s.mu.first(), rep.mu1_hi);
        m.geq(k, s.mu.second(), rep.mu2_lo);
        m.leq(k, s.mu.second(), rep.mu2_hi);
      }
    }
    add(g);
    if (rep.has_P_bounds) add(m);
  }
  if (n2 > 0) {
    detail::CheckBuilder lo("p2_lower"), seq("p2_upper_sequence"), uni("p2_upper_uniform");
    for (int k = 0; k <= K; ++k) {
      const Matrix& P2 = run.P2[static_cast<std::size_t>(k)];
      const double emax = max_eig_sym(P2);
      seq.leq(k, emax, rep.p2_hi_seq[static_cast<std::size_t>(k)]);
      if (k == 0) continue;
      if (rep.p2_lo > 0.0) lo.geq(k, min_eig_sym(P2), rep.p2_lo);
      if (rep.case_name != "none") uni.leq(k, emax, rep.p2_hi);
    }
    if (rep.p2_lo > 0.0) add(lo);
    add(seq);
    if (rep.case_name != "none") add(uni);
  }
  if (rep.has_P_bounds) {
    detail::CheckBuilder sw("shape_sandwich");
    const Index n = n1 + n2;
    Vector dlo(n), dhi(n);
    const Matrix Dlo = dec.P1 * rep.P_lo * dec.P1.transpose();
    const Matrix Dhi = dec.P1 * rep.P_hi * dec.P1.transpose();
    for (Index i = 0; i < n; ++i) dlo(i) = Dlo(i, i), dhi(i) = Dhi(i, i);
    for (int k = 1; k <= K; ++k) {
      const Matrix S = symmetrize(dec.P1 * run.sets[static_cast<std::size_t>(k)].shape() * dec.P1.transpose());
      sw.geq(k, scaled_eig_range(S, dlo).first, 1.0);
      sw.leq(k, scaled_eig_range(S, dhi).second, 1.0);
    }
    add(sw);
  }
  for (std::size_t i : soundness) rep.consistent = rep.consistent && rep.checks[i].passed;
  return rep;
}

inline nlohmann::ordered_json to_json(const CertificateReport& r) {
  using nlohmann::ordered_json;
  auto num = [](double v) -> ordered_json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  };
  auto mat = [&](const Matrix& M) {
    ordered_json a = ordered_json::array();
    for (Index i = 0; i < M.rows(); ++i) {
      ordered_json row = ordered_json::array();
      for (Index j = 0; j < M.cols(); ++j) row.push_back(num(M(i, j)));
      a.push_back(row);
    }
    return a;
  };
  ordered_json j;
  j["format"] = "setobs-certificate/1";
  j["mode"] = r.mode;
  j["case"] = r.case_name;
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["consistent"] = r.consistent;
  j["assumptions_hold"] = r.assumptions_hold;
  j["alpha_lo"] = num(r.alpha_lo);
  j["alpha_hi"] = num(r.alpha_hi);
  j["beta_lo"] = num(r.beta_lo);
  j["beta_hi"] = num(r.beta_hi);
  j["w_lo"] = num(r.w_lo);
  j["w_hi"] = num(r.w_hi);
  j["eps1_lo"] = num(r.eps1_lo);
  j["eps1_hi"] = num(r.eps1_hi);
  j["gamma1_lo"] = num(r.gamma1_lo);
  j["gamma1_hi"] = num(r.gamma1_hi);
  j["gamma2_lo"] = num(r.gamma2_lo);
  j["gamma2_hi"] = num(r.gamma2_hi);
  j["mu1_lo"] = num(r.mu1_lo);
  j["mu1_hi"] = num(r.mu1_hi);
  j["mu2_lo"] = num(r.mu2_lo);
  j["mu2_hi"] = num(r.mu2_hi);
  j["b2"] = num(r.b2);
  j["c2"] = num(r.c2);
  j["d2"] = num(r.d2);
  j["lambda2_hi"] = num(r.lambda2_hi);
  j["a2_hi"] = num(r.a2_hi);
  j["lambda2_lo"] = num(r.lambda2_lo);
  j["a2_lo"] = num(r.a2_lo);
  j["kappa1"] = num(r.kappa1);
  j["kappa2"] = num(r.kappa2);
  j["f_bar"] = num(r.f_bar);
  j["q_bar"] = num(r.q_bar);
  j["q_lo"] = num(r.q_lo);
  j["p2_lo"] = num(r.p2_lo);
  j["p2_0"] = num(r.p20);
  j["p2_hi"] = num(r.p2_hi);
  ordered_json seq = ordered_json::array();
  for (double v : r.p2_hi_seq) seq.push_back(num(v));
  j["p2_hi_seq"] = seq;
  j["rho_lo"] = num(r.rho_lo);
  j["rho_windows"] = r.rho_windows;
  j["r"] = r.r;
  j["phi"] = num(r.phi);
  j["remark3"] = {{"lambda2_hi", num(r.remark3_lhs)}, {"threshold", num(r.remark3_rhs)}, {"holds", r.remark3_holds}};
  if (r.has_P_bounds) {
    j["P_lo"] = mat(r.P_lo);
    j["P_hi"] = mat(r.P_hi);
  }
  ordered_json cs = ordered_json::array();
  for (const auto& c : r.checks)
    cs.push_back({{"name", c.name},
                  {"passed", c.passed},
                  {"worst_ratio", num(c.worst)},
                  {"first_failure", c.first_failure},
                  {"evaluated", c.evaluated}});
  j["checks"] = cs;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace setobs
