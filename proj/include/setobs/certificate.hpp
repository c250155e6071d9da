#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "decomposition_types.hpp"
#include "quadrature.hpp"
#include "weak_observer.hpp"

namespace setobs {

// ||e^{A t}|| <= a e^{lambda t} for t >= 0
struct Envelope {
  double lambda = 0.0;
  double a = 1.0;
};

inline Envelope exponential_envelope(const Matrix& A, double margin_fraction = 0.05, double safety = 1.05,
                                     int grid = 4000) {
  require(A.rows() == A.cols() && A.rows() > 0, ErrorCode::invalid_dimension, "envelope needs a square matrix");
  const double mr = max_real_eig(A);
  const double margin = margin_fraction * (1.0 + std::abs(mr));
  Envelope e;
  e.lambda = mr + margin;
  // shifted exponential stays well scaled for either sign of A
  const Matrix As = A - e.lambda * Matrix::Identity(A.rows(), A.cols());
  const double T = 40.0 / margin;
  const double h = T / grid;
  const Matrix step = expm(As * h);
  Matrix X = Matrix::Identity(A.rows(), A.cols());
  double sup = 1.0;
  for (int i = 1; i <= grid; ++i) {
    X = (X * step).eval();
    sup = std::max(sup, spectral_norm(X));
  }
  e.a = safety * sup;
  return e;
}

struct EnvelopePair {
  Envelope upper;  // for e^{A4 t}
  Envelope lower;  // for e^{-A4 t}
};

inline EnvelopePair exponential_envelopes(const Matrix& A4, double margin_fraction = 0.05) {
  return {exponential_envelope(A4, margin_fraction), exponential_envelope(-A4, margin_fraction)};
}

// (e^{2 lambda dt} - 1) / (2 lambda), series near lambda = 0
inline double exp_ratio(double lambda, double dt) {
  const double x = 2.0 * lambda * dt;
  if (std::abs(x) < 1e-4) return dt * (1.0 + x / 2.0 + x * x / 6.0);
  return std::expm1(x) / (2.0 * lambda);
}

// lambda_min of int_0^dt e^{A s} e^{A' s} ds
inline double grammian_kappa(const Matrix& A4, double dt, int intervals) {
  const Index n = A4.rows();
  const double h = dt / intervals;
  const std::vector<double> w = simpson_weights(static_cast<std::size_t>(intervals));
  const Matrix step = expm(A4 * h);
  Matrix X = Matrix::Identity(n, n), S = Matrix::Zero(n, n);
  for (int i = 0; i <= intervals; ++i) {
    S += w[static_cast<std::size_t>(i)] * h * X * X.transpose();
    X = (X * step).eval();
  }
  return min_eig_sym(S);
}

struct AssumptionConstants {
  double alpha_lo = 0.0, alpha_hi = 0.0, beta_lo = 0.0, beta_hi = 0.0;
  double w_lo = 0.0, w_hi = 0.0;
  std::string mode;
};

// margin applied to the realized range, lo shrinks toward 0 and hi toward 1
inline std::pair<double, double> harvest_range(double lo, double hi, double margin) {
  return {lo * (1.0 - margin), hi + margin * (1.0 - hi)};
}

// bounds on gamma and gamma/(gamma-1), both through the excess s = gamma - 1
struct GammaBounds {
  double s_lo = 0.0, s_hi = 0.0;
  double g1_lo() const { return 1.0 + s_lo; }
  double g1_hi() const { return 1.0 + s_hi; }
  double g2_lo() const { return 1.0 + 1.0 / s_hi; }
  double g2_hi() const { return 1.0 + 1.0 / s_lo; }
};

inline GammaBounds gamma_bounds(double tr_lo, double tr_hi, double eps_lo, double eps_hi, Index n1) {
  const double d = static_cast<double>(n1);
  return {std::sqrt(tr_lo / (d * eps_hi * eps_hi)), std::sqrt(tr_hi / (d * eps_lo * eps_lo))};
}

struct Lemma5 {
  double f_bar = 0.0, q_bar = 0.0, q_lo = 0.0, p2_lo = 0.0, p20 = 0.0;
  std::vector<double> p2_hi_seq;
};

struct Lemma5Inputs {
  Envelope upper;
  double alpha_lo, alpha_hi, beta_lo, beta_hi;
  double u_max;  // max(gamma1 eps1^2, gamma2 w) upper extremes
  double u_min;  // min(...) lower extremes
  double b2, c2, d2, kappa1, kappa2;
  double dt;
  double p20;
};

inline Lemma5 lemma5_bounds(const Lemma5Inputs& in, int horizon_k) {
  require(in.alpha_lo > 0.0 && in.alpha_hi < 1.0 && in.alpha_lo <= in.alpha_hi, ErrorCode::invalid_parameter,
          "alpha bounds must satisfy 0 < lo <= hi < 1");
  require(in.beta_lo >= 0.0 && in.beta_hi < 1.0 && in.beta_lo <= in.beta_hi, ErrorCode::invalid_parameter,
          "beta bounds must satisfy 0 <= lo <= hi < 1");
  Lemma5 r;
  const double a2 = in.upper.a * in.upper.a;
  r.f_bar = a2 * std::exp(2.0 * in.upper.lambda * in.dt) / in.alpha_lo;
  r.q_bar = in.dt * in.u_max * a2 * in.b2 * in.b2 * exp_ratio(in.upper.lambda, in.dt) / (1.0 - in.alpha_hi);
  r.q_lo = in.kappa1 * in.kappa2 * in.kappa2 * in.dt * in.u_min / (1.0 - in.alpha_lo);
  if (r.q_lo > 0.0) {
    double inv = (1.0 - in.beta_lo) / r.q_lo;
    if (in.beta_hi > 0.0) inv += in.d2 > 0.0 ? in.beta_hi * in.c2 * in.c2 / (in.d2 * in.d2 * in.u_min)
                                             : std::numeric_limits<double>::infinity();
    r.p2_lo = std::isfinite(inv) ? 1.0 / inv : 0.0;
  }
  r.p20 = in.p20;
  r.p2_hi_seq.resize(static_cast<std::size_t>(horizon_k) + 1);
  r.p2_hi_seq[0] = in.p20;
  for (int k = 1; k <= horizon_k; ++k)
    r.p2_hi_seq[static_cast<std::size_t>(k)] =
        (r.f_bar * r.p2_hi_seq[static_cast<std::size_t>(k - 1)] + r.q_bar) / (1.0 - in.beta_hi);
  return r;
}

struct Remark3 {
  double lhs = 0.0, rhs = 0.0;
  bool holds = false;
};

inline Remark3 remark3(const Envelope& upper, double alpha_lo, double beta_hi, double dt) {
  Remark3 r;
  r.lhs = upper.lambda;
  r.rhs = (std::log(1.0 - beta_hi) + std::log(alpha_lo) - 2.0 * std::log(upper.a)) / (2.0 * dt);
  r.holds = r.lhs < r.rhs;
  return r;
}

inline double lemma6_uniform_bound(const Lemma5& l5, double beta_hi) {
  if (!(l5.f_bar < 1.0 - beta_hi)) fail(ErrorCode::case_not_applicable, "f_bar is not below 1 - beta_hi");
  return l5.f_bar * l5.p20 / (1.0 - beta_hi) + l5.q_bar / (1.0 - beta_hi - l5.f_bar);
}

// min over complete windows of lambda_min of sum_{i=k-r}^{k} Phi_i' C2' G_i^{-1} C2 Phi_i,
// Phi_i = e^{-(k-i) A4 dt}; G[k] empty when no update ran at step k
struct RhoResult {
  double rho = 0.0;
  int windows = 0;
  int excluded = 0;
};

inline RhoResult grammian_rho(const Decomposition& dec, const std::vector<std::optional<Matrix>>& G, int r, double dt) {
  require(r >= 0, ErrorCode::invalid_parameter, "window length must be nonnegative");
  RhoResult out;
  if (dec.n2 == 0 || dec.C2.size() == 0 || dec.C2.cwiseAbs().maxCoeff() <= kC2ZeroTol) return out;
  const Index n2 = dec.n2;
  std::vector<Matrix> back(static_cast<std::size_t>(r) + 1);
  const Matrix step = expm(-dec.A4 * dt);
  back[0] = Matrix::Identity(n2, n2);
  for (int j = 1; j <= r; ++j) back[static_cast<std::size_t>(j)] = back[static_cast<std::size_t>(j - 1)] * step;
  std::vector<std::optional<Matrix>> info(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) {
    if (!G[i]) continue;
    Eigen::LLT<Matrix> llt(symmetrize(*G[i]));
    if (llt.info() != Eigen::Success) continue;
    info[i] = symmetrize(dec.C2.transpose() * llt.solve(dec.C2));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = static_cast<std::size_t>(r); k < G.size(); ++k) {
    Matrix S = Matrix::Zero(n2, n2);
    bool ok = true;
    for (int j = 0; j <= r; ++j) {
      const std::size_t i = k - static_cast<std::size_t>(j);
      if (!info[i]) {
        ok = false;
        break;
      }
      const Matrix& B = back[static_cast<std::size_t>(j)];
      S += B.transpose() * (*info[i]) * B;
    }
    if (!ok) {
      ++out.excluded;
      continue;
    }
    ++out.windows;
    best = std::min(best, min_eig_sym(S));
  }
  out.rho = out.windows > 0 ? std::max(0.0, best) : 0.0;
  return out;
}

struct Lemma7 {
  double phi = 0.0, p2_hi = 0.0;
};

inline Lemma7 lemma7_uniform_bound(const Lemma5& l5, const Envelope& lower, double alpha_lo, double alpha_hi,
                                   double beta_lo, double beta_hi, double rho, int r, double dt) {
  if (!(rho > 0.0)) fail(ErrorCode::no_certificate, "observability sum lower bound is zero");
  if (!(beta_lo > 0.0)) fail(ErrorCode::no_certificate, "lower update weight bound is zero");
  if (!(l5.p2_lo > 0.0)) fail(ErrorCode::no_certificate, "lower shape bound is unavailable");
  Lemma7 out;
  out.phi = alpha_lo / (1.0 + lower.a * lower.a * l5.q_bar * std::exp(2.0 * lower.lambda * dt) * alpha_hi / l5.p2_lo);
  double head = 0.0;
  for (int k = 1; k <= r && k < static_cast<int>(l5.p2_hi_seq.size()); ++k)
    head = std::max(head, l5.p2_hi_seq[static_cast<std::size_t>(k)]);
  const double tail = 1.0 / (beta_lo * std::pow((1.0 - beta_hi) * out.phi, r) * rho);
  out.p2_hi = std::max(head, tail);
  return out;
}

// excesses of mu and the block bounds in decomposed coordinates
struct Theorem2 {
  double mu_s_lo = 0.0, mu_s_hi = 0.0;
  double block1_lo = 0.0, block1_hi = 0.0;  // scalar multiples of I_{n1}
  double block2_lo = 0.0, block2_hi = 0.0;  // scalar multiples of I_{n2}
  Matrix P_lo, P_hi;
  double mu1_lo() const { return 1.0 + mu_s_lo; }
  double mu1_hi() const { return 1.0 + mu_s_hi; }
  double mu2_lo() const { return 1.0 + 1.0 / mu_s_hi; }
  double mu2_hi() const { return 1.0 + 1.0 / mu_s_lo; }
};

inline Theorem2 theorem2_bounds(double eps_lo, double eps_hi, double p2_lo, double p2_hi, const Matrix& P1inv, Index n1,
                                Index n2) {
  const Index n = n1 + n2;
  require(P1inv.rows() == n && P1inv.cols() == n, ErrorCode::invalid_dimension, "transform size mismatch");
  Theorem2 t;
  Vector dlo(n), dhi(n);
  if (n2 == 0) {
    require(eps_lo > 0.0, ErrorCode::certificate_unavailable, "radius lower bound must be positive");
    t.block1_lo = eps_lo * eps_lo;
    t.block1_hi = eps_hi * eps_hi;
  } else if (n1 == 0) {
    require(p2_lo > 0.0, ErrorCode::certificate_unavailable, "lower shape bound is unavailable");
    t.block2_lo = p2_lo;
    t.block2_hi = p2_hi;
  } else {
    require(eps_lo > 0.0 && p2_lo > 0.0 && std::isfinite(p2_hi), ErrorCode::certificate_unavailable,
            "bounds must be positive and finite");
    const double r = static_cast<double>(n2) / static_cast<double>(n1);
    t.mu_s_lo = std::sqrt(r * p2_lo / (eps_hi * eps_hi));
    t.mu_s_hi = std::sqrt(r * p2_hi / (eps_lo * eps_lo));
    t.block1_lo = t.mu1_lo() * eps_lo * eps_lo;
    t.block1_hi = t.mu1_hi() * eps_hi * eps_hi;
    t.block2_lo = t.mu2_lo() * p2_lo;
    t.block2_hi = t.mu2_hi() * p2_hi;
  }
  dlo.head(n1).setConstant(t.block1_lo);
  dhi.head(n1).setConstant(t.block1_hi);
  dlo.tail(n2).setConstant(t.block2_lo);
  dhi.tail(n2).setConstant(t.block2_hi);
  t.P_lo = symmetrize(P1inv * dlo.asDiagonal() * P1inv.transpose());
  t.P_hi = symmetrize(P1inv * dhi.asDiagonal() * P1inv.transpose());
  return t;
}

// lo I <= D^{-1/2} S D^{-1/2} <= hi I for diagonal D, the form used for the sandwich checks
inline std::pair<double, double> scaled_eig_range(const Matrix& S, const Vector& d) {
  const Vector s = d.cwiseSqrt().cwiseInverse();
  const Matrix X = s.asDiagonal() * S * s.asDiagonal();
  return {min_eig_sym(X), max_eig_sym(X)};
}

}  // namespace setobs
