#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "decomposition.hpp"
#include "hgo.hpp"
#include "quadrature.hpp"

namespace setobs {

// x1hat' = E x1hat + F zhat
struct UioDesign {
  int l = 0;
  Matrix Ol, Gl, F, E;
  double constraint_residual = 0.0;
  bool exact_placement = true;
  std::vector<Pole> poles;
};

inline double uio_constraint_residual(const Matrix& F, const Matrix& Gl, const Matrix& M) {
  return (F * Gl - M).norm() / std::max(1.0, M.norm());
}

struct UioGainOptions {
  enum class Method { place, lqr };
  Method method = Method::place;
  std::vector<Pole> poles;
  double lqr_weight = 1.0;  // state weight against unit output weight
  double lqr_shift = 0.0;   // closed-loop eigenvalues kept left of -shift
};

// F = M Gl^+ + Y (I - Gl Gl^+); Y places the residual poles or solves a
// Riccati equation on the residual pair
inline UioDesign solve_uio_gain(const Matrix& Ol, const Matrix& Gl, const Matrix& A1, const Matrix& B1p,
                                const UioGainOptions& opt, double rank_tol = -1.0) {
  const Index n1 = A1.rows();
  const Index m = B1p.cols();
  require(Ol.rows() == Gl.rows() && Ol.cols() == n1, ErrorCode::invalid_dimension, "Ol/Gl shape mismatch");
  require(Gl.cols() % std::max<Index>(m, 1) == 0, ErrorCode::invalid_dimension, "Gl column count");
  const int l = static_cast<int>(Gl.cols() / std::max<Index>(m, 1)) - 1;
  Matrix M = Matrix::Zero(n1, Gl.cols());
  M.leftCols(m) = B1p;
  const Matrix Gp = pinv(Gl, rank_tol);
  const Index r = Gl.rows();
  const double solv = (M * Gp * Gl - M).norm();
  if (solv > 1e-9 * std::max(1.0, M.norm()) * std::max(1.0, Gl.norm()))
    fail(ErrorCode::strong_observability_failure, "decoupling constraint has no solution at this order");
  const Matrix Pg = Matrix::Identity(r, r) - Gl * Gp;
  const Matrix Abar = A1 - M * Gp * Ol;
  const Matrix Cbar = Pg * Ol;
  if (!is_detectable(Abar, Cbar)) fail(ErrorCode::no_stable_observer, "residual error dynamics are not detectable");
  UioDesign d;
  d.l = l;
  d.Ol = Ol;
  d.Gl = Gl;
  d.poles = opt.poles;
  std::optional<Matrix> Y;
  if (opt.method == UioGainOptions::Method::place) {
    auto placed = place_observer_poles(Abar, Cbar, opt.poles);
    if (placed) Y = placed->Y;
  } else {
    require(opt.lqr_weight > 0.0 && opt.lqr_shift >= 0.0, ErrorCode::invalid_parameter, "bad Riccati weights");
    const Matrix As = Abar.transpose() + opt.lqr_shift * Matrix::Identity(n1, n1);
    const auto X = care(As, Cbar.transpose(), opt.lqr_weight * Matrix::Identity(n1, n1));
    if (X) Y = Matrix((Cbar * (*X)).transpose());
  }
  if (!Y || !is_hurwitz(Abar - (*Y) * Cbar)) {
    d.exact_placement = false;
    Y = stabilizing_observer_gain(Abar, Cbar, 0.5);
    if (!Y) Y = stabilizing_observer_gain(Abar, Cbar, 0.0);
    if (!Y) fail(ErrorCode::no_stable_observer, "no stabilizing gain found for the residual pair");
  }
  d.F = M * Gp + (*Y) * Pg;
  d.E = A1 - d.F * Ol;
  d.constraint_residual = uio_constraint_residual(d.F, Gl, M);
  if (d.constraint_residual > 1e-8) fail(ErrorCode::invalid_design, "decoupling constraint violated by the gain");
  if (!is_hurwitz(d.E)) fail(ErrorCode::no_stable_observer, "observer error matrix is not Hurwitz");
  return d;
}

inline UioDesign solve_uio_gain(const Matrix& Ol, const Matrix& Gl, const Matrix& A1, const Matrix& B1p,
                                const std::vector<Pole>& poles, double rank_tol = -1.0) {
  UioGainOptions o;
  o.poles = poles;
  return solve_uio_gain(Ol, Gl, A1, B1p, o, rank_tol);
}

inline std::vector<Pole> default_uio_poles(Index n1) {
  std::vector<Pole> p;
  for (Index i = 0; i < n1; ++i) p.emplace_back(-1.0 - 0.5 * static_cast<double>(i), 0.0);
  return p;
}

inline UioDesign design_uio(const Decomposition& dec, int l, UioGainOptions opt, double rank_tol = -1.0) {
  const MarkovMatrices mk = build_markov_matrices(dec, l);
  if (opt.method == UioGainOptions::Method::place && opt.poles.empty()) opt.poles = default_uio_poles(dec.n1);
  return solve_uio_gain(mk.Ol, mk.Gl, dec.A1, dec.B1p, opt, rank_tol);
}

inline UioDesign design_uio(const Decomposition& dec, int l, const std::vector<Pole>& poles, double rank_tol = -1.0) {
  UioGainOptions o;
  o.poles = poles;
  return design_uio(dec, l, o, rank_tol);
}

// exact ZOH of the observer with zhat held over each step
class UioStepper {
 public:
  UioStepper() = default;
  UioStepper(const UioDesign& d, double h) {
    require(h > 0.0, ErrorCode::invalid_parameter, "observer step must be positive");
    const Index n1 = d.E.rows(), q = d.F.cols();
    Matrix aug = Matrix::Zero(n1 + q, n1 + q);
    aug.topLeftCorner(n1, n1) = d.E * h;
    aug.topRightCorner(n1, q) = d.F * h;
    const Matrix X = expm(aug);
    phi_ = X.topLeftCorner(n1, n1);
    gam_ = X.topRightCorner(n1, q);
  }

  void step(Vector& x1, const Vector& z) const {
    tmp_.noalias() = phi_ * x1;
    tmp_.noalias() += gam_ * z;
    x1 = tmp_;
  }

 private:
  Matrix phi_, gam_;
  mutable Vector tmp_;
};

inline Vector step_uio(const UioDesign& d, const Vector& x1hat, const Vector& zhat, double h) {
  UioStepper s(d, h);
  Vector x = x1hat;
  s.step(x, zhat);
  return x;
}

// constants of the strong-observer error radius
struct ErrorBoundParams {
  int l = 0;
  Index ny = 1;
  double eps = 0.01;
  double K = 1.0, a = 1.0;
  double delta = 0.0;     // bounds sup |y^{(l+1)}| K eps / a
  double zbar0 = 0.0;     // initial differentiator error
  double F_norm = 0.0;
  double init_norm = 0.0; // ||P1 K0 P1'||^{1/2}

  double transient_coefficient() const {
    return K * std::sqrt(static_cast<double>(l + 1)) * zbar0 / std::pow(eps, l) - std::pow(eps, l) * delta;
  }
  double gain() const { return F_norm * std::sqrt(static_cast<double>(ny * (l + 1))); }
};

inline ErrorBoundParams make_error_bound_params(const HgoConfig& hgo, const DecayConstants& dc, const UioDesign& uio,
                                                double y_deriv_bound, double zbar0, double init_norm) {
  ErrorBoundParams p;
  p.l = hgo.l;
  p.ny = hgo.ny;
  p.eps = hgo.eps;
  p.K = dc.K;
  p.a = dc.a;
  p.delta = y_deriv_bound * dc.K * hgo.eps / dc.a;
  p.zbar0 = zbar0;
  p.F_norm = spectral_norm(uio.F);
  p.init_norm = init_norm;
  return p;
}

// direct evaluation at one time, composite Simpson on `intervals` panels
inline double epsilon1(double t, const ErrorBoundParams& p, const Matrix& E, std::size_t intervals = 2000) {
  require(t >= 0.0, ErrorCode::invalid_parameter, "time must be nonnegative");
  const double g_t = spectral_norm(expm(E * t));
  if (t == 0.0) return p.init_norm;
  if (intervals % 2) ++intervals;
  const double h = t / static_cast<double>(intervals);
  const Matrix step = expm(E * h);
  std::vector<double> g(intervals + 1), gd(intervals + 1);
  Matrix X = Matrix::Identity(E.rows(), E.cols());
  for (std::size_t i = 0; i <= intervals; ++i) {
    // g[i] = ||e^{E s_i}||; the second integrand uses tau = t - s
    g[i] = spectral_norm(X);
    X = (X * step).eval();
  }
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double tau = t - h * static_cast<double>(i);
    gd[i] = g[i] * std::exp(-p.a * tau / p.eps);
  }
  const double psi = p.delta * integrate_samples(g, h) + p.transient_coefficient() * integrate_samples(gd, h);
  return g_t * p.init_norm + p.gain() * psi;
}

// epsilon1 tabulated on a uniform grid; between nodes a linear interpolant
// scaled by a small safety factor
class Epsilon1Profile {
 public:
  static constexpr double kInterpSafety = 1.02;

  Epsilon1Profile() = default;

  Epsilon1Profile(const ErrorBoundParams& p, const Matrix& E, double h, double horizon) : h_(h) {
    require(h > 0.0 && horizon >= 0.0, ErrorCode::invalid_parameter, "bad profile grid");
    const std::size_t N = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9)) + 1;
    const Matrix step = expm(E * h);
    std::vector<double> g(N + 1);
    Matrix X = Matrix::Identity(E.rows(), E.cols());
    for (std::size_t i = 0; i <= N; ++i) {
      g[i] = spectral_norm(X);
      X = (X * step).eval();
    }
    const std::vector<double> G1 = cumulative_integral(g, h);
    // convolution of g with exp(-c tau), truncated where the kernel is negligible
    const double c = p.a / p.eps;
    const std::size_t Jc = static_cast<std::size_t>(std::ceil(40.0 / (c * h)));
    std::vector<double> kern(std::min(N, Jc) + 1);
    for (std::size_t i = 0; i < kern.size(); ++i) kern[i] = std::exp(-c * h * static_cast<double>(i));
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, v);
    const std::vector<double> wfull = composite_weights(std::min(N, Jc));
    v_.resize(N + 1);
    const double coef = p.transient_coefficient();
    for (std::size_t j = 0; j <= N; ++j) {
      const std::size_t nj = std::min(j, Jc);
      const std::vector<double> w = nj == std::min(N, Jc) ? wfull : composite_weights(nj);
      double conv = 0.0;
      for (std::size_t i = 0; i <= nj; ++i) conv += w[i] * g[j - i] * kern[i];
      conv *= h;
      if (j > Jc) conv += gmax * std::exp(-c * h * static_cast<double>(Jc)) / c;
      v_[j] = g[j] * p.init_norm + p.gain() * (p.delta * G1[j] + coef * conv);
    }
  }

  double step() const { return h_; }
  std::size_t size() const { return v_.size(); }
  double node(std::size_t i) const { return v_.at(i); }
  const std::vector<double>& values() const { return v_; }

  // value at t = (i + num/den) h
  double at(std::size_t i, std::size_t num, std::size_t den) const {
    if (num == 0) return v_.at(i);
    const double th = static_cast<double>(num) / static_cast<double>(den);
    return kInterpSafety * ((1.0 - th) * v_.at(i) + th * v_.at(i + 1));
  }

  double at(double t) const {
    require(t >= 0.0, ErrorCode::invalid_parameter, "time must be nonnegative");
    const double q = t / h_;
    const double fl = std::floor(q + 1e-9);
    const std::size_t i = static_cast<std::size_t>(fl);
    if (std::abs(q - fl) <= 1e-9) return v_.at(i);
    const double th = q - fl;
    return kInterpSafety * ((1.0 - th) * v_.at(i) + th * v_.at(i + 1));
  }

  double min_value() const { return *std::min_element(v_.begin(), v_.end()); }
  double max_value() const { return *std::max_element(v_.begin(), v_.end()); }

 private:
  double h_ = 0.0;
  std::vector<double> v_;
};

// int_0^inf ||e^{E s}|| ds, infinite when E is not Hurwitz
inline double integrated_exp_norm(const Matrix& E) {
  if (!is_hurwitz(E)) return std::numeric_limits<double>::infinity();
  const double decay = -max_real_eig(E);
  const double T = 40.0 / decay;
  const double h = std::max(0.05 / std::max(1.0, spectral_norm(E)), T / 2e6);
  const Matrix step = expm(E * h);
  Matrix X = Matrix::Identity(E.rows(), E.cols());
  double sum = 0.0, prev = 1.0;
  const long long cap = 4000000;
  long long i = 0;
  for (; i < cap && (i * h < T || prev > 1e-14); ++i) {
    X = (X * step).eval();
    const double cur = spectral_norm(X);
    sum += 0.5 * h * (prev + cur);
    prev = cur;
  }
  if (i == cap && prev > 1e-10) return std::numeric_limits<double>::infinity();
  return sum;
}

struct Epsilon1Range {
  double lo = 0.0, hi = 0.0;
  double horizon_hi = 0.0;  // sup over the tabulated horizon
  double limit = 0.0;       // value approached as t grows without bound
};

// uniform range of the radius: the top covers both the horizon and the t -> inf limit
inline Epsilon1Range epsilon1_uniform_bounds(const Epsilon1Profile& prof, const ErrorBoundParams& p, const Matrix& E,
                                             double floor = 1e-12) {
  Epsilon1Range r;
  r.lo = std::max(prof.min_value(), floor);
  r.horizon_hi = Epsilon1Profile::kInterpSafety * prof.max_value();
  const double drive = p.delta * p.gain();
  r.limit = drive > 0.0 ? drive * integrated_exp_norm(E) : 0.0;
  r.hi = std::max(r.horizon_hi, r.limit);
  return r;
}

}  // namespace setobs
