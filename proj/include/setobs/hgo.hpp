#pragma once

#include <cmath>
#include <vector>

#include "linalg.hpp"

namespace setobs {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// High-gain differentiator of order l on every output channel.
struct HgoConfig {
  int l = 0;
  double eps = 0.01;
  Index ny = 1;
  std::vector<Vector> theta;  // per channel, length l+1

  Matrix A_eta(Index ch) const {
    const Index L = l + 1;
    Matrix A = Matrix::Zero(L, L);
    const Vector& th = theta[static_cast<std::size_t>(ch)];
    for (Index j = 0; j < L; ++j) {
      A(j, 0) = -th(j);
      if (j + 1 < L) A(j, j + 1) = 1.0;
    }
    return A;
  }

  Matrix A_hat(Index ch) const {
    Matrix A = A_eta(ch);
    for (Index j = 0; j < l + 1; ++j) A(j, 0) /= std::pow(eps, static_cast<double>(j + 1));
    return A;
  }

  Vector B_hat(Index ch) const {
    const Vector& th = theta[static_cast<std::size_t>(ch)];
    Vector b(l + 1);
    for (Index j = 0; j < l + 1; ++j) b(j) = th(j) / std::pow(eps, static_cast<double>(j + 1));
    return b;
  }
};

// theta_j = C(l+1, j+1) p^{j+1} puts every eigenvalue of A_eta at -p
inline HgoConfig design_hgo(int l, double eps, double pole = 1.0, Index ny = 1) {
  require(l >= 0, ErrorCode::invalid_parameter, "derivative order must be nonnegative");
  require(eps > 0.0 && eps < 1.0, ErrorCode::invalid_parameter, "hgo eps must lie in (0,1)");
  require(pole > 0.0, ErrorCode::invalid_parameter, "hgo pole magnitude must be positive");
  require(ny > 0, ErrorCode::invalid_parameter, "need at least one channel");
  HgoConfig cfg;
  cfg.l = l;
  cfg.eps = eps;
  cfg.ny = ny;
  Vector th(l + 1);
  for (int j = 0; j <= l; ++j) th(j) = binomial(l + 1, j + 1) * std::pow(pole, j + 1);
  cfg.theta.assign(static_cast<std::size_t>(ny), th);
  return cfg;
}

inline void validate_hgo(const HgoConfig& cfg) {
  require(cfg.eps > 0.0 && cfg.eps < 1.0, ErrorCode::invalid_parameter, "hgo eps must lie in (0,1)");
  require(static_cast<Index>(cfg.theta.size()) == cfg.ny, ErrorCode::invalid_parameter, "theta per channel");
  for (Index c = 0; c < cfg.ny; ++c) {
    require(cfg.theta[static_cast<std::size_t>(c)].size() == cfg.l + 1, ErrorCode::invalid_parameter, "theta length");
    require(is_hurwitz(cfg.A_eta(c)), ErrorCode::invalid_design, "hgo polynomial is not Hurwitz");
  }
}

struct HgoState {
  std::vector<Vector> zhat;  // per channel, estimates of y_i, y_i', ..., y_i^{(l)}
};

inline HgoState initial_hgo_state(const HgoConfig& cfg, const Vector& y0) {
  require(y0.size() == cfg.ny, ErrorCode::invalid_dimension, "initial output size mismatch");
  HgoState st;
  for (Index c = 0; c < cfg.ny; ++c) {
    Vector z = Vector::Zero(cfg.l + 1);
    z(0) = y0(c);
    st.zhat.push_back(z);
  }
  return st;
}

// exact zero-order-hold discretization of every channel for a fixed step
class HgoStepper {
 public:
  HgoStepper() = default;
  HgoStepper(const HgoConfig& cfg, double h) : l_(cfg.l), h_(h) {
    require(h > 0.0, ErrorCode::invalid_parameter, "hgo step must be positive");
    validate_hgo(cfg);
    const Index L = cfg.l + 1;
    for (Index c = 0; c < cfg.ny; ++c) {
      Matrix aug = Matrix::Zero(L + 1, L + 1);
      aug.topLeftCorner(L, L) = cfg.A_hat(c) * h;
      aug.topRightCorner(L, 1) = cfg.B_hat(c) * h;
      const Matrix E = expm(aug);
      phi_.push_back(E.topLeftCorner(L, L));
      gam_.push_back(E.topRightCorner(L, 1));
    }
  }

  double step_size() const { return h_; }

  void step(HgoState& st, const Vector& y) const {
    for (std::size_t c = 0; c < phi_.size(); ++c) {
      tmp_.noalias() = phi_[c] * st.zhat[c];
      st.zhat[c] = tmp_ + gam_[c] * y(static_cast<Index>(c));
    }
  }

 private:
  int l_ = 0;
  double h_ = 0.0;
  std::vector<Matrix> phi_;
  std::vector<Vector> gam_;
  mutable Vector tmp_;
};

// one ZOH step of length h from the measured output held over the step
inline HgoState step_hgo(const HgoConfig& cfg, const HgoState& st, const Vector& y, double h) {
  HgoStepper s(cfg, h);
  HgoState out = st;
  s.step(out, y);
  return out;
}

// z = col(y, y', ..., y^{(l)}) with all channels of one order contiguous
inline Vector assemble_z_hat(const HgoConfig& cfg, const HgoState& st) {
  Vector z(cfg.ny * (cfg.l + 1));
  for (Index k = 0; k <= cfg.l; ++k)
    for (Index c = 0; c < cfg.ny; ++c) z(k * cfg.ny + c) = st.zhat[static_cast<std::size_t>(c)](k);
  return z;
}

inline void assemble_z_hat(const HgoConfig& cfg, const HgoState& st, Vector& z) {
  z.resize(cfg.ny * (cfg.l + 1));
  for (Index k = 0; k <= cfg.l; ++k)
    for (Index c = 0; c < cfg.ny; ++c) z(k * cfg.ny + c) = st.zhat[static_cast<std::size_t>(c)](k);
}

// constants with ||e^{A_eta t}|| <= K e^{-a t}
struct DecayConstants {
  double K = 1.0;
  double a = 1.0;
};

inline DecayConstants decay_constants(const HgoConfig& cfg, double a_fraction = 0.9, double K_margin = 1.05,
                                      int grid = 20000) {
  validate_hgo(cfg);
  double a = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < cfg.ny; ++c) a = std::min(a, min_abs_real_eig(cfg.A_eta(c)));
  a *= a_fraction;
  double K = 1.0;
  for (Index c = 0; c < cfg.ny; ++c) {
    const Matrix Ae = cfg.A_eta(c);
    // horizon long enough for the envelope to have decayed far below its peak
    double T = 10.0 / a;
    while (spectral_norm(expm(Ae * T)) * std::exp(a * T) > 1e-6 && T < 1e4 / a) T *= 2.0;
    const double h = T / grid;
    const Matrix step = expm(Ae * h);
    Matrix E = Matrix::Identity(Ae.rows(), Ae.cols());
    double sup = 1.0;
    for (int i = 1; i <= grid; ++i) {
      E = (E * step).eval();
      sup = std::max(sup, spectral_norm(E) * std::exp(a * h * i));
    }
    K = std::max(K, sup);
  }
  return {K_margin * K, a};
}

// bound on |y^{(k)} - zhat_k| for a channel, given sup|y^{(l+1)}|-driven delta
inline double hgo_error_envelope(int k, int l, double eps, const DecayConstants& dc, double delta, double z0,
                                 double t) {
  const double lead = std::pow(eps, l - k) * delta;
  const double transient = dc.K * std::sqrt(static_cast<double>(l + 1)) / std::pow(eps, k) * z0 - lead;
  return lead + transient * std::exp(-dc.a * t / eps);
}

}  // namespace setobs
