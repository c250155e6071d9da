#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "decomposition_types.hpp"
#include "ellipsoid.hpp"
#include "quadrature.hpp"

namespace setobs {

struct WeakState {
  Vector x2hat;
  Matrix P2hat;
  int k = 0;
};

// samples on the quadrature nodes of one step, t_{k-1} + i dt/N, i = 0..N
struct StepInputs {
  std::vector<Vector> x1hat;
  std::vector<double> eps1;
  std::vector<Vector> cw;
  std::vector<Matrix> Kw;
  Vector y;  // measurement at t_k
};

// gamma_k = 1 + sqrt(tr Kw / (n1 eps1^2)), stored through its excess
inline SplitFactor gamma_k(const Matrix& Kw, double eps1, Index n1) {
  require(n1 > 0, ErrorCode::invalid_parameter, "gamma needs a strong subsystem");
  require(eps1 > 0.0 && std::isfinite(eps1), ErrorCode::degenerate_input, "gamma needs a positive radius");
  const double tr = Kw.trace();
  require(tr > 0.0, ErrorCode::degenerate_input, "input shape has zero trace");
  return {std::sqrt(tr / (static_cast<double>(n1) * eps1 * eps1))};
}

// shape of the joint set for col(x1, w): diag(gamma eps1^2 I, gamma/(gamma-1) Kw)
inline Matrix build_Ku(const SplitFactor& g, double eps1, const Matrix& Kw, Index n1) {
  if (n1 == 0) return Kw;
  Matrix K = Matrix::Zero(n1 + Kw.rows(), n1 + Kw.rows());
  K.topLeftCorner(n1, n1).diagonal().setConstant(g.first() * eps1 * eps1);
  K.bottomRightCorner(Kw.rows(), Kw.rows()) = g.second() * Kw;
  return K;
}

inline Vector build_u_hat(const Vector& x1hat, const Vector& cw) { return vcat(x1hat, cw); }

struct AlphaChoice {
  double alpha = 0.5;
  bool degenerate = false;
};

// minimizer of tr(prop)/alpha + s/(1-alpha) with s = dt tr(M)
inline AlphaChoice alpha_from_traces(double tr_prop, double tr_noise_scaled) {
  require(tr_prop >= 0.0 && tr_noise_scaled >= 0.0, ErrorCode::invalid_parameter, "traces must be nonnegative");
  if (tr_prop == 0.0 && tr_noise_scaled == 0.0) return {0.5, true};
  const double a = std::sqrt(tr_prop), b = std::sqrt(tr_noise_scaled);
  double alpha = a / (a + b);
  alpha = std::clamp(alpha, 1e-12, 1.0 - 1e-12);
  return {alpha, false};
}

inline AlphaChoice alpha_k(const Matrix& M2k, const Matrix& A4, const Matrix& P2, double dt) {
  const Matrix Phi = expm(A4 * dt);
  return alpha_from_traces((Phi * P2 * Phi.transpose()).trace(), dt * M2k.trace());
}

struct Propagation {
  Vector x2_pred;
  Matrix P2_pred;
  Matrix M2k;
  double alpha = 0.5;
  bool alpha_degenerate = false;
};

// state-transition samples e^{A4 (dt - s_i)} for one step, cached
class PropagationKernel {
 public:
  PropagationKernel() = default;
  PropagationKernel(const Matrix& A4, const Matrix& B2p, double dt, int substeps)
      : dt_(dt), N_(substeps), B2p_(B2p) {
    require(dt > 0.0, ErrorCode::invalid_parameter, "dt must be positive");
    require(substeps >= 2 && substeps % 2 == 0, ErrorCode::invalid_parameter, "quadrature substeps must be even");
    const double h = dt / substeps;
    w_ = simpson_weights(static_cast<std::size_t>(substeps));
    for (double& wi : w_) wi *= h;
    phi_.resize(static_cast<std::size_t>(substeps) + 1);
    const Matrix step = expm(A4 * h);
    Matrix X = Matrix::Identity(A4.rows(), A4.cols());
    for (int i = substeps; i >= 0; --i) {
      phi_[static_cast<std::size_t>(i)] = X;
      phiB_.insert(phiB_.begin(), X * B2p);
      X = (X * step).eval();
    }
    phi_dt_ = expm(A4 * dt);
  }

  double dt() const { return dt_; }
  int substeps() const { return N_; }
  const Matrix& phi_dt() const { return phi_dt_; }
  const std::vector<double>& weights() const { return w_; }

  Propagation propagate(const WeakState& st, const StepInputs& in, Index n1, const SplitFactor* gamma) const {
    const std::size_t N1 = static_cast<std::size_t>(N_) + 1;
    require(in.cw.size() == N1 && in.Kw.size() == N1, ErrorCode::invalid_dimension, "need one sample per node");
    if (n1 > 0)
      require(in.x1hat.size() == N1 && in.eps1.size() == N1 && gamma, ErrorCode::invalid_dimension,
              "need strong-observer samples per node");
    const Index n2 = st.x2hat.size();
    Propagation out;
    out.x2_pred = phi_dt_ * st.x2hat;
    out.M2k = Matrix::Zero(n2, n2);
    for (std::size_t i = 0; i < N1; ++i) {
      const Vector u = n1 > 0 ? build_u_hat(in.x1hat[i], in.cw[i]) : in.cw[i];
      const Matrix Ku = n1 > 0 ? build_Ku(*gamma, in.eps1[i], in.Kw[i], n1) : in.Kw[i];
      const Matrix& PB = phiB_[i];
      out.x2_pred.noalias() += w_[i] * (PB * u);
      out.M2k.noalias() += w_[i] * (PB * Ku * PB.transpose());
    }
    out.M2k = symmetrize(out.M2k);
    const Matrix prop = symmetrize(phi_dt_ * st.P2hat * phi_dt_.transpose());
    const AlphaChoice a = alpha_from_traces(prop.trace(), dt_ * out.M2k.trace());
    out.alpha = a.alpha;
    out.alpha_degenerate = a.degenerate;
    out.P2_pred = symmetrize(prop / a.alpha + dt_ * out.M2k / (1.0 - a.alpha));
    return out;
  }

 private:
  double dt_ = 0.0;
  int N_ = 0;
  Matrix B2p_;
  std::vector<double> w_;
  std::vector<Matrix> phi_, phiB_;
  Matrix phi_dt_;
};

inline Propagation propagate(const WeakState& st, const Decomposition& dec, const StepInputs& in, double dt,
                             int substeps, const SplitFactor* gamma) {
  return PropagationKernel(dec.A4, dec.B2p, dt, substeps).propagate(st, in, dec.n1, gamma);
}

// whether the measurement update carries information
// output map of the weak subsystem treated as absent below this magnitude
inline constexpr double kC2ZeroTol = 1e-12;

inline bool update_applicable(const Matrix& C2, const Matrix& G, double rel_tol = 1e-12) {
  if (C2.size() == 0 || C2.cwiseAbs().maxCoeff() <= kC2ZeroTol) return false;
  const double hi = max_eig_sym(G);
  if (!(hi > 0.0)) return false;
  return min_eig_sym(G) >= rel_tol * hi;
}

// trace of ((1-beta) P^{-1} + beta C2' G^{-1} C2)^{-1}
class BetaObjective {
 public:
  BetaObjective(const Matrix& P, const Matrix& C2, const Matrix& G) {
    Eigen::LLT<Matrix> lp(symmetrize(P));
    require(lp.info() == Eigen::Success, ErrorCode::invalid_ellipsoid, "predicted shape is not SPD");
    const Index n = P.rows();
    Pinv_ = lp.solve(Matrix::Identity(n, n));
    Eigen::LLT<Matrix> lg(symmetrize(G));
    require(lg.info() == Eigen::Success, ErrorCode::singular_noise, "measurement noise shape is singular");
    H_ = symmetrize(C2.transpose() * lg.solve(C2));
    Pinv_ = symmetrize(Pinv_);
  }

  double operator()(double beta) const {
    const Matrix X = (1.0 - beta) * Pinv_ + beta * H_;
    Eigen::LLT<Matrix> l(X);
    if (l.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    return l.solve(Matrix::Identity(X.rows(), X.cols())).trace();
  }

 private:
  Matrix Pinv_, H_;
};

inline double optimize_beta(const Matrix& P2_pred, const Matrix& C2, const Matrix& G, double tol = 1e-9) {
  const BetaObjective f(P2_pred, C2, G);
  return golden_section_minimize(f, 1e-6, 1.0 - 1e-6, tol).x;
}

struct UpdateResult {
  WeakState state;
  Matrix O;
  double woodbury_residual = 0.0;
};

inline UpdateResult measurement_update(const Vector& x2_pred, const Matrix& P2_pred, const Matrix& C2,
                                       const Matrix& D2p, const Vector& y, const Vector& u_hat, const Matrix& G,
                                       double beta) {
  require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_parameter, "beta must lie in (0,1)");
  const Index n2 = P2_pred.rows();
  const double s = 1.0 / (1.0 - beta);
  const Matrix S = symmetrize(s * C2 * P2_pred * C2.transpose() + G / beta);
  Eigen::LLT<Matrix> ls(S);
  if (ls.info() != Eigen::Success) fail(ErrorCode::singular_innovation, "innovation shape is singular");
  UpdateResult out;
  out.O = s * ls.solve(C2 * P2_pred).transpose();
  const Vector r = y - C2 * x2_pred - D2p * u_hat;
  out.state.x2hat = x2_pred + out.O * r;
  // Joseph form of s (I - O C2) P2_pred; the product form cancels badly as beta nears 1
  const Matrix IK = Matrix::Identity(n2, n2) - out.O * C2;
  out.state.P2hat = symmetrize(s * IK * P2_pred * IK.transpose() + out.O * (G / beta) * out.O.transpose());
  Eigen::LLT<Matrix> lp(symmetrize(P2_pred));
  Eigen::LLT<Matrix> lg(symmetrize(G));
  if (lp.info() == Eigen::Success && lg.info() == Eigen::Success) {
    const Matrix info = (1.0 - beta) * lp.solve(Matrix::Identity(n2, n2)) + beta * C2.transpose() * lg.solve(C2);
    const Matrix Pw = symmetrize(symmetrize(info).llt().solve(Matrix::Identity(n2, n2)));
    out.woodbury_residual = relative_diff(out.state.P2hat, Pw);
  } else {
    fail(ErrorCode::singular_noise, "measurement noise shape is singular");
  }
  if (!is_spd(out.state.P2hat)) fail(ErrorCode::singular_innovation, "updated shape lost definiteness");
  return out;
}

}  // namespace setobs
