#pragma once

#include <algorithm>
#include <complex>
#include <optional>
#include <random>
#include <vector>

#include "linalg.hpp"

namespace setobs {

using Pole = std::complex<double>;

// monic coefficients of prod (s - p), highest power first
inline std::vector<double> characteristic_coefficients(const std::vector<Pole>& poles) {
  std::vector<Pole> c{Pole(1.0, 0.0)};
  for (const Pole& p : poles) {
    std::vector<Pole> next(c.size() + 1, Pole(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= c[i] * p;
    }
    c = std::move(next);
  }
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

inline bool poles_conjugate_closed(const std::vector<Pole>& poles, double tol = 1e-9) {
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    if (std::abs(poles[i].imag()) <= tol * (1.0 + std::abs(poles[i]))) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = i + 1; j < poles.size(); ++j) {
      if (!used[j] && std::abs(poles[j] - std::conj(poles[i])) <= tol * (1.0 + std::abs(poles[i]))) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// eigenvalue multisets agree to tol (greedy nearest matching)
inline double spectrum_mismatch(const ComplexVector& ev, const std::vector<Pole>& poles) {
  if (static_cast<std::size_t>(ev.size()) != poles.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(poles.size(), false);
  double worst = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bj = 0;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(ev(i) - poles[j]);
      if (d < best) { best = d; bj = j; }
    }
    used[bj] = true;
    worst = std::max(worst, best / (1.0 + std::abs(poles[bj])));
  }
  return worst;
}

// PBH test over the eigenvalues with Re(lambda) >= -margin
inline bool is_detectable(const Matrix& A, const Matrix& C, double margin = 0.0) {
  const Index n = A.rows();
  if (n == 0) return true;
  const ComplexVector ev = eigenvalues(A);
  const double scale = 1.0 + spectral_norm(A) + spectral_norm(C);
  for (Index i = 0; i < n; ++i) {
    if (ev(i).real() < -margin) continue;
    ComplexMatrix H(n + C.rows(), n);
    H.topRows(n) = ev(i) * ComplexMatrix::Identity(n, n) - A.cast<Pole>();
    if (C.rows() > 0) H.bottomRows(C.rows()) = C.cast<Pole>();
    Eigen::JacobiSVD<ComplexMatrix> svd(H);
    if (svd.singularValues()(n - 1) <= 1e-9 * scale) return false;
  }
  return true;
}

// single-input Ackermann gain k' with eig(A - b k') = poles
inline std::optional<Eigen::RowVectorXd> ackermann(const Matrix& A, const Vector& b, const std::vector<Pole>& poles) {
  const Index n = A.rows();
  Matrix ctrb(n, n);
  Vector v = b;
  for (Index i = 0; i < n; ++i) {
    ctrb.col(i) = v;
    v = A * v;
  }
  const Vector sv = singular_values(ctrb);
  if (sv(n - 1) <= 1e-12 * sv(0)) return std::nullopt;
  const std::vector<double> c = characteristic_coefficients(poles);
  Matrix phi = Matrix::Zero(n, n);
  // Horner: phi(A) = (((A + c1) A + c2) A + ...)
  for (double ci : c) phi = (phi * A).eval() + ci * Matrix::Identity(n, n);
  Vector en = Vector::Zero(n);
  en(n - 1) = 1.0;
  const Vector t = ctrb.transpose().fullPivLu().solve(en);
  return Eigen::RowVectorXd(t.transpose() * phi);
}

struct PlacementResult {
  Matrix Y;
  double mismatch = 0.0;
};

// Output-injection gain Y with eig(Abar - Y Cbar) = poles. Works on the dual pair,
// reducing to single input through a random combination and optional pre-feedback;
// the smallest-norm gain among the verified candidates is kept.
inline std::optional<PlacementResult> place_observer_poles(const Matrix& Abar, const Matrix& Cbar,
                                                           const std::vector<Pole>& poles, int trials = 48,
                                                           std::uint64_t seed = 12345) {
  const Index n = Abar.rows(), p = Cbar.rows();
  require(static_cast<Index>(poles.size()) == n, ErrorCode::invalid_parameter, "pole count must match state dimension");
  require(poles_conjugate_closed(poles), ErrorCode::invalid_parameter, "poles must be closed under conjugation");
  if (n == 0) return PlacementResult{Matrix::Zero(0, p), 0.0};
  if (p == 0) return std::nullopt;
  const Matrix Ac = Abar.transpose();
  const Matrix Bc = Cbar.transpose();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const double scale = 1.0 + spectral_norm(Abar);
  std::optional<PlacementResult> best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Vector g(p);
    if (t == 0) g.setOnes();
    else for (Index i = 0; i < p; ++i) g(i) = nd(rng);
    g.normalize();
    Matrix K0 = Matrix::Zero(p, n);
    if (t >= trials / 3 && p > 1)
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < n; ++j) K0(i, j) = 0.5 * scale * nd(rng);
    const Matrix A0 = Ac - Bc * K0;
    const auto k = ackermann(A0, Bc * g, poles);
    if (!k) continue;
    const Matrix K = K0 + g * (*k);
    const Matrix Y = K.transpose();
    const double mm = spectrum_mismatch(eigenvalues(Abar - Y * Cbar), poles);
    if (!(mm <= 1e-6)) continue;
    const double nrm = K.norm();
    if (nrm < best_norm) {
      best_norm = nrm;
      best = PlacementResult{Y, mm};
    }
  }
  return best;
}

// Matrix sign function of a Hamiltonian via scaled Newton iteration.
inline Matrix matrix_sign(const Matrix& H, int max_iter = 100) {
  Matrix Z = H;
  const Index n = H.rows();
  for (int it = 0; it < max_iter; ++it) {
    Eigen::PartialPivLU<Matrix> lu(Z);
    const Matrix Zi = lu.inverse();
    const double det_abs = std::exp(lu.matrixLU().diagonal().array().abs().log().sum() / static_cast<double>(n));
    const double c = (std::isfinite(det_abs) && det_abs > 0) ? 1.0 / det_abs : 1.0;
    const Matrix Zn = 0.5 * (c * Z + Zi / c);
    const double change = (Zn - Z).norm();
    Z = Zn;
    if (change <= 1e-13 * Z.norm()) break;
  }
  return Z;
}

// Stabilizing solution of A'X + XA - X B B' X + Q = 0.
inline std::optional<Matrix> care(const Matrix& A, const Matrix& B, const Matrix& Q) {
  const Index n = A.rows();
  Matrix H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = A;
  H.topRightCorner(n, n) = -B * B.transpose();
  H.bottomLeftCorner(n, n) = -Q;
  H.bottomRightCorner(n, n) = -A.transpose();
  const Matrix S = matrix_sign(H);
  if (!S.allFinite()) return std::nullopt;
  Matrix lhs(2 * n, n), rhs(2 * n, n);
  lhs.topRows(n) = S.topRightCorner(n, n);
  lhs.bottomRows(n) = S.bottomRightCorner(n, n) + Matrix::Identity(n, n);
  rhs.topRows(n) = S.topLeftCorner(n, n) + Matrix::Identity(n, n);
  rhs.bottomRows(n) = S.bottomLeftCorner(n, n);
  Matrix X = lhs.colPivHouseholderQr().solve(-rhs);
  X = symmetrize(X);
  if (!X.allFinite()) return std::nullopt;
  const Matrix res = A.transpose() * X + X * A - X * B * B.transpose() * X + Q;
  if (res.norm() > 1e-6 * (1.0 + Q.norm() + X.norm() * (1.0 + A.norm()))) return std::nullopt;
  if (!is_hurwitz(A - B * B.transpose() * X)) return std::nullopt;
  return X;
}

// Y such that Abar - Y Cbar has all eigenvalues left of -shift
inline std::optional<Matrix> stabilizing_observer_gain(const Matrix& Abar, const Matrix& Cbar, double shift = 0.5) {
  const Index n = Abar.rows();
  if (n == 0) return Matrix::Zero(0, Cbar.rows());
  const Matrix As = Abar.transpose() + shift * Matrix::Identity(n, n);
  const auto X = care(As, Cbar.transpose(), Matrix::Identity(n, n));
  if (!X) return std::nullopt;
  const Matrix Y = (Cbar * (*X)).transpose();
  if (!is_hurwitz(Abar - Y * Cbar)) return std::nullopt;
  return Y;
}

}  // namespace setobs
