#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace setobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// scaling-and-squaring Pade
inline Matrix expm(const Matrix& M) {
  if (M.size() == 0) return M;
  Matrix out = M.exp();
  return out;
}

inline Matrix symmetrize(const Matrix& K) { return 0.5 * (K + K.transpose()); }

inline Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

inline Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.cols() > 0 && b.cols() > 0 && a.rows() != b.rows())
    fail(ErrorCode::invalid_dimension, "hstack row mismatch");
  const Index r = a.cols() > 0 ? a.rows() : b.rows();
  Matrix out(r, a.cols() + b.cols());
  if (a.cols() > 0) out.leftCols(a.cols()) = a;
  if (b.cols() > 0) out.rightCols(b.cols()) = b;
  return out;
}

inline Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.rows() > 0 && b.rows() > 0 && a.cols() != b.cols())
    fail(ErrorCode::invalid_dimension, "vstack column mismatch");
  const Index c = a.rows() > 0 ? a.cols() : b.cols();
  Matrix out(a.rows() + b.rows(), c);
  if (a.rows() > 0) out.topRows(a.rows()) = a;
  if (b.rows() > 0) out.bottomRows(b.rows()) = b;
  return out;
}

inline Vector vcat(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

inline Vector singular_values(const Matrix& M) {
  if (M.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues();
}

// 2-norm via the Gram eigenvalue, fast enough for dense time grids
inline double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  if (M.rows() == 1 || M.cols() == 1) return M.norm();
  const Matrix G = M.rows() <= M.cols() ? Matrix(M * M.transpose()) : Matrix(M.transpose() * M);
  Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// smallest of the min(rows, cols) singular values
inline double sigma_min(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return singular_values(M).minCoeff();
}

inline double default_rank_tol(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  const Vector sv = singular_values(M);
  return static_cast<double>(std::max(M.rows(), M.cols())) * kEps * sv(0);
}

inline Index numerical_rank(const Matrix& M, double tol = -1.0) {
  if (M.size() == 0) return 0;
  const Vector sv = singular_values(M);
  if (tol < 0) tol = static_cast<double>(std::max(M.rows(), M.cols())) * kEps * sv(0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

// orthonormal basis of ker(M)
inline Matrix null_space(const Matrix& M, double tol = -1.0) {
  const Index n = M.cols();
  if (M.rows() == 0) return Matrix::Identity(n, n);
  if (n == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (tol < 0) tol = static_cast<double>(std::max(M.rows(), n)) * kEps * (sv.size() ? sv(0) : 0.0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return svd.matrixV().rightCols(n - r);
}

// orthonormal basis of range(M)
inline Matrix orth(const Matrix& M, double tol = -1.0) {
  const Index n = M.rows();
  if (M.cols() == 0 || n == 0) return Matrix(n, 0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  if (tol < 0) tol = static_cast<double>(std::max(n, M.cols())) * kEps * sv(0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

// basis of the orthogonal complement of the span of V (columns orthonormal)
inline Matrix orth_complement(const Matrix& V, Index n) {
  if (V.cols() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(V, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  const double tol = static_cast<double>(std::max(n, V.cols())) * kEps * sv(0) * 1e3;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return svd.matrixU().rightCols(n - r);
}

inline Matrix pinv(const Matrix& M, double tol = -1.0) {
  if (M.size() == 0) return Matrix::Zero(M.cols(), M.rows());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (tol < 0) tol = static_cast<double>(std::max(M.rows(), M.cols())) * kEps * sv(0);
  Vector inv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Orthonormal basis of span(V) built greedily from the projector columns:
// largest residual first, ties to the lowest index. Reproduces the identity
// basis whenever the subspace is spanned by coordinate axes.
inline Matrix canonical_basis(const Matrix& V) {
  const Index n = V.rows(), r = V.cols();
  if (r == 0) return Matrix(n, 0);
  const Matrix Pi = V * V.transpose();
  Matrix Q(n, 0);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < r; ++k) {
    Vector norms = Vector::Zero(n);
    std::vector<Vector> res(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      Vector v = Pi.col(i);
      if (Q.cols() > 0) {
        v -= Q * (Q.transpose() * v);
        v -= Q * (Q.transpose() * v);
      }
      res[static_cast<std::size_t>(i)] = v;
      norms(i) = used[static_cast<std::size_t>(i)] ? -1.0 : v.norm();
    }
    const double best = norms.maxCoeff();
    if (best <= 1e-12) fail(ErrorCode::invalid_basis, "subspace basis is rank deficient");
    Index pick = 0;
    for (Index i = 0; i < n; ++i) {
      if (norms(i) >= best * (1.0 - 1e-10)) {
        pick = i;
        break;
      }
    }
    used[static_cast<std::size_t>(pick)] = true;
    Q.conservativeResize(n, Q.cols() + 1);
    Q.col(Q.cols() - 1) = res[static_cast<std::size_t>(pick)] / best;
  }
  return Q;
}

inline ComplexVector eigenvalues(const Matrix& A) {
  if (A.size() == 0) return ComplexVector();
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues();
}

inline double max_real_eig(const Matrix& A) {
  const ComplexVector ev = eigenvalues(A);
  double m = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ev.size(); ++i) m = std::max(m, ev(i).real());
  return m;
}

inline double min_abs_real_eig(const Matrix& A) {
  const ComplexVector ev = eigenvalues(A);
  double m = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ev.size(); ++i) m = std::min(m, std::abs(ev(i).real()));
  return m;
}

inline bool is_hurwitz(const Matrix& A) { return A.size() == 0 || max_real_eig(A) < 0.0; }

inline double min_eig_sym(const Matrix& S) {
  if (S.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eig_sym(const Matrix& S) {
  if (S.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

inline bool is_spd(const Matrix& S) {
  if (S.rows() != S.cols()) return false;
  if (S.size() == 0) return true;
  Eigen::LLT<Matrix> llt(symmetrize(S));
  return llt.info() == Eigen::Success && min_eig_sym(S) > 0.0;
}

inline double relative_diff(const Matrix& a, const Matrix& b) {
  const double s = std::max(a.norm(), b.norm());
  if (s == 0.0) return 0.0;
  return (a - b).norm() / s;
}

}  // namespace setobs
