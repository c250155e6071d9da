#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "decomposition_types.hpp"
#include "lti_system.hpp"
#include "markov.hpp"
#include "pole_placement.hpp"

namespace setobs {

struct SubspaceRecursion {
  Matrix basis;                   // canonical orthonormal basis of the fixed point
  std::vector<Index> dimensions;  // dim V^0, dim V^1, ...
  bool monotone = true;
  int iterations = 0;
};

// V^{k+1} = { x in V^k : exists w, A x + B w in V^k, C x + D w = 0 }
inline SubspaceRecursion weakly_unobservable_recursion(const LtiSystem& sys, double rank_tol = -1.0) {
  sys.validate();
  const Index n = sys.n(), nw = sys.nw(), ny = sys.ny();
  SubspaceRecursion out;
  Matrix V = Matrix::Identity(n, n);
  out.dimensions.push_back(n);
  for (int k = 0; k < n + 1; ++k) {
    const Matrix Vperp = orth_complement(V, n);
    const Index q = Vperp.cols();
    // stack x over V^k-coordinates and w: x = V a
    Matrix S(q + ny, V.cols() + nw);
    if (q > 0) {
      S.topLeftCorner(q, V.cols()) = Vperp.transpose() * sys.A * V;
      S.topRightCorner(q, nw) = Vperp.transpose() * sys.B;
    }
    S.bottomLeftCorner(ny, V.cols()) = sys.C * V;
    S.bottomRightCorner(ny, nw) = sys.D;
    const Matrix N = null_space(S, rank_tol);
    const Matrix X = V * N.topRows(V.cols());
    // N is orthonormal, so X has singular values at most 1 and round-off sits on an absolute scale
    const double xtol = rank_tol < 0 ? 1e3 * static_cast<double>(std::max(n, X.cols())) * kEps : rank_tol;
    const Matrix Vn = orth(X, xtol);
    ++out.iterations;
    if (Vn.cols() > 0 && V.cols() > 0) {
      const Matrix resid = Vn - V * (V.transpose() * Vn);
      if (resid.norm() > 1e-8) out.monotone = false;
    }
    if (Vn.cols() > V.cols()) out.monotone = false;
    out.dimensions.push_back(Vn.cols());
    const bool fixed = Vn.cols() == V.cols();
    V = Vn;
    if (fixed || V.cols() == 0) break;
  }
  out.basis = canonical_basis(V);
  return out;
}

inline Matrix weakly_unobservable_subspace(const LtiSystem& sys, double rank_tol = -1.0) {
  return weakly_unobservable_recursion(sys, rank_tol).basis;
}

inline Decomposition build_decomposition(const LtiSystem& sys, const Matrix& vstar) {
  sys.validate();
  const Index n = sys.n();
  require(vstar.rows() == n, ErrorCode::invalid_basis, "subspace basis has wrong row count");
  if (vstar.cols() > 0)
    require((vstar.transpose() * vstar - Matrix::Identity(vstar.cols(), vstar.cols())).norm() <= 1e-10,
            ErrorCode::invalid_basis, "subspace basis is not orthonormal");
  Decomposition d;
  d.n = n;
  d.n2 = vstar.cols();
  d.n1 = n - d.n2;
  d.nw = sys.nw();
  d.ny = sys.ny();
  d.V = vstar;
  d.W = canonical_basis(orth_complement(vstar, n));
  require(d.W.cols() == d.n1, ErrorCode::invalid_basis, "complement dimension mismatch");
  d.P1inv = hstack(d.W, d.V);
  d.P1 = d.P1inv.transpose();
  const Matrix Ap = d.P1 * sys.A * d.P1inv;
  const Matrix Bp = d.P1 * sys.B;
  const Matrix Cp = sys.C * d.P1inv;
  const Index n1 = d.n1, n2 = d.n2;
  d.A1 = Ap.topLeftCorner(n1, n1);
  d.A3 = Ap.topRightCorner(n1, n2);
  d.A2 = Ap.bottomLeftCorner(n2, n1);
  d.A4 = Ap.bottomRightCorner(n2, n2);
  d.B1 = Bp.topRows(n1);
  d.B2 = Bp.bottomRows(n2);
  d.C1 = Cp.leftCols(n1);
  d.C2 = Cp.rightCols(n2);
  d.D = sys.D;
  d.B1p = hstack(d.A3, d.B1);
  d.D1p = hstack(d.C2, d.D);
  d.B2p = hstack(d.A2, d.B2);
  d.D2p = hstack(d.C1, d.D);
  if (n2 > 0) {
    d.b2p_full_row_rank = numerical_rank(d.B2p) == n2;
    if (!d.b2p_full_row_rank) d.warnings.push_back("B2' lacks full row rank; lower covariance bound degenerates");
  }
  d.d2p_full_row_rank = numerical_rank(d.D2p) == d.ny;
  if (!d.d2p_full_row_rank) d.warnings.push_back("D2' lacks full row rank; measurement noise may be singular");
  return d;
}

inline Decomposition decompose(const LtiSystem& sys, double rank_tol = -1.0) {
  return build_decomposition(sys, weakly_unobservable_subspace(sys, rank_tol));
}

// largest relative residual of the block reconstruction
inline double decomposition_residual(const LtiSystem& sys, const Decomposition& d) {
  Matrix Ap(d.n, d.n);
  Ap.topLeftCorner(d.n1, d.n1) = d.A1;
  Ap.topRightCorner(d.n1, d.n2) = d.A3;
  Ap.bottomLeftCorner(d.n2, d.n1) = d.A2;
  Ap.bottomRightCorner(d.n2, d.n2) = d.A4;
  const Matrix Bp = vstack(d.B1, d.B2);
  const Matrix Cp = hstack(d.C1, d.C2);
  auto rel = [](const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); };
  double r = rel(d.P1inv * Ap * d.P1, sys.A);
  r = std::max(r, rel(d.P1inv * Bp, sys.B));
  r = std::max(r, rel(Cp * d.P1, sys.C));
  r = std::max(r, rel(d.P1 * d.P1inv, Matrix::Identity(d.n, d.n)));
  return r;
}

struct OrderCandidate {
  int l = 0;
  double constraint_residual = 0.0;
  bool solvable = false;
  bool detectable = false;
  Index rank_Gl = 0;
  bool rank_test = false;
};

struct DerivativeOrder {
  int l = -1;
  bool rank_test_agrees = false;
  std::vector<OrderCandidate> candidates;
};

// residual pair after the decoupling part of the gain is fixed
inline void residual_pair(const Decomposition& dec, const MarkovMatrices& mk, const Matrix& Gpinv, Matrix& Abar,
                          Matrix& Cbar) {
  const Matrix M = uio_constraint_rhs(dec, mk.l);
  const Index r = mk.Gl.rows();
  const Matrix Pg = Matrix::Identity(r, r) - mk.Gl * Gpinv;
  Abar = dec.A1 - M * Gpinv * mk.Ol;
  Cbar = Pg * mk.Ol;
}

// smallest l for which the decoupling constraint is solvable and the
// remaining freedom can stabilize the error dynamics
inline DerivativeOrder select_derivative_order(const Decomposition& dec, int l_max = -1, double rank_tol = -1.0) {
  require(dec.n1 > 0, ErrorCode::invalid_parameter, "no strongly observable part");
  if (l_max < 0) l_max = static_cast<int>(dec.n1);
  DerivativeOrder out;
  Index prev_rank = 0;
  for (int l = 0; l <= l_max; ++l) {
    const MarkovMatrices mk = build_markov_matrices(dec, l);
    const Matrix M = uio_constraint_rhs(dec, l);
    const Matrix Gp = pinv(mk.Gl, rank_tol);
    OrderCandidate c;
    c.l = l;
    c.constraint_residual = (M * Gp * mk.Gl - M).norm();
    c.solvable = c.constraint_residual <= 1e-9 * std::max(1.0, M.norm()) * std::max(1.0, mk.Gl.norm());
    c.rank_Gl = numerical_rank(mk.Gl, rank_tol);
    c.rank_test = (c.rank_Gl - prev_rank) == dec.B1p.cols();
    prev_rank = c.rank_Gl;
    if (c.solvable) {
      Matrix Abar, Cbar;
      residual_pair(dec, mk, Gp, Abar, Cbar);
      c.detectable = is_detectable(Abar, Cbar);
    }
    out.candidates.push_back(c);
    if (c.solvable && c.detectable) {
      out.l = l;
      out.rank_test_agrees = c.rank_test;
      return out;
    }
  }
  std::ostringstream os;
  os << "no derivative order up to " << l_max << " decouples the unknown input";
  fail(ErrorCode::strong_observability_failure, os.str());
}

}  // namespace setobs
