#pragma once

#include <optional>

#include "decomposition_types.hpp"
#include "ellipsoid.hpp"
#include "weak_observer.hpp"

namespace setobs {

struct FusedEstimate {
  Ellipsoid set;
  SplitFactor mu;
  bool has_mu = false;
};

// shape in the decomposed coordinates: diag(mu eps1^2 I, mu/(mu-1) P2)
inline Matrix fused_block_shape(Index n1, double eps1, const Matrix& P2, const SplitFactor& mu) {
  const Index n2 = P2.rows();
  if (n2 == 0) return eps1 * eps1 * Matrix::Identity(n1, n1);
  if (n1 == 0) return P2;
  Matrix S = Matrix::Zero(n1 + n2, n1 + n2);
  S.topLeftCorner(n1, n1).diagonal().setConstant(mu.first() * eps1 * eps1);
  S.bottomRightCorner(n2, n2) = mu.second() * P2;
  return S;
}

inline SplitFactor fusion_split(Index n1, double eps1, const Matrix& P2, std::optional<double> mu) {
  if (mu) return split_from_factor(*mu);
  require(eps1 > 0.0, ErrorCode::degenerate_input, "fusion needs a positive radius");
  const double tr = P2.trace();
  require(tr > 0.0, ErrorCode::degenerate_input, "fusion needs a nondegenerate weak set");
  return {std::sqrt(tr / (static_cast<double>(n1) * eps1 * eps1))};
}

// Outer ellipsoid of ball(x1hat, eps1) x E(x2hat, P2) mapped back by P1^{-1}.
inline FusedEstimate fuse_with_inverse(const Vector& x1hat, double eps1, const WeakState& st2, const Matrix& P1inv,
                                       std::optional<double> mu = std::nullopt) {
  const Index n1 = x1hat.size(), n2 = st2.x2hat.size();
  require(P1inv.rows() == n1 + n2 && P1inv.cols() == n1 + n2, ErrorCode::invalid_dimension, "transform size");
  if (n2 > 0) require(is_spd(st2.P2hat), ErrorCode::invalid_ellipsoid, "weak set shape is not SPD");
  FusedEstimate out{Ellipsoid(), SplitFactor{}, false};
  SplitFactor s{1.0};
  if (n1 > 0 && n2 > 0) {
    s = fusion_split(n1, eps1, st2.P2hat, mu);
    out.has_mu = true;
  } else if (n1 > 0) {
    require(eps1 > 0.0, ErrorCode::degenerate_input, "fusion needs a positive radius");
  }
  out.mu = s;
  const Matrix S = fused_block_shape(n1, eps1, st2.P2hat, s);
  const Vector c = P1inv * vcat(x1hat, st2.x2hat);
  out.set = Ellipsoid(c, symmetrize(P1inv * S * P1inv.transpose()));
  return out;
}

inline FusedEstimate fuse(const Vector& x1hat, double eps1, const WeakState& st2, const Matrix& P1,
                          std::optional<double> mu = std::nullopt) {
  require(P1.rows() == P1.cols(), ErrorCode::invalid_dimension, "transform must be square");
  Eigen::FullPivLU<Matrix> lu(P1);
  if (!lu.isInvertible()) fail(ErrorCode::singular_transform, "coordinate transform is singular");
  return fuse_with_inverse(x1hat, eps1, st2, lu.inverse(), mu);
}

inline FusedEstimate fuse(const Vector& x1hat, double eps1, const WeakState& st2, const Decomposition& dec,
                          std::optional<double> mu = std::nullopt) {
  return fuse_with_inverse(x1hat, eps1, st2, dec.P1inv, mu);
}

}  // namespace setobs
