#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace setobs {

inline constexpr double kMembershipSlack = 1e-9;
inline constexpr double kSymTol = 1e-8;

// E(c, K) = { x : (x - c)' K^{-1} (x - c) <= 1 }
class Ellipsoid {
 public:
  Ellipsoid() = default;

  Ellipsoid(Vector center, Matrix shape) : c_(std::move(center)) {
    require(shape.rows() == shape.cols() && shape.rows() == c_.size(), ErrorCode::invalid_dimension,
            "ellipsoid center/shape size mismatch");
    const double scale = std::max(1.0, shape.cwiseAbs().maxCoeff());
    require(shape.allFinite(), ErrorCode::invalid_ellipsoid, "non-finite shape");
    require((shape - shape.transpose()).cwiseAbs().maxCoeff() <= kSymTol * scale,
            ErrorCode::invalid_ellipsoid, "shape matrix is not symmetric");
    K_ = symmetrize(shape);
    llt_.compute(K_);
    bool ok = llt_.info() == Eigen::Success;
    if (ok) {
      const auto L = llt_.matrixLLT().diagonal();
      ok = L.minCoeff() > 0.0;
    }
    require(ok, ErrorCode::invalid_ellipsoid, "shape matrix is not positive definite");
  }

  const Vector& center() const { return c_; }
  const Matrix& shape() const { return K_; }
  Index dim() const { return c_.size(); }

  // (x - c)' K^{-1} (x - c)
  double quadratic_form(const Vector& x) const {
    require(x.size() == c_.size(), ErrorCode::invalid_dimension, "point dimension mismatch");
    const Vector v = x - c_;
    return llt_.matrixL().solve(v).squaredNorm();
  }

  bool contains(const Vector& x, double slack = kMembershipSlack) const {
    return quadratic_form(x) <= 1.0 + slack;
  }

  double log_det() const {
    return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  }

  // lower Cholesky factor of K
  Matrix factor() const { return llt_.matrixL(); }

 private:
  Vector c_;
  Matrix K_;
  Eigen::LLT<Matrix> llt_;
};

inline Ellipsoid affine_image(const Ellipsoid& e, const Matrix& M, const Vector& b) {
  require(M.rows() == M.cols() && M.cols() == e.dim() && b.size() == e.dim(),
          ErrorCode::invalid_dimension, "affine map dimension mismatch");
  const Vector sv = singular_values(M);
  const double tol = static_cast<double>(M.rows()) * kEps * sv(0);
  if (sv(sv.size() - 1) <= tol) fail(ErrorCode::singular_transform, "affine map is singular");
  return Ellipsoid(M * e.center() + b, symmetrize(M * e.shape() * M.transpose()));
}

// split factors (1 + s, 1 + 1/s) kept through s so that s ~ 0 or s ~ inf stays exact
struct SplitFactor {
  double excess = 1.0;
  double first() const { return 1.0 + excess; }
  double second() const { return 1.0 + 1.0 / excess; }
};

inline SplitFactor split_from_factor(double g) {
  require(g > 1.0 && std::isfinite(g), ErrorCode::invalid_parameter, "split factor must exceed 1");
  return {g - 1.0};
}

// argmin of g tr1 + g/(g-1) tr2 is g = 1 + sqrt(tr2/tr1)
inline SplitFactor trace_optimal_split(double tr1, double tr2) {
  require(tr1 > 0.0 && tr2 > 0.0, ErrorCode::degenerate_input, "trace-optimal split needs positive traces");
  return {std::sqrt(tr2 / tr1)};
}

struct ProductBound {
  Ellipsoid ellipsoid;
  SplitFactor split;
  double g() const { return split.first(); }
};

// smallest-trace ellipsoid of the family containing E1 x E2
inline ProductBound cartesian_product_bound(const Ellipsoid& e1, const Ellipsoid& e2,
                                            std::optional<double> g = std::nullopt) {
  const SplitFactor s = g ? split_from_factor(*g) : trace_optimal_split(e1.shape().trace(), e2.shape().trace());
  return {Ellipsoid(vcat(e1.center(), e2.center()),
                    block_diag(s.first() * e1.shape(), s.second() * e2.shape())),
          s};
}

inline Ellipsoid minkowski_outer(const Ellipsoid& e1, const Ellipsoid& e2, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_parameter, "alpha must lie in (0,1)");
  require(e1.dim() == e2.dim(), ErrorCode::invalid_dimension, "Minkowski sum dimension mismatch");
  return Ellipsoid(e1.center() + e2.center(), e1.shape() / alpha + e2.shape() / (1.0 - alpha));
}

inline double log_unit_ball_volume(Index n) {
  const double d = static_cast<double>(n);
  return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
}

inline double log_volume(const Ellipsoid& e) { return log_unit_ball_volume(e.dim()) + 0.5 * e.log_det(); }

inline double volume(const Ellipsoid& e) { return std::exp(log_volume(e)); }

struct AxisBounds {
  Vector lo, hi;
};

inline AxisBounds axis_bounds(const Vector& c, const Matrix& K) {
  require(K.rows() == c.size() && K.cols() == c.size(), ErrorCode::invalid_dimension, "axis bounds size mismatch");
  const Vector r = K.diagonal().cwiseMax(0.0).cwiseSqrt();
  return {c - r, c + r};
}

inline AxisBounds axis_bounds(const Ellipsoid& e) { return axis_bounds(e.center(), e.shape()); }

inline Ellipsoid project(const Ellipsoid& e, const std::vector<Index>& axes) {
  const Index m = static_cast<Index>(axes.size());
  Vector c(m);
  Matrix K(m, m);
  for (Index i = 0; i < m; ++i) {
    require(axes[static_cast<std::size_t>(i)] >= 0 && axes[static_cast<std::size_t>(i)] < e.dim(),
            ErrorCode::invalid_parameter, "projection axis out of range");
    c(i) = e.center()(axes[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < m; ++j)
      K(i, j) = e.shape()(axes[static_cast<std::size_t>(i)], axes[static_cast<std::size_t>(j)]);
  }
  return Ellipsoid(c, K);
}

// closed polyline on the boundary of a planar ellipsoid
inline std::vector<Vector> boundary_polyline(const Ellipsoid& e, int points) {
  require(e.dim() == 2, ErrorCode::invalid_dimension, "polyline needs a planar ellipsoid");
  require(points >= 3, ErrorCode::invalid_parameter, "polyline needs at least 3 points");
  const Matrix L = e.factor();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double th = 2.0 * std::numbers::pi * i / points;
    Vector u(2);
    u << std::cos(th), std::sin(th);
    out.push_back(e.center() + L * u);
  }
  return out;
}

template <class Rng>
Vector sample_unit_sphere(Rng& rng, Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  double s = 0.0;
  do {
    for (Index i = 0; i < n; ++i) v(i) = nd(rng);
    s = v.norm();
  } while (s < 1e-12);
  return v / s;
}

template <class Rng>
Vector sample_unit_ball(Rng& rng, Index n) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  return sample_unit_sphere(rng, n) * std::pow(ud(rng), 1.0 / static_cast<double>(n));
}

template <class Rng>
Vector sample_in_ellipsoid(const Ellipsoid& e, Rng& rng) {
  return e.center() + e.factor() * sample_unit_ball(rng, e.dim());
}

template <class Rng>
Vector sample_on_boundary(const Ellipsoid& e, Rng& rng) {
  return e.center() + e.factor() * sample_unit_sphere(rng, e.dim());
}

}  // namespace setobs
