#pragma once

#include <cmath>
#include <vector>

#include "ellipsoid.hpp"
#include "lti_system.hpp"
#include "scenario.hpp"

namespace setobs {

// W[j] bounds ||w^{(j)}(t)|| for the true input and for every input the
// Monte Carlo sampler can draw
inline std::vector<double> input_derivative_bounds(const ScenarioConfig& c, int m) {
  std::vector<double> W(static_cast<std::size_t>(m) + 1, 0.0);
  const bool family = c.Kw.is_constant();
  const double rho = family ? std::sqrt(std::max(0.0, max_eig_sym(c.Kw(0.0)))) : 0.0;
  for (int j = 0; j <= m; ++j) {
    double b = c.w_true.derivative_norm_bound(j);
    if (family) {
      const double fam = c.cw.derivative_norm_bound(j) + rho * std::pow(c.mc.omega_max, j);
      b = std::max(b, fam);
    }
    W[static_cast<std::size_t>(j)] = b;
  }
  return W;
}

struct OutputDerivativeBound {
  std::vector<double> per_channel;
  double max() const {
    double m = 0.0;
    for (double v : per_channel) m = std::max(m, v);
    return m;
  }
};

namespace detail {

// sum_j ||c A^{m-1-j} B|| W_j + ||d|| W_m for one output row
inline double input_part(const LtiSystem& sys, Index i, int m, const std::vector<double>& W) {
  double s = sys.D.row(i).norm() * W[static_cast<std::size_t>(m)];
  Matrix CA = sys.C.row(i);
  for (int p = 0; p < m; ++p) {
    // coefficient of w^{(m-1-p)} is C A^p B
    s += (CA * sys.B).norm() * W[static_cast<std::size_t>(m - 1 - p)];
    CA = CA * sys.A;
  }
  return s;
}

}  // namespace detail

// sup over [0, horizon] of |y_i^{(m)}(t)| for every x(0) in the initial set
// and every input satisfying the derivative bounds W
inline OutputDerivativeBound output_derivative_bound(const LtiSystem& sys, const Ellipsoid& x0, const std::vector<double>& W,
                                                     int m, double horizon, double safety = 1.05) {
  require(static_cast<int>(W.size()) > m, ErrorCode::invalid_parameter, "need input bounds up to order m");
  const Index n = sys.n();
  const double anorm = spectral_norm(sys.A);
  const double hb = std::min(0.01, 0.1 / std::max(anorm, 1e-9));
  const int N = std::max(1, static_cast<int>(std::ceil(horizon / hb)));
  const double h = horizon / N;
  const double grow = std::exp(anorm * h);
  const Matrix step = expm(sys.A * h);
  OutputDerivativeBound out;
  for (Index i = 0; i < sys.ny(); ++i) {
    Matrix r = sys.C.row(i);
    for (int p = 0; p < m; ++p) r = r * sys.A;
    // r e^{A t} advanced along the grid
    Matrix re = r;
    double forced = 0.0, prev_forced_integrand = (re * sys.B).norm(), sup = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double free_part = std::abs((re * x0.center())(0)) + std::sqrt(std::max(0.0, (re * x0.shape() * re.transpose())(0, 0)));
      sup = std::max(sup, free_part + forced * W[0]);
      const Matrix nxt = re * step;
      const double integrand = (nxt * sys.B).norm();
      forced += grow * 0.5 * h * (prev_forced_integrand + integrand);
      prev_forced_integrand = integrand;
      re = nxt;
    }
    (void)n;
    const double val = safety * (grow * sup + detail::input_part(sys, i, m, W));
    out.per_channel.push_back(val);
  }
  return out;
}

// bound on ||zhat(0) - col(y, ..., y^{(l)})(0)|| per channel; the first entry is exact
inline double initial_derivative_error_bound(const LtiSystem& sys, const Ellipsoid& x0, const std::vector<double>& W,
                                             int l, double safety = 1.05) {
  if (l == 0) return 0.0;
  double worst = 0.0;
  for (Index i = 0; i < sys.ny(); ++i) {
    double s2 = 0.0;
    Matrix r = sys.C.row(i);
    for (int k = 1; k <= l; ++k) {
      r = r * sys.A;
      const double free_part = std::abs((r * x0.center())(0)) + std::sqrt(std::max(0.0, (r * x0.shape() * r.transpose())(0, 0)));
      const double b = free_part + detail::input_part(sys, i, k, W);
      s2 += b * b;
    }
    worst = std::max(worst, std::sqrt(s2));
  }
  return safety * worst;
}

}  // namespace setobs
