#pragma once

#include <vector>

#include "lti_system.hpp"
#include "signal.hpp"

namespace setobs {

// classical RK4 for xdot = A x + B w(t)
template <class InputFn>
void rk4_step(const LtiSystem& sys, Vector& x, InputFn&& w, double t, double h) {
  const Vector w0 = w(t), wm = w(t + 0.5 * h), w1 = w(t + h);
  const Vector k1 = sys.A * x + sys.B * w0;
  const Vector k2 = sys.A * (x + 0.5 * h * k1) + sys.B * wm;
  const Vector k3 = sys.A * (x + 0.5 * h * k2) + sys.B * wm;
  const Vector k4 = sys.A * (x + h * k3) + sys.B * w1;
  x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x;
};

// states at every multiple of dt up to the horizon
template <class InputFn>
Trajectory simulate_plant(const LtiSystem& sys, const Vector& x0, InputFn&& w, double dt, int substeps, double horizon) {
  require(substeps >= 1, ErrorCode::invalid_parameter, "substeps must be at least 1");
  require(dt > 0.0 && horizon >= 0.0, ErrorCode::invalid_parameter, "dt must be positive");
  require(x0.size() == sys.n(), ErrorCode::invalid_dimension, "initial state size mismatch");
  const int K = static_cast<int>(std::llround(horizon / dt));
  const double h = dt / substeps;
  Trajectory tr;
  Vector x = x0;
  tr.t.push_back(0.0);
  tr.x.push_back(x);
  for (int k = 0; k < K; ++k) {
    for (int s = 0; s < substeps; ++s) rk4_step(sys, x, w, k * dt + s * h, h);
    tr.t.push_back((k + 1) * dt);
    tr.x.push_back(x);
  }
  return tr;
}

inline Trajectory simulate_plant(const LtiSystem& sys, const Vector& x0, const SignalVector& w, double dt, int substeps,
                                 double horizon) {
  return simulate_plant(sys, x0, [&](double t) { return w(t); }, dt, substeps, horizon);
}

}  // namespace setobs
