#pragma once

#include <cmath>
#include <vector>

#include "linalg.hpp"

namespace setobs {

// amp * sin(freq t + phase), amp * cos(...), or a constant
struct SignalTerm {
  enum class Kind { constant, sine, cosine };
  Kind kind = Kind::constant;
  double amp = 0.0;
  double freq = 0.0;
  double phase = 0.0;

  static SignalTerm constant(double v) { return {Kind::constant, v, 0.0, 0.0}; }
  static SignalTerm sine(double a, double f, double p = 0.0) { return {Kind::sine, a, f, p}; }
  static SignalTerm cosine(double a, double f, double p = 0.0) { return {Kind::cosine, a, f, p}; }

  double operator()(double t) const {
    switch (kind) {
      case Kind::constant: return amp;
      case Kind::sine: return amp * std::sin(freq * t + phase);
      case Kind::cosine: return amp * std::cos(freq * t + phase);
    }
    return 0.0;
  }

  // sup |d^m/dt^m| over all t
  double derivative_bound(int m) const {
    if (kind == Kind::constant) return m == 0 ? std::abs(amp) : 0.0;
    return std::abs(amp) * std::pow(std::abs(freq), m);
  }

  bool operator==(const SignalTerm&) const = default;
};

struct Signal {
  std::vector<SignalTerm> terms;

  static Signal constant(double v) { return Signal{{SignalTerm::constant(v)}}; }

  double operator()(double t) const {
    double s = 0.0;
    for (const auto& q : terms) s += q(t);
    return s;
  }

  double derivative_bound(int m) const {
    double s = 0.0;
    for (const auto& q : terms) s += q.derivative_bound(m);
    return s;
  }

  bool is_constant() const {
    for (const auto& q : terms)
      if (q.kind != SignalTerm::Kind::constant && q.amp != 0.0) return false;
    return true;
  }

  bool operator==(const Signal&) const = default;
};

struct SignalVector {
  std::vector<Signal> comps;

  Index size() const { return static_cast<Index>(comps.size()); }

  Vector operator()(double t) const {
    Vector v(size());
    for (Index i = 0; i < size(); ++i) v(i) = comps[static_cast<std::size_t>(i)](t);
    return v;
  }

  void eval(double t, Vector& v) const {
    v.resize(size());
    for (Index i = 0; i < size(); ++i) v(i) = comps[static_cast<std::size_t>(i)](t);
  }

  // bound on ||d^m/dt^m v(t)||_2 valid for all t
  double derivative_norm_bound(int m) const {
    double s = 0.0;
    for (const auto& c : comps) s += c.derivative_bound(m) * c.derivative_bound(m);
    return std::sqrt(s);
  }

  bool operator==(const SignalVector&) const = default;
};

struct SignalMatrix {
  Index rows = 0, cols = 0;
  std::vector<Signal> entries;  // row-major

  static SignalMatrix constant(const Matrix& M) {
    SignalMatrix s;
    s.rows = M.rows();
    s.cols = M.cols();
    for (Index i = 0; i < M.rows(); ++i)
      for (Index j = 0; j < M.cols(); ++j) s.entries.push_back(Signal::constant(M(i, j)));
    return s;
  }

  Matrix operator()(double t) const {
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) M(i, j) = entries[static_cast<std::size_t>(i * cols + j)](t);
    return M;
  }

  bool is_constant() const {
    for (const auto& e : entries)
      if (!e.is_constant()) return false;
    return true;
  }

  bool operator==(const SignalMatrix&) const = default;
};

}  // namespace setobs
