#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace setobs {

// Weights for a composite rule over `intervals` equal intervals, to be scaled
// by the spacing. Even counts use plain Simpson; odd counts close with a 3/8 panel.
inline std::vector<double> composite_weights(std::size_t intervals) {
  std::vector<double> w(intervals + 1, 0.0);
  if (intervals == 0) return w;
  if (intervals == 1) {
    w[0] = w[1] = 0.5;
    return w;
  }
  const std::size_t simpson_part = (intervals % 2 == 0) ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_part; i += 2) {
    w[i] += 1.0 / 3.0;
    w[i + 1] += 4.0 / 3.0;
    w[i + 2] += 1.0 / 3.0;
  }
  if (simpson_part != intervals) {
    const std::size_t s = simpson_part;
    w[s] += 3.0 / 8.0;
    w[s + 1] += 9.0 / 8.0;
    w[s + 2] += 9.0 / 8.0;
    w[s + 3] += 3.0 / 8.0;
  }
  return w;
}

inline std::vector<double> simpson_weights(std::size_t intervals) {
  require(intervals >= 2 && intervals % 2 == 0, ErrorCode::invalid_parameter,
          "Simpson rule needs a positive even interval count");
  return composite_weights(intervals);
}

template <class T>
T integrate_samples(const std::vector<T>& f, double h) {
  require(!f.empty(), ErrorCode::invalid_parameter, "no samples");
  const std::vector<double> w = composite_weights(f.size() - 1);
  T acc = f[0] * (w[0] * h);
  for (std::size_t i = 1; i < f.size(); ++i) acc += f[i] * (w[i] * h);
  return acc;
}

// running integral of tabulated samples; F[j] ~ int_0^{t_j} f
inline std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
  std::vector<double> F(f.size(), 0.0);
  if (f.size() < 2) return F;
  for (std::size_t j = 2; j < f.size(); j += 2)
    F[j] = F[j - 2] + h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
  // odd nodes: single-interval quadratic through three points
  for (std::size_t j = 1; j < f.size(); j += 2) {
    if (j + 1 < f.size())
      F[j] = F[j - 1] + h / 12.0 * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
    else
      F[j] = F[j - 1] + h / 12.0 * (-f[j - 2] + 8.0 * f[j - 1] + 5.0 * f[j]);
  }
  return F;
}

template <class F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  if (intervals < 2) intervals = 2;
  const double h = (b - a) / static_cast<double>(intervals);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i)
    acc += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return acc * h / 3.0;
}

struct ScalarMinimum {
  double x;
  double value;
  int iterations;
  bool flat;
};

// Golden-section search for a unimodal objective on [lo, hi].
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol = 1e-10,
                                      int max_iter = 300) {
  require(lo < hi, ErrorCode::invalid_parameter, "empty search interval");
  const double flo = f(lo), fhi = f(hi), mid = 0.5 * (lo + hi), fmid = f(mid);
  const double scale = std::max({std::abs(flo), std::abs(fhi), std::abs(fmid), 1e-300});
  if (std::abs(flo - fmid) <= 1e-13 * scale && std::abs(fhi - fmid) <= 1e-13 * scale)
    return {mid, fmid, 0, true};

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while ((b - a) > tol && it < max_iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  double x = 0.5 * (a + b), fx = f(x);
  if (fc < fx) { x = c; fx = fc; }
  if (fd < fx) { x = d; fx = fd; }
  if (flo < fx) { x = lo; fx = flo; }
  if (fhi < fx) { x = hi; fx = fhi; }
  return {x, fx, it, false};
}

}  // namespace setobs
