// Reference computations that do not go through the spectral machinery:
// Romberg quadrature, dense extremum search, finite differences.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Romberg integration of f over [a, b].
inline double romberg(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
                      int max_level = 22) {
  if (a == b) return 0.0;
  std::vector<double> prev{0.5 * (b - a) * (f(a) + f(b))};
  for (int level = 1; level <= max_level; ++level) {
    const long panels = 1L << level;
    const double h = (b - a) / static_cast<double>(panels);
    double mid = 0.0;
    for (long i = 1; i < panels; i += 2) mid += f(a + static_cast<double>(i) * h);
    std::vector<double> cur(static_cast<std::size_t>(level) + 1);
    cur[0] = 0.5 * prev[0] + h * mid;
    double factor = 1.0;
    for (int j = 1; j <= level; ++j) {
      factor *= 4.0;
      cur[j] = cur[j - 1] + (cur[j - 1] - prev[j - 1]) / (factor - 1.0);
    }
    if (level >= 5 && std::abs(cur[level] - prev[level - 1]) <= tol * std::max(1.0, std::abs(cur[level])))
      return cur[level];
    prev = std::move(cur);
  }
  return prev.back();
}

/// Integral over the real line of B exp(-b|x - y|) g(y) for g supported in
/// [-R, R], split at the kink y = x.
inline double kernel_integral(double B, double b, const std::function<double(double)>& g, double R, double x) {
  auto f = [&](double y) { return B * std::exp(-b * std::abs(x - y)) * g(y); };
  if (x <= -R || x >= R) return romberg(f, -R, R);
  return romberg(f, -R, x) + romberg(f, x, R);
}

/// Same integral with the kernel summed over its periodic images of period 2L.
inline double periodic_kernel_integral(double B, double b, const std::function<double(double)>& g, double R,
                                       double L, double x, int images = 8) {
  double s = 0.0;
  for (int n = -images; n <= images; ++n) s += kernel_integral(B, b, g, R, x - 2.0 * L * n);
  return s;
}

/// min of f on [a, b] by dense sampling followed by golden-section refinement.
inline std::pair<double, double> minimize(const std::function<double(double)>& f, double a, double b,
                                          int samples = 20001) {
  double best_x = a;
  double best = f(a);
  const double h = (b - a) / (samples - 1);
  for (int i = 1; i < samples; ++i) {
    const double x = a + i * h;
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  double lo = std::max(a, best_x - h);
  double hi = std::min(b, best_x + h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double x1 = hi - r * (hi - lo);
    const double x2 = lo + r * (hi - lo);
    if (f(x1) < f(x2))
      hi = x2;
    else
      lo = x1;
  }
  const double x = 0.5 * (lo + hi);
  return {x, f(x)};
}

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle
