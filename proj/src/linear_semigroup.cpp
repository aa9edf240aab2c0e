#include "fwlab/linear_semigroup.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace fwlab {

double PhaseFunction::group_velocity(double xi) const {
  const double B = kernel_.B;
  const double b = kernel_.b;
  const double d = b * b + xi * xi;
  return 2.0 * B * b * (b * b - xi * xi) / (d * d);
}

Field propagate(const Field& u0, const KernelParams& k, double t) {
  if (!(t >= 0.0)) throw DomainError("propagate: t must be >= 0");
  u0.require_finite("propagate");
  if (t == 0.0) return u0;
  const SpectralCoeffs c0 = forward(u0);
  SpectralCoeffs out = apply_multiplier(c0, [&](double xi) {
    return std::polar(1.0, -t * fw_multiplier(k, xi));
  });
  // The phase is exp(-i t m) with m odd; on the cosine mode m counts as zero.
  const std::size_t h = u0.size() / 2;
  out[h] = c0[h];
  return inverse(out);
}

double mu_derivative(int n, double xi) {
  if (n < 0 || n > 12) throw DomainError("mu_derivative: order must lie in [0, 12]");
  double binom = 1.0;  // C(n+1, 2k)
  double sum = 0.0;
  const int top = n + 1;
  for (int k = 0; 2 * k <= top; ++k) {
    if (k > 0) {
      binom *= static_cast<double>((top - 2 * k + 2) * (top - 2 * k + 1));
      binom /= static_cast<double>((2 * k - 1) * (2 * k));
    }
    const double term = binom * std::pow(xi, top - 2 * k);
    sum += (k % 2 == 0) ? term : -term;
  }
  double fact = 1.0;
  for (int j = 2; j <= n; ++j) fact *= j;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * fact * sum / std::pow(1.0 + xi * xi, top);
}

double predicted_decay_slope(double r) {
  if (!(r >= 2.0)) throw DomainError("predicted_decay_slope: r must be >= 2");
  if (std::isinf(r)) return -1.0 / 3.0;
  return -(1.0 - 2.0 / r) / 3.0;
}

double decay_half_width(const KernelParams& k, double t_max, double margin) {
  // Airy front of width (6 B t / b^3)^{1/3} ahead of the fastest mode; ten
  // widths put it below 1e-8 of the peak.
  const double airy = std::cbrt(6.0 * k.B * t_max / (k.b * k.b * k.b));
  return margin + PhaseFunction(k).max_group_speed() * t_max + 10.0 * airy;
}

std::vector<double> log_spaced(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > a) || n < 2) throw DomainError("log_spaced: need 0 < a < b and n >= 2");
  std::vector<double> out(n);
  const double la = std::log(a);
  const double lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

DecayFit measure_decay(const Field& u0, const KernelParams& k, double r,
                       std::span<const double> t_grid, double tail_tol) {
  if (t_grid.size() < 8) throw DomainError("measure_decay: need at least 8 times");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw DomainError("measure_decay: times must be positive and increasing");
  }
  DecayFit fit;
  fit.r = r;
  fit.predicted_slope = predicted_decay_slope(r);
  std::vector<double> lx, ly;
  for (double t : t_grid) {
    const Field u = propagate(u0, k, t);
    const double tail = tail_indicator(u);
    if (tail > tail_tol)
      throw TailViolation(fmt::format("measure_decay: tail {:.3e} at t={:g}; enlarge the box", tail, t));
    const double nr = lr_norm(u, r);
    fit.times.push_back(t);
    fit.norms.push_back(nr);
    lx.push_back(std::log(t));
    ly.push_back(std::log(nr));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

void write_decay_csv(std::ostream& os, std::span<const DecayFit> fits) {
  os << "r,predicted_slope,measured_slope,residual\n";
  for (const auto& f : fits) {
    const std::string r = std::isinf(f.r) ? std::string("inf") : fmt::format("{:.17g}", f.r);
    os << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", r, f.predicted_slope, f.slope, f.residual);
  }
}

}  // namespace fwlab
