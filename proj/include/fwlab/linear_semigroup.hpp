// Free dispersive flow u_t + K*u_x = 0, solved exactly by its Fourier
// multiplier, and the L^r decay measurement built on it.

#pragma once

#include "fwlab/spectral.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace fwlab {

/// m(xi) = 2Bb xi/(b^2 + xi^2) and its normalised form mu(xi) = xi/(1 + xi^2),
/// related by m(xi) = 2B mu(xi/b).
class PhaseFunction {
 public:
  explicit PhaseFunction(KernelParams kernel) : kernel_(kernel) {}

  const KernelParams& kernel() const { return kernel_; }
  double operator()(double xi) const { return fw_multiplier(kernel_, xi); }
  /// d m / d xi, the group velocity of the mode xi.
  double group_velocity(double xi) const;
  /// sup |m'| = 2B/b, attained at xi = 0.
  double max_group_speed() const { return 2.0 * kernel_.B / kernel_.b; }

  static double mu(double xi) { return xi / (1.0 + xi * xi); }

 private:
  KernelParams kernel_;
};

/// exp(-i t m(xi)) applied to u0; unitary on the grid (the Nyquist slot sees
/// the even part of m, which is zero).
Field propagate(const Field& u0, const KernelParams& k, double t);

/// n-th derivative of mu(xi) = xi/(1+xi^2) from its closed form; n <= 12.
double mu_derivative(int n, double xi);

/// -(1/3)(1 - 2/r); r = infinity allowed.
double predicted_decay_slope(double r);

/// Box half-width that keeps the flow up to t_max away from the boundary:
/// margin + t_max * sup |m'| plus ten widths (6 B t_max / b^3)^{1/3} of the
/// Airy front ahead of the fastest mode.
double decay_half_width(const KernelParams& k, double t_max, double margin = 20.0);

std::vector<double> log_spaced(double a, double b, std::size_t n);

struct DecayFit {
  double r = 0.0;
  double predicted_slope = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square deviation of log norms from the fitted line.
  double residual = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
};

/// Least-squares slope of log ||T(t) u0||_{L^r} against log t. Needs at least
/// 8 increasing positive times; throws TailViolation when the propagated
/// field reaches the box boundary.
DecayFit measure_decay(const Field& u0, const KernelParams& k, double r,
                       std::span<const double> t_grid, double tail_tol = 1e-8);

/// Columns r,predicted_slope,measured_slope,residual.
void write_decay_csv(std::ostream& os, std::span<const DecayFit> fits);

}  // namespace fwlab
