// Periodic-box spectral representation of functions on the real line.
//
// Everything here is exact on the grid it is given: no dealiasing, no
// adaptive refinement. Dealiasing of nonlinear products lives in the
// evolution module.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fwlab {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A NaN or Inf reached an operation that refuses poisoned data.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// Data are not small at the box boundary, so periodization would pollute
/// the result.
class TailViolation : public Error {
 public:
  using Error::Error;
};

/// A precondition on a scalar argument failed (negative width, bad order...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Uniform periodic grid on the box [-L, L) with N nodes x_j = -L + j*dx.
///
/// Wavenumber convention (defined here and nowhere else): FFT slot k stores
/// the coefficient of exp(i*xi_k*(x + L)) with
///
///   xi_k = pi*k/L        for k = 0 .. N/2-1
///   xi_k = pi*(k - N)/L  for k = N/2 .. N-1
///
/// so a multiplier m(xi) is applied to slot k verbatim as m(xi_k). The
/// Nyquist slot k = N/2 holds the cosine mode cos(pi*N/(2L)*(x + L)); a
/// multiplier acts on it through the even part (m(xi) + m(-xi))/2, which is
/// zero for odd symbols and keeps real fields real.
class Grid {
 public:
  /// Requires L > 0 and N >= 16 a power of two.
  Grid(double half_width, std::size_t n_points);

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  double dx() const { return 2.0 * half_width_ / static_cast<double>(n_); }
  double node(std::size_t j) const;
  double wavenumber(std::size_t k) const;
  bool is_nyquist(std::size_t k) const { return k == n_ / 2; }
  /// Signed mode index of slot k (Nyquist reported as -N/2).
  long mode_index(std::size_t k) const;
  /// Largest |mode index| kept by the 2/3 rule.
  std::size_t dealias_cutoff() const { return n_ / 3; }

  bool operator==(const Grid& other) const = default;

 private:
  double half_width_;
  std::size_t n_;
};

/// Real samples u(x_j) on a grid.
class Field {
 public:
  Field(Grid grid, std::vector<double> values);
  explicit Field(Grid grid);  // zeros

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }
  std::size_t size() const { return values_.size(); }

  bool is_finite() const;
  /// Throws NonFiniteValue when any sample is NaN or Inf.
  void require_finite(const char* where) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Fourier coefficients in FFT slot order (see Grid).
class SpectralCoeffs {
 public:
  SpectralCoeffs(Grid grid, std::vector<cplx> coeffs);
  explicit SpectralCoeffs(Grid grid);

  const Grid& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx operator[](std::size_t k) const { return coeffs_[k]; }
  cplx& operator[](std::size_t k) { return coeffs_[k]; }
  std::size_t size() const { return coeffs_.size(); }

  /// max |c_k - conj(c_{-k})| relative to max |c_k|.
  double conjugate_symmetry_defect() const;

 private:
  Grid grid_;
  std::vector<cplx> coeffs_;
};

/// Amplitude B and decay rate b of the kernel B*exp(-b|x|).
struct KernelParams {
  double B = 0.5;
  double b = 1.5;

  /// B > 0 and b > 0.
  static KernelParams make(double B, double b);
  /// B = 0: the Burgers limit, only meaningful for comparison pathways.
  static KernelParams burgers_limit(double b = 1.0);

  bool is_burgers_limit() const { return B == 0.0; }
};

using Multiplier = std::function<cplx(double)>;

SpectralCoeffs forward(const Field& f);
Field inverse(const SpectralCoeffs& c);

/// Pointwise c_k * m(xi_k); the Nyquist slot uses the even part of m.
SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, const Multiplier& m);

/// Fourier symbol 2*B*b*xi / (b^2 + xi^2) of the nonlocal term.
double fw_multiplier(const KernelParams& k, double xi);

/// Fourier transform 2*B*b / (b^2 + xi^2) of B*exp(-b|x|).
double kernel_symbol(const KernelParams& k, double xi);

/// max |f| over the outermost nodes at both ends, relative to max |f|.
/// Zero for the zero field.
double tail_indicator(const Field& f);

/// Convolution of f_x with B*exp(-b|.|), i.e. the multiplier i*m(xi).
/// Throws TailViolation when tail_indicator(f) exceeds tail_tol.
Field kernel_convolve(const Field& f, const KernelParams& k, double tail_tol = 1e-8);

/// Spectral derivative of order `order` (>= 1).
Field derivative(const Field& f, int order = 1);

struct Norms {
  double l2 = 0.0;
  double linf = 0.0;
  double h_s = 0.0;
  double w_s1 = 0.0;
};

/// L2 by quadrature, L-infinity over nodes, H^s by Parseval and W^{s,1} by
/// quadrature of the inverse-transformed weighted coefficients. s >= 0.
Norms norms(const Field& f, double s = 0.0);

double l2_norm(const Field& f);
double linf_norm(const Field& f);
double lr_norm(const Field& f, double r);  // r = infinity allowed
double sobolev_norm(const Field& f, double s);

/// Trigonometric interpolant of c evaluated at an arbitrary x (periodic).
double evaluate(const SpectralCoeffs& c, double x);

/// Zero-padded spectral interpolation onto a grid `factor` times finer.
Field refine(const Field& f, std::size_t factor);

}  // namespace fwlab
