#include "fwlab/spectral.hpp"

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace fwlab {

namespace detail {

namespace {

std::mutex plan_mutex;

fftw_plan cached_plan(std::size_t n, int sign) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  auto* in = fftw_alloc_complex(n);
  auto* out = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  plans.emplace(key, plan);
  return plan;
}

void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out,
             int sign) {
  if (in.size() != out.size()) throw GridMismatch("fft: input and output sizes differ");
  fftw_plan plan = cached_plan(in.size(), sign);
  // Out-of-place complex transforms preserve their input.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  execute(in, out, FFTW_FORWARD);
}

void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  execute(in, out, FFTW_BACKWARD);
}

}  // namespace detail

Grid::Grid(double half_width, std::size_t n_points) : half_width_(half_width), n_(n_points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw DomainError("Grid: half width must be positive and finite");
  if (n_points < 16 || !std::has_single_bit(n_points))
    throw DomainError("Grid: point count must be a power of two >= 16");
}

double Grid::node(std::size_t j) const {
  return -half_width_ + static_cast<double>(j) * dx();
}

long Grid::mode_index(std::size_t k) const {
  const auto n = static_cast<long>(n_);
  const auto kk = static_cast<long>(k);
  return kk < n / 2 ? kk : kk - n;
}

double Grid::wavenumber(std::size_t k) const {
  return std::numbers::pi * static_cast<double>(mode_index(k)) / half_width_;
}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw GridMismatch("Field: sample count does not match grid");
}

Field::Field(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

bool Field::is_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Field::require_finite(const char* where) const {
  if (!is_finite()) throw NonFiniteValue(std::string(where) + ": field contains NaN or Inf");
}

SpectralCoeffs::SpectralCoeffs(Grid grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size())
    throw GridMismatch("SpectralCoeffs: coefficient count does not match grid");
}

SpectralCoeffs::SpectralCoeffs(Grid grid) : grid_(grid), coeffs_(grid.size(), cplx{}) {}

double SpectralCoeffs::conjugate_symmetry_defect() const {
  const std::size_t n = coeffs_.size();
  double peak = 0.0;
  double defect = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    peak = std::max(peak, std::abs(coeffs_[k]));
    defect = std::max(defect, std::abs(coeffs_[k] - std::conj(coeffs_[(n - k) % n])));
  }
  return peak > 0.0 ? defect / peak : 0.0;
}

KernelParams KernelParams::make(double B, double b) {
  if (!(B > 0.0) || !(b > 0.0) || !std::isfinite(B) || !std::isfinite(b))
    throw DomainError("KernelParams: B and b must be positive and finite");
  return {B, b};
}

KernelParams KernelParams::burgers_limit(double b) {
  if (!(b > 0.0)) throw DomainError("KernelParams: b must be positive");
  return {0.0, b};
}

SpectralCoeffs forward(const Field& f) {
  f.require_finite("forward");
  std::vector<cplx> in(f.values().begin(), f.values().end());
  std::vector<cplx> out(in.size());
  detail::fft_forward(in, out);
  return SpectralCoeffs(f.grid(), std::move(out));
}

Field inverse(const SpectralCoeffs& c) {
  for (const auto& z : c.coeffs())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NonFiniteValue("inverse: coefficients contain NaN or Inf");
  std::vector<cplx> out(c.size());
  detail::fft_backward(c.coeffs(), out);
  const double scale = 1.0 / static_cast<double>(c.size());
  std::vector<double> values(c.size());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = out[j].real() * scale;
  return Field(c.grid(), std::move(values));
}

SpectralCoeffs apply_multiplier(const SpectralCoeffs& c, const Multiplier& m) {
  const Grid& g = c.grid();
  SpectralCoeffs out(g);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double xi = g.wavenumber(k);
    cplx factor = g.is_nyquist(k) ? 0.5 * (m(xi) + m(-xi)) : m(xi);
    if (!std::isfinite(factor.real()) || !std::isfinite(factor.imag()))
      throw NonFiniteValue("apply_multiplier: multiplier is not finite at a grid wavenumber");
    out[k] = c[k] * factor;
  }
  return out;
}

double fw_multiplier(const KernelParams& k, double xi) {
  return 2.0 * k.B * k.b * xi / (k.b * k.b + xi * xi);
}

double kernel_symbol(const KernelParams& k, double xi) {
  return 2.0 * k.B * k.b / (k.b * k.b + xi * xi);
}

double tail_indicator(const Field& f) {
  const auto v = f.values();
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return 0.0;
  const std::size_t n = v.size();
  const std::size_t w = std::max<std::size_t>(2, n / 256);
  double edge = 0.0;
  for (std::size_t j = 0; j < w; ++j) {
    edge = std::max(edge, std::abs(v[j]));
    edge = std::max(edge, std::abs(v[n - 1 - j]));
  }
  return edge / peak;
}

Field kernel_convolve(const Field& f, const KernelParams& k, double tail_tol) {
  f.require_finite("kernel_convolve");
  const double tail = tail_indicator(f);
  if (tail > tail_tol)
    throw TailViolation("kernel_convolve: boundary values " + std::to_string(tail) +
                        " of max exceed the tail tolerance");
  const cplx i{0.0, 1.0};
  return inverse(apply_multiplier(forward(f), [&](double xi) { return i * fw_multiplier(k, xi); }));
}

Field derivative(const Field& f, int order) {
  if (order < 1) throw DomainError("derivative: order must be >= 1");
  const cplx i{0.0, 1.0};
  return inverse(apply_multiplier(forward(f), [order, i](double xi) {
    return std::pow(i * xi, order);
  }));
}

double l2_norm(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().dx());
}

double linf_norm(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double lr_norm(const Field& f, double r) {
  if (std::isinf(r)) return linf_norm(f);
  if (!(r >= 1.0)) throw DomainError("lr_norm: exponent must be >= 1");
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), r);
  return std::pow(s * f.grid().dx(), 1.0 / r);
}

double sobolev_norm(const Field& f, double s) {
  if (!(s >= 0.0)) throw DomainError("sobolev_norm: order must be >= 0");
  const auto c = forward(f);
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double xi = g.wavenumber(k);
    acc += std::pow(1.0 + xi * xi, s) * std::norm(c[k]);
  }
  return std::sqrt(acc * g.dx() / static_cast<double>(g.size()));
}

Norms norms(const Field& f, double s) {
  if (!(s >= 0.0)) throw DomainError("norms: order must be >= 0");
  f.require_finite("norms");
  Norms out;
  out.l2 = l2_norm(f);
  out.linf = linf_norm(f);
  out.h_s = sobolev_norm(f, s);
  const Field weighted = inverse(apply_multiplier(
      forward(f), [s](double xi) { return cplx{std::pow(1.0 + xi * xi, 0.5 * s), 0.0}; }));
  double l1 = 0.0;
  for (double v : weighted.values()) l1 += std::abs(v);
  out.w_s1 = l1 * f.grid().dx();
  return out;
}

double evaluate(const SpectralCoeffs& c, double x) {
  const Grid& g = c.grid();
  const std::size_t n = g.size();
  const double theta = std::numbers::pi * (x + g.half_width()) / g.half_width();
  const cplx step{std::cos(theta), std::sin(theta)};
  cplx w = step;
  cplx sum{};
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (k % 256 == 0) w = std::polar(1.0, theta * static_cast<double>(k));
    sum += c[k] * w;
    w *= step;
  }
  double value = c[0].real() + 2.0 * sum.real();
  value += c[n / 2].real() * std::cos(theta * static_cast<double>(n / 2));
  return value / static_cast<double>(n);
}

Field refine(const Field& f, std::size_t factor) {
  if (factor < 1 || !std::has_single_bit(factor)) throw DomainError("refine: factor must be a power of two");
  if (factor == 1) return f;
  const auto c = forward(f);
  const std::size_t n = f.size();
  const std::size_t m = n * factor;
  Grid fine(f.grid().half_width(), m);
  std::vector<cplx> padded(m, cplx{});
  for (std::size_t k = 0; k < n / 2; ++k) padded[k] = c[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) padded[m - (n - k)] = c[k];
  // Split the Nyquist cosine mode evenly between +N/2 and -N/2.
  padded[n / 2] = 0.5 * c[n / 2];
  padded[m - n / 2] = 0.5 * c[n / 2];
  std::vector<cplx> out(m);
  detail::fft_backward(padded, out);
  std::vector<double> values(m);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) values[j] = out[j].real() * scale;
  return Field(fine, std::move(values));
}

}  // namespace fwlab
