// Initial-data families with closed-form norms and derivative extrema.

#pragma once

#include "fwlab/spectral.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace fwlab {

/// Scalar summary of u0 used by the analytic bounds. Closed form for the
/// Gaussian families, 4x refined spectral interpolation for custom data.
struct DatumSummary {
  double l2_norm = 0.0;
  double linf_norm = 0.0;
  double inf_deriv = 0.0;
  double argmin_deriv = 0.0;
  double sup_deriv = 0.0;
  double argsup_deriv = 0.0;
  bool closed_form = false;
};

class InitialDatum {
 public:
  enum class Kind { gaussian, odd_gaussian, scaled, amplified, custom };

  /// exp(-lambda x^2), lambda > 0.
  static InitialDatum gaussian(double lambda);
  /// -x exp(-lambda x^2), lambda > 0.
  static InitialDatum odd_gaussian(double lambda);
  /// n^{-1/2} base(n x), n >= 1.
  static InitialDatum scaled(const InitialDatum& base, int n);
  /// a * base(x).
  static InitialDatum amplified(const InitialDatum& base, double a);
  static InitialDatum zero();
  /// Samples on a symmetric grid; the derivative defaults to the spectral one.
  static InitialDatum custom(const Field& samples, std::function<double(double)> derivative = {});
  /// Closed-form datum given by value, derivative and its summary.
  static InitialDatum from_functions(std::function<double(double)> value,
                                     std::function<double(double)> derivative, DatumSummary summary,
                                     std::string description = "function");

  Kind kind() const;
  double value(double x) const;
  double derivative(double x) const;
  const DatumSummary& summary() const;
  /// lambda of the underlying Gaussian family (NaN for custom data).
  double lambda() const;
  /// True when the datum reproduces a worked remark outside lambda >= 1.
  bool outside_remark_range() const;
  std::string describe() const;

 private:
  struct Impl;
  explicit InitialDatum(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Pointwise evaluation on the grid nodes. Throws TailViolation when the
/// datum is not below tail_tol (relative to its maximum) at the boundary.
Field sample(const InitialDatum& d, const Grid& g, double tail_tol = 1e-8);

/// Two-column text (x, u0(x)); x strictly increasing, equispaced, starting
/// at -L with a power-of-two count. Blank lines and '#' comments ignored.
InitialDatum load_custom(const std::filesystem::path& path);

}  // namespace fwlab
