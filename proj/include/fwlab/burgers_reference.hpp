// Exact solution of v_t + v v_x = 0 before breaking, by inverting the
// characteristic map x = x0 + t u0(x0), and the L-infinity comparison bound
// between the nonlocal flow and Burgers.

#pragma once

#include "fwlab/initial_data.hpp"
#include "fwlab/spectral.hpp"

#include <vector>

namespace fwlab {

class BurgersSolution {
 public:
  explicit BurgersSolution(InitialDatum datum);

  const InitialDatum& datum() const { return datum_; }
  /// -1/inf u0' (+infinity when u0' >= 0 everywhere).
  double lifespan() const { return lifespan_; }

  /// Label x0 of the characteristic through (t, x); safeguarded Newton.
  double foot(double t, double x) const;
  double evaluate(double t, double x) const;
  Field sample(const Grid& g, double t) const;

  /// |v_x(t)|_inf = max(-m0/(1 + t m0), M/(1 + t M)), m0 = inf u0', M = sup u0'.
  double slope_sup(double t) const;
  /// Integral of slope_sup over [0, T] in closed form.
  double slope_integral(double T) const;

 private:
  void check_time(double t) const;

  InitialDatum datum_;
  double lifespan_;
};

struct Snapshot {
  double t = 0.0;
  Field u;
};

struct Comparison {
  double T = 0.0;
  /// max over snapshots with t <= T of |u(t) - v(t)|_inf on the grid.
  double lhs = 0.0;
  /// B b^{1/2} T |u0|_2 exp(int_0^T |v_x|_inf dt).
  double rhs = 0.0;
  bool satisfied = false;
  std::size_t snapshots = 0;
};

/// Throws DomainError unless 0 <= T < lifespan.
Comparison compare_bound(const std::vector<Snapshot>& run, const BurgersSolution& sol,
                         const KernelParams& k, double T);

}  // namespace fwlab
