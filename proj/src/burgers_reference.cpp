#include "fwlab/burgers_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace fwlab {

BurgersSolution::BurgersSolution(InitialDatum datum)
    : datum_(std::move(datum)), lifespan_(std::numeric_limits<double>::infinity()) {
  const double m0 = datum_.summary().inf_deriv;
  if (m0 < 0.0) lifespan_ = -1.0 / m0;
}

void BurgersSolution::check_time(double t) const {
  if (!(t >= 0.0)) throw DomainError("BurgersSolution: t must be >= 0");
  if (!(t < lifespan_ * (1.0 - 1e-9)))
    throw DomainError(fmt::format("BurgersSolution: t = {:g} is past the lifespan {:g}", t, lifespan_));
}

double BurgersSolution::foot(double t, double x) const {
  check_time(t);
  if (t == 0.0) return x;
  const double reach = t * datum_.summary().linf_norm;
  double lo = x - reach - 1e-12 * (1.0 + std::abs(x));
  double hi = x + reach + 1e-12 * (1.0 + std::abs(x));
  auto G = [&](double y) { return y + t * datum_.value(y) - x; };
  double y = x - t * datum_.value(x);
  y = std::clamp(y, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double g = G(y);
    if (g == 0.0) return y;
    if (g > 0.0)
      hi = y;
    else
      lo = y;
    const double dg = 1.0 + t * datum_.derivative(y);
    double next = y - g / dg;
    if (!(dg > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-15 * (1.0 + std::abs(y)) || hi - lo <= 1e-15 * (1.0 + std::abs(y)))
      return next;
    y = next;
  }
  throw Error(fmt::format("BurgersSolution: characteristic inversion did not converge at t={:g}, x={:g}", t, x));
}

double BurgersSolution::evaluate(double t, double x) const {
  return datum_.value(foot(t, x));
}

Field BurgersSolution::sample(const Grid& g, double t) const {
  Field f(g);
  for (std::size_t j = 0; j < g.size(); ++j) f[j] = evaluate(t, g.node(j));
  return f;
}

double BurgersSolution::slope_sup(double t) const {
  check_time(t);
  const double m0 = datum_.summary().inf_deriv;
  const double M = datum_.summary().sup_deriv;
  double s = 0.0;
  if (m0 < 0.0) s = std::max(s, -m0 / (1.0 + t * m0));
  if (M > 0.0) s = std::max(s, M / (1.0 + t * M));
  return s;
}

double BurgersSolution::slope_integral(double T) const {
  check_time(T);
  const double m0 = std::min(datum_.summary().inf_deriv, 0.0);
  const double M = std::max(datum_.summary().sup_deriv, 0.0);
  // The rising branch dominates up to the crossing t*, the falling one after.
  auto up = [&](double a, double b) { return std::log1p(b * M) - std::log1p(a * M); };
  auto down = [&](double a, double b) { return -std::log1p(b * m0) + std::log1p(a * m0); };
  double cross = 0.0;
  if (m0 < 0.0 && M > 0.0) cross = std::max(0.0, -(m0 + M) / (2.0 * m0 * M));
  if (m0 == 0.0) return up(0.0, T);
  if (T <= cross) return up(0.0, T);
  return up(0.0, cross) + down(cross, T);
}

Comparison compare_bound(const std::vector<Snapshot>& run, const BurgersSolution& sol,
                         const KernelParams& k, double T) {
  if (!(T >= 0.0) || !(T < sol.lifespan()))
    throw DomainError(fmt::format("compare_bound: T = {:g} must lie in [0, lifespan)", T));
  Comparison c;
  c.T = T;
  for (const auto& s : run) {
    if (s.t > T) continue;
    const Field v = sol.sample(s.u.grid(), s.t);
    for (std::size_t j = 0; j < v.size(); ++j) c.lhs = std::max(c.lhs, std::abs(s.u[j] - v[j]));
    ++c.snapshots;
  }
  c.rhs = k.B * std::sqrt(k.b) * T * sol.datum().summary().l2_norm * std::exp(sol.slope_integral(T));
  c.satisfied = c.lhs <= c.rhs * (1.0 + 1e-6);
  return c;
}

}  // namespace fwlab
