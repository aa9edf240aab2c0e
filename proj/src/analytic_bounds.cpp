#include "fwlab/analytic_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace fwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> candidates(const BoundsOptions& opt) {
  const std::size_t n = opt.n_points * std::max<std::size_t>(1, opt.refine);
  const double h = 2.0 * opt.half_width / static_cast<double>(n);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = -opt.half_width + static_cast<double>(j) * h;
  return out;
}

/// Margin of the horizon slope test: >= 0 holds, < 0 fails, NaN inapplicable.
struct HorizonMargin {
  const InitialDatum& u0;
  const KernelParams& k;
  double x0;
  double d;
  double alpha;
  double kappa;

  double operator()(double T) const {
    const double F = threshold_value(u0, k, T, x0);
    if (F < 0.0) return kNaN;
    const double a = (std::pow(F, 0.25) + std::sqrt(std::sqrt(F) + 4.0 * kappa / T)) / 2.0;
    return -alpha * a * a - d;
  }
};

double horizon_upper(double d, double F, double kappa) {
  return -kappa / (d + std::sqrt(-d) * std::pow(F, 0.25));
}

Applicability combine(bool any_holds, bool any_applicable) {
  if (any_holds) return Applicability::holds;
  return any_applicable ? Applicability::fails : Applicability::inapplicable;
}

}  // namespace

std::string to_string(Applicability a) {
  switch (a) {
    case Applicability::holds: return "holds";
    case Applicability::fails: return "fails";
    case Applicability::inapplicable: return "inapplicable";
  }
  return "unknown";
}

double threshold_value(const InitialDatum& u0, const KernelParams& k, double t, double x0) {
  const double B = k.B;
  const double b = k.b;
  const double l2 = u0.summary().l2_norm;
  return 2.0 * B * b * u0.value(x0) + B * std::pow(b, 1.5) * l2 +
         2.0 * B * B * std::pow(b, 1.5) * l2 * t;
}

double growth_value(const DatumSummary& s, const KernelParams& k, double T) {
  const double B = k.B;
  const double b = k.b;
  return 2.0 * B * b * s.linf_norm + B * std::pow(b, 1.5) * s.l2_norm +
         2.0 * B * B * std::pow(b, 1.5) * s.l2_norm * T;
}

double horizon_factor(double alpha) {
  if (!(alpha >= 1.0)) throw DomainError("horizon_factor: alpha must be >= 1");
  return (1.0 + 1.0 / alpha) / (1.0 - 1.0 / (2.0 * alpha));
}

CriterionResult horizon_slope_criterion(const InitialDatum& u0, const KernelParams& k, double T,
                                        double x0, double alpha) {
  const double kappa = horizon_factor(alpha);
  if (!(T > 0.0)) throw DomainError("horizon_slope_criterion: T must be > 0");
  const double d = u0.derivative(x0);
  const HorizonMargin margin{u0, k, x0, d, alpha, kappa};
  const double h = margin(T);
  CriterionResult r;
  if (std::isnan(h)) return r;
  r.status = (h >= 0.0) ? Applicability::holds : Applicability::fails;
  if (r.status == Applicability::holds)
    r.time_bound = horizon_upper(d, threshold_value(u0, k, T, x0), kappa);
  return r;
}

CriterionResult negative_value_criterion(const InitialDatum& u0, const KernelParams& k, double x0) {
  const double l2 = u0.summary().l2_norm;
  const double sb = std::sqrt(k.b);
  const double c = 2.0 * u0.value(x0) + sb * l2;
  const double d = u0.derivative(x0);
  CriterionResult r;
  r.status = Applicability::fails;
  if (c < 0.0 && d <= 2.0 * k.B * sb * l2 / c && d < 0.0) {
    r.status = Applicability::holds;
    r.time_bound = -1.0 / d;
  }
  return r;
}

ClassicalCriteria classical_criteria(double inf_deriv, double sup_deriv, double B) {
  ClassicalCriteria c;
  c.constantin_escher = inf_deriv + sup_deriv <= -2.0 * B;
  const double rad = B * B + 4.0 * B * sup_deriv;
  const double bound = rad < 0.0 ? -2.0 * B : std::min(-2.0 * B, (-B - std::sqrt(rad)) / 2.0);
  c.ma_liu_qu = inf_deriv < bound;
  c.haziot = 5.0 * inf_deriv + sup_deriv <= -6.0 * B;
  return c;
}

ClassicalCriteria classical_criteria(const InitialDatum& u0, const KernelParams& k) {
  const auto& s = u0.summary();
  return classical_criteria(s.inf_deriv, s.sup_deriv, k.B);
}

LifespanLower lifespan_lower(double phi0, double phi1, double m0) {
  LifespanLower out;
  if (!(m0 < 0.0)) return out;
  if (phi0 < 0.0 || phi1 < 0.0) throw DomainError("lifespan_lower: growth coefficients must be >= 0");
  const double am = -m0;
  auto g = [&](double T) {
    const double phi = phi0 + phi1 * T;
    const double z = std::sqrt(phi) / am;
    if (z < 1e-4) return (1.0 - z * z / 3.0 + z * z * z * z / 5.0) / am;
    return std::atan(z) / std::sqrt(phi);
  };
  // T - g(T) is increasing, negative at 0 and >= 0 at 1/|m0|.
  double lo = 0.0;
  double hi = 1.0 / am;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid - g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.in_scope = true;
  out.witness_T = 0.5 * (lo + hi);
  out.t_lower = std::min(out.witness_T, g(out.witness_T));
  return out;
}

LifespanLower lifespan_lower(const InitialDatum& u0, const KernelParams& k) {
  const auto& s = u0.summary();
  const double phi0 = growth_value(s, k, 0.0);
  const double phi1 = growth_value(s, k, 1.0) - phi0;
  return lifespan_lower(phi0, phi1, s.inf_deriv);
}

double small_decay_threshold(const DatumSummary& s, double C) {
  if (!(s.inf_deriv < 0.0)) throw DomainError("small_decay_threshold: needs inf u0' < 0");
  if (!(C > 0.0)) throw DomainError("small_decay_threshold: C must be > 0");
  const double q = s.inf_deriv / (C * (std::sqrt(s.linf_norm) + std::sqrt(s.l2_norm) + 1.0));
  return q * q;
}

double small_decay_threshold(const InitialDatum& u0, double C) {
  return small_decay_threshold(u0.summary(), C);
}

double burgers_lifespan(const InitialDatum& u0) {
  const double m0 = u0.summary().inf_deriv;
  return m0 < 0.0 ? -1.0 / m0 : kInf;
}

double schematic_existence_time(double hs_norm, double B) {
  return std::min(1.0 / ((1.0 + B) * hs_norm), 1.0 / (1.0 + B));
}

CriterionEntry search_horizon_slope(const InitialDatum& u0, const KernelParams& k,
                                    const BoundsOptions& opt) {
  CriterionEntry best;
  best.name = "horizon_slope";
  best.bound_kind = "upper";
  const double kappa = horizon_factor(opt.alpha);
  const auto ts = [&] {
    std::vector<double> v(opt.t_points);
    const double a = std::log(opt.t_min);
    const double b = std::log(opt.t_max);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(v.size() - 1));
    return v;
  }();
  bool any_holds = false;
  bool any_applicable = false;
  double best_bound = kInf;
  std::vector<double> hs(ts.size());
  for (double x0 : candidates(opt)) {
    const double d = u0.derivative(x0);
    const HorizonMargin h{u0, k, x0, d, opt.alpha, kappa};
    std::size_t arg = ts.size();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      hs[i] = h(ts[i]);
      if (std::isnan(hs[i])) continue;
      any_applicable = true;
      if (arg == ts.size() || hs[i] > hs[arg]) arg = i;
    }
    if (arg == ts.size() || d >= 0.0) continue;

    // Golden section on log T around the best grid point.
    double a = std::log(ts[arg > 0 ? arg - 1 : 0]);
    double c = std::log(ts[std::min(arg + 1, ts.size() - 1)]);
    double t_peak = ts[arg];
    double h_peak = hs[arg];
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    auto hv = [&](double lt) {
      const double v = h(std::exp(lt));
      return std::isnan(v) ? -kInf : v;
    };
    double x1 = c - ratio * (c - a);
    double x2 = a + ratio * (c - a);
    double f1 = hv(x1);
    double f2 = hv(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + ratio * (c - a);
        f2 = hv(x2);
      } else {
        c = x2;
        x2 = x1;
        f2 = f1;
        x1 = c - ratio * (c - a);
        f1 = hv(x1);
      }
    }
    if (std::max(f1, f2) > h_peak) {
      h_peak = std::max(f1, f2);
      t_peak = std::exp(f1 > f2 ? x1 : x2);
    }
    if (h_peak < 0.0) continue;
    any_holds = true;

    // Smallest holding T gives the smallest bound; bisect from the failing side.
    double lo = opt.t_min;
    double hi = t_peak;
    for (std::size_t i = 0; i < ts.size() && ts[i] < t_peak; ++i) {
      if (!(hs[i] >= 0.0)) lo = ts[i];
    }
    if (h(lo) >= 0.0) {
      hi = lo;
    } else {
      for (int it = 0; it < 100; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (h(mid) >= 0.0)
          hi = mid;
        else
          lo = mid;
      }
    }
    const double bound = horizon_upper(d, threshold_value(u0, k, hi, x0), kappa);
    if (bound < best_bound) {
      best_bound = bound;
      best.witness = {x0, hi, opt.alpha};
      best.time_bound = bound;
    }
  }
  best.status = combine(any_holds, any_applicable);
  return best;
}

CriterionEntry search_negative_value(const InitialDatum& u0, const KernelParams& k,
                                     const BoundsOptions& opt) {
  CriterionEntry best;
  best.name = "negative_value";
  best.bound_kind = "upper";
  best.status = Applicability::fails;
  double best_bound = kInf;
  for (double x0 : candidates(opt)) {
    const auto r = negative_value_criterion(u0, k, x0);
    if (r.status != Applicability::holds) continue;
    best.status = Applicability::holds;
    if (r.time_bound < best_bound) {
      best_bound = r.time_bound;
      best.time_bound = r.time_bound;
      best.witness.x0 = x0;
    }
  }
  return best;
}

const CriterionEntry* BoundsReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

double BoundsReport::min_upper() const {
  double best = kInf;
  for (const auto& e : entries)
    if (e.bound_kind == "upper" && e.status == Applicability::holds)
      best = std::min(best, e.time_bound);
  return best;
}

double BoundsReport::lower() const {
  const auto* e = find("lifespan_lower");
  return (e && e->status == Applicability::holds) ? e->time_bound : 0.0;
}

std::vector<std::string> BoundsReport::consistency_violations() const {
  std::vector<std::string> out;
  const double lo = lower();
  for (const auto& e : entries) {
    if (e.bound_kind != "upper" || e.status != Applicability::holds) continue;
    if (!(e.time_bound > 0.0) || !std::isfinite(e.time_bound))
      out.push_back(fmt::format("{}: bound {} is not finite positive", e.name, e.time_bound));
    if (lo > e.time_bound * (1.0 + 1e-9))
      out.push_back(fmt::format("{}: lower bound {:.10g} exceeds upper bound {:.10g}", e.name, lo,
                                e.time_bound));
    if (e.name == "horizon_slope" && e.time_bound > e.witness.T * (1.0 + 1e-9))
      out.push_back(fmt::format("horizon_slope: bound {:.10g} exceeds its horizon {:.10g}",
                                e.time_bound, e.witness.T));
  }
  return out;
}

BoundsReport evaluate_bounds(const InitialDatum& u0, const KernelParams& k, const BoundsOptions& opt) {
  BoundsReport r;
  r.kernel = k;
  r.options = opt;
  const auto& s = u0.summary();
  r.inf_deriv = s.inf_deriv;
  r.sup_deriv = s.sup_deriv;
  r.l2_norm = s.l2_norm;
  r.linf_norm = s.linf_norm;

  const auto cl = classical_criteria(s.inf_deriv, s.sup_deriv, k.B);
  auto flag = [](bool b) { return b ? Applicability::holds : Applicability::fails; };
  r.entries.push_back({"constantin_escher", flag(cl.constantin_escher), {}, kNaN, ""});
  r.entries.push_back({"ma_liu_qu", flag(cl.ma_liu_qu), {}, kNaN, ""});
  r.entries.push_back({"haziot", flag(cl.haziot), {}, kNaN, ""});

  const bool has_slope = s.inf_deriv < 0.0;
  if (has_slope) {
    r.entries.push_back(search_horizon_slope(u0, k, opt));
    r.entries.push_back(search_negative_value(u0, k, opt));
  } else {
    r.entries.push_back({"horizon_slope", Applicability::inapplicable, {}, kNaN, "upper"});
    r.entries.push_back({"negative_value", Applicability::fails, {}, kNaN, "upper"});
  }
  if (const auto& h = r.entries[3]; h.status == Applicability::holds)
    r.threshold_at_witness = threshold_value(u0, k, h.witness.T, h.witness.x0);

  const auto low = lifespan_lower(u0, k);
  CriterionEntry le{"lifespan_lower", Applicability::inapplicable, {}, kInf, "lower"};
  if (low.in_scope) {
    le.status = Applicability::holds;
    le.time_bound = low.t_lower;
    le.witness.T = low.witness_T;
    r.growth_at_lower = growth_value(s, k, low.witness_T);
  }
  r.entries.push_back(le);

  CriterionEntry sd{"small_decay", Applicability::inapplicable, {}, kNaN, ""};
  if (has_slope && k.B > 0.0) {
    r.small_decay_A = small_decay_threshold(s, opt.threshold_constant);
    sd.status = flag(k.b <= r.small_decay_A * std::pow(k.B, -4.0 / 3.0));
  }
  r.entries.push_back(sd);

  CriterionEntry bl{"burgers_lifespan", has_slope ? Applicability::holds : Applicability::inapplicable,
                    {}, burgers_lifespan(u0), "reference"};
  r.entries.push_back(bl);

  try {
    const Field f = sample(u0, Grid(opt.half_width, opt.n_points));
    r.schematic_time = schematic_existence_time(sobolev_norm(f, opt.hs_order), k.B);
  } catch (const TailViolation&) {
    r.schematic_time = kNaN;
  }
  return r;
}

std::string format_table(const BoundsReport& r) {
  std::string out;
  out += fmt::format("B = {:g}, b = {:g}\n", r.kernel.B, r.kernel.b);
  out += fmt::format("inf u0' = {:.10g}   sup u0' = {:.10g}   |u0|_2 = {:.10g}   |u0|_inf = {:.10g}\n",
                     r.inf_deriv, r.sup_deriv, r.l2_norm, r.linf_norm);
  out += fmt::format("{:<20} {:<13} {:>14} {:>7} {:>14} {:>14}\n", "criterion", "status", "time",
                     "kind", "x0", "T");
  for (const auto& e : r.entries) {
    auto num = [](double v) { return std::isnan(v) ? std::string("-") : fmt::format("{:.8g}", v); };
    out += fmt::format("{:<20} {:<13} {:>14} {:>7} {:>14} {:>14}\n", e.name, to_string(e.status),
                       num(e.time_bound), e.bound_kind.empty() ? "-" : e.bound_kind,
                       num(e.witness.x0), num(e.witness.T));
  }
  out += fmt::format("alpha = {:g}, threshold constant C = {:g}, A(u0) = {:.6g}\n", r.options.alpha,
                     r.options.threshold_constant, r.small_decay_A);
  out += fmt::format("schematic existence time (C = 1, H^{:g}) = {:.6g}\n", r.options.hs_order,
                     r.schematic_time);
  return out;
}

}  // namespace fwlab
