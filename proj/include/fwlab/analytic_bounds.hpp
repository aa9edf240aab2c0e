// Closed-form blow-up criteria, blow-up time upper bounds and the lifespan
// lower bound for a datum u0 and kernel (B, b), with witness searches.

#pragma once

#include "fwlab/initial_data.hpp"
#include "fwlab/spectral.hpp"

#include <limits>
#include <string>
#include <vector>

namespace fwlab {

/// A criterion whose preconditions fail is inapplicable, never false.
enum class Applicability { holds, fails, inapplicable };

std::string to_string(Applicability a);

struct CriterionResult {
  Applicability status = Applicability::inapplicable;
  double time_bound = std::numeric_limits<double>::quiet_NaN();
};

/// F(t, x0) = 2Bb u0(x0) + B b^{3/2} |u0|_2 + 2 B^2 b^{3/2} |u0|_2 t.
double threshold_value(const InitialDatum& u0, const KernelParams& k, double t, double x0);

/// Phi(T) = 2Bb |u0|_inf + B b^{3/2} |u0|_2 + 2 B^2 b^{3/2} |u0|_2 T.
double growth_value(const DatumSummary& s, const KernelParams& k, double T);

/// (1 + 1/alpha) / (1 - 1/(2 alpha)).
double horizon_factor(double alpha);

/// Slope test at x0 against a horizon T: holds iff
///   u0'(x0) <= -alpha ((F^{1/4} + sqrt(F^{1/2} + 4 kappa / T)) / 2)^2,
/// F = F(T, x0), kappa = horizon_factor(alpha); inapplicable when F < 0.
/// The bound is T0 <= -kappa / (u0'(x0) + sqrt(-u0'(x0)) F^{1/4}).
CriterionResult horizon_slope_criterion(const InitialDatum& u0, const KernelParams& k, double T,
                                        double x0, double alpha = 1.0);

/// Holds iff 2u0(x0) + b^{1/2}|u0|_2 < 0 and
/// u0'(x0) <= 2B b^{1/2}|u0|_2 / (2u0(x0) + b^{1/2}|u0|_2); bound -1/u0'(x0).
CriterionResult negative_value_criterion(const InitialDatum& u0, const KernelParams& k, double x0);

/// Earlier criteria, expressed through inf and sup of u0' and B only.
struct ClassicalCriteria {
  bool constantin_escher = false;  // inf + sup <= -2B
  bool ma_liu_qu = false;          // inf < min{-2B, (-B - sqrt(B^2 + 4B sup))/2}
  bool haziot = false;             // 5 inf + sup <= -6B
};

ClassicalCriteria classical_criteria(double inf_deriv, double sup_deriv, double B);
ClassicalCriteria classical_criteria(const InitialDatum& u0, const KernelParams& k);

struct LifespanLower {
  double t_lower = std::numeric_limits<double>::infinity();
  double witness_T = std::numeric_limits<double>::quiet_NaN();
  /// false when m0 = inf u0' >= 0 (no finite bound is produced).
  bool in_scope = false;
};

/// sup_T min{T, Phi(T)^{-1/2} arctan(-Phi(T)^{1/2}/m0)} with Phi(T) = phi0 + phi1 T,
/// found as the crossing of the two branches by bisection.
LifespanLower lifespan_lower(double phi0, double phi1, double m0);
LifespanLower lifespan_lower(const InitialDatum& u0, const KernelParams& k);

/// A(u0) = (inf u0' / (C (|u0|_inf^{1/2} + |u0|_2^{1/2} + 1)))^2; blow-up is
/// guaranteed for b <= A B^{-4/3}. Throws DomainError when inf u0' >= 0.
double small_decay_threshold(const DatumSummary& s, double C);
double small_decay_threshold(const InitialDatum& u0, double C);

/// -1/inf u0'; +infinity when inf u0' >= 0.
double burgers_lifespan(const InitialDatum& u0);

/// min{C/((1+B)|u0|_{H^s}), C/(1+B)} with C = 1. Schematic only: the true
/// constant is unknown.
double schematic_existence_time(double hs_norm, double B);

struct BoundsOptions {
  double alpha = 1.0;
  /// Constant C of the small-decay threshold.
  double threshold_constant = 16.0;
  /// x0 candidates: nodes of this grid refined `refine` times.
  double half_width = 20.0;
  std::size_t n_points = 1024;
  std::size_t refine = 4;
  double t_min = 1e-3;
  double t_max = 1e3;
  std::size_t t_points = 121;
  double hs_order = 3.0;
};

struct Witness {
  double x0 = std::numeric_limits<double>::quiet_NaN();
  double T = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
};

struct CriterionEntry {
  std::string name;
  Applicability status = Applicability::inapplicable;
  Witness witness;
  double time_bound = std::numeric_limits<double>::quiet_NaN();
  /// "upper", "lower" or "" for criteria without a time.
  std::string bound_kind;
};

struct BoundsReport {
  KernelParams kernel;
  BoundsOptions options;
  std::vector<CriterionEntry> entries;
  double inf_deriv = 0.0;
  double sup_deriv = 0.0;
  double l2_norm = 0.0;
  double linf_norm = 0.0;
  double threshold_at_witness = std::numeric_limits<double>::quiet_NaN();  // F(T, x0)
  double growth_at_lower = std::numeric_limits<double>::quiet_NaN();       // Phi(T_lower)
  double small_decay_A = std::numeric_limits<double>::quiet_NaN();
  double schematic_time = std::numeric_limits<double>::quiet_NaN();

  const CriterionEntry* find(const std::string& name) const;
  /// Smallest upper bound among holding criteria (+infinity if none).
  double min_upper() const;
  double lower() const;
  /// Messages for every broken consistency relation; empty when consistent.
  std::vector<std::string> consistency_violations() const;
};

/// Best witness (smallest bound) over candidate x0 and, for the horizon
/// criterion, T on a log grid refined by golden section and bisection.
CriterionEntry search_horizon_slope(const InitialDatum& u0, const KernelParams& k,
                                    const BoundsOptions& opt);
CriterionEntry search_negative_value(const InitialDatum& u0, const KernelParams& k,
                                     const BoundsOptions& opt);

BoundsReport evaluate_bounds(const InitialDatum& u0, const KernelParams& k,
                             const BoundsOptions& opt = {});

/// Fixed-width text table of a report.
std::string format_table(const BoundsReport& r);

}  // namespace fwlab
