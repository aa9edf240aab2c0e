// Time integration of u_t + (1/p)(u^p)_x + K*u_x = 0, K = B exp(-b|x|), on a
// periodic box by a dealiased pseudospectral method of lines with classical
// RK4, to wave breaking or a horizon.
//
// Characteristics dq/dt = u^{p-1}(t,q) are advanced inside the same RK4
// stages as the field. Each one carries U = u(t,q) and V = u_x(t,q) through
//
//   dU/dt = -(K*u_x)(q)
//   dV/dt = -(p-1) U^{p-2} V^2 + 2Bb U - b^2 (K*u)(q)
//
// with the nonlocal terms taken from the field by trigonometric
// interpolation. Those terms are smooth functionals of u, so V stays
// meaningful after the field itself stops resolving the steepening front.
// A detection bundle of characteristics is re-centred on the steepest point
// of the field while the field is resolved and left to run afterwards; the
// slope m(t) = inf u_x that drives the time step and the blow-up test is the
// smaller of the grid minimum (while resolved) and the bundle minimum.

#pragma once

#include "fwlab/spectral.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fwlab {

struct ModelParams {
  int p = 2;
  KernelParams kernel;
  /// false drops (1/p)(u^p)_x, leaving the linear flow exp(-i t m(xi)).
  bool nonlinear = true;
};

struct SimConfig {
  ModelParams params;
  Grid grid{20.0, 1024};
  double t_end = 1.0;
  double cfl = 0.4;
  double m_stop = 1e4;
  double dt_floor = 1e-12;
  /// Cap on dt; keeps the dispersive term resolved when u and m(t) are tiny.
  double dt_max = 0.05;
  /// Fixed step (convergence studies); overrides the adaptive rule.
  std::optional<double> fixed_dt;
  bool dealias = true;
  int record_every = 1;
  double hs_order = 3.0;
  double tail_tol = 1e-8;
  /// Field counts as resolved while the top quarter of the retained band
  /// holds less than this fraction of the peak coefficient magnitude.
  double resolution_tol = 1e-10;
  std::size_t bundle_size = 65;

  void validate() const;
};

struct TrackedCharacteristic {
  double x0 = 0.0;  // label at t = 0 (NaN for bundle members)
  double q = 0.0;
  double u = 0.0;
  double ux = 0.0;
  bool bundle = false;
};

struct SimState {
  double t = 0.0;
  Field u{Grid{1.0, 16}};
  std::vector<TrackedCharacteristic> tracked;
};

struct Sample {
  double t = 0.0;
  double m = 0.0;
  double sup_ux = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  double hs = 0.0;
  double dt = 0.0;
  bool resolved = true;
};

class TimeSeries {
 public:
  void push(const Sample& s);
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& back() const { return samples_.back(); }

  /// Columns t,m,sup_ux,linf,l2,hs,dt,resolved; %.17g numbers.
  void write_csv(std::ostream& os) const;
  static TimeSeries read_csv(std::istream& is);

 private:
  std::vector<Sample> samples_;
};

struct Verdict {
  enum class Kind { blowup, reached_horizon, aborted };
  Kind kind = Kind::reached_horizon;
  double t0_estimate = std::numeric_limits<double>::quiet_NaN();
  double bracket_lo = std::numeric_limits<double>::quiet_NaN();
  double bracket_hi = std::numeric_limits<double>::quiet_NaN();
  std::string reason;
};

std::string to_string(Verdict::Kind kind);

struct RunResult {
  Verdict verdict;
  TimeSeries series;
  SimState final_state;
  /// First time the field failed the resolution test (NaN if never).
  double resolution_lost_at = std::numeric_limits<double>::quiet_NaN();
  std::size_t steps = 0;
};

/// Called on every recorded sample, including t = 0 and the final state.
using Observer = std::function<void(const SimState&, const Sample&)>;

/// -(1/p)(u^p)_x - K*u_x; the product is formed in physical space and the
/// result is 2/3-rule truncated when dealias is set.
Field rhs(const Field& u, const ModelParams& params, bool dealias = true);

/// One RK4 step of size dt for the field and every tracked characteristic.
SimState step(const SimState& state, double dt, const SimConfig& config);

/// Tracked characteristics at t = 0 from labels x0, with u and u_x taken
/// from the spectral interpolant of u0.
std::vector<TrackedCharacteristic> seed_characteristics(const Field& u0,
                                                        std::span<const double> x0);

/// Integrates with dt = cfl * min(dx / |u|_inf^{p-1}, 1/|m|) (capped by
/// dt_max and the horizon) until |m| >= m_stop or dt < dt_floor (BLOWUP),
/// t_end (REACHED_HORIZON), or a tail / non-finite failure (ABORTED).
RunResult run(const SimConfig& config, const Field& u0, std::span<const double> tracked_x0 = {},
              const Observer& observer = {});

struct RateFit {
  double c_hat = 0.0;
  double spread = 0.0;
  std::size_t samples = 0;
};

/// Mean and standard deviation of m(t)(T0 - t) over samples with
/// |m| in [m_lo, m_hi]; needs at least 20 of them.
RateFit blowup_rate_fit(const TimeSeries& series, double t0, double m_lo = 1e2, double m_hi = 1e4);

/// Least-squares T0 in m(t) = -1/(T0 - t) over samples with |m| in [m_lo, m_hi].
double extrapolate_blowup_time(const TimeSeries& series, double m_lo, double m_hi);

/// Worst excess over the characteristic envelope, the L-infinity bound and
/// the sup u_x bound, across every recorded sample (field bounds only on
/// resolved samples).
struct EnvelopeReport {
  std::size_t samples = 0;
  std::size_t field_samples = 0;
  double characteristic_excess = -std::numeric_limits<double>::infinity();
  double linf_excess = -std::numeric_limits<double>::infinity();
  double slope_excess = -std::numeric_limits<double>::infinity();

  bool holds(double slack) const {
    return characteristic_excess <= slack && linf_excess <= slack && slope_excess <= slack;
  }
};

class EnvelopeMonitor {
 public:
  /// l2, linf and sup u0' of the initial datum.
  EnvelopeMonitor(KernelParams kernel, double l2, double linf, double sup_deriv);

  void operator()(const SimState& state, const Sample& sample);
  const EnvelopeReport& report() const { return report_; }

 private:
  KernelParams kernel_;
  double l2_;
  double linf_;
  double sup_deriv_;
  std::vector<double> initial_u_;  // u0(x0) of user-tracked characteristics
  EnvelopeReport report_;
};

}  // namespace fwlab
