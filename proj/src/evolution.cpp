#include "fwlab/evolution.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace fwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const cplx kI{0.0, 1.0};

double ipow(double x, int p) {
  double r = 1.0;
  for (int j = 0; j < p; ++j) r *= x;
  return r;
}

/// Point values of u, u_x, K*u_x and K*u from spectral coefficients.
struct PointValues {
  double u = 0.0;
  double ux = 0.0;
  double kux = 0.0;
  double ku = 0.0;
};

/// Per-grid symbol tables and scratch buffers.
class Workspace {
 public:
  Workspace(const Grid& grid, const ModelParams& params, bool dealias)
      : grid_(grid), params_(params), dealias_(dealias), n_(grid.size()) {
    xi_.resize(n_);
    mult_.resize(n_);
    ksym_.resize(n_);
    mask_.resize(n_);
    const long cutoff = static_cast<long>(grid.dealias_cutoff());
    for (std::size_t k = 0; k < n_; ++k) {
      const double xi = grid.wavenumber(k);
      const bool nyq = grid.is_nyquist(k);
      xi_[k] = nyq ? 0.0 : xi;  // odd symbols vanish on the cosine mode
      mult_[k] = nyq ? 0.0 : fw_multiplier(params.kernel, xi);
      ksym_[k] = kernel_symbol(params.kernel, xi);
      mask_[k] = (!dealias || std::labs(grid.mode_index(k)) <= cutoff) ? 1.0 : 0.0;
      if (dealias && nyq) mask_[k] = 0.0;
    }
    band_ = dealias ? grid.dealias_cutoff() : n_ / 2 - 1;
    phys_.resize(n_);
    spec_.resize(n_);
  }

  const Grid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  std::size_t size() const { return n_; }
  double mask(std::size_t k) const { return mask_[k]; }
  double xi(std::size_t k) const { return xi_[k]; }

  /// Real samples of the field with coefficients uh (u_j = ifft/N).
  void to_physical(std::span<const cplx> uh, std::vector<double>& out) {
    detail::fft_backward(uh, phys_);
    out.resize(n_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = phys_[j].real() * scale;
  }

  /// Derivative samples.
  void derivative_physical(std::span<const cplx> uh, std::vector<double>& out) {
    for (std::size_t k = 0; k < n_; ++k) spec_[k] = kI * xi_[k] * uh[k];
    to_physical(spec_, out);
  }

  /// d(uh)/dt of the field equation; u holds the physical samples of uh.
  void field_rhs(std::span<const cplx> uh, std::span<const double> u, std::span<cplx> duh) {
    const int p = params_.p;
    if (params_.nonlinear) {
      for (std::size_t j = 0; j < n_; ++j) phys_[j] = cplx{ipow(u[j], p), 0.0};
      detail::fft_forward(phys_, spec_);
      const double inv_p = 1.0 / static_cast<double>(p);
      for (std::size_t k = 0; k < n_; ++k) duh[k] = -inv_p * kI * xi_[k] * mask_[k] * spec_[k];
    } else {
      std::fill(duh.begin(), duh.end(), cplx{});
    }
    for (std::size_t k = 0; k < n_; ++k) {
      duh[k] -= kI * mult_[k] * uh[k];
      duh[k] *= mask_[k];
    }
  }

  PointValues point_values(std::span<const cplx> uh, double x) const {
    const double L = grid_.half_width();
    const double theta = std::numbers::pi * (x + L) / L;
    const cplx step{std::cos(theta), std::sin(theta)};
    cplx w = step;
    cplx s0{}, sx{}, s1{}, s2{};
    for (std::size_t k = 1; k <= band_; ++k) {
      if (k % 256 == 0) w = std::polar(1.0, theta * static_cast<double>(k));
      const cplx z = uh[k] * w;
      s0 += z;
      sx += xi_[k] * z;
      s1 += mult_[k] * z;
      s2 += ksym_[k] * z;
      w *= step;
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    PointValues v;
    v.u = uh[0].real() + 2.0 * s0.real();
    v.ux = -2.0 * sx.imag();
    v.kux = -2.0 * s1.imag();
    v.ku = ksym_[0] * uh[0].real() + 2.0 * s2.real();
    if (!dealias_) {
      const std::size_t h = n_ / 2;
      const double c = std::cos(theta * static_cast<double>(h));
      v.u += uh[h].real() * c;
      v.ku += ksym_[h] * uh[h].real() * c;
    }
    v.u *= inv_n;
    v.ux *= inv_n;
    v.kux *= inv_n;
    v.ku *= inv_n;
    return v;
  }

  /// max |uh_k| over the top quarter of the retained band relative to max |uh_k|.
  double resolution_indicator(std::span<const cplx> uh) const {
    double peak = 0.0;
    double top = 0.0;
    const std::size_t lo = (3 * band_) / 4;
    for (std::size_t k = 0; k < n_; ++k) {
      const double a = std::abs(uh[k]);
      peak = std::max(peak, a);
      const auto idx = static_cast<std::size_t>(std::labs(grid_.mode_index(k)));
      if (idx > lo && idx <= band_) top = std::max(top, a);
    }
    return peak > 0.0 ? top / peak : 0.0;
  }

 private:
  Grid grid_;
  ModelParams params_;
  bool dealias_;
  std::size_t n_;
  std::size_t band_ = 0;
  std::vector<double> xi_, mult_, ksym_, mask_;
  std::vector<cplx> phys_, spec_;
};

/// Method-of-lines state: field coefficients plus characteristic triples.
struct StateVec {
  std::vector<cplx> uh;
  std::vector<double> q, U, V;

  void resize_like(const StateVec& o) {
    uh.resize(o.uh.size());
    q.resize(o.q.size());
    U.resize(o.U.size());
    V.resize(o.V.size());
  }
};

/// out = y + a * k
void axpy(const StateVec& y, double a, const StateVec& k, StateVec& out) {
  out.resize_like(y);
  for (std::size_t i = 0; i < y.uh.size(); ++i) out.uh[i] = y.uh[i] + a * k.uh[i];
  for (std::size_t i = 0; i < y.q.size(); ++i) {
    out.q[i] = y.q[i] + a * k.q[i];
    out.U[i] = y.U[i] + a * k.U[i];
    out.V[i] = y.V[i] + a * k.V[i];
  }
}

class Integrator {
 public:
  Integrator(const Grid& grid, const ModelParams& params, bool dealias)
      : ws_(grid, params, dealias) {}

  Workspace& workspace() { return ws_; }

  void derivative(const StateVec& y, StateVec& dy) {
    dy.resize_like(y);
    ws_.to_physical(y.uh, u_);
    ws_.field_rhs(y.uh, u_, dy.uh);
    const auto& prm = ws_.params();
    const double B = prm.kernel.B;
    const double b = prm.kernel.b;
    const int p = prm.p;
    for (std::size_t i = 0; i < y.q.size(); ++i) {
      const PointValues v = ws_.point_values(y.uh, y.q[i]);
      dy.q[i] = prm.nonlinear ? ipow(y.U[i], p - 1) : 0.0;
      dy.U[i] = -v.kux;
      const double quad = prm.nonlinear ? (p - 1) * ipow(y.U[i], p - 2) * y.V[i] * y.V[i] : 0.0;
      dy.V[i] = -quad + 2.0 * B * b * y.U[i] - b * b * v.ku;
    }
  }

  void rk4(StateVec& y, double dt) {
    derivative(y, k1_);
    axpy(y, 0.5 * dt, k1_, tmp_);
    derivative(tmp_, k2_);
    axpy(y, 0.5 * dt, k2_, tmp_);
    derivative(tmp_, k3_);
    axpy(y, dt, k3_, tmp_);
    derivative(tmp_, k4_);
    for (std::size_t i = 0; i < y.uh.size(); ++i)
      y.uh[i] += dt / 6.0 * (k1_.uh[i] + 2.0 * k2_.uh[i] + 2.0 * k3_.uh[i] + k4_.uh[i]);
    for (std::size_t i = 0; i < y.q.size(); ++i) {
      y.q[i] += dt / 6.0 * (k1_.q[i] + 2.0 * k2_.q[i] + 2.0 * k3_.q[i] + k4_.q[i]);
      y.U[i] += dt / 6.0 * (k1_.U[i] + 2.0 * k2_.U[i] + 2.0 * k3_.U[i] + k4_.U[i]);
      y.V[i] += dt / 6.0 * (k1_.V[i] + 2.0 * k2_.V[i] + 2.0 * k3_.V[i] + k4_.V[i]);
    }
  }

 private:
  Workspace ws_;
  std::vector<double> u_;
  StateVec k1_, k2_, k3_, k4_, tmp_;
};

std::vector<cplx> coefficients(const Field& f) {
  std::vector<cplx> in(f.values().begin(), f.values().end());
  std::vector<cplx> out(in.size());
  detail::fft_forward(in, out);
  return out;
}

StateVec pack(const SimState& s) {
  StateVec y;
  y.uh = coefficients(s.u);
  for (const auto& c : s.tracked) {
    y.q.push_back(c.q);
    y.U.push_back(c.u);
    y.V.push_back(c.ux);
  }
  return y;
}

bool finite_state(const StateVec& y) {
  for (const auto& z : y.uh)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  for (std::size_t i = 0; i < y.q.size(); ++i)
    if (!std::isfinite(y.q[i]) || !std::isfinite(y.U[i]) || !std::isfinite(y.V[i])) return false;
  return true;
}

}  // namespace

void SimConfig::validate() const {
  if (params.p < 2) throw DomainError("SimConfig: p must be an integer >= 2");
  if (params.kernel.B < 0.0 || !(params.kernel.b > 0.0))
    throw DomainError("SimConfig: kernel needs B >= 0 and b > 0");
  if (!(t_end > 0.0)) throw DomainError("SimConfig: t_end must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw DomainError("SimConfig: cfl must lie in (0, 1]");
  if (!(m_stop > 0.0)) throw DomainError("SimConfig: m_stop must be > 0");
  if (!(dt_floor > 0.0) || !(dt_max > 0.0)) throw DomainError("SimConfig: dt bounds must be > 0");
  if (fixed_dt && !(*fixed_dt > 0.0)) throw DomainError("SimConfig: fixed_dt must be > 0");
  if (record_every < 1) throw DomainError("SimConfig: record_every must be >= 1");
  if (hs_order < 0.0) throw DomainError("SimConfig: hs_order must be >= 0");
}

std::string to_string(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::blowup: return "BLOWUP";
    case Verdict::Kind::reached_horizon: return "REACHED_HORIZON";
    case Verdict::Kind::aborted: return "ABORTED";
  }
  return "UNKNOWN";
}

void TimeSeries::push(const Sample& s) {
  if (!samples_.empty() && !(s.t > samples_.back().t))
    throw Error("TimeSeries: sample times must be strictly increasing");
  samples_.push_back(s);
}

void TimeSeries::write_csv(std::ostream& os) const {
  os << "t,m,sup_ux,linf,l2,hs,dt,resolved\n";
  for (const auto& s : samples_)
    os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", s.t, s.m,
                      s.sup_ux, s.linf, s.l2, s.hs, s.dt, s.resolved ? 1 : 0);
}

TimeSeries TimeSeries::read_csv(std::istream& is) {
  TimeSeries ts;
  std::string line;
  if (!std::getline(is, line)) return ts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    Sample s;
    int resolved = 1;
    if (!(row >> s.t >> s.m >> s.sup_ux >> s.linf >> s.l2 >> s.hs >> s.dt >> resolved))
      throw Error("TimeSeries::read_csv: malformed row");
    s.resolved = resolved != 0;
    ts.push(s);
  }
  return ts;
}

Field rhs(const Field& u, const ModelParams& params, bool dealias) {
  u.require_finite("rhs");
  Workspace ws(u.grid(), params, dealias);
  const auto uh = coefficients(u);
  std::vector<cplx> duh(uh.size());
  // Only the product is truncated here; the linear term acts on all of u.
  const int p = params.p;
  if (params.nonlinear) {
    std::vector<cplx> w(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) w[j] = cplx{ipow(u[j], p), 0.0};
    std::vector<cplx> wh(u.size());
    detail::fft_forward(w, wh);
    for (std::size_t k = 0; k < u.size(); ++k)
      duh[k] = -(1.0 / p) * kI * ws.xi(k) * ws.mask(k) * wh[k];
  }
  const Grid& g = u.grid();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double m = g.is_nyquist(k) ? 0.0 : fw_multiplier(params.kernel, g.wavenumber(k));
    duh[k] -= kI * m * uh[k];
  }
  Field out = inverse(SpectralCoeffs(g, std::move(duh)));
  out.require_finite("rhs");
  return out;
}

std::vector<TrackedCharacteristic> seed_characteristics(const Field& u0,
                                                        std::span<const double> x0) {
  Workspace ws(u0.grid(), ModelParams{}, false);
  const auto uh = coefficients(u0);
  std::vector<TrackedCharacteristic> out;
  for (double x : x0) {
    const PointValues v = ws.point_values(uh, x);
    out.push_back({x, x, v.u, v.ux, false});
  }
  return out;
}

SimState step(const SimState& state, double dt, const SimConfig& config) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be > 0");
  state.u.require_finite("step");
  Integrator integ(state.u.grid(), config.params, config.dealias);
  StateVec y = pack(state);
  integ.rk4(y, dt);
  if (!finite_state(y)) throw NonFiniteValue("step: state became non-finite");
  SimState out;
  out.t = state.t + dt;
  std::vector<double> u;
  integ.workspace().to_physical(y.uh, u);
  out.u = Field(state.u.grid(), std::move(u));
  out.tracked = state.tracked;
  for (std::size_t i = 0; i < out.tracked.size(); ++i) {
    out.tracked[i].q = y.q[i];
    out.tracked[i].u = y.U[i];
    out.tracked[i].ux = y.V[i];
  }
  return out;
}

RunResult run(const SimConfig& config, const Field& u0, std::span<const double> tracked_x0,
              const Observer& observer) {
  config.validate();
  if (!(u0.grid() == config.grid)) throw GridMismatch("run: initial field is not on the configured grid");
  u0.require_finite("run");

  RunResult result;
  const Grid& grid = config.grid;
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  const int p = config.params.p;
  Integrator integ(grid, config.params, config.dealias);
  Workspace& ws = integ.workspace();

  auto abort_with = [&](std::string reason) {
    result.verdict.kind = Verdict::Kind::aborted;
    result.verdict.reason = std::move(reason);
  };

  const double tail0 = tail_indicator(u0);
  if (tail0 > config.tail_tol) {
    abort_with(fmt::format("initial tail indicator {:.3e} exceeds tolerance {:.1e}", tail0,
                           config.tail_tol));
    result.final_state = SimState{0.0, u0, {}};
    return result;
  }

  StateVec y;
  y.uh = coefficients(u0);
  for (std::size_t k = 0; k < n; ++k) y.uh[k] *= ws.mask(k);

  // User-tracked characteristics first, then the detection bundle.
  const std::size_t n_user = tracked_x0.size();
  const std::size_t n_bundle = config.params.nonlinear ? config.bundle_size : 0;
  std::vector<TrackedCharacteristic> meta;
  for (double x : tracked_x0) {
    const PointValues v = ws.point_values(y.uh, x);
    meta.push_back({x, x, v.u, v.ux, false});
    y.q.push_back(x);
    y.U.push_back(v.u);
    y.V.push_back(v.ux);
  }
  for (std::size_t i = 0; i < n_bundle; ++i) {
    meta.push_back({kNaN, 0.0, 0.0, 0.0, true});
    y.q.push_back(0.0);
    y.U.push_back(0.0);
    y.V.push_back(0.0);
  }

  std::vector<double> u, ux;
  double t = 0.0;
  bool resolved = true;
  double last_dt = 0.0;
  std::size_t step_count = 0;

  auto recenter_bundle = [&](std::size_t argmin) {
    const double centre = grid.node(argmin);
    const double spacing = 0.25 * dx;
    const double half = 0.5 * static_cast<double>(n_bundle - 1);
    for (std::size_t i = 0; i < n_bundle; ++i) {
      const std::size_t idx = n_user + i;
      const double q = centre + (static_cast<double>(i) - half) * spacing;
      const PointValues v = ws.point_values(y.uh, q);
      y.q[idx] = q;
      y.U[idx] = v.u;
      y.V[idx] = v.ux;
    }
  };

  auto snapshot = [&]() {
    SimState s;
    s.t = t;
    s.u = Field(grid, u);
    s.tracked = meta;
    for (std::size_t i = 0; i < meta.size(); ++i) {
      s.tracked[i].q = y.q[i];
      s.tracked[i].u = y.U[i];
      s.tracked[i].ux = y.V[i];
    }
    return s;
  };

  while (true) {
    ws.to_physical(y.uh, u);
    ws.derivative_physical(y.uh, ux);

    bool finite = finite_state(y);
    for (double v : u) finite = finite && std::isfinite(v);
    if (!finite) {
      abort_with(fmt::format("non-finite state at t={:.17g}", t));
      break;
    }
    if (resolved && ws.resolution_indicator(y.uh) > config.resolution_tol) {
      resolved = false;
      result.resolution_lost_at = t;
    }

    // Gibbs noise of an unresolved field reaches the boundary; skip the test then.
    const double tail = resolved ? tail_indicator(Field(grid, u)) : 0.0;
    if (tail > config.tail_tol) {
      abort_with(fmt::format("tail indicator {:.3e} exceeds tolerance {:.1e} at t={:.17g}", tail,
                             config.tail_tol, t));
      break;
    }

    const auto [lo_it, hi_it] = std::minmax_element(ux.begin(), ux.end());
    const double grid_m = *lo_it;
    const double sup_ux = *hi_it;
    if ((resolved || step_count == 0) && n_bundle > 0) recenter_bundle(static_cast<std::size_t>(lo_it - ux.begin()));

    double m_eff = resolved ? grid_m : kInf;
    for (double v : y.V) m_eff = std::min(m_eff, v);
    if (!std::isfinite(m_eff)) m_eff = grid_m;

    double linf = 0.0;
    double l2sq = 0.0;
    for (double v : u) {
      linf = std::max(linf, std::abs(v));
      l2sq += v * v;
    }
    double hs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = grid.wavenumber(k);
      hs += std::pow(1.0 + xi * xi, config.hs_order) * std::norm(y.uh[k]);
    }

    Sample sample;
    sample.t = t;
    sample.m = m_eff;
    sample.sup_ux = sup_ux;
    sample.linf = linf;
    sample.l2 = std::sqrt(l2sq * dx);
    sample.hs = std::sqrt(hs * dx / static_cast<double>(n));
    sample.dt = last_dt;
    sample.resolved = resolved;

    const bool blowup = m_eff <= -config.m_stop;
    const bool horizon = t >= config.t_end;

    double dt = 0.0;
    bool clipped = false;
    if (!blowup && !horizon) {
      if (config.fixed_dt) {
        dt = *config.fixed_dt;
      } else {
        const double speed = config.params.nonlinear ? ipow(linf, p - 1) : 0.0;
        const double dt_adv = speed > 0.0 ? dx / speed : kInf;
        const double dt_slope = m_eff < 0.0 ? 1.0 / std::abs(m_eff) : kInf;
        dt = std::min(config.cfl * std::min(dt_adv, dt_slope), config.dt_max);
      }
      if (t + dt >= config.t_end) {
        dt = config.t_end - t;
        clipped = true;
      }
    }
    const bool floor_hit = !blowup && !horizon && !clipped && dt < config.dt_floor;
    const bool last = blowup || horizon || floor_hit;

    const bool record = step_count % static_cast<std::size_t>(config.record_every) == 0 ||
                        std::abs(m_eff) >= 10.0 || last;
    if (record) {
      result.series.push(sample);
      if (observer) observer(snapshot(), sample);
    }

    if (blowup || floor_hit) {
      result.verdict.kind = Verdict::Kind::blowup;
      const double m_end = std::abs(m_eff);
      result.verdict.reason = blowup ? fmt::format("|m| reached {:.6g}", m_end)
                                     : fmt::format("dt {:.3e} fell below floor", dt);
      // Require |m| to grow monotonically over the final decade.
      const auto& ss = result.series.samples();
      double prev = 0.0;
      bool monotone = true;
      std::size_t window = 0;
      for (const auto& s : ss) {
        if (std::abs(s.m) < 0.1 * m_end) continue;
        if (window > 0 && !(std::abs(s.m) > prev)) monotone = false;
        prev = std::abs(s.m);
        ++window;
      }
      if (!monotone) {
        abort_with("slope exceeded the stop threshold without monotone growth");
        break;
      }
      double t0 = t;
      if (window >= 2) t0 = extrapolate_blowup_time(result.series, 0.1 * m_end, kInf);
      result.verdict.t0_estimate = t0;
      result.verdict.bracket_lo = t;
      result.verdict.bracket_hi = t + 2.0 / m_end;
      break;
    }
    if (horizon) {
      result.verdict.kind = Verdict::Kind::reached_horizon;
      result.verdict.reason = "horizon reached";
      break;
    }

    integ.rk4(y, dt);
    t = clipped ? config.t_end : t + dt;
    last_dt = dt;
    ++step_count;
  }

  result.steps = step_count;
  result.final_state = snapshot();
  return result;
}

double extrapolate_blowup_time(const TimeSeries& series, double m_lo, double m_hi) {
  // m = -1/(T0 - t)  <=>  T0 = t - 1/m; least squares in T0 is the mean.
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : series.samples()) {
    const double a = std::abs(s.m);
    if (s.m < 0.0 && a >= m_lo && a <= m_hi) {
      sum += s.t - 1.0 / s.m;
      ++count;
    }
  }
  if (count == 0) throw Error("extrapolate_blowup_time: no samples in the slope window");
  return sum / static_cast<double>(count);
}

RateFit blowup_rate_fit(const TimeSeries& series, double t0, double m_lo, double m_hi) {
  std::vector<double> vals;
  for (const auto& s : series.samples()) {
    const double a = std::abs(s.m);
    if (s.m < 0.0 && a >= m_lo && a <= m_hi && s.t < t0) vals.push_back(s.m * (t0 - s.t));
  }
  if (vals.size() < 20)
    throw Error(fmt::format("blowup_rate_fit: {} samples in |m| in [{:g}, {:g}], need 20",
                            vals.size(), m_lo, m_hi));
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  RateFit fit;
  fit.c_hat = mean;
  fit.spread = std::sqrt(var / static_cast<double>(vals.size()));
  fit.samples = vals.size();
  return fit;
}

EnvelopeMonitor::EnvelopeMonitor(KernelParams kernel, double l2, double linf, double sup_deriv)
    : kernel_(kernel), l2_(l2), linf_(linf), sup_deriv_(sup_deriv) {}

void EnvelopeMonitor::operator()(const SimState& state, const Sample& sample) {
  const double B = kernel_.B;
  const double b = kernel_.b;
  const double t = state.t;
  const double drift = B * std::sqrt(b) * l2_ * t;
  if (initial_u_.empty()) {
    for (const auto& c : state.tracked)
      if (!c.bundle) initial_u_.push_back(c.u);
  }
  std::size_t i = 0;
  for (const auto& c : state.tracked) {
    if (c.bundle) continue;
    if (i >= initial_u_.size()) break;
    const double u0 = initial_u_[i++];
    report_.characteristic_excess =
        std::max(report_.characteristic_excess, std::abs(c.u - u0) - drift);
  }
  ++report_.samples;
  if (sample.resolved) {
    ++report_.field_samples;
    report_.linf_excess = std::max(report_.linf_excess, sample.linf - (linf_ + drift));
    const double slope_bound = sup_deriv_ + 2.0 * B * b * linf_ * t +
                               B * std::pow(b, 1.5) * l2_ * t +
                               B * B * std::pow(b, 1.5) * l2_ * t * t;
    report_.slope_excess = std::max(report_.slope_excess, sample.sup_ux - slope_bound);
  }
}

}  // namespace fwlab
