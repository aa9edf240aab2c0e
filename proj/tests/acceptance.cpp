// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Reference values are computed here from closed forms and quadrature.

#include "fwlab/analytic_bounds.hpp"
#include "fwlab/evolution.hpp"
#include "fwlab/experiments.hpp"
#include "fwlab/initial_data.hpp"
#include "fwlab/linear_semigroup.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

using namespace fwlab;

namespace {

struct Line {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};
std::vector<Line> lines;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  lines.push_back({id, name, pass, detail, seconds});
  fmt::print(stderr, "[{:>2}] {} done in {:.1f}s\n", id, name, seconds);
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Envelope {
  std::string run;
  EnvelopeReport report;
};
std::vector<Envelope> envelopes;

struct Monitored {
  RunResult result;
  EnvelopeReport envelope;
};

// Runs with the characteristic and field envelopes recorded for criterion 8.
Monitored monitored_run(const std::string& label, const SimConfig& sc, const InitialDatum& d) {
  const auto& s = d.summary();
  EnvelopeMonitor mon(sc.params.kernel, s.l2_norm, s.linf_norm, s.sup_deriv);
  const std::vector<double> labels{s.argmin_deriv, s.argsup_deriv};
  Monitored m;
  m.result = run(sc, sample(d, sc.grid, sc.tail_tol), labels, [&](const SimState& st, const Sample& sm) { mon(st, sm); });
  m.envelope = mon.report();
  envelopes.push_back({label, m.envelope});
  return m;
}

SimConfig config(KernelParams k, double L, std::size_t N, double t_end, double cfl) {
  SimConfig c;
  c.params.kernel = k;
  c.grid = Grid(L, N);
  c.t_end = t_end;
  c.cfl = cfl;
  return c;
}

std::string fmt_num(double v) { return fmt::format("{:.6g}", v); }

const double kBurgersLifespan = std::exp(0.5) / std::sqrt(2.0);

RunResult burgers_run;
RunResult fw_rate_run;

void conservation() {
  Clock clk;
  const auto sc = config(KernelParams::make(0.5, 1.5), 20.0, 1024, 1.0, 0.2);
  const auto m = monitored_run("conservation", sc, InitialDatum::gaussian(1.0));
  const auto& ss = m.result.series.samples();
  const double l0 = ss.front().l2;
  double drift = 0.0;
  for (const auto& s : ss) drift = std::max(drift, std::abs(s.l2 - l0) / l0);
  const bool pass = m.result.verdict.kind == Verdict::Kind::reached_horizon && drift < 1e-8;
  report(1, "l2_conservation", pass, fmt::format("relative drift {:.3e} (< 1e-8), cfl 0.2", drift), clk.seconds());
}

void burgers_lifespan_check() {
  Clock clk;
  auto sc = config(KernelParams::burgers_limit(), 20.0, 1024, 3.0, 0.1);
  const auto m = monitored_run("burgers", sc, InitialDatum::gaussian(1.0));
  burgers_run = m.result;
  const auto& v = m.result.verdict;
  const double err = std::abs(v.t0_estimate - kBurgersLifespan) / kBurgersLifespan;
  const bool pass = v.kind == Verdict::Kind::blowup && err <= 0.02;
  report(2, "burgers_lifespan", pass,
         fmt::format("T0 {} vs {} (rel err {:.2e}, <= 2e-2)", fmt_num(v.t0_estimate), fmt_num(kBurgersLifespan), err),
         clk.seconds());
}

void sandwich() {
  Clock clk;
  const auto k = KernelParams::make(0.5, 1.5);
  const auto d = InitialDatum::scaled(InitialDatum::odd_gaussian(1.0), 8);
  const auto bounds = evaluate_bounds(d, k);
  const auto* nv = bounds.find("negative_value");
  const bool holds = nv && nv->status == Applicability::holds;
  const double x0 = holds ? nv->witness.x0 : std::nan("");
  const double upper = -1.0 / d.derivative(x0);
  const double lower = bounds.lower();
  const auto sc = config(k, 20.0, 8192, 3.0, 0.4);
  const auto m = monitored_run("sandwich", sc, d);
  const auto& v = m.result.verdict;
  const bool pass = holds && v.kind == Verdict::Kind::blowup && v.t0_estimate >= lower &&
                    v.t0_estimate <= upper * 1.05;
  report(3, "sandwich", pass,
         fmt::format("negative_value {} at x0={}; {} <= T0 {} <= {} * 1.05", holds ? "holds" : "does not hold",
                     fmt_num(x0), fmt_num(lower), fmt_num(v.t0_estimate), fmt_num(upper)),
         clk.seconds());
}

void blowup_rate() {
  Clock clk;
  const auto sc = config(KernelParams::make(0.5, 1.5), 20.0, 1024, 3.0, 0.1);
  const auto m = monitored_run("fw_rate", sc, InitialDatum::gaussian(1.0));
  fw_rate_run = m.result;
  std::string detail;
  bool pass = true;
  for (const auto& [name, r] : {std::pair<const char*, const RunResult*>{"burgers", &burgers_run}, {"fw", &fw_rate_run}}) {
    if (r->verdict.kind != Verdict::Kind::blowup) {
      pass = false;
      detail += fmt::format("{}: no blow-up; ", name);
      continue;
    }
    try {
      const auto fit = blowup_rate_fit(r->series, r->verdict.t0_estimate, 1e2, 1e4);
      pass = pass && fit.c_hat >= -1.1 && fit.c_hat <= -0.9;
      detail += fmt::format("{} c_hat {:.4f} ({} samples); ", name, fit.c_hat, fit.samples);
    } catch (const Error& e) {
      pass = false;
      detail += fmt::format("{}: {}; ", name, e.what());
    }
  }
  detail += "window [-1.1, -0.9], cfl 0.1";
  report(4, "blowup_rate", pass, detail, clk.seconds());
}

void linear_decay() {
  Clock clk;
  const auto k = KernelParams::make(0.5, 1.0);
  const double t_max = 100.0;
  const double L = decay_half_width(k, t_max);
  std::size_t N = 16;
  while (2.0 * L / static_cast<double>(N) > 0.05) N *= 2;
  const Grid g(L, N);
  const Field u0 = sample(InitialDatum::gaussian(1.0), g);
  const auto ts = log_spaced(10.0, t_max, 8);
  const auto inf = measure_decay(u0, k, INFINITY, ts);
  const auto four = measure_decay(u0, k, 4.0, ts);
  const auto two = measure_decay(u0, k, 2.0, ts);
  const bool p_inf = std::abs(inf.slope + 1.0 / 3.0) <= 0.05;
  const bool p_four = std::abs(four.slope + 1.0 / 6.0) <= 0.05;
  const bool p_two = std::abs(two.slope) < 1e-3;
  report(5, "linear_decay", p_inf && p_four && p_two,
         fmt::format("Linf slope {:.4f} ({}), L4 slope {:.4f} ({}), L2 slope {:.2e} ({}); L={} N={}", inf.slope,
                     p_inf ? "ok" : "outside -1/3 +- 0.05", four.slope, p_four ? "ok" : "outside -1/6 +- 0.05",
                     two.slope, p_two ? "ok" : "outside 1e-3", fmt_num(L), N),
         clk.seconds());
}

void scaling_identity() {
  Clock clk;
  const double B = 2.0, b = 0.5;
  const auto g = InitialDatum::gaussian(1.0);
  const Grid wide(40.0, 2048);
  const Grid narrow(b * 40.0, 2048);
  const Field u0 = sample(g, wide);
  // u0(x / b) sampled independently on the contracted grid.
  const auto stretched = InitialDatum::from_functions([&](double y) { return g.value(y / b); },
                                                      [&](double y) { return g.derivative(y / b) / b; }, {});
  const Field w0 = sample(stretched, narrow);
  double err = 0.0;
  for (const double t : {0.5, 1.0, 2.0, 3.0}) {
    const Field lhs = propagate(u0, KernelParams::make(B, b), t);
    const Field rhs = propagate(w0, KernelParams::make(0.5, 1.0), 2.0 * B * t);
    for (std::size_t j = 0; j < lhs.size(); ++j) err = std::max(err, std::abs(lhs[j] - rhs[j]));
  }
  report(6, "scaling_identity", err <= 1e-10, fmt::format("max deviation {:.3e} (<= 1e-10), B=2 b=1/2", err),
         clk.seconds());
}

void kernel_oracle() {
  Clock clk;
  const Grid g(20.0, 2048);
  const double L = g.half_width();
  double worst = 0.0;
  for (const double lambda : {0.5, 1.0, 4.0}) {
    const auto d = InitialDatum::gaussian(lambda);
    const Field f = sample(d, g);
    auto fx = [&](double y) { return -2.0 * lambda * y * std::exp(-lambda * y * y); };
    const double R = 7.0 / std::sqrt(lambda);
    for (const auto& [B, b] : {std::pair{0.5, 1.5}, std::pair{1.0, 1.0}, std::pair{2.0, 0.25}}) {
      const Field conv = kernel_convolve(f, KernelParams::make(B, b));
      const int images = static_cast<int>(std::ceil(45.0 / (2.0 * L * b))) + 1;
      for (std::size_t j = 0; j < g.size(); j += 4)
        worst = std::max(worst, std::abs(conv[j] - oracle::periodic_kernel_integral(B, b, fx, R, L, g.node(j), images)));
    }
  }
  report(7, "kernel_oracle", worst <= 1e-8, fmt::format("max abs error {:.3e} (<= 1e-8) over 9 cases", worst),
         clk.seconds());
}

void envelope_summary() {
  bool pass = !envelopes.empty();
  std::string detail;
  for (const auto& e : envelopes) {
    const auto& r = e.report;
    const double worst = std::max({r.characteristic_excess, r.linf_excess, r.slope_excess});
    pass = pass && r.holds(1e-6);
    detail += fmt::format("{} {:.1e}; ", e.run, worst);
  }
  detail += "worst excess per run, slack 1e-6";
  report(8, "envelopes", pass, detail, 0.0);
}

void lifespan_convergence() {
  Clock clk;
  const auto d = InitialDatum::gaussian(1.0);
  std::vector<double> errs;
  std::string detail;
  bool finished = true;
  for (const double b : {1.0, 0.1, 0.01}) {
    Config c;
    c.set("B", "0.5");
    c.set("b", fmt::format("{:g}", b));
    const auto k = kernel_from(c);
    SimConfig sc = config(k, 20.0, 1024, 3.0, 0.4);
    sc.grid = choose_grid(c, k, sc.t_end);
    const auto m = monitored_run(fmt::format("lifespan_b{:g}", b), sc, d);
    const auto& v = m.result.verdict;
    if (v.kind != Verdict::Kind::blowup) finished = false;
    const double err = std::abs(v.t0_estimate - kBurgersLifespan) / kBurgersLifespan;
    errs.push_back(err);
    detail += fmt::format("b={:g}: T0 {} (L={} N={}); ", b, fmt_num(v.t0_estimate), fmt_num(sc.grid.half_width()),
                          sc.grid.size());
  }
  const bool monotone = errs[1] < errs[0] && errs[2] < errs[1];
  const bool pass = finished && monotone && errs.back() <= 0.02;
  detail += fmt::format("final rel err {:.2e}", errs.back());
  report(9, "lifespan_convergence", pass, detail, clk.seconds());
}

void mu_derivatives() {
  Clock clk;
  double fd_err = 0.0;
  for (int n = 1; n <= 5; ++n) {
    for (double xi = -10.0; xi <= 10.0; xi += 0.01) {
      const double fd = oracle::central_difference([n](double z) { return mu_derivative(n - 1, z); }, xi, 1e-5);
      fd_err = std::max(fd_err, std::abs(fd - mu_derivative(n, xi)) / std::max(1.0, std::abs(mu_derivative(n, xi))));
    }
  }
  auto mu2 = [](double x) { return 2.0 * (x * x * x - 3.0 * x) / std::pow(1.0 + x * x, 3); };
  auto mu3 = [](double x) { return -6.0 * (x * x * x * x - 6.0 * x * x + 1.0) / std::pow(1.0 + x * x, 4); };
  double printed_err = 0.0;
  const double r3 = std::sqrt(3.0), r6 = std::sqrt(6.0);
  for (const double xi : {0.0, r3, -r3, r6, -r6}) {
    printed_err = std::max(printed_err, std::abs(mu_derivative(2, xi) - mu2(xi)));
    printed_err = std::max(printed_err, std::abs(mu_derivative(3, xi) - mu3(xi)));
  }
  bool degenerate_ok = std::abs(mu_derivative(3, 0.0) + 6.0) < 1e-12;
  for (const double z : {0.0, r3, -r3}) degenerate_ok = degenerate_ok && std::abs(mu_derivative(2, z)) < 1e-12 &&
                                                        std::abs(mu_derivative(3, z)) > 0.1;
  bool lower_ok = true;
  for (double xi = r6 + 1e-9; xi <= 200.0; xi += 0.01)
    lower_ok = lower_ok && std::abs(mu_derivative(2, xi)) >= 0.125 * std::pow(xi, -3.0) &&
               std::abs(mu_derivative(2, -xi)) >= 0.125 * std::pow(xi, -3.0);
  const bool pass = fd_err <= 1e-6 && printed_err <= 1e-12 && degenerate_ok && lower_ok;
  report(10, "mu_derivatives", pass,
         fmt::format("fd err {:.2e} (<= 1e-6, n <= 5), printed forms err {:.1e}, zeros/sign {}, |mu''| >= |xi|^-3/8 {}",
                     fd_err, printed_err, degenerate_ok ? "ok" : "wrong", lower_ok ? "ok" : "violated"),
         clk.seconds());
}

void global_probe() {
  Clock clk;
  const double eps = 1e-3;
  const double horizon = 50.0;
  Config c;
  c.set("p", "5");
  c.set("t_end", fmt::format("{:g}", horizon));
  c.set("hs_order", "4");
  SimConfig sc = sim_config_from(c);
  const auto ref = InitialDatum::gaussian(1.0);
  // H^4 norm of the profile checked against quadrature of its closed-form derivatives.
  auto d1 = [](double x) { return -2.0 * x * std::exp(-x * x); };
  auto d2 = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
  auto d3 = [](double x) { return (12.0 * x - 8.0 * x * x * x) * std::exp(-x * x); };
  auto d4 = [](double x) { return (16.0 * std::pow(x, 4) - 48.0 * x * x + 12.0) * std::exp(-x * x); };
  auto g0 = [](double x) { return std::exp(-x * x); };
  // (1 + xi^2)^4 expands to binomial weights on the derivative norms.
  auto h4_density = [&](double x) {
    const double a0 = g0(x), a1 = d1(x), a2 = d2(x), a3 = d3(x), a4 = d4(x);
    return a0 * a0 + 4.0 * a1 * a1 + 6.0 * a2 * a2 + 4.0 * a3 * a3 + a4 * a4;
  };
  const double h4 = std::sqrt(oracle::romberg(h4_density, -12.0, 12.0));
  const Field ref_field = sample(ref, sc.grid, sc.tail_tol);
  const Norms nrm = norms(ref_field, 4.0);
  const double w31 = norms(ref_field, 3.0).w_s1;
  const double size = nrm.h_s + w31;
  const double amplitude = eps / size;
  const auto d = InitialDatum::amplified(ref, amplitude);
  double hs_max = 0.0;
  const auto& s = d.summary();
  EnvelopeMonitor mon(sc.params.kernel, s.l2_norm, s.linf_norm, s.sup_deriv);
  const auto r = run(sc, sample(d, sc.grid, sc.tail_tol), std::vector<double>{s.argmin_deriv, s.argsup_deriv},
                     [&](const SimState& st, const Sample& sm) {
                       mon(st, sm);
                       hs_max = std::max(hs_max, sm.hs);
                     });
  envelopes.push_back({"global_probe", mon.report()});
  const bool h4_agrees = std::abs(nrm.h_s - h4) <= 1e-8 * h4;
  const bool pass = r.verdict.kind == Verdict::Kind::reached_horizon && hs_max <= 4.0 * eps && h4_agrees;
  report(11, "global_probe", pass,
         fmt::format("{} at t={}, max H4 {:.4e} (<= {:.1e}); H4 of profile {:.6g} vs quadrature {:.6g}",
                     to_string(r.verdict.kind), fmt_num(r.final_state.t), hs_max, 4.0 * eps, nrm.h_s, h4),
         clk.seconds());
}

void classical_b_independence() {
  Clock clk;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int mismatches = 0;
  int holding = 0;
  for (int i = 0; i < 20; ++i) {
    const double lambda = std::pow(10.0, -0.5 + 1.5 * unit(rng));
    const int n = 1 + static_cast<int>(16.0 * unit(rng));
    const double a = std::pow(10.0, -1.0 + 2.0 * unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    const auto base = unit(rng) < 0.5 ? InitialDatum::gaussian(lambda) : InitialDatum::odd_gaussian(lambda);
    const auto d = InitialDatum::amplified(InitialDatum::scaled(base, n), a);
    const double B = std::pow(10.0, -2.0 + 2.5 * unit(rng));
    const double b = std::pow(10.0, -2.0 + 3.0 * unit(rng));
    const auto r1 = classical_criteria(d, KernelParams::make(B, b));
    const auto r2 = classical_criteria(d, KernelParams::make(B, 10.0 * b));
    if (r1.constantin_escher != r2.constantin_escher || r1.ma_liu_qu != r2.ma_liu_qu || r1.haziot != r2.haziot)
      ++mismatches;
    holding += r1.constantin_escher + r1.ma_liu_qu + r1.haziot;
  }
  report(12, "classical_b_independence", mismatches == 0,
         fmt::format("{} mismatches over 20 configurations ({} criteria holding)", mismatches, holding), clk.seconds());
}

}  // namespace

int main() {
  const std::vector<std::tuple<int, const char*, void (*)()>> steps = {
      {1, "l2_conservation", conservation},
      {2, "burgers_lifespan", burgers_lifespan_check},
      {3, "sandwich", sandwich},
      {4, "blowup_rate", blowup_rate},
      {5, "linear_decay", linear_decay},
      {6, "scaling_identity", scaling_identity},
      {7, "kernel_oracle", kernel_oracle},
      {9, "lifespan_convergence", lifespan_convergence},
      {10, "mu_derivatives", mu_derivatives},
      {11, "global_probe", global_probe},
      {12, "classical_b_independence", classical_b_independence},
  };
  for (const auto& [id, name, fn] : steps) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, name, false, fmt::format("exception: {}", e.what()), 0.0);
    }
  }
  envelope_summary();
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  int failures = 0;
  for (const auto& l : lines) {
    failures += !l.pass;
    fmt::print("{} {:>2} {:<24} {} [{:.1f}s]\n", l.pass ? "PASS" : "FAIL", l.id, l.name, l.detail, l.seconds);
  }
  fmt::print("{} of {} criteria failed\n", failures, lines.size());
  return failures == 0 ? 0 : 1;
}
