#include "fwlab/experiments.hpp"

#include "fwlab/linear_semigroup.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace fwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::mutex log_mutex;

void log_line(const ExperimentContext& ctx, const std::string& line) {
  if (!ctx.log) return;
  std::lock_guard lock(log_mutex);
  *ctx.log << line << '\n' << std::flush;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Config with_experiment(const Config& c, const std::string& kind) {
  Config out = c;
  out.set("experiment", kind);
  return out;
}

RunRecord base_record(const Config& c) {
  RunRecord r;
  r.experiment = c.get("experiment");
  r.config_hash = c.hash();
  r.version = code_version();
  r.config = c.to_json();
  r.details = json::object();
  return r;
}

void finish(RunRecord& rec, const OutputDir& out, const Config& c, double wall) {
  std::vector<std::string> files;
  for (const auto& [k, v] : rec.files) files.push_back(v);
  files.push_back("record.json");
  out.write_json("record.json", rec.to_json());
  out.write_manifest(c, files, wall);
}

std::size_t next_pow2(double x) {
  std::size_t n = 16;
  while (static_cast<double>(n) < x) n *= 2;
  return n;
}

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  if (w == 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < w; ++t) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
}

double l2_drift(const TimeSeries& s) {
  if (s.empty()) return 0.0;
  const double l0 = s.samples().front().l2;
  if (l0 == 0.0) return 0.0;
  double d = 0.0;
  for (const auto& x : s.samples()) d = std::max(d, std::abs(x.l2 - l0) / l0);
  return d;
}

std::string series_csv(const TimeSeries& s) {
  std::ostringstream os;
  s.write_csv(os);
  return os.str();
}

json sandwich_json(const SandwichCheck& s) {
  return {{"checked", s.checked},
          {"ok", s.ok},
          {"lower", number_to_json(s.lower)},
          {"upper", number_to_json(s.upper)},
          {"observed", number_to_json(s.observed)},
          {"bracket", number_to_json(s.bracket)},
          {"note", s.note}};
}

std::string verdict_code(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::blowup: return "B";
    case Verdict::Kind::reached_horizon: return "G";
    case Verdict::Kind::aborted: return "A";
  }
  return "?";
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

}  // namespace

InitialDatum datum_from(const Config& c) {
  const std::string kind = c.get("datum");
  const double lambda = c.number("lambda");
  InitialDatum d = InitialDatum::zero();
  if (kind == "gaussian")
    d = InitialDatum::gaussian(lambda);
  else if (kind == "odd_gaussian")
    d = InitialDatum::odd_gaussian(lambda);
  else if (kind == "zero")
    d = InitialDatum::zero();
  else if (kind == "custom")
    d = load_custom(c.get("datum_file"));
  else
    throw Error(fmt::format("unknown datum '{}'", kind));
  const long n = c.integer("scale_n");
  if (n != 1) d = InitialDatum::scaled(d, static_cast<int>(n));
  const double a = c.number("amplitude");
  if (a != 1.0) d = InitialDatum::amplified(d, a);
  return d;
}

KernelParams kernel_from(const Config& c) {
  const double B = c.number("B");
  const double b = c.number("b");
  return B == 0.0 ? KernelParams::burgers_limit(b) : KernelParams::make(B, b);
}

Grid choose_grid(const Config& c, const KernelParams& k, double t_end) {
  double L = c.number("L");
  std::size_t N = static_cast<std::size_t>(c.integer("N"));
  if (c.flag("auto_box") && k.B > 0.0) {
    const double base = L;
    L = std::max(L, std::log(1.0 / c.number("tail_tol")) / k.b);
    L = std::max(L, decay_half_width(k, t_end, base));
    N = std::max(N, next_pow2(2.0 * L / c.number("dx_target")));
  }
  return Grid(L, N);
}

SimConfig sim_config_from(const Config& c) {
  SimConfig s;
  s.params.p = static_cast<int>(c.integer("p"));
  s.params.kernel = kernel_from(c);
  s.params.nonlinear = c.flag("nonlinear");
  s.t_end = c.number("t_end");
  s.cfl = c.number("cfl");
  s.m_stop = c.number("m_stop");
  s.dt_floor = c.number("dt_floor");
  s.dt_max = c.number("dt_max");
  if (const double f = c.number("fixed_dt"); f > 0.0) s.fixed_dt = f;
  s.dealias = c.flag("dealias");
  s.record_every = static_cast<int>(c.integer("record_every"));
  s.hs_order = c.number("hs_order");
  s.tail_tol = c.number("tail_tol");
  s.resolution_tol = c.number("resolution_tol");
  s.bundle_size = static_cast<std::size_t>(c.integer("bundle_size"));
  s.grid = choose_grid(c, s.params.kernel, s.t_end);
  s.validate();
  return s;
}

std::vector<double> tracked_labels(const Config& c, const InitialDatum& d) {
  if (c.get("tracked") == "auto") {
    const auto& s = d.summary();
    if (s.inf_deriv == 0.0 && s.sup_deriv == 0.0) return {};
    return {s.argmin_deriv, s.argsup_deriv};
  }
  return c.numbers("tracked");
}

BoundsOptions bounds_options_from(const Config& c) {
  BoundsOptions o;
  o.alpha = c.number("alpha");
  o.threshold_constant = c.number("threshold_constant");
  o.half_width = c.number("bounds_L");
  o.n_points = static_cast<std::size_t>(c.integer("bounds_N"));
  o.hs_order = c.number("hs_order");
  return o;
}

SandwichCheck check_sandwich(const BoundsReport& bounds, const RunResult& run, double t_end) {
  SandwichCheck s;
  s.lower = bounds.lower();
  s.upper = bounds.min_upper();
  const auto& v = run.verdict;
  if (v.kind == Verdict::Kind::blowup) {
    s.checked = true;
    s.observed = v.t0_estimate;
    s.bracket = v.bracket_hi - v.bracket_lo;
    if (s.observed < s.lower - s.bracket) {
      s.ok = false;
      s.note = "blow-up observed before the lifespan lower bound";
    }
    if (s.observed > s.upper + s.bracket) {
      s.ok = false;
      s.note = "blow-up observed after the smallest holding upper bound";
    }
  } else if (v.kind == Verdict::Kind::reached_horizon && s.upper < t_end) {
    s.checked = true;
    s.ok = false;
    s.observed = kInf;
    s.note = "horizon reached past a holding upper bound";
  }
  return s;
}

SimulationOutcome simulate(const Config& c) {
  SimulationOutcome out;
  const InitialDatum d = datum_from(c);
  const KernelParams k = kernel_from(c);
  out.bounds = evaluate_bounds(d, k, bounds_options_from(c));
  const auto labels = tracked_labels(c, d);
  const double slack = c.number("envelope_slack");

  auto attempt = [&](const SimConfig& sc) {
    const Field u0 = sample(d, sc.grid, sc.tail_tol);
    const auto& s = d.summary();
    EnvelopeMonitor monitor(k, s.l2_norm, s.linf_norm, s.sup_deriv);
    out.config = sc;
    out.result = run(sc, u0, labels, [&](const SimState& st, const Sample& sm) { monitor(st, sm); });
    out.envelope = monitor.report();
    out.envelope_ok = out.envelope.holds(slack);
    out.sandwich = check_sandwich(out.bounds, out.result, sc.t_end);
  };

  SimConfig sc = sim_config_from(c);
  attempt(sc);
  const auto& v = out.result.verdict;
  const bool near_horizon = v.kind == Verdict::Kind::blowup && v.t0_estimate >= 0.9 * sc.t_end;
  if (c.flag("escalate") && (near_horizon || !out.sandwich.ok)) {
    sc.grid = Grid(sc.grid.half_width(), 2 * sc.grid.size());
    sc.cfl *= 0.5;
    attempt(sc);
    out.escalated = true;
  }
  return out;
}

RunRecord cmd_run(const Config& c0, const ExperimentContext& ctx) {
  const Config c = with_experiment(c0, "run");
  Stopwatch sw;
  const auto o = simulate(c);
  const OutputDir out(ctx.out_root, "run", c.hash());
  out.write_text("series.csv", series_csv(o.result.series));

  RunRecord rec = base_record(c);
  rec.files["series"] = "series.csv";
  const auto& v = o.result.verdict;
  rec.verdict = to_json(v);
  rec.scalars["t0_estimate"] = v.t0_estimate;
  rec.scalars["bracket_lo"] = v.bracket_lo;
  rec.scalars["bracket_hi"] = v.bracket_hi;
  rec.scalars["t_lower"] = o.bounds.lower();
  rec.scalars["t_upper"] = o.bounds.min_upper();
  rec.scalars["burgers_lifespan"] = burgers_lifespan(datum_from(c));
  rec.scalars["steps"] = static_cast<double>(o.result.steps);
  rec.scalars["final_time"] = o.result.final_state.t;
  rec.scalars["resolution_lost_at"] = o.result.resolution_lost_at;
  rec.scalars["l2_drift"] = l2_drift(o.result.series);
  rec.scalars["L"] = o.config.grid.half_width();
  rec.scalars["N"] = static_cast<double>(o.config.grid.size());
  rec.scalars["cfl"] = o.config.cfl;
  if (v.kind == Verdict::Kind::blowup) {
    try {
      const auto fit = blowup_rate_fit(o.result.series, v.t0_estimate, c.number("fit_m_lo"),
                                       c.number("fit_m_hi"));
      rec.scalars["c_hat"] = fit.c_hat;
      rec.details["rate_fit"] = to_json(fit);
    } catch (const Error& e) {
      rec.notes.push_back(e.what());
    }
  }
  rec.details["bounds"] = to_json(o.bounds);
  rec.details["envelope"] = to_json(o.envelope);
  rec.details["envelope_ok"] = o.envelope_ok;
  rec.details["sandwich"] = sandwich_json(o.sandwich);
  rec.details["escalated"] = o.escalated;
  if (!o.sandwich.ok) rec.notes.push_back("sandwich violated: " + o.sandwich.note);
  if (!o.envelope_ok) rec.notes.push_back("envelope bound exceeded");
  finish(rec, out, c, sw.seconds());
  log_line(ctx, fmt::format("run {}: {} T0={} steps={} -> {}", c.hash(), to_string(v.kind),
                            num(v.t0_estimate), o.result.steps, out.path().string()));
  return rec;
}

RunRecord cmd_bounds(const Config& c0, const ExperimentContext& ctx) {
  const Config c = with_experiment(c0, "bounds");
  Stopwatch sw;
  const auto report = evaluate_bounds(datum_from(c), kernel_from(c), bounds_options_from(c));
  const OutputDir out(ctx.out_root, "bounds", c.hash());
  const std::string table = format_table(report);
  out.write_text("bounds.txt", table);
  RunRecord rec = base_record(c);
  rec.files["table"] = "bounds.txt";
  const auto violations = report.consistency_violations();
  rec.verdict = {{"consistent", violations.empty()}};
  rec.scalars["t_lower"] = report.lower();
  rec.scalars["t_upper"] = report.min_upper();
  rec.details["bounds"] = to_json(report);
  for (const auto& v : violations) rec.notes.push_back(v);
  finish(rec, out, c, sw.seconds());
  log_line(ctx, table);
  return rec;
}

RunRecord cmd_decay(const Config& c0, const ExperimentContext& ctx) {
  const Config c = with_experiment(c0, "decay");
  Stopwatch sw;
  const KernelParams k = kernel_from(c);
  const double t_max = c.number("decay_t_max");
  const auto times = log_spaced(c.number("decay_t_min"), t_max,
                                static_cast<std::size_t>(c.integer("decay_t_count")));
  const double L = decay_half_width(k, t_max, c.number("L"));
  const Grid g(L, next_pow2(2.0 * L / c.number("decay_dx")));
  const Field u0 = sample(datum_from(c), g, c.number("tail_tol"));

  std::vector<DecayFit> fits;
  RunRecord rec = base_record(c);
  bool ok = true;
  json checks = json::object();
  for (double r : c.numbers("r_list")) {
    fits.push_back(measure_decay(u0, k, r, times, c.number("tail_tol")));
    const auto& f = fits.back();
    const bool pass = (r == 2.0) ? std::abs(f.slope) < 1e-3 : std::abs(f.slope - f.predicted_slope) <= 0.05;
    const std::string name = std::isinf(r) ? "r_inf" : fmt::format("r_{:g}", r);
    checks[name] = pass;
    rec.scalars["slope_" + name] = f.slope;
    ok = ok && pass;
  }
  const OutputDir out(ctx.out_root, "decay", c.hash());
  std::ostringstream fit_csv;
  write_decay_csv(fit_csv, fits);
  out.write_text("decay.csv", fit_csv.str());
  std::ostringstream norm_csv;
  norm_csv << "t";
  for (const auto& f : fits) norm_csv << (std::isinf(f.r) ? std::string(",linf") : fmt::format(",l{:g}", f.r));
  norm_csv << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    norm_csv << num(times[i]);
    for (const auto& f : fits) norm_csv << ',' << num(f.norms[i]);
    norm_csv << '\n';
  }
  out.write_text("norms.csv", norm_csv.str());
  rec.files["fits"] = "decay.csv";
  rec.files["norms"] = "norms.csv";
  rec.verdict = {{"ok", ok}, {"checks", checks}};
  rec.scalars["L"] = L;
  rec.scalars["N"] = static_cast<double>(g.size());
  finish(rec, out, c, sw.seconds());
  log_line(ctx, fmt::format("decay {}: {} -> {}", c.hash(), ok ? "all slopes within tolerance" : "slope outside tolerance",
                            out.path().string()));
  return rec;
}

RunRecord cmd_rate(const Config& c0, const ExperimentContext& ctx) {
  Config c = with_experiment(c0, "rate");
  if (!c.has("cfl")) c.set("cfl", c.get("rate_cfl"));
  Stopwatch sw;
  const auto o = simulate(c);
  const OutputDir out(ctx.out_root, "rate", c.hash());
  out.write_text("series.csv", series_csv(o.result.series));
  RunRecord rec = base_record(c);
  rec.files["series"] = "series.csv";
  const auto& v = o.result.verdict;
  bool ok = false;
  if (v.kind != Verdict::Kind::blowup) {
    rec.notes.push_back("no blow-up: " + v.reason);
  } else {
    try {
      const auto fit = blowup_rate_fit(o.result.series, v.t0_estimate, c.number("fit_m_lo"), c.number("fit_m_hi"));
      rec.scalars["c_hat"] = fit.c_hat;
      rec.scalars["spread"] = fit.spread;
      rec.scalars["samples"] = static_cast<double>(fit.samples);
      rec.details["rate_fit"] = to_json(fit);
      ok = fit.c_hat >= -1.1 && fit.c_hat <= -0.9;
    } catch (const Error& e) {
      rec.notes.push_back(e.what());
    }
  }
  rec.scalars["t0_estimate"] = v.t0_estimate;
  rec.scalars["fit_m_lo"] = c.number("fit_m_lo");
  rec.scalars["fit_m_hi"] = c.number("fit_m_hi");
  rec.verdict = {{"ok", ok}, {"run", to_json(v)}};
  finish(rec, out, c, sw.seconds());
  log_line(ctx, fmt::format("rate {}: c_hat={} ({}) -> {}", c.hash(),
                            rec.scalars.count("c_hat") ? num(rec.scalars["c_hat"]) : "n/a",
                            ok ? "within [-1.1, -0.9]" : "outside [-1.1, -0.9]", out.path().string()));
  return rec;
}

RunRecord cmd_sweep(const Config& c0, const ExperimentContext& ctx) {
  const Config c = with_experiment(c0, "sweep");
  Stopwatch sw;
  const InitialDatum d = datum_from(c);
  if (!(c.number("t_end") > burgers_lifespan(d)))
    throw Error("sweep: the horizon must exceed the Burgers lifespan of the datum");
  const auto Bs = log_spaced(c.number("B_min"), c.number("B_max"), static_cast<std::size_t>(c.integer("B_count")));
  const auto bs = log_spaced(c.number("b_min"), c.number("b_max"), static_cast<std::size_t>(c.integer("b_count")));
  const OutputDir out(ctx.out_root, "sweep", c.hash());
  std::filesystem::create_directories(out.file("cells"));

  struct Cell {
    double B = 0.0, b = 0.0;
    std::string hash;
    Verdict verdict;
    double t_lower = 0.0, t_upper = kInf;
    bool sandwich_ok = true;
    std::string error;
  };
  std::vector<Cell> cells(Bs.size() * bs.size());
  parallel_for(cells.size(), ctx.workers, [&](std::size_t idx) {
    Cell& cell = cells[idx];
    cell.b = bs[idx / Bs.size()];
    cell.B = Bs[idx % Bs.size()];
    Config cc = with_experiment(c, "run");
    cc.set("B", num(cell.B));
    cc.set("b", num(cell.b));
    cell.hash = cc.hash();
    try {
      const auto o = simulate(cc);
      cell.verdict = o.result.verdict;
      cell.t_lower = o.bounds.lower();
      cell.t_upper = o.bounds.min_upper();
      cell.sandwich_ok = o.sandwich.ok;
      out.write_text("cells/" + cell.hash + ".csv", series_csv(o.result.series));
    } catch (const Error& e) {
      cell.verdict.kind = Verdict::Kind::aborted;
      cell.verdict.reason = e.what();
    }
    log_line(ctx, fmt::format("sweep cell B={:.4g} b={:.4g}: {} {}", cell.B, cell.b,
                              to_string(cell.verdict.kind), num(cell.verdict.t0_estimate)));
  });

  // Matrix: rows b, columns B.
  std::ostringstream matrix;
  matrix << "b\\B";
  for (double B : Bs) matrix << ',' << num(B);
  matrix << '\n';
  for (std::size_t i = 0; i < bs.size(); ++i) {
    matrix << num(bs[i]);
    for (std::size_t j = 0; j < Bs.size(); ++j) matrix << ',' << verdict_code(cells[i * Bs.size() + j].verdict.kind);
    matrix << '\n';
  }
  out.write_text("matrix.csv", matrix.str());

  double A = kNaN;
  if (d.summary().inf_deriv < 0.0) A = small_decay_threshold(d, c.number("threshold_constant"));
  std::ostringstream table;
  table << "B,b,verdict,t0_estimate,t_lower,t_upper,in_threshold_region,sandwich_ok,config_hash\n";
  json cell_json = json::array();
  std::vector<std::string> region_failures;
  for (const auto& cell : cells) {
    const bool in_region = std::isfinite(A) && cell.b <= A * std::pow(cell.B, -4.0 / 3.0);
    if (in_region && cell.verdict.kind != Verdict::Kind::blowup)
      region_failures.push_back(fmt::format("B={:g} b={:g}", cell.B, cell.b));
    table << fmt::format("{},{},{},{},{},{},{},{},{}\n", num(cell.B), num(cell.b), to_string(cell.verdict.kind),
                         num(cell.verdict.t0_estimate), num(cell.t_lower), num(cell.t_upper), in_region ? 1 : 0,
                         cell.sandwich_ok ? 1 : 0, cell.hash);
    cell_json.push_back({{"B", number_to_json(cell.B)},
                         {"b", number_to_json(cell.b)},
                         {"verdict", to_json(cell.verdict)},
                         {"in_threshold_region", in_region},
                         {"config_hash", cell.hash}});
  }
  out.write_text("cells.csv", table.str());

  // Once blow-up appears it should persist towards smaller b (fixed B) and smaller B (fixed b).
  std::vector<std::string> monotonicity;
  auto blows = [&](std::size_t i, std::size_t j) { return cells[i * Bs.size() + j].verdict.kind == Verdict::Kind::blowup; };
  for (std::size_t j = 0; j < Bs.size(); ++j)
    for (std::size_t i = 1; i < bs.size(); ++i)
      if (blows(i, j) && !blows(i - 1, j))
        monotonicity.push_back(fmt::format("B={:g}: blow-up at b={:g} but not at b={:g}", Bs[j], bs[i], bs[i - 1]));
  for (std::size_t i = 0; i < bs.size(); ++i)
    for (std::size_t j = 1; j < Bs.size(); ++j)
      if (blows(i, j) && !blows(i, j - 1))
        monotonicity.push_back(fmt::format("b={:g}: blow-up at B={:g} but not at B={:g}", bs[i], Bs[j], Bs[j - 1]));

  RunRecord rec = base_record(c);
  rec.files["matrix"] = "matrix.csv";
  rec.files["cells"] = "cells.csv";
  rec.verdict = {{"threshold_region_all_blowup", region_failures.empty()},
                 {"monotonicity_violations", monotonicity.size()}};
  rec.scalars["A"] = A;
  rec.scalars["threshold_constant"] = c.number("threshold_constant");
  rec.details["cells"] = cell_json;
  rec.details["threshold_region_failures"] = region_failures;
  rec.details["monotonicity_findings"] = monotonicity;
  finish(rec, out, c, sw.seconds());
  log_line(ctx, matrix.str());
  return rec;
}

RunRecord cmd_burgers_compare(const Config& c0, const ExperimentContext& ctx) {
  const Config c = with_experiment(c0, "burgers-compare");
  Stopwatch sw;
  const InitialDatum d = datum_from(c);
  const BurgersSolution sol(d);
  const double T = c.number("compare_T");
  RunRecord rec = base_record(c);
  std::ostringstream csv;
  csv << "B,b,T,lhs,rhs,ratio,satisfied\n";
  bool ok = true;
  json rows = json::array();
  for (double B : c.numbers("B_list")) {
    Config cc = c;
    cc.set("B", num(B));
    SimConfig sc = sim_config_from(cc);
    sc.t_end = T;
    sc.record_every = 1;
    const Field u0 = sample(d, sc.grid, sc.tail_tol);
    std::vector<Snapshot> snaps;
    const auto r = run(sc, u0, {}, [&](const SimState& st, const Sample&) { snaps.push_back({st.t, st.u}); });
    if (r.verdict.kind == Verdict::Kind::aborted) throw Error("burgers-compare: run aborted: " + r.verdict.reason);
    const auto cmp = compare_bound(snaps, sol, sc.params.kernel, T);
    ok = ok && cmp.satisfied;
    csv << fmt::format("{},{},{},{},{},{},{}\n", num(B), num(sc.params.kernel.b), num(T), num(cmp.lhs), num(cmp.rhs),
                       num(cmp.lhs / cmp.rhs), cmp.satisfied ? 1 : 0);
    rows.push_back({{"B", number_to_json(B)}, {"lhs", number_to_json(cmp.lhs)}, {"rhs", number_to_json(cmp.rhs)},
                    {"satisfied", cmp.satisfied}});
  }
  const OutputDir out(ctx.out_root, "burgers-compare", c.hash());
  out.write_text("compare.csv", csv.str());
  rec.files["table"] = "compare.csv";
  rec.verdict = {{"ok", ok}};
  rec.details["rows"] = rows;
  rec.scalars["burgers_lifespan"] = sol.lifespan();
  finish(rec, out, c, sw.seconds());
  log_line(ctx, csv.str());
  return rec;
}

RunRecord cmd_lifespan_convergence(const Config& c0, const ExperimentContext& ctx) {
  const Config c = with_experiment(c0, "lifespan-convergence");
  Stopwatch sw;
  const InitialDatum d = datum_from(c);
  const double TB = burgers_lifespan(d);
  if (!std::isfinite(TB)) throw Error("lifespan-convergence: needs inf u0' < 0");
  const auto bs = c.numbers("b_list");
  const std::vector<double> alphas = {1.0, 2.0, 4.0, 8.0};

  struct Row {
    double b = 0.0;
    SimulationOutcome o;
    std::vector<double> alpha_upper;
    std::string error;
  };
  std::vector<Row> rows(bs.size());
  parallel_for(rows.size(), ctx.workers, [&](std::size_t i) {
    Row& row = rows[i];
    row.b = bs[i];
    Config cc = with_experiment(c, "run");
    cc.set("b", num(row.b));
    try {
      row.o = simulate(cc);
      BoundsOptions opt = bounds_options_from(cc);
      for (double a : alphas) {
        opt.alpha = a;
        const auto e = search_horizon_slope(d, kernel_from(cc), opt);
        row.alpha_upper.push_back(e.status == Applicability::holds ? e.time_bound : kInf);
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    log_line(ctx, fmt::format("lifespan b={:g}: {} T0={}", row.b, to_string(row.o.result.verdict.kind),
                              num(row.o.result.verdict.t0_estimate)));
  });

  std::ostringstream csv;
  csv << "b,B,L,N,verdict,t0_estimate,t_lower,t_upper,burgers_lifespan,relative_error,bracket_width\n";
  bool monotone = true;
  bool tightening = true;
  bool alpha_consistent = true;
  double prev_err = kInf;
  double prev_width = kInf;
  json jrows = json::array();
  for (const auto& row : rows) {
    const auto& v = row.o.result.verdict;
    const double t0 = v.kind == Verdict::Kind::blowup ? v.t0_estimate : kNaN;
    const double err = std::abs(t0 - TB) / TB;
    const double lower = row.o.bounds.lower();
    const double upper = row.o.bounds.min_upper();
    const double width = upper - lower;
    if (!(err < prev_err)) monotone = false;
    if (width > prev_width) tightening = false;
    prev_err = err;
    prev_width = width;
    const double bracket = v.bracket_hi - v.bracket_lo;
    for (double u : row.alpha_upper)
      if (std::isfinite(t0) && u < t0 - bracket) alpha_consistent = false;
    csv << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", num(row.b), c.get("B"),
                       num(row.o.config.grid.half_width()), row.o.config.grid.size(), to_string(v.kind), num(t0),
                       num(lower), num(upper), num(TB), num(err), num(width));
    json au = json::array();
    for (double u : row.alpha_upper) au.push_back(number_to_json(u));
    jrows.push_back({{"b", number_to_json(row.b)}, {"t0_estimate", number_to_json(t0)},
                     {"t_lower", number_to_json(lower)}, {"t_upper", number_to_json(upper)},
                     {"alpha_upper", au}, {"error", row.error}});
  }
  const double final_err = rows.empty() ? kNaN : std::abs(rows.back().o.result.verdict.t0_estimate - TB) / TB;
  const OutputDir out(ctx.out_root, "lifespan-convergence", c.hash());
  out.write_text("lifespan.csv", csv.str());
  RunRecord rec = base_record(c);
  rec.files["table"] = "lifespan.csv";
  rec.verdict = {{"monotone_approach", monotone},
                 {"final_within_2pct", final_err <= 0.02},
                 {"bracket_tightening", tightening},
                 {"alpha_consistent", alpha_consistent}};
  rec.scalars["burgers_lifespan"] = TB;
  rec.scalars["final_relative_error"] = final_err;
  rec.details["rows"] = jrows;
  rec.details["alphas"] = alphas;
  finish(rec, out, c, sw.seconds());
  log_line(ctx, csv.str());
  return rec;
}

RunRecord cmd_global_probe(const Config& c0, const ExperimentContext& ctx) {
  Config c = with_experiment(c0, "global-probe");
  Stopwatch sw;
  const double horizon = c.number("horizon");
  auto eps = c.numbers("eps_list");
  std::sort(eps.begin(), eps.end());
  const InitialDatum ref = datum_from(c);

  struct Row {
    std::string label;
    int p = 0;
    double eps = kNaN;
    double amplitude = 1.0;
    Verdict verdict;
    double hs0 = 0.0;
    double hs_max = 0.0;
    bool envelope_ok = true;
  };
  std::vector<Row> rows;
  for (double e : eps) {
    Row r;
    r.label = "probe";
    r.p = static_cast<int>(c.integer("probe_p"));
    r.eps = e;
    rows.push_back(r);
  }
  Row contrast;
  contrast.label = "contrast";
  contrast.p = 2;
  rows.push_back(contrast);

  parallel_for(rows.size(), ctx.workers, [&](std::size_t i) {
    Row& row = rows[i];
    Config cc = c;
    cc.set("p", std::to_string(row.p));
    cc.set("t_end", num(horizon));
    cc.set("hs_order", "4");
    SimConfig sc = sim_config_from(cc);
    const Field ref_field = sample(ref, sc.grid, sc.tail_tol);
    if (row.label == "probe") {
      const double size = norms(ref_field, 4.0).h_s + norms(ref_field, 3.0).w_s1;
      row.amplitude = row.eps / size;
    }
    const InitialDatum d = InitialDatum::amplified(ref, row.amplitude);
    const Field u0 = sample(d, sc.grid, sc.tail_tol);
    const auto& s = d.summary();
    EnvelopeMonitor monitor(sc.params.kernel, s.l2_norm, s.linf_norm, s.sup_deriv);
    const auto r = run(sc, u0, tracked_labels(cc, d), [&](const SimState& st, const Sample& sm) {
      monitor(st, sm);
      row.hs_max = std::max(row.hs_max, sm.hs);
    });
    row.verdict = r.verdict;
    row.hs0 = r.series.samples().front().hs;
    row.envelope_ok = monitor.report().holds(c.number("envelope_slack"));
    log_line(ctx, fmt::format("global-probe {} p={} eps={}: {} max H4={}", row.label, row.p, num(row.eps),
                              to_string(r.verdict.kind), num(row.hs_max)));
  });

  std::ostringstream csv;
  csv << "label,p,eps,amplitude,verdict,t0_estimate,h4_initial,h4_max,ratio,envelope_ok\n";
  json jrows = json::array();
  for (const auto& row : rows) {
    const double ratio = row.hs_max / row.eps;
    csv << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", row.label, row.p, num(row.eps), num(row.amplitude),
                       to_string(row.verdict.kind), num(row.verdict.t0_estimate), num(row.hs0), num(row.hs_max),
                       num(ratio), row.envelope_ok ? 1 : 0);
    jrows.push_back({{"label", row.label}, {"p", row.p}, {"eps", number_to_json(row.eps)},
                     {"verdict", to_string(row.verdict.kind)}, {"h4_max", number_to_json(row.hs_max)},
                     {"ratio", number_to_json(ratio)}});
  }
  const Row& smallest = rows.front();
  const bool ok = smallest.verdict.kind == Verdict::Kind::reached_horizon && smallest.hs_max <= 4.0 * smallest.eps;
  const OutputDir out(ctx.out_root, "global-probe", c.hash());
  out.write_text("probe.csv", csv.str());
  RunRecord rec = base_record(c);
  rec.files["table"] = "probe.csv";
  rec.verdict = {{"ok", ok}, {"contrast_blowup", rows.back().verdict.kind == Verdict::Kind::blowup}};
  rec.scalars["smallest_eps"] = smallest.eps;
  rec.scalars["smallest_ratio"] = smallest.hs_max / smallest.eps;
  rec.details["rows"] = jrows;
  finish(rec, out, c, sw.seconds());
  log_line(ctx, csv.str());
  return rec;
}

RunRecord cmd_continuity_probe(const Config& c0, const ExperimentContext& ctx) {
  const Config c = with_experiment(c0, "continuity-probe");
  Stopwatch sw;
  const InitialDatum d = datum_from(c);
  const KernelParams k = kernel_from(c);
  auto deltas = c.numbers("delta_list");
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  deltas.push_back(0.0);
  const double probe_time = c.number("probe_time");

  // One grid for every perturbation so fields compare node by node.
  const double dmax = deltas.front();
  KernelParams widest = k;
  if (k.B > 0.0) widest = KernelParams::make(k.B * (1.0 + dmax), k.b);
  SimConfig base = sim_config_from(c);
  base.grid = choose_grid(c, widest, base.t_end);
  const Field u0 = sample(d, base.grid, base.tail_tol);

  auto deviation_run = [&](const KernelParams& kk) {
    SimConfig sc = base;
    sc.params.kernel = kk;
    sc.t_end = probe_time;
    sc.fixed_dt = c.number("probe_dt");
    sc.record_every = 1;
    std::vector<Field> fields;
    run(sc, u0, {}, [&](const SimState& st, const Sample&) { fields.push_back(st.u); });
    return fields;
  };
  auto lifespan_run = [&](const KernelParams& kk) {
    SimConfig sc = base;
    sc.params.kernel = kk;
    return run(sc, u0).verdict;
  };

  const auto ref_fields = deviation_run(k);
  const Verdict ref_verdict = lifespan_run(k);

  struct Row {
    double delta = 0.0;
    KernelParams kernel;
    double dev_sup = 0.0;
    double dev_end = 0.0;
    Verdict verdict;
  };
  std::vector<Row> rows(deltas.size());
  parallel_for(rows.size(), ctx.workers, [&](std::size_t i) {
    Row& row = rows[i];
    row.delta = deltas[i];
    row.kernel = k.B > 0.0 ? KernelParams::make(k.B * (1.0 + row.delta), k.b * (1.0 + row.delta))
                           : KernelParams::burgers_limit(k.b * (1.0 + row.delta));
    const auto fields = deviation_run(row.kernel);
    const std::size_t n = std::min(fields.size(), ref_fields.size());
    for (std::size_t s = 0; s < n; ++s) {
      Field diff(base.grid);
      for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = fields[s][j] - ref_fields[s][j];
      const double dev = l2_norm(diff);
      row.dev_sup = std::max(row.dev_sup, dev);
      if (s + 1 == n) row.dev_end = dev;
    }
    row.verdict = lifespan_run(row.kernel);
    log_line(ctx, fmt::format("continuity delta={:g}: deviation={} {}", row.delta, num(row.dev_sup),
                              to_string(row.verdict.kind)));
  });

  std::ostringstream csv;
  csv << "delta,B,b,l2_deviation_sup,l2_deviation_at_probe_time,verdict,t0_estimate,t0_difference\n";
  bool to_zero = true;
  bool first_order = true;
  bool persists = true;
  json jrows = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const double dt0 = std::abs(row.verdict.t0_estimate - ref_verdict.t0_estimate);
    if (i > 0) {
      if (!(row.dev_sup < rows[i - 1].dev_sup) && rows[i - 1].dev_sup > 0.0) to_zero = false;
      if (row.delta > 0.0) {
        const double expected = row.delta / rows[i - 1].delta;
        const double ratio = row.dev_end / rows[i - 1].dev_end;
        if (std::abs(ratio / expected - 1.0) > 0.25) first_order = false;
      }
    }
    if (ref_verdict.kind == Verdict::Kind::blowup && row.verdict.kind != Verdict::Kind::blowup) persists = false;
    csv << fmt::format("{},{},{},{},{},{},{},{}\n", num(row.delta), num(row.kernel.B), num(row.kernel.b),
                       num(row.dev_sup), num(row.dev_end), to_string(row.verdict.kind), num(row.verdict.t0_estimate),
                       num(dt0));
    jrows.push_back({{"delta", number_to_json(row.delta)}, {"deviation", number_to_json(row.dev_sup)},
                     {"t0_difference", number_to_json(dt0)}});
  }
  const OutputDir out(ctx.out_root, "continuity-probe", c.hash());
  out.write_text("continuity.csv", csv.str());
  RunRecord rec = base_record(c);
  rec.files["table"] = "continuity.csv";
  rec.verdict = {{"deviation_to_zero", to_zero && rows.back().dev_sup == 0.0},
                 {"first_order", first_order},
                 {"blowup_persists", persists}};
  rec.scalars["reference_t0"] = ref_verdict.t0_estimate;
  rec.details["rows"] = jrows;
  finish(rec, out, c, sw.seconds());
  log_line(ctx, csv.str());
  return rec;
}

RunRecord run_experiment(const Config& c, const ExperimentContext& ctx) {
  const std::string kind = c.get("experiment");
  if (kind == "run") return cmd_run(c, ctx);
  if (kind == "sweep") return cmd_sweep(c, ctx);
  if (kind == "bounds") return cmd_bounds(c, ctx);
  if (kind == "decay") return cmd_decay(c, ctx);
  if (kind == "rate") return cmd_rate(c, ctx);
  if (kind == "burgers-compare") return cmd_burgers_compare(c, ctx);
  if (kind == "lifespan-convergence") return cmd_lifespan_convergence(c, ctx);
  if (kind == "global-probe") return cmd_global_probe(c, ctx);
  if (kind == "continuity-probe") return cmd_continuity_probe(c, ctx);
  throw Error(fmt::format("unknown experiment '{}'", kind));
}

}  // namespace fwlab
