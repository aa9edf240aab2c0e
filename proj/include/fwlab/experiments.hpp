// Experiment harness: builds data, grids and solver settings from a Config,
// runs single simulations with their analytic bounds, and the studies built
// from many runs. Every command writes under out_root/<experiment>/<hash>/.

#pragma once

#include "fwlab/analytic_bounds.hpp"
#include "fwlab/burgers_reference.hpp"
#include "fwlab/evolution.hpp"
#include "fwlab/initial_data.hpp"
#include "fwlab/records.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fwlab {

struct ExperimentContext {
  std::filesystem::path out_root = "out";
  unsigned workers = 1;
  /// Progress lines; null silences them.
  std::ostream* log = nullptr;
};

InitialDatum datum_from(const Config& c);
KernelParams kernel_from(const Config& c);

/// Box for a run up to t_end. With auto_box, L grows to cover the kernel
/// decay (ln(1/tail_tol)/b) and dispersive transport (decay_half_width with
/// margin L), and N to the next power of two keeping dx <= dx_target.
Grid choose_grid(const Config& c, const KernelParams& k, double t_end);

SimConfig sim_config_from(const Config& c);

/// "auto" tracks the argmin and argmax of u0'.
std::vector<double> tracked_labels(const Config& c, const InitialDatum& d);

BoundsOptions bounds_options_from(const Config& c);

struct SandwichCheck {
  bool checked = false;
  bool ok = true;
  double lower = 0.0;
  double upper = 0.0;
  double observed = 0.0;
  double bracket = 0.0;
  std::string note;
};

/// lower <= T0 and T0 <= upper + bracket width on BLOWUP; a horizon reached
/// past a holding upper bound is also a violation.
SandwichCheck check_sandwich(const BoundsReport& bounds, const RunResult& run, double t_end);

struct SimulationOutcome {
  SimConfig config;
  RunResult result;
  BoundsReport bounds;
  EnvelopeReport envelope;
  bool envelope_ok = true;
  SandwichCheck sandwich;
  bool escalated = false;
};

/// One run with bounds, envelope monitoring and the sandwich check; reruns
/// once at 2N and cfl/2 when escalation triggers.
SimulationOutcome simulate(const Config& c);

RunRecord cmd_run(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_bounds(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_decay(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_rate(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_sweep(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_burgers_compare(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_lifespan_convergence(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_global_probe(const Config& c, const ExperimentContext& ctx);
RunRecord cmd_continuity_probe(const Config& c, const ExperimentContext& ctx);

/// Dispatches on the `experiment` key.
RunRecord run_experiment(const Config& c, const ExperimentContext& ctx);

}  // namespace fwlab
