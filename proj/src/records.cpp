#include "fwlab/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace fwlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

const ConfigKey* find_key(const std::string& name) {
  for (const auto& k : config_schema())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"experiment", "run", "run | sweep | bounds | decay | rate | burgers-compare | lifespan-convergence | global-probe | continuity-probe"},
      {"datum", "gaussian", "gaussian | odd_gaussian | zero | custom"},
      {"lambda", "1", "width parameter of the Gaussian families"},
      {"scale_n", "1", "n in n^{-1/2} u0(n x)"},
      {"amplitude", "1", "overall factor applied last"},
      {"datum_file", "", "two-column (x, u0) file for datum = custom"},
      {"p", "2", "nonlinearity exponent (integer >= 2)"},
      {"B", "0.5", "kernel amplitude (0 gives Burgers)"},
      {"b", "1.5", "kernel decay rate"},
      {"L", "20", "box half-width (minimum when auto_box is on)"},
      {"N", "1024", "grid points (minimum when auto_box is on)"},
      {"auto_box", "true", "enlarge L for slow kernel decay and dispersion, keeping dx <= dx_target"},
      {"dx_target", "0.0390625", "largest grid spacing accepted by auto_box"},
      {"t_end", "3", "time horizon"},
      {"cfl", "0.4", "Courant factor"},
      {"m_stop", "1e4", "|inf u_x| at which blow-up is declared"},
      {"dt_floor", "1e-12", "blow-up is declared when dt falls below this"},
      {"dt_max", "0.05", "largest time step"},
      {"fixed_dt", "0", "fixed time step (0 = adaptive)"},
      {"dealias", "true", "2/3-rule truncation"},
      {"nonlinear", "true", "false keeps only the dispersive term"},
      {"record_every", "1", "steps between recorded samples"},
      {"hs_order", "3", "s of the recorded H^s norm"},
      {"tail_tol", "1e-8", "largest accepted boundary value relative to max |u|"},
      {"resolution_tol", "1e-10", "spectral resolution threshold"},
      {"bundle_size", "65", "characteristics in the blow-up detection bundle"},
      {"tracked", "auto", "comma-separated characteristic labels, or auto (argmin and argmax of u0')"},
      {"envelope_slack", "1e-6", "slack of the characteristic, L-infinity and slope envelopes"},
      {"escalate", "true", "rerun at 2N and cfl/2 near the horizon or on a sandwich violation"},
      {"alpha", "1", "alpha of the horizon slope criterion"},
      {"threshold_constant", "16", "constant C of the small-decay threshold A(u0)"},
      {"bounds_L", "20", "half-width of the witness search grid"},
      {"bounds_N", "1024", "points of the witness search grid (refined 4x)"},
      {"fit_m_lo", "100", "lower |m| of the rate fit window"},
      {"fit_m_hi", "1e4", "upper |m| of the rate fit window"},
      {"rate_cfl", "0.1", "Courant factor of rate runs unless cfl is set"},
      {"B_min", "0.05", "sweep: smallest B"},
      {"B_max", "2", "sweep: largest B"},
      {"B_count", "4", "sweep: number of B values (log-spaced)"},
      {"b_min", "0.1", "sweep: smallest b"},
      {"b_max", "3", "sweep: largest b"},
      {"b_count", "4", "sweep: number of b values (log-spaced)"},
      {"r_list", "inf,4,2", "decay: Lebesgue exponents"},
      {"decay_t_min", "10", "decay: first time"},
      {"decay_t_max", "100", "decay: last time"},
      {"decay_t_count", "8", "decay: number of log-spaced times"},
      {"decay_dx", "0.05", "decay: grid spacing"},
      {"compare_T", "0.5", "burgers-compare: comparison time"},
      {"B_list", "1e-3,1e-2,1e-1", "burgers-compare: kernel amplitudes"},
      {"b_list", "1,0.1,0.01", "lifespan-convergence: decay rates"},
      {"eps_list", "1e-3", "global-probe: sizes of |u0|_{H^4} + |u0|_{W^{3,1}}"},
      {"probe_p", "5", "global-probe: nonlinearity exponent"},
      {"horizon", "50", "global-probe: time horizon"},
      {"delta_list", "0.1,0.05,0.025", "continuity-probe: relative perturbations of (B, b)"},
      {"probe_time", "0.1", "continuity-probe: time window of the L2 deviation"},
      {"probe_dt", "1e-3", "continuity-probe: fixed step of the deviation runs"},
  };
  return schema;
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(fmt::format("not a number: '{}'", s));
  }
  if (used != s.size()) throw Error(fmt::format("not a number: '{}'", s));
  return v;
}

Config Config::parse(std::istream& is) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(fmt::format("config line {}: expected key = value", lineno));
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open config {}", path.string()));
  return parse(in);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw Error(fmt::format("unknown config key '{}'", key));
  values_[key] = trim(value);
}

void Config::apply(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(fmt::format("expected key=value, got '{}'", assignment));
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string Config::get(const std::string& key) const {
  if (const auto it = values_.find(key); it != values_.end()) return it->second;
  const auto* k = find_key(key);
  if (!k) throw Error(fmt::format("unknown config key '{}'", key));
  return k->default_value;
}

double Config::number(const std::string& key) const {
  try {
    return parse_number(get(key));
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", key, e.what()));
  }
}

long Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v)) throw Error(fmt::format("{}: expected an integer", key));
  return static_cast<long>(v);
}

bool Config::flag(const std::string& key) const {
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(fmt::format("{}: expected true or false, got '{}'", key, v));
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    try {
      out.push_back(parse_number(item));
    } catch (const Error& e) {
      throw Error(fmt::format("{}: {}", key, e.what()));
    }
  }
  return out;
}

std::string Config::canonical() const {
  std::vector<std::string> names;
  for (const auto& k : config_schema()) names.push_back(k.name);
  std::sort(names.begin(), names.end());
  std::string out;
  for (const auto& n : names) out += n + " = " + get(n) + "\n";
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

json Config::to_json() const {
  json j = json::object();
  for (const auto& k : config_schema()) j[k.name] = get(k.name);
  return j;
}

Config Config::from_json(const json& j) {
  Config c;
  for (const auto& [k, v] : j.items()) c.set(k, v.get<std::string>());
  return c;
}

json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    return s == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_number(s);
  }
  return j.get<double>();
}

json to_json(const BoundsReport& r) {
  json j;
  j["B"] = number_to_json(r.kernel.B);
  j["b"] = number_to_json(r.kernel.b);
  j["alpha"] = number_to_json(r.options.alpha);
  j["threshold_constant"] = number_to_json(r.options.threshold_constant);
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"name", e.name},
                       {"status", to_string(e.status)},
                       {"time_bound", number_to_json(e.time_bound)},
                       {"bound_kind", e.bound_kind},
                       {"witness",
                        {{"x0", number_to_json(e.witness.x0)},
                         {"T", number_to_json(e.witness.T)},
                         {"alpha", number_to_json(e.witness.alpha)}}}});
  }
  j["criteria"] = entries;
  j["derived"] = {{"inf_deriv", number_to_json(r.inf_deriv)},
                  {"sup_deriv", number_to_json(r.sup_deriv)},
                  {"l2_norm", number_to_json(r.l2_norm)},
                  {"linf_norm", number_to_json(r.linf_norm)},
                  {"F_at_witness", number_to_json(r.threshold_at_witness)},
                  {"Phi_at_lower", number_to_json(r.growth_at_lower)},
                  {"A", number_to_json(r.small_decay_A)},
                  {"schematic_existence_time", number_to_json(r.schematic_time)}};
  j["consistency_violations"] = r.consistency_violations();
  return j;
}

json to_json(const Verdict& v) {
  return {{"kind", to_string(v.kind)},
          {"t0_estimate", number_to_json(v.t0_estimate)},
          {"bracket", {number_to_json(v.bracket_lo), number_to_json(v.bracket_hi)}},
          {"reason", v.reason}};
}

json to_json(const RateFit& f) {
  return {{"c_hat", number_to_json(f.c_hat)}, {"spread", number_to_json(f.spread)}, {"samples", f.samples}};
}

json to_json(const EnvelopeReport& e) {
  return {{"samples", e.samples},
          {"field_samples", e.field_samples},
          {"characteristic_excess", number_to_json(e.characteristic_excess)},
          {"linf_excess", number_to_json(e.linf_excess)},
          {"slope_excess", number_to_json(e.slope_excess)}};
}

json RunRecord::to_json() const {
  json s = json::object();
  for (const auto& [k, v] : scalars) s[k] = number_to_json(v);
  return {{"experiment", experiment}, {"config_hash", config_hash}, {"version", version},
          {"config", config},         {"verdict", verdict},         {"scalars", s},
          {"files", files},           {"details", details},         {"notes", notes}};
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.config = j.at("config");
  r.verdict = j.at("verdict");
  for (const auto& [k, v] : j.at("scalars").items()) r.scalars[k] = number_from_json(v);
  r.files = j.at("files").get<std::map<std::string, std::string>>();
  r.details = j.at("details");
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

OutputDir::OutputDir(const std::filesystem::path& root, const std::string& experiment,
                     const std::string& hash)
    : dir_(root / experiment / hash) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write_text(const std::string& name, const std::string& text) const {
  std::ofstream out(file(name), std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", file(name).string()));
  out << text;
}

void OutputDir::write_json(const std::string& name, const json& j) const {
  write_text(name, j.dump(2) + "\n");
}

void OutputDir::write_manifest(const Config& config, const std::vector<std::string>& files,
                               double wall_seconds) const {
  json m;
  m["inputs"] = config.to_json();
  m["config_hash"] = config.hash();
  m["version"] = code_version();
  m["wall_time_seconds"] = wall_seconds;
  m["files"] = files;
  if (config.get("datum") == "custom") m["datum_file"] = config.get("datum_file");
  write_json("manifest.json", m);
}

std::string code_version() { return FWLAB_VERSION; }

}  // namespace fwlab
