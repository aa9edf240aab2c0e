// Experiment configuration (key = value text), config hashing, JSON records
// and output directories.

#pragma once

#include "fwlab/analytic_bounds.hpp"
#include "fwlab/evolution.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace fwlab {

using json = nlohmann::json;

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every accepted key with its default; unknown keys are rejected.
const std::vector<ConfigKey>& config_schema();

/// Text format: one `key = value` per line, '#' starts a comment.
class Config {
 public:
  static Config parse(std::istream& is);
  static Config load(const std::filesystem::path& path);

  /// Throws Error for keys outside the schema.
  void set(const std::string& key, const std::string& value);
  /// "key=value".
  void apply(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key) const;
  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// Comma-separated list; "inf" allowed.
  std::vector<double> numbers(const std::string& key) const;

  /// Every schema key with its effective value, sorted, one `key = value` per line.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), 16 hex digits.
  std::string hash() const;

  json to_json() const;
  static Config from_json(const json& j);

 private:
  std::map<std::string, std::string> values_;
};

double parse_number(const std::string& s);

/// NaN and infinities become the strings "nan", "inf", "-inf".
json number_to_json(double v);
double number_from_json(const json& j);

json to_json(const BoundsReport& r);
json to_json(const Verdict& v);
json to_json(const RateFit& f);
json to_json(const EnvelopeReport& e);

struct RunRecord {
  std::string experiment;
  std::string config_hash;
  std::string version;
  json config;
  json verdict;
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> files;
  json details;
  std::vector<std::string> notes;

  json to_json() const;
  static RunRecord from_json(const json& j);
};

/// out_root/<experiment>/<hash>/, created on construction.
class OutputDir {
 public:
  OutputDir(const std::filesystem::path& root, const std::string& experiment, const std::string& hash);

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const { return dir_ / name; }
  void write_text(const std::string& name, const std::string& text) const;
  void write_json(const std::string& name, const json& j) const;
  /// manifest.json: inputs, code version, wall time and produced files.
  void write_manifest(const Config& config, const std::vector<std::string>& files,
                      double wall_seconds) const;

 private:
  std::filesystem::path dir_;
};

std::string code_version();

}  // namespace fwlab
