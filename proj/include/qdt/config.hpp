#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace qdt {

/// Sectioned key = value text:
///
///   # comment
///   [section]
///   key = value
///   [protocol.name]
///   ...
///
/// Keys before the first section belong to section "".
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(const std::string& key) const;
};

class ConfigFile {
 public:
  static ConfigFile parse(std::istream& is, const std::string& source);
  static ConfigFile load(const std::string& path);

  const std::string& source() const { return source_; }
  const std::string& text() const { return text_; }
  const std::vector<ConfigSection>& sections() const { return sections_; }
  const ConfigSection* section(const std::string& name) const;

  /// "source:line: message" as an ErrorCode::Config error.
  [[noreturn]] void fail(int line, const std::string& message) const;

  std::string get_string(const ConfigSection& s, const std::string& key, const std::string& fallback) const;
  double get_double(const ConfigSection& s, const std::string& key, double fallback) const;
  long long get_int(const ConfigSection& s, const std::string& key, long long fallback) const;
  bool get_bool(const ConfigSection& s, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const ConfigSection& s, const std::string& key) const;

  /// Rejects keys outside `allowed`, so typos surface as errors.
  void require_known(const ConfigSection& s, const std::vector<std::string>& allowed) const;

 private:
  std::string source_;
  std::string text_;
  std::vector<ConfigSection> sections_;
};

struct DetectorSpec {
  std::string kind = "binary_mu";  // binary_mu | binary_perturbed | three_valued | three_perturbed | custom
  int dim = 4;
  double mu = 1.0;
  std::vector<double> eig1;  // leading diagonal of P1 (perturbed kinds)
  std::vector<double> eig2;  // leading diagonal of P2 (three_perturbed)
  std::uint64_t u1_seed = 1;
  std::uint64_t u2_seed = 2;
  bool identity_unitaries = false;
  std::string file;  // custom
};

struct ProtocolSpec {
  std::string name;
  std::string family = "gpb";  // sic | mub | cube | gpb | random | random_coherent
  int random_m = 48;
  bool adaptive = false;
  std::string step2 = "gpb";  // gpb | rotated
  bool joint_step2 = false;   // step2_estimator = joint
  int anchor = 0;
  double n0_fraction = 0.5;
  int coherent_terms = 0;  // > 0: probes are optimized coherent superpositions
  int coherent_starts = 20;
  int line = 0;
};

struct CheckSpec {
  std::string protocol;
  int element = 0;  // 0-based
  double lo = 0.0, hi = 0.0;
  double n_lo = 0.0, n_hi = std::numeric_limits<double>::infinity();
  int line = 0;
};

struct ScenarioConfig {
  std::string source;
  std::string text;
  std::string id;
  std::string kind = "scaling";  // scaling | adaptive | coherent | robustness
  std::string description;
  std::uint64_t seed = 1;
  int reps = 100;
  std::vector<std::uint64_t> n_grid;
  int detectors = 1;  // robustness: number of random unitary draws
  DetectorSpec detector;
  std::vector<ProtocolSpec> protocols;
  std::vector<CheckSpec> checks;
};

/// N grid: `n_grid = 1e3, 1e4, ...` or `n_min`, `n_max`, `n_points`
/// (log-spaced, rounded to integers). Defaults: 8 points from 1e3 to 1e6.
ScenarioConfig parse_scenario(const ConfigFile& cfg);
ScenarioConfig load_scenario(const std::string& path);

std::vector<std::uint64_t> log_grid(double lo, double hi, int points);

}  // namespace qdt
