#include "qdt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "qdt/types.hpp"

namespace qdt {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

const ConfigEntry* ConfigSection::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

ConfigFile ConfigFile::parse(std::istream& is, const std::string& source) {
  ConfigFile cfg;
  cfg.source_ = source;
  cfg.sections_.push_back({"", 0, {}});
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    cfg.text_ += raw + "\n";
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') cfg.fail(lineno, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) cfg.fail(lineno, "empty section name");
      for (const auto& s : cfg.sections_)
        if (s.name == name) cfg.fail(lineno, "duplicate section [" + name + "] (first at line " + std::to_string(s.line) + ")");
      cfg.sections_.push_back({name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) cfg.fail(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) cfg.fail(lineno, "missing key before '='");
    auto& sec = cfg.sections_.back();
    if (const auto* prev = sec.find(key)) {
      cfg.fail(lineno, "duplicate key '" + key + "' (first at line " + std::to_string(prev->line) + ")");
    }
    sec.entries.push_back({key, trim(line.substr(eq + 1)), lineno});
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, path + ": cannot open config file");
  return parse(in, path);
}

const ConfigSection* ConfigFile::section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

void ConfigFile::fail(int line, const std::string& message) const {
  throw Error(ErrorCode::Config, source_ + ":" + std::to_string(line) + ": " + message);
}

std::string ConfigFile::get_string(const ConfigSection& s, const std::string& key, const std::string& fallback) const {
  const auto* e = s.find(key);
  return e ? e->value : fallback;
}

double ConfigFile::get_double(const ConfigSection& s, const std::string& key, double fallback) const {
  const auto* e = s.find(key);
  if (!e) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(e->value, &used);
    if (used != e->value.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(e->line, "'" + key + "' expects a number, got '" + e->value + "'");
  }
}

long long ConfigFile::get_int(const ConfigSection& s, const std::string& key, long long fallback) const {
  const auto* e = s.find(key);
  if (!e) return fallback;
  const double v = get_double(s, key, 0.0);
  if (v != std::floor(v) || std::abs(v) > 9e15) fail(e->line, "'" + key + "' expects an integer, got '" + e->value + "'");
  return static_cast<long long>(v);
}

bool ConfigFile::get_bool(const ConfigSection& s, const std::string& key, bool fallback) const {
  const auto* e = s.find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  fail(e->line, "'" + key + "' expects true or false, got '" + e->value + "'");
}

std::vector<double> ConfigFile::get_doubles(const ConfigSection& s, const std::string& key) const {
  const auto* e = s.find(key);
  std::vector<double> out;
  if (!e) return out;
  for (const auto& tok : split(e->value, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(e->line, "'" + key + "' expects a comma-separated list of numbers, bad item '" + tok + "'");
    }
  }
  return out;
}

void ConfigFile::require_known(const ConfigSection& s, const std::vector<std::string>& allowed) const {
  for (const auto& e : s.entries) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      fail(e.line, "unknown key '" + e.key + "' in section [" + s.name + "]");
    }
  }
}

std::vector<std::uint64_t> log_grid(double lo, double hi, int points) {
  if (!(lo > 0) || !(hi >= lo) || points < 1) throw Error(ErrorCode::InvalidArgument, "log_grid: need 0 < lo <= hi, points >= 1");
  std::vector<std::uint64_t> g;
  for (int k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    g.push_back(static_cast<std::uint64_t>(std::llround(std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo))))));
  }
  return g;
}

ScenarioConfig parse_scenario(const ConfigFile& cfg) {
  ScenarioConfig sc;
  sc.source = cfg.source();
  sc.text = cfg.text();
  const ConfigSection* top = cfg.section("scenario");
  if (!top) cfg.fail(1, "missing [scenario] section");
  cfg.require_known(*top, {"id", "kind", "description", "seed", "reps", "n_grid", "n_min", "n_max", "n_points", "detectors"});
  sc.id = cfg.get_string(*top, "id", "");
  if (sc.id.empty()) cfg.fail(top->line, "[scenario] needs an id");
  sc.kind = cfg.get_string(*top, "kind", "scaling");
  if (sc.kind != "scaling" && sc.kind != "adaptive" && sc.kind != "coherent" && sc.kind != "robustness") {
    cfg.fail(top->find("kind")->line, "kind must be scaling, adaptive, coherent or robustness");
  }
  sc.description = cfg.get_string(*top, "description", "");
  const long long seed = cfg.get_int(*top, "seed", 1);
  if (seed < 0) cfg.fail(top->find("seed")->line, "seed must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.reps = static_cast<int>(cfg.get_int(*top, "reps", 100));
  if (sc.reps < 1) cfg.fail(top->find("reps")->line, "reps must be >= 1");
  sc.detectors = static_cast<int>(cfg.get_int(*top, "detectors", 1));
  if (sc.detectors < 1) cfg.fail(top->find("detectors")->line, "detectors must be >= 1");

  if (const auto* e = top->find("n_grid")) {
    for (double v : cfg.get_doubles(*top, "n_grid")) {
      if (!(v >= 1) || v != std::floor(v)) cfg.fail(e->line, "n_grid entries must be positive integers");
      sc.n_grid.push_back(static_cast<std::uint64_t>(v));
    }
    if (!std::is_sorted(sc.n_grid.begin(), sc.n_grid.end())) cfg.fail(e->line, "n_grid must be ascending");
  } else {
    const double lo = cfg.get_double(*top, "n_min", 1e3);
    const double hi = cfg.get_double(*top, "n_max", 1e6);
    const long long pts = cfg.get_int(*top, "n_points", 8);
    if (!(lo >= 1) || hi < lo || pts < 1) cfg.fail(top->line, "need 1 <= n_min <= n_max and n_points >= 1");
    sc.n_grid = log_grid(lo, hi, static_cast<int>(pts));
  }

  const ConfigSection* det = cfg.section("detector");
  if (!det) cfg.fail(1, "missing [detector] section");
  cfg.require_known(*det, {"kind", "dim", "mu", "eigenvalues1", "eigenvalues2", "u1_seed", "u2_seed", "unitaries", "file"});
  auto& d = sc.detector;
  d.kind = cfg.get_string(*det, "kind", "binary_mu");
  const std::vector<std::string> kinds = {"binary_mu", "binary_perturbed", "three_valued", "three_perturbed", "custom"};
  if (std::find(kinds.begin(), kinds.end(), d.kind) == kinds.end()) {
    cfg.fail(det->find("kind")->line, "unknown detector kind '" + d.kind + "'");
  }
  d.dim = static_cast<int>(cfg.get_int(*det, "dim", 4));
  if (d.dim < 2) cfg.fail(det->line, "detector dim must be >= 2");
  d.mu = cfg.get_double(*det, "mu", 1.0);
  if (!(d.mu > 0 && d.mu <= 1)) cfg.fail(det->find("mu")->line, "mu must satisfy 0 < mu <= 1");
  d.eig1 = cfg.get_doubles(*det, "eigenvalues1");
  d.eig2 = cfg.get_doubles(*det, "eigenvalues2");
  d.u1_seed = static_cast<std::uint64_t>(cfg.get_int(*det, "u1_seed", 1));
  d.u2_seed = static_cast<std::uint64_t>(cfg.get_int(*det, "u2_seed", 2));
  const std::string unit = cfg.get_string(*det, "unitaries", "random");
  if (unit != "random" && unit != "identity") cfg.fail(det->find("unitaries")->line, "unitaries must be random or identity");
  d.identity_unitaries = unit == "identity";
  d.file = cfg.get_string(*det, "file", "");
  if (d.kind == "custom" && d.file.empty()) cfg.fail(det->line, "custom detector needs file = <path>");
  if (d.kind == "custom" && d.file.front() != '/') {
    // relative to the config file
    const auto slash = sc.source.find_last_of('/');
    if (slash != std::string::npos) d.file = sc.source.substr(0, slash + 1) + d.file;
  }

  for (const auto& s : cfg.sections()) {
    if (s.name.rfind("protocol.", 0) != 0) continue;
    cfg.require_known(s, {"family", "random_m", "adaptive", "step2", "anchor", "n0_fraction", "coherent_terms", "coherent_starts", "step2_estimator"});
    ProtocolSpec p;
    p.name = s.name.substr(9);
    p.line = s.line;
    if (p.name.empty()) cfg.fail(s.line, "protocol section needs a name: [protocol.<name>]");
    p.family = cfg.get_string(s, "family", "gpb");
    const std::vector<std::string> fams = {"sic", "mub", "cube", "gpb", "random", "random_coherent"};
    if (std::find(fams.begin(), fams.end(), p.family) == fams.end()) {
      cfg.fail(s.find("family") ? s.find("family")->line : s.line, "unknown probe family '" + p.family + "'");
    }
    if ((p.family == "sic" || p.family == "mub" || p.family == "cube") && d.dim != 4 && !(p.family == "mub" && d.dim == 2)) {
      cfg.fail(s.line, "family '" + p.family + "' is not available at d = " + std::to_string(d.dim));
    }
    p.random_m = static_cast<int>(cfg.get_int(s, "random_m", 48));
    p.adaptive = cfg.get_bool(s, "adaptive", false);
    p.step2 = cfg.get_string(s, "step2", "gpb");
    if (p.step2 != "gpb" && p.step2 != "rotated") cfg.fail(s.find("step2")->line, "step2 must be gpb or rotated");
    const std::string est = cfg.get_string(s, "step2_estimator", "per_element");
    if (est != "per_element" && est != "joint") cfg.fail(s.find("step2_estimator")->line, "step2_estimator must be per_element or joint");
    p.joint_step2 = est == "joint";
    p.anchor = static_cast<int>(cfg.get_int(s, "anchor", 0));
    p.n0_fraction = cfg.get_double(s, "n0_fraction", 0.5);
    if (!(p.n0_fraction > 0 && p.n0_fraction < 1)) cfg.fail(s.find("n0_fraction")->line, "n0_fraction must lie in (0, 1)");
    p.coherent_terms = static_cast<int>(cfg.get_int(s, "coherent_terms", 0));
    p.coherent_starts = static_cast<int>(cfg.get_int(s, "coherent_starts", 20));
    if (p.coherent_terms < 0 || p.coherent_starts < 1) cfg.fail(s.line, "coherent_terms >= 0 and coherent_starts >= 1 required");
    sc.protocols.push_back(p);
  }
  if (sc.protocols.empty()) cfg.fail(1, "no [protocol.<name>] sections");

  if (const ConfigSection* chk = cfg.section("check")) {
    // <protocol>.P<i> = lo, hi [@ Nlo, Nhi]
    for (const auto& e : chk->entries) {
      CheckSpec c;
      c.line = e.line;
      const auto dot = e.key.rfind(".P");
      if (dot == std::string::npos) cfg.fail(e.line, "check key must look like <protocol>.P<i>");
      c.protocol = e.key.substr(0, dot);
      try {
        c.element = std::stoi(e.key.substr(dot + 2)) - 1;
      } catch (const std::exception&) {
        cfg.fail(e.line, "bad element index in '" + e.key + "'");
      }
      if (c.element < 0) cfg.fail(e.line, "element indices start at P1");
      bool known = false;
      for (const auto& p : sc.protocols) known = known || p.name == c.protocol;
      if (!known) cfg.fail(e.line, "check refers to unknown protocol '" + c.protocol + "'");
      std::string value = e.value, window;
      if (const auto at = value.find('@'); at != std::string::npos) {
        window = trim(value.substr(at + 1));
        value = trim(value.substr(0, at));
      }
      ConfigSection tmp;
      tmp.entries.push_back({"slope", value, e.line});
      const auto lohi = cfg.get_doubles(tmp, "slope");
      if (lohi.size() != 2 || lohi[0] > lohi[1]) cfg.fail(e.line, "check value must be 'lo, hi' with lo <= hi");
      c.lo = lohi[0];
      c.hi = lohi[1];
      if (!window.empty()) {
        tmp.entries[0].value = window;
        const auto w = cfg.get_doubles(tmp, "slope");
        if (w.size() != 2 || w[0] > w[1]) cfg.fail(e.line, "check window must be '@ Nlo, Nhi'");
        c.n_lo = w[0];
        c.n_hi = w[1];
      }
      sc.checks.push_back(c);
    }
  }

  for (const auto& s : cfg.sections()) {
    if (s.name.empty()) {
      if (!s.entries.empty()) cfg.fail(s.entries.front().line, "key outside any section");
      continue;
    }
    if (s.name != "scenario" && s.name != "detector" && s.name != "check" && s.name.rfind("protocol.", 0) != 0) {
      cfg.fail(s.line, "unknown section [" + s.name + "]");
    }
  }
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) { return parse_scenario(ConfigFile::load(path)); }

}  // namespace qdt
