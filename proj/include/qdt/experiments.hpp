#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdt/adaptive.hpp"
#include "qdt/coherent.hpp"
#include "qdt/config.hpp"

namespace qdt {

/// binary_mu:        P1 = U1 diag(mu, 0, ..) U1^dagger, P2 = I - P1
/// binary_perturbed: P1 = U1 diag(eig1) U1^dagger (default 0.6, 0.001, 0.001, 0.001)
/// three_valued:     P1 = 0.4 U1 |00><00| U1^dagger, P2 = 0.5 U2 |01><01| U2^dagger, P3 = I - P1 - P2
/// three_perturbed:  P1 = U1 diag(0.4, 0.001, 0.001, 0.001) U1^dagger,
///                   P2 = U2 diag(0.001, 0.5, 0.001, 0.001) U2^dagger, P3 = I - P1 - P2
/// custom:           POVM loaded from the matrix text format
/// U1, U2 are Haar unitaries seeded by u1_seed, u2_seed (or I).
Povm build_detector(const DetectorSpec& spec);

struct Table1Row {
  int protocol = 0;
  std::string probes;
  int m = 0;
  double criterion = 0.0;
  double cond = 0.0;
  int flagged = 0;  // coherent rows: states with discarded weight >= 5%
};

struct Table1Options {
  std::uint64_t seed = 1;
  int random_sets = 1000;        // protocol 5 average
  int coherent_starts = 100;
  int random_coherent_sets = 100;
  bool include_coherent = true;
  int workers = 1;
};

/// Protocols 1-14. Fast options: random_sets 200, coherent_starts 20.
std::vector<Table1Row> table1(const Table1Options& opt);
void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows, std::uint64_t seed);

/// Fixed or per-repetition probe construction for one protocol section.
/// Coherent superpositions of fixed sets are optimized once here; adaptive
/// coherent Step-2 sets are optimized per repetition.
struct BuiltProtocol {
  Protocol protocol;
  std::optional<SuperposedSet> fixed_superposition;
};
BuiltProtocol build_protocol(const ProtocolSpec& spec, int d, std::uint64_t seed);

struct CheckResult {
  CheckSpec spec;
  std::optional<SlopeFit> fit;
  bool skipped = false;  // fewer than three grid points inside the window
  bool passed = false;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::string out_dir = ".";
  int workers = 1;
  bool fast = false;  // reps <= 20, N <= 1e5, at most 10 detectors
  bool write_files = true;
};

struct ScenarioOutcome {
  std::vector<ExperimentRecord> records;
  std::vector<CheckResult> checks;
  std::vector<std::string> files;
  bool checks_passed = true;
};

/// Runs every protocol of the scenario; kind "robustness" averages the
/// per-detector mean curves over `detectors` random unitary draws.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log);

/// Per-element mean infidelity versus N from saved record rows, and the
/// slope fits over the whole grid.
struct SlopeSummary {
  std::vector<std::uint64_t> n_grid;
  std::vector<std::vector<double>> mean;    // [element][grid]
  std::vector<std::vector<double>> stddev;  // [element][grid]
  std::vector<std::optional<SlopeFit>> slopes;
};
SlopeSummary summarize_rows(const std::vector<ExperimentRow>& rows);

/// Whitespace-separated columns: N, then mean and std for each element.
void write_plot_data(std::ostream& os, const SlopeSummary& s, const std::string& title);

}  // namespace qdt
