#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qdt/reconstruction.hpp"
#include "qdt/stats.hpp"

namespace qdt {

/// rho_j -> U V_a^dagger rho_j V_a U^dagger, V_a the eigenvector matrix of the
/// anchor state (descending eigenvalues, spectral_decomp phase convention).
ProbeSet rotate_probe_set(const ProbeSet& base, int anchor, const CMatrix& u);

/// GPB states built on the columns of u.
ProbeSet adaptive_gpb(const CMatrix& u);

struct Conditions {
  bool c1 = false;  // Step-1 set complete
  bool c2 = false;  // Step-2 set complete
  bool c3 = false;  // Step-2 set contains a subset spanning the estimated null basis
};

/// Null basis: the (d - r)^2 operators built from columns r .. d-1 of u. c3
/// collects every Step-2 state lying in that span (residual < 1e-9) and
/// requires their span to have dimension (d - r)^2. When no Step-1 set is
/// given, c1 reports completeness of the Step-2 set.
Conditions check_conditions(const ProbeSet& step2_set, const CMatrix& u, int r,
                            const std::optional<ProbeSet>& step1_set = std::nullopt);

/// Number of eigenvalues above 1e-3 times the largest.
int estimated_rank(const HermitianOp& p);

enum class Step2Family { Rotated, Gpb, Custom };

/// Builds the adapted set for one element from its estimated eigenvectors.
using Step2Builder = std::function<ProbeSet(const CMatrix& eigvecs, Rng& rng)>;

/// PerElement: P_i is fitted from the outcome data of its own adapted block,
/// so null-block coefficients only see the near-zero frequencies of the
/// null-span probes; the blocks are then merged by one Stage-2 correction.
/// Joint: a single constrained fit over the whole Step-2 pool.
enum class Step2Estimator { PerElement, Joint };

struct AdaptivePlan {
  ProbeSet step1_set;
  Step2Family family = Step2Family::Gpb;
  ProbeSet rotated_base;  // used by Rotated, with the Step-1 eigenvectors in ascending order
  int anchor = 0;
  Step2Builder custom;    // used by Custom
  Step2Estimator estimator = Step2Estimator::PerElement;
  std::uint64_t shots = 0;   // N
  std::uint64_t step1_shots = 0;  // N0
};

/// Plan with N0 = N / 2.
AdaptivePlan make_plan(ProbeSet step1, Step2Family family, std::uint64_t shots, ProbeSet rotated_base = {}, int anchor = 0);

struct AdaptiveResult {
  Povm step1;
  Povm step2;
  std::vector<double> infidelity;        // 1 - F(step2_i, truth_i)
  std::vector<double> step1_infidelity;  // 1 - F(step1_i, truth_i)
  std::vector<double> mse;               // per element ||step2_i - truth_i||^2
  std::vector<Conditions> conditions;    // per element, rank from estimated_rank
  std::uint64_t shots_used = 0;
  std::size_t step2_pool_size = 0;
  bool step2_per_element = false;  // false when the joint fit was used
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Step 1 on plan.step1_set with N0 shots, per-element eigenvectors, Step 2 on
/// the concatenated adapted sets with N - N0 shots split evenly, estimate from
/// Step-2 data alone.
AdaptiveResult run_two_step(const Povm& truth, const AdaptivePlan& plan, Rng& rng);
AdaptiveResult run_two_step(const Povm& truth, const AdaptivePlan& plan, std::uint64_t seed);

/// Single-step tomography with all N shots on `set`.
AdaptiveResult run_nonadaptive(const Povm& truth, const ProbeSet& set, std::uint64_t shots, Rng& rng);

/// Describes how each repetition obtains its probes.
struct Protocol {
  std::string name;
  bool adaptive = false;
  /// Step-1 (or only) probe set; gets a fresh stream per repetition so random
  /// families are redrawn each time.
  std::function<ProbeSet(Rng& rng)> step1;
  Step2Family family = Step2Family::Gpb;
  ProbeSet rotated_base;
  int anchor = 0;
  Step2Builder custom;
  Step2Estimator estimator = Step2Estimator::PerElement;
  double step1_fraction = 0.5;
};

struct ExperimentRow {
  std::uint64_t shots;
  int rep;
  int element;
  double infidelity;
  double mse;
};

struct ExperimentRecord {
  std::string protocol;
  std::uint64_t seed = 0;
  /// Scenario runs: protocol index k; the repetitions then drew from
  /// seed stream_id(seed, k).
  std::optional<std::uint64_t> stream;
  std::vector<std::uint64_t> n_grid;
  int reps = 0;
  int elements = 0;
  std::vector<ExperimentRow> rows;               // sorted by (N, rep, element)
  std::vector<std::vector<double>> mean;         // [element][grid index]
  std::vector<std::vector<double>> stddev;       // [element][grid index]
  std::vector<std::optional<SlopeFit>> slopes;   // per element; empty when a mean is 0
  /// Adaptive runs: per element, how many repetitions satisfied c1, c2, c3.
  std::vector<std::array<int, 3>> condition_counts;
  double wall_seconds = 0.0;
};

/// Repetition (g, r) draws from Rng(seed, stream_id(g, r)), so output does not
/// depend on the worker count.
ExperimentRecord scaling_experiment(const Povm& truth, const Protocol& protocol, const std::vector<std::uint64_t>& n_grid,
                                    int reps, std::uint64_t seed, int workers = 1);

/// Slope over the subset of grid points with lo <= N <= hi.
std::optional<SlopeFit> slope_in_window(const ExperimentRecord& rec, int element, double lo, double hi);

}  // namespace qdt
