#pragma once

#include <cstdint>
#include <vector>

#include "qdt/probe_sets.hpp"

namespace qdt {

/// e^{-|a|^2/2} sum_{i<d} a^i / sqrt(i!) |i>, not renormalized.
CVector coherent_truncated(Complex alpha, int d);

/// <beta|alpha> for untruncated coherent states.
Complex coherent_overlap(Complex beta, Complex alpha);

struct CoherentTerm {
  Complex c;
  Complex alpha;
};

struct CoherentSuperposition {
  std::vector<CoherentTerm> terms;
  int dim = 0;

  /// sum_k c_k |alpha_k> truncated to `d` levels (default: dim).
  CVector ket() const { return ket(dim); }
  CVector ket(int d) const;
  /// <psi|psi> of the untruncated superposition.
  double full_norm2() const;
};

/// ||psi~ / |psi~| - psi||^2 / <psi~|psi~> after rotating psi~ by the global
/// phase that maximizes Re<psi|psi~>.
double superposition_cost(const CoherentSuperposition& sup, const CVector& target);
/// The same expression without phase alignment.
double superposition_cost_unaligned(const CoherentSuperposition& sup, const CVector& target);

struct OptimizedSuperposition {
  CoherentSuperposition sup;  // c rescaled so the untruncated state has unit norm
  double cost = 0.0;          // superposition_cost at the optimum
  /// 1 - |psi~_d|^2 / |psi~_{d+8}|^2
  double discarded_weight = 0.0;
  bool flagged = false;  // discarded_weight >= 0.05
};

inline constexpr double kDiscardFlag = 0.05;
inline constexpr int kTailLevels = 8;

/// Multi-start Nelder-Mead over the 4s real parameters. Each start draws
/// alpha_k uniformly from |alpha| <= 2 and c_k from |c| <= 1 on stream
/// (seed, start). Inside the objective the c_k are rescaled so the
/// untruncated superposition has unit norm; without that the cost can be
/// driven to zero by inflating c.
OptimizedSuperposition optimize_superposition(const CVector& target, int s, int starts, std::uint64_t seed,
                                              int max_iters = 4000);

struct FockCoherent {
  double alpha_sq = 0.0;
  double infidelity = 0.0;
};

/// Best single coherent state for Fock state |n>: |alpha|^2 = n and
/// infidelity 1 - e^{-n} n^n / n!.
FockCoherent fock_coherent_infidelity(int n);
/// 1 - |<n|alpha>|^2 as a function of |alpha|^2.
double fock_coherent_infidelity_at(int n, double alpha_sq);

struct SuperposedSet {
  ProbeSet set;
  std::vector<OptimizedSuperposition> terms;
  int flagged = 0;
};

/// Optimizes every target (top eigenvector of each state) independently.
/// Target j uses seed stream_id(seed, j), so the result does not depend on
/// the worker count.
SuperposedSet superposed_probe_set(const ProbeSet& targets, int s, int starts, std::uint64_t seed,
                                   int max_iters = 4000, int workers = 1);

/// M states, each a random s-term superposition (alpha in |alpha| <= 2,
/// c in |c| <= 1) normalized at truncation d.
ProbeSet random_coherent_set(int m, int d, int s, Rng& rng);

}  // namespace qdt
