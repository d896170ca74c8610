#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdt/quantum_core.hpp"

namespace qdt {

class ProbeSet {
 public:
  ProbeSet() = default;
  ProbeSet(std::vector<DensityMatrix> states, std::vector<std::string> labels);

  int dim() const { return states_.empty() ? 0 : states_.front().dim(); }
  std::size_t size() const { return states_.size(); }
  const DensityMatrix& operator[](std::size_t j) const { return states_[j]; }
  const std::vector<DensityMatrix>& states() const { return states_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Appends another set of the same dimension.
  void append(const ProbeSet& other);

 private:
  std::vector<DensityMatrix> states_;
  std::vector<std::string> labels_;
};

ProbeSet probe_set_from_kets(const std::vector<CVector>& kets, const std::vector<std::string>& labels);

/// M x d^2 real matrix whose row j is parameterize(rho_j).
RMatrix design_matrix(const ProbeSet& set, const OrthonormalBasis& basis);

struct DesignReport {
  double umse_criterion = 0.0;  // M Tr[(X^T X)^-1], +inf when incomplete
  double cond = 0.0;            // sigma_max / sigma_min of X, +inf when incomplete
  RVector eigenvalues;          // of X^T X, descending
  bool complete = false;        // sigma_min > 1e-9 sigma_max
  int rank = 0;
};

DesignReport design_report(const ProbeSet& set);
DesignReport design_report(const ProbeSet& set, const OrthonormalBasis& basis);

// Built-in families. All states are pure.

/// 16 two-qubit SIC states; columns of the standard 4 x 16 fiducial matrix with
/// x = sqrt(2 + sqrt(5)), each normalized.
ProbeSet sic_states_d4();
/// Regular tetrahedron on the Bloch sphere, first vertex at +z.
ProbeSet sic_states_d2();
/// d = 2: {|0>, |1>, |+>, |->, |R>, |L>}; d = 4: the 20 states of bases A..E.
ProbeSet mub_states(int d);
/// All 36 two-qubit products of the six single-qubit MUB states.
ProbeSet cube_states();
/// d^2 states on an orthonormal ket basis (columns of `basis`): the d kets,
/// then per pair i < j the x state (|i> + |j>)/sqrt2 and y state (|i> + i|j>)/sqrt2.
ProbeSet gpb_states(const CMatrix& basis);
ProbeSet gpb_states(int d);
/// Platonic solid vertices on the Bloch sphere for M in {4, 6, 8, 12, 20}.
/// Orientation: vertex 0 at +z, reached from the textbook coordinates by the
/// minimal rotation about the axis v0 x z.
ProbeSet platonic_states(int m);
ProbeSet random_pure_set(int m, int d, std::uint64_t seed);
ProbeSet random_pure_set(int m, int d, Rng& rng);

/// Bloch vectors used by platonic_states, unit length, vertex 0 = (0, 0, 1).
std::vector<Eigen::Vector3d> platonic_vertices(int m);

struct OptimumValues {
  double min_umse = 0.0;
  double min_cond = 0.0;
};

/// ((n-1)(d^4 + d^3 - d^2) / (4N), sqrt(d + 1)).
OptimumValues theorem1_optimum(int d, int n, double shots);
/// Eigenvalues of X^T X attained by an optimal set of M states:
/// M/d once, then M/(d(d+1)) repeated d^2 - 1 times.
RVector theorem1_eigenvalues(int d, int m);
/// Product-state optimum for m qubits: (20^m (n-1) / (4N), 3^(m/2)).
OptimumValues theorem2_optimum(int qubits, int n, double shots);

struct PerturbationBounds {
  double criterion_bound = 0.0;  // on |M Tr(X^TX)^-1 - M Tr(Xh^TXh)^-1|
  double cond_bound = 0.0;       // on |cond X - cond Xh|
  /// Bound on the UMSE difference: (n-1)/(4N) * criterion_bound.
  double umse_bound(int n, double shots) const { return (n - 1) / (4.0 * shots) * criterion_bound; }
};

/// Bounds for any set whose states differ from `set` by at most eps in
/// Frobenius norm. Requires eps <= lambda_min / (2M).
PerturbationBounds perturbation_bounds(const ProbeSet& set, double eps);

}  // namespace qdt
