#pragma once

#include <vector>

#include "qdt/measurement.hpp"

namespace qdt {

struct Stage1Estimate {
  std::vector<HermitianOp> elements;  // may have negative eigenvalues
  RMatrix theta;                      // d^2 x n, column i parameterizes element i
};

struct PhysicalEstimate {
  Povm povm;
  CMatrix gauge;  // U_op
  CMatrix whitening;  // C with C C^dagger = sum F_i
};

/// Constrained least squares: block i = (X^T X)^-1 X^T (y_i - 1/n) + e/n with
/// e = (sqrt d, 0, ..., 0). Solved through a QR factorization of X.
Stage1Estimate stage1_cls(const FrequencyData& data, const ProbeSet& set, int n);
Stage1Estimate stage1_cls(const FrequencyData& data, const ProbeSet& set, int n, const OrthonormalBasis& basis);

/// Least-squares gauge unitary for a whitening factor: sqrt(C^dagger C) C^-1,
/// which minimizes ||C U - I|| over unitaries U.
CMatrix optimal_gauge(const CMatrix& c);

/// Eigenvalue correction to a physical POVM. Eigenvalues <= 1e-12 are dropped
/// from each element, the remainder is re-whitened by C = sqrt(sum F_i) and
/// rotated by the optimal gauge.
PhysicalEstimate stage2_correct(const Stage1Estimate& est);
/// Same, with an explicit whitening factor (any C with C C^dagger = sum F_i).
PhysicalEstimate stage2_correct(const Stage1Estimate& est, const CMatrix& whitening);

/// Stage-2 correction for elements fitted separately, whose sum is only
/// close to I. Whitening by sqrt(sum F_i) restores the constraint.
PhysicalEstimate stage2_merge(const std::vector<HermitianOp>& elements);

PhysicalEstimate reconstruct(const FrequencyData& data, const ProbeSet& set, int n);

/// Sum_i ||A_i - B_i||_F^2.
double mse(const Povm& est, const Povm& truth);
double mse(const std::vector<HermitianOp>& est, const Povm& truth);

enum class BoundKind { Stage1, Final };

/// Stage1: (n-1)/(4N) criterion. Final: (d n + 2 sqrt(d) n + 1) times that.
/// d is read off the report (eigenvalue count d^2).
double umse_bound(const DesignReport& report, int n, double shots, BoundKind which);

}  // namespace qdt
