#pragma once

// Reference computations written independently of the library internals.

#include <cstdint>
#include <vector>

#include "qdt/measurement.hpp"
#include "qdt/rng.hpp"

namespace oracle {

using qdt::CMatrix;
using qdt::RMatrix;

CMatrix ginibre(int rows, int cols, qdt::Rng& rng);
/// Unitary from a Gram-Schmidt pass over a Ginibre matrix.
CMatrix unitary(int d, qdt::Rng& rng);
/// Random PSD matrix of the given rank, trace 1.
CMatrix psd(int d, int rank, qdt::Rng& rng);
/// Full-rank n-outcome POVM: A_i random PSD, P_i = S^-1/2 A_i S^-1/2.
qdt::Povm povm(int d, int n, qdt::Rng& rng);

/// Orthonormal Hermitian basis of normalized Pauli strings (d a power of 2).
std::vector<CMatrix> pauli_basis(int d);
/// X_jk = Tr(rho_j B_k) in the Pauli basis.
RMatrix design(const qdt::ProbeSet& set);
/// M * sum 1 / lambda_k(X^T X).
double criterion(const qdt::ProbeSet& set);

/// Rank of the POVM elements viewed as real vectors, from an SVD of the
/// stacked real and imaginary parts.
int element_rank(const std::vector<CMatrix>& elements);

/// Exact expectation of the Stage-1 MSE at an even shot split:
/// sum_j ||pinv(X)_j||^2 sum_i p_ij (1 - p_ij) / N_j.
double stage1_expected_mse(const qdt::Povm& truth, const qdt::ProbeSet& set, std::uint64_t shots);

/// 1 - e^-n n^n / n!.
double fock_infidelity(int n);

}  // namespace oracle

namespace oracle {

/// Each state mixed with a random pure state so that ||rho_j - rho'_j||_F is
/// a uniform fraction of eps (exactly eps when at_boundary).
qdt::ProbeSet perturb(const qdt::ProbeSet& set, double eps, qdt::Rng& rng, bool at_boundary = false);

}  // namespace oracle
