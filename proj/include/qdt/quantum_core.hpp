#pragma once

#include <cstdint>
#include <optional>

#include "qdt/rng.hpp"
#include "qdt/types.hpp"

namespace qdt {

/// Generalized Gell-Mann basis in a fixed order:
///   0                 I / sqrt(d)
///   then for each pair (i < j) in lexicographic order:
///                     (|i><j| + |j><i|) / sqrt(2)          (x-type)
///                     (-i|i><j| + i|j><i|) / sqrt(2)       (y-type)
///   then k = 1 .. d-1 diag(1, .., 1, -k, 0, ..) / sqrt(k (k + 1))
/// For d = 2 this is {I, sigma_x, sigma_y, sigma_z} / sqrt(2).
OrthonormalBasis gell_mann_basis(int d);

/// Same identity element, traceless part mixed by a Haar-random real orthogonal
/// (d^2 - 1) x (d^2 - 1) rotation. Used to check basis independence.
OrthonormalBasis rotated_basis(const OrthonormalBasis& basis, Rng& rng);

ParamVector parameterize(const HermitianOp& op, const OrthonormalBasis& basis);
HermitianOp deparameterize(const ParamVector& v, const OrthonormalBasis& basis);

struct SpectralDecomposition {
  RVector values;   // descending
  CMatrix vectors;  // columns; largest-magnitude entry of each made real >= 0
};

SpectralDecomposition spectral_decomp(const HermitianOp& op);

/// Principal square root; eigenvalues in [-tol::kPsd, 0) are clipped to zero.
HermitianOp principal_sqrt(const HermitianOp& op);

double state_fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// [Tr sqrt(sqrt(est) truth sqrt(est))]^2 / (Tr truth Tr est).
double detector_fidelity_f0(const HermitianOp& est, const HermitianOp& truth);

/// F0 minus [Tr(truth - est)]^2 / d^2; equals 1 only when est == truth.
double detector_fidelity_f(const HermitianOp& est, const HermitianOp& truth);

struct DistortionReport {
  bool distorted = false;
  int rank = 0;
  std::optional<RVector> certificate;  // sum_i c_i P_i = 0 when distorted
};

/// Linear dependence test of the POVM elements (singular values of the
/// stacked real parameter vectors, relative tolerance tol::kRank).
DistortionReport detect_distortion(const Povm& povm);

CMatrix haar_random_unitary(int d, Rng& rng);
CMatrix haar_random_unitary(int d, std::uint64_t seed);
CVector haar_random_ket(int d, Rng& rng);
DensityMatrix random_pure_state(int d, Rng& rng);
DensityMatrix random_pure_state(int d, std::uint64_t seed);

/// Frobenius norm of A - B.
double frobenius_distance(const CMatrix& a, const CMatrix& b);

}  // namespace qdt
