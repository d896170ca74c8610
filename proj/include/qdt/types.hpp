#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidDimension,
  NotHermitian,
  NotPsd,
  NotPhysical,
  SingularDesign,
  PreconditionViolated,
  Config,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kPsd = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPovmSum = 1e-9;
inline constexpr double kRank = 1e-9;
}  // namespace tol

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction checks Hermiticity to `tol::kHermitian` (absolute, entrywise)
/// and then stores the exactly symmetrized matrix (A + A^dagger) / 2, so the
/// stored value is Hermitian to the last bit.
class HermitianOp {
 public:
  HermitianOp() = default;
  explicit HermitianOp(const CMatrix& m, double tolerance = tol::kHermitian);

  static HermitianOp identity(int d);
  static HermitianOp zero(int d);
  static HermitianOp projector(const CVector& ket);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

  HermitianOp operator+(const HermitianOp& o) const;
  HermitianOp operator-(const HermitianOp& o) const;
  HermitianOp operator*(double s) const;

 private:
  CMatrix m_;
};

inline HermitianOp operator*(double s, const HermitianOp& h) { return h * s; }

/// Unit-trace positive semidefinite operator.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(HermitianOp op);
  static DensityMatrix pure(const CVector& ket);

  int dim() const { return op_.dim(); }
  const HermitianOp& op() const { return op_; }
  const CMatrix& matrix() const { return op_.matrix(); }
  double purity() const;

 private:
  HermitianOp op_;
};

/// Detector: positive semidefinite elements summing to the identity.
class Povm {
 public:
  Povm() = default;
  explicit Povm(std::vector<HermitianOp> elements);

  int dim() const { return elements_.empty() ? 0 : elements_.front().dim(); }
  std::size_t size() const { return elements_.size(); }
  const HermitianOp& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<HermitianOp>& elements() const { return elements_; }

 private:
  std::vector<HermitianOp> elements_;
};

/// Hilbert-Schmidt orthonormal Hermitian operator basis, identity/sqrt(d) first.
class OrthonormalBasis {
 public:
  OrthonormalBasis() = default;
  OrthonormalBasis(int d, std::vector<HermitianOp> ops);

  int dim() const { return d_; }
  std::size_t size() const { return ops_.size(); }
  const HermitianOp& operator[](std::size_t a) const { return ops_[a]; }
  const std::vector<HermitianOp>& ops() const { return ops_; }

  /// Column a holds the column-major vectorization of operator a.
  const CMatrix& vectorized() const { return vec_; }

 private:
  int d_ = 0;
  std::vector<HermitianOp> ops_;
  CMatrix vec_;
};

/// Real expansion coefficients of a Hermitian operator in an orthonormal basis.
struct ParamVector {
  RVector coeffs;
};

}  // namespace qdt
