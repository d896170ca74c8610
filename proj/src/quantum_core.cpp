#include "qdt/quantum_core.hpp"

#include <algorithm>
#include <cmath>

namespace qdt {

// ---------------------------------------------------------------------------
// Domain types

HermitianOp::HermitianOp(const CMatrix& m, double tolerance) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::InvalidDimension, "HermitianOp: matrix must be square and non-empty");
  }
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= 2.0 * tolerance)) {
    throw Error(ErrorCode::NotHermitian, "HermitianOp: matrix is not Hermitian (max |A - A^H| = " +
                                             std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOp HermitianOp::identity(int d) { return HermitianOp(CMatrix::Identity(d, d)); }
HermitianOp HermitianOp::zero(int d) { return HermitianOp(CMatrix::Zero(d, d)); }
HermitianOp HermitianOp::projector(const CVector& ket) { return HermitianOp(ket * ket.adjoint()); }

HermitianOp HermitianOp::operator+(const HermitianOp& o) const { return HermitianOp(m_ + o.m_); }
HermitianOp HermitianOp::operator-(const HermitianOp& o) const { return HermitianOp(m_ - o.m_); }
HermitianOp HermitianOp::operator*(double s) const { return HermitianOp(m_ * s); }

namespace {

double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

DensityMatrix::DensityMatrix(HermitianOp op) : op_(std::move(op)) {
  if (std::abs(op_.trace() - 1.0) > tol::kTrace) {
    throw Error(ErrorCode::NotPhysical, "DensityMatrix: trace " + std::to_string(op_.trace()) + " != 1");
  }
  if (min_eigenvalue(op_.matrix()) < -tol::kPsd) {
    throw Error(ErrorCode::NotPsd, "DensityMatrix: negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::pure(const CVector& ket) {
  const double n = ket.norm();
  if (n == 0.0) throw Error(ErrorCode::InvalidArgument, "DensityMatrix::pure: zero ket");
  return DensityMatrix(HermitianOp::projector(ket / n));
}

double DensityMatrix::purity() const { return (matrix() * matrix()).trace().real(); }

Povm::Povm(std::vector<HermitianOp> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw Error(ErrorCode::InvalidArgument, "Povm: no elements");
  const int d = elements_.front().dim();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& e : elements_) {
    if (e.dim() != d) throw Error(ErrorCode::InvalidDimension, "Povm: element dimensions differ");
    if (min_eigenvalue(e.matrix()) < -tol::kPsd) {
      throw Error(ErrorCode::NotPsd, "Povm: element has a negative eigenvalue");
    }
    sum += e.matrix();
  }
  const double dev = (sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > tol::kPovmSum) {
    throw Error(ErrorCode::NotPhysical, "Povm: elements do not sum to identity (deviation " +
                                            std::to_string(dev) + ")");
  }
}

OrthonormalBasis::OrthonormalBasis(int d, std::vector<HermitianOp> ops) : d_(d), ops_(std::move(ops)) {
  const std::size_t d2 = static_cast<std::size_t>(d) * d;
  if (ops_.size() != d2) throw Error(ErrorCode::InvalidDimension, "OrthonormalBasis: need d^2 operators");
  vec_.resize(static_cast<Eigen::Index>(d2), static_cast<Eigen::Index>(d2));
  for (std::size_t a = 0; a < d2; ++a) {
    if (ops_[a].dim() != d) throw Error(ErrorCode::InvalidDimension, "OrthonormalBasis: operator dimension");
    vec_.col(static_cast<Eigen::Index>(a)) = ops_[a].matrix().reshaped();
  }
}

// ---------------------------------------------------------------------------
// Basis and parameterization

OrthonormalBasis gell_mann_basis(int d) {
  if (d < 2) throw Error(ErrorCode::InvalidDimension, "gell_mann_basis: d must be >= 2");
  std::vector<HermitianOp> ops;
  ops.reserve(static_cast<std::size_t>(d) * d);
  ops.emplace_back(CMatrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  const double r2 = 1.0 / std::sqrt(2.0);
  const Complex I(0.0, 1.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      CMatrix x = CMatrix::Zero(d, d);
      x(i, j) = r2;
      x(j, i) = r2;
      ops.emplace_back(x);
      CMatrix y = CMatrix::Zero(d, d);
      y(i, j) = -I * r2;
      y(j, i) = I * r2;
      ops.emplace_back(y);
    }
  }
  for (int k = 1; k < d; ++k) {
    CMatrix z = CMatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int t = 0; t < k; ++t) z(t, t) = norm;
    z(k, k) = -k * norm;
    ops.emplace_back(z);
  }
  return OrthonormalBasis(d, std::move(ops));
}

OrthonormalBasis rotated_basis(const OrthonormalBasis& basis, Rng& rng) {
  const int d = basis.dim();
  const int m = d * d - 1;
  RMatrix g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<RMatrix> qr(g);
  RMatrix q = qr.householderQ();
  std::vector<HermitianOp> ops;
  ops.push_back(basis[0]);
  for (int a = 0; a < m; ++a) {
    CMatrix acc = CMatrix::Zero(d, d);
    for (int b = 0; b < m; ++b) acc += q(a, b) * basis[static_cast<std::size_t>(b + 1)].matrix();
    ops.emplace_back(acc);
  }
  return OrthonormalBasis(d, std::move(ops));
}

ParamVector parameterize(const HermitianOp& op, const OrthonormalBasis& basis) {
  if (op.dim() != basis.dim()) throw Error(ErrorCode::InvalidDimension, "parameterize: dimension mismatch");
  // Tr(op Omega_a) = <vec(Omega_a), vec(op)> for Hermitian Omega_a
  const CVector c = basis.vectorized().adjoint() * op.matrix().reshaped();
  if (c.imag().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.real().cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::NotHermitian, "parameterize: complex expansion coefficient");
  }
  return ParamVector{c.real()};
}

HermitianOp deparameterize(const ParamVector& v, const OrthonormalBasis& basis) {
  const int d = basis.dim();
  if (v.coeffs.size() != static_cast<Eigen::Index>(d) * d) {
    throw Error(ErrorCode::InvalidDimension, "deparameterize: vector length must be d^2");
  }
  const CVector flat = basis.vectorized() * v.coeffs.cast<Complex>();
  return HermitianOp(flat.reshaped(d, d));
}

// ---------------------------------------------------------------------------
// Spectral operations

SpectralDecomposition spectral_decomp(const HermitianOp& op) {
  const int d = op.dim();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op.matrix());
  if (es.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "spectral_decomp: no convergence");
  SpectralDecomposition out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (int k = 0; k < d; ++k) {
    out.values(k) = es.eigenvalues()(d - 1 - k);
    CVector v = es.eigenvectors().col(d - 1 - k);
    const double vmax = v.cwiseAbs().maxCoeff();
    int pivot = 0;
    for (int i = 0; i < d; ++i) {
      if (std::abs(v(i)) >= vmax - 1e-12) {
        pivot = i;
        break;
      }
    }
    const Complex phase = std::conj(v(pivot)) / std::abs(v(pivot));
    v *= phase;
    v(pivot) = Complex(std::abs(v(pivot)), 0.0);
    out.vectors.col(k) = v;
  }
  return out;
}

HermitianOp principal_sqrt(const HermitianOp& op) {
  const auto sd = spectral_decomp(op);
  const int d = op.dim();
  RVector root(d);
  for (int k = 0; k < d; ++k) {
    const double lam = sd.values(k);
    if (lam < -tol::kPsd) throw Error(ErrorCode::NotPsd, "principal_sqrt: negative eigenvalue");
    root(k) = std::sqrt(std::max(lam, 0.0));
  }
  return HermitianOp(sd.vectors * root.cast<Complex>().asDiagonal() * sd.vectors.adjoint());
}

namespace {

// Square root with eigenvalues at the rounding floor (1e-14 of the largest)
// set to zero; their square roots would otherwise add ~1e-8 to fidelities
// of rank-deficient operators.
CMatrix floor_sqrt(const HermitianOp& op) {
  const auto sd = spectral_decomp(op);
  const double floor = 1e-14 * std::max(sd.values(0), 0.0);
  RVector root(op.dim());
  for (int k = 0; k < op.dim(); ++k) {
    const double lam = sd.values(k);
    if (lam < -tol::kPsd) throw Error(ErrorCode::NotPsd, "fidelity: negative eigenvalue");
    root(k) = lam > floor ? std::sqrt(lam) : 0.0;
  }
  return sd.vectors * root.cast<Complex>().asDiagonal() * sd.vectors.adjoint();
}

// [Tr sqrt(sqrt(a) b sqrt(a))]^2 for PSD a, b, as the squared nuclear norm
// of sqrt(a) sqrt(b).
double root_fidelity_squared(const HermitianOp& a, const HermitianOp& b) {
  const CMatrix m = floor_sqrt(a) * floor_sqrt(b);
  const double s = Eigen::JacobiSVD<CMatrix>(m).singularValues().sum();
  return s * s;
}

}  // namespace

double state_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::InvalidDimension, "state_fidelity: dimension mismatch");
  return std::clamp(root_fidelity_squared(a.op(), b.op()), 0.0, 1.0);
}

double detector_fidelity_f0(const HermitianOp& est, const HermitianOp& truth) {
  if (est.dim() != truth.dim()) throw Error(ErrorCode::InvalidDimension, "detector fidelity: dimension mismatch");
  const double te = est.trace();
  const double tt = truth.trace();
  if (te <= 0.0 || tt <= 0.0) throw Error(ErrorCode::InvalidArgument, "detector fidelity: zero-trace operator");
  return std::clamp(root_fidelity_squared(est, truth) / (te * tt), 0.0, 1.0);
}

double detector_fidelity_f(const HermitianOp& est, const HermitianOp& truth) {
  const double f0 = detector_fidelity_f0(est, truth);
  const double d = est.dim();
  const double dt = truth.trace() - est.trace();
  return f0 - dt * dt / (d * d);
}

DistortionReport detect_distortion(const Povm& povm) {
  const int d = povm.dim();
  const auto n = static_cast<Eigen::Index>(povm.size());
  const OrthonormalBasis basis = gell_mann_basis(std::max(d, 2));
  RMatrix stack(static_cast<Eigen::Index>(d) * d, n);
  for (Eigen::Index i = 0; i < n; ++i) stack.col(i) = parameterize(povm[static_cast<std::size_t>(i)], basis).coeffs;

  auto rank_of = [](const RMatrix& m) {
    Eigen::JacobiSVD<RMatrix> svd(m);
    const RVector& s = svd.singularValues();
    const double cut = tol::kRank * std::max(1.0, s.size() ? s(0) : 0.0);
    int r = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > cut) ++r;
    return r;
  };

  DistortionReport rep;
  rep.rank = rank_of(stack);
  rep.distorted = rep.rank < n;
  if (!rep.distorted) return rep;

  // Certificate from the first column that depends on the ones before it:
  // c_j = 1 and the independent predecessors carry minus the least-squares
  // coefficients. Normalized so the first nonzero entry is positive and
  // max |c_i| = 1.
  std::vector<Eigen::Index> independent;
  for (Eigen::Index j = 0; j < n; ++j) {
    RMatrix trial(stack.rows(), static_cast<Eigen::Index>(independent.size()) + 1);
    for (std::size_t k = 0; k < independent.size(); ++k) trial.col(static_cast<Eigen::Index>(k)) = stack.col(independent[k]);
    trial.col(trial.cols() - 1) = stack.col(j);
    if (rank_of(trial) == trial.cols()) {
      independent.push_back(j);
      continue;
    }
    RVector c = RVector::Zero(n);
    c(j) = 1.0;
    if (!independent.empty()) {
      const RMatrix base = trial.leftCols(trial.cols() - 1);
      const RVector coef = base.colPivHouseholderQr().solve(stack.col(j));
      for (std::size_t k = 0; k < independent.size(); ++k) c(independent[k]) = -coef(static_cast<Eigen::Index>(k));
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(c(k)) > 1e-12) {
        if (c(k) < 0) c = -c;
        break;
      }
    }
    rep.certificate = c / c.cwiseAbs().maxCoeff();
    return rep;
  }
  // Borderline rank: fall back to the weakest right singular vector.
  Eigen::JacobiSVD<RMatrix> svd(stack, Eigen::ComputeFullV);
  RVector c = svd.matrixV().col(n - 1);
  rep.certificate = c / c.cwiseAbs().maxCoeff();
  return rep;
}

// ---------------------------------------------------------------------------
// Random generation

CMatrix haar_random_unitary(int d, Rng& rng) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "haar_random_unitary: d must be >= 1");
  CMatrix z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const double a = std::abs(r(k, k));
    const Complex ph = a > 0 ? r(k, k) / a : Complex(1.0, 0.0);
    q.col(k) *= ph;
  }
  return q;
}

CMatrix haar_random_unitary(int d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_random_unitary(d, rng);
}

CVector haar_random_ket(int d, Rng& rng) {
  CVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(rng.normal(), rng.normal());
  return v / v.norm();
}

DensityMatrix random_pure_state(int d, Rng& rng) { return DensityMatrix::pure(haar_random_ket(d, rng)); }

DensityMatrix random_pure_state(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure_state(d, rng);
}

double frobenius_distance(const CMatrix& a, const CMatrix& b) { return (a - b).norm(); }

}  // namespace qdt
