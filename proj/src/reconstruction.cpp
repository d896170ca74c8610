#include "qdt/reconstruction.hpp"

#include <cmath>
#include <limits>

namespace qdt {

Stage1Estimate stage1_cls(const FrequencyData& data, const ProbeSet& set, int n) {
  return stage1_cls(data, set, n, gell_mann_basis(set.dim()));
}

Stage1Estimate stage1_cls(const FrequencyData& data, const ProbeSet& set, int n, const OrthonormalBasis& basis) {
  const int d = set.dim();
  const auto d2 = static_cast<Eigen::Index>(d) * d;
  if (n < 1 || data.freqs.rows() != n || data.freqs.cols() != static_cast<Eigen::Index>(set.size())) {
    throw Error(ErrorCode::InvalidDimension, "stage1_cls: frequency matrix shape does not match (n, M)");
  }
  const RMatrix x = design_matrix(set, basis);
  Eigen::ColPivHouseholderQR<RMatrix> qr(x);
  qr.setThreshold(1e-9);
  if (qr.rank() < d2) throw Error(ErrorCode::SingularDesign, "stage1_cls: probe set is not informationally complete");

  // coordinates of I/n in this basis
  const RVector id_coeffs = parameterize(HermitianOp::identity(d), basis).coeffs / n;
  const RVector y0 = RVector::Ones(x.rows()) / n;

  Stage1Estimate out;
  out.theta.resize(d2, n);
  for (int i = 0; i < n; ++i) {
    const RVector y = data.freqs.row(i).transpose() - y0;
    out.theta.col(i) = qr.solve(y) + id_coeffs;
    out.elements.push_back(deparameterize(ParamVector{out.theta.col(i)}, basis));
  }
  return out;
}

CMatrix optimal_gauge(const CMatrix& c) {
  const CMatrix ctc = c.adjoint() * c;
  const CMatrix root = principal_sqrt(HermitianOp(0.5 * (ctc + ctc.adjoint()), 1e-9)).matrix();
  return root * c.inverse();
}

namespace {

// positive part of each element, as F_i
std::vector<CMatrix> positive_parts(const Stage1Estimate& est) {
  std::vector<CMatrix> f;
  for (const auto& e : est.elements) {
    const auto sd = spectral_decomp(e);
    RVector kept = sd.values;
    for (Eigen::Index k = 0; k < kept.size(); ++k)
      if (kept(k) <= 1e-12) kept(k) = 0.0;
    f.push_back(sd.vectors * kept.cast<Complex>().asDiagonal() * sd.vectors.adjoint());
  }
  return f;
}

void check_sum(const Stage1Estimate& est) {
  if (est.elements.empty()) throw Error(ErrorCode::InvalidArgument, "stage2_correct: no elements");
  const int d = est.elements.front().dim();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& e : est.elements) sum += e.matrix();
  if ((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-6) {
    throw Error(ErrorCode::NotPhysical, "stage2_correct: Stage-1 elements do not sum to identity");
  }
}

}  // namespace

namespace {

PhysicalEstimate whiten(const Stage1Estimate& est, const CMatrix* given) {
  const std::vector<CMatrix> f = positive_parts(est);
  const int d = est.elements.front().dim();
  CMatrix c, cinv;
  if (given) {
    c = *given;
    Eigen::FullPivLU<CMatrix> lu(c);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularDesign, "stage2_correct: whitening factor is singular");
    cinv = lu.inverse();
  } else {
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& m : f) sum += m;
    // Inverse square root from the spectrum; better conditioned than an LU of C.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (sum + sum.adjoint()));
    const RVector lam = es.eigenvalues();
    if (!(lam.minCoeff() > 1e-14 * std::max(1.0, lam.maxCoeff()))) {
      throw Error(ErrorCode::SingularDesign, "stage2_correct: sum of positive parts is singular");
    }
    const CMatrix& v = es.eigenvectors();
    c = v * lam.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
    cinv = v * lam.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * v.adjoint();
  }
  const CMatrix u = optimal_gauge(c);

  std::vector<HermitianOp> out;
  CMatrix total = CMatrix::Zero(d, d);
  for (const auto& fi : f) {
    const CMatrix b = cinv * fi * cinv.adjoint();
    const CMatrix q = u.adjoint() * b * u;
    const CMatrix p = 0.5 * (q + q.adjoint());
    out.emplace_back(p);
    total += p;
  }
  // absorb rounding so the elements sum to I to machine precision
  const CMatrix resid = (CMatrix::Identity(d, d) - total) / static_cast<double>(out.size());
  if (resid.cwiseAbs().maxCoeff() > 1e-8) throw Error(ErrorCode::NotPhysical, "stage2_correct: output does not sum to identity");
  for (auto& p : out) p = HermitianOp(p.matrix() + 0.5 * (resid + resid.adjoint()));
  return {Povm(std::move(out)), u, c};
}

}  // namespace

PhysicalEstimate stage2_correct(const Stage1Estimate& est) {
  check_sum(est);
  return whiten(est, nullptr);
}

PhysicalEstimate stage2_correct(const Stage1Estimate& est, const CMatrix& c) {
  check_sum(est);
  return whiten(est, &c);
}

PhysicalEstimate stage2_merge(const std::vector<HermitianOp>& elements) {
  if (elements.empty()) throw Error(ErrorCode::InvalidArgument, "stage2_merge: no elements");
  Stage1Estimate est;
  est.elements = elements;
  return whiten(est, nullptr);
}

PhysicalEstimate reconstruct(const FrequencyData& data, const ProbeSet& set, int n) {
  return stage2_correct(stage1_cls(data, set, n));
}

double mse(const std::vector<HermitianOp>& est, const Povm& truth) {
  if (est.size() != truth.size()) throw Error(ErrorCode::InvalidDimension, "mse: element count differs");
  double s = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (est[i].dim() != truth[i].dim()) throw Error(ErrorCode::InvalidDimension, "mse: dimension differs");
    s += (est[i].matrix() - truth[i].matrix()).squaredNorm();
  }
  return s;
}

double mse(const Povm& est, const Povm& truth) { return mse(est.elements(), truth); }

double umse_bound(const DesignReport& report, int n, double shots, BoundKind which) {
  if (!report.complete) return std::numeric_limits<double>::infinity();
  const double d = std::round(std::sqrt(static_cast<double>(report.eigenvalues.size())));
  const double stage1 = (n - 1) / (4.0 * shots) * report.umse_criterion;
  if (which == BoundKind::Stage1) return stage1;
  return (d * n + 2.0 * std::sqrt(d) * n + 1.0) * stage1;
}

}  // namespace qdt
