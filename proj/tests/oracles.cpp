#include "oracles.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace oracle {

CMatrix ginibre(int rows, int cols, qdt::Rng& rng) {
  CMatrix g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) g(r, c) = qdt::Complex(rng.normal(), rng.normal());
  }
  return g;
}

CMatrix unitary(int d, qdt::Rng& rng) {
  CMatrix q = ginibre(d, d, rng);
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < k; ++j) q.col(k) -= q.col(j).dot(q.col(k)) * q.col(j);
    q.col(k) /= q.col(k).norm();
  }
  return q;
}

CMatrix psd(int d, int rank, qdt::Rng& rng) {
  const CMatrix g = ginibre(d, rank, rng);
  CMatrix a = g * g.adjoint();
  a /= a.trace().real();
  return 0.5 * (a + a.adjoint());
}

qdt::Povm povm(int d, int n, qdt::Rng& rng) {
  std::vector<CMatrix> a;
  CMatrix s = CMatrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    a.push_back(psd(d, d, rng));
    s += a.back();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
  const CMatrix w = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                    es.eigenvectors().adjoint();
  std::vector<qdt::HermitianOp> el;
  CMatrix rest = CMatrix::Identity(d, d);
  for (int i = 0; i + 1 < n; ++i) {
    CMatrix p = w * a[static_cast<std::size_t>(i)] * w;
    p = CMatrix(0.5 * (p + p.adjoint()));
    rest -= p;
    el.emplace_back(p, 1e-9);
  }
  el.emplace_back(CMatrix(0.5 * (rest + rest.adjoint())), 1e-9);
  return qdt::Povm(std::move(el));
}

std::vector<CMatrix> pauli_basis(int d) {
  const qdt::Complex i1(0, 1);
  CMatrix s[4];
  s[0] = CMatrix::Identity(2, 2);
  s[1] = CMatrix::Zero(2, 2);
  s[1](0, 1) = s[1](1, 0) = 1;
  s[2] = CMatrix::Zero(2, 2);
  s[2](0, 1) = -i1;
  s[2](1, 0) = i1;
  s[3] = CMatrix::Zero(2, 2);
  s[3](0, 0) = 1;
  s[3](1, 1) = -1;
  std::vector<CMatrix> out{CMatrix::Ones(1, 1)};
  for (int dim = 1; dim < d; dim *= 2) {
    std::vector<CMatrix> next;
    for (const auto& m : out) {
      for (const auto& p : s) {
        CMatrix k(m.rows() * 2, m.cols() * 2);
        for (int r = 0; r < m.rows(); ++r) {
          for (int c = 0; c < m.cols(); ++c) k.block(2 * r, 2 * c, 2, 2) = m(r, c) * p;
        }
        next.push_back(k);
      }
    }
    out = next;
  }
  for (auto& m : out) m /= std::sqrt(static_cast<double>(d));
  return out;
}

RMatrix design(const qdt::ProbeSet& set) {
  const auto basis = pauli_basis(set.dim());
  RMatrix x(set.size(), basis.size());
  for (std::size_t j = 0; j < set.size(); ++j) {
    for (std::size_t k = 0; k < basis.size(); ++k) {
      x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = (set[j].matrix() * basis[k]).trace().real();
    }
  }
  return x;
}

double criterion(const qdt::ProbeSet& set) {
  const RMatrix x = design(set);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<RMatrix>(x.transpose() * x).eigenvalues();
  return static_cast<double>(set.size()) * ev.cwiseInverse().sum();
}

int element_rank(const std::vector<CMatrix>& elements) {
  const auto d = elements.front().rows();
  RMatrix a(2 * d * d, static_cast<Eigen::Index>(elements.size()));
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& m = elements[i];
    for (Eigen::Index k = 0; k < d * d; ++k) {
      a(k, static_cast<Eigen::Index>(i)) = m(k % d, k / d).real();
      a(d * d + k, static_cast<Eigen::Index>(i)) = m(k % d, k / d).imag();
    }
  }
  Eigen::JacobiSVD<RMatrix> svd(a);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) r += sv(k) > 1e-9 * sv(0) ? 1 : 0;
  return r;
}

double stage1_expected_mse(const qdt::Povm& truth, const qdt::ProbeSet& set, std::uint64_t shots) {
  const RMatrix x = design(set);
  const RMatrix pinv = (x.transpose() * x).inverse() * x.transpose();
  const auto m = static_cast<Eigen::Index>(set.size());
  double total = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double nj = static_cast<double>(shots / set.size()) + (static_cast<std::uint64_t>(j) < shots % set.size());
    double var = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const double p = (truth[i].matrix() * set[static_cast<std::size_t>(j)].matrix()).trace().real();
      var += p * (1.0 - p);
    }
    total += pinv.col(j).squaredNorm() * var / nj;
  }
  return total;
}

double fock_infidelity(int n) {
  if (n == 0) return 0.0;
  return 1.0 - std::exp(-n + n * std::log(static_cast<double>(n)) - std::lgamma(n + 1.0));
}

}  // namespace oracle

namespace oracle {

qdt::ProbeSet perturb(const qdt::ProbeSet& set, double eps, qdt::Rng& rng, bool at_boundary) {
  std::vector<qdt::DensityMatrix> out;
  for (const auto& s : set.states()) {
    const CMatrix g = ginibre(set.dim(), 1, rng);
    const CMatrix sigma = g * g.adjoint() / g.squaredNorm();
    const double dist = (sigma - s.matrix()).norm();
    const double t = (at_boundary ? 1.0 : rng.uniform()) * eps / dist;
    CMatrix m = (1.0 - t) * s.matrix() + t * sigma;
    m = CMatrix(0.5 * (m + m.adjoint()));
    out.emplace_back(qdt::HermitianOp(m));
  }
  return qdt::ProbeSet(std::move(out), set.labels());
}

}  // namespace oracle
