#include "qdt/probe_sets.hpp"

#include <cmath>
#include <limits>

namespace qdt {

ProbeSet::ProbeSet(std::vector<DensityMatrix> states, std::vector<std::string> labels)
    : states_(std::move(states)), labels_(std::move(labels)) {
  if (states_.empty()) throw Error(ErrorCode::InvalidArgument, "ProbeSet: no states");
  if (labels_.empty()) {
    for (std::size_t j = 0; j < states_.size(); ++j) labels_.push_back(std::to_string(j));
  }
  if (labels_.size() != states_.size()) throw Error(ErrorCode::InvalidArgument, "ProbeSet: label count mismatch");
  for (const auto& s : states_) {
    if (s.dim() != states_.front().dim()) throw Error(ErrorCode::InvalidDimension, "ProbeSet: mixed dimensions");
  }
}

void ProbeSet::append(const ProbeSet& other) {
  if (!states_.empty() && other.dim() != dim()) throw Error(ErrorCode::InvalidDimension, "ProbeSet::append: dimension");
  states_.insert(states_.end(), other.states_.begin(), other.states_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

ProbeSet probe_set_from_kets(const std::vector<CVector>& kets, const std::vector<std::string>& labels) {
  std::vector<DensityMatrix> states;
  states.reserve(kets.size());
  for (const auto& k : kets) states.push_back(DensityMatrix::pure(k));
  return ProbeSet(std::move(states), labels);
}

RMatrix design_matrix(const ProbeSet& set, const OrthonormalBasis& basis) {
  const auto m = static_cast<Eigen::Index>(set.size());
  const int d = set.dim();
  if (basis.dim() != d) throw Error(ErrorCode::InvalidDimension, "design_matrix: basis dimension");
  RMatrix x(m, static_cast<Eigen::Index>(d) * d);
  for (Eigen::Index j = 0; j < m; ++j) x.row(j) = parameterize(set[static_cast<std::size_t>(j)].op(), basis).coeffs.transpose();
  return x;
}

DesignReport design_report(const ProbeSet& set) { return design_report(set, gell_mann_basis(set.dim())); }

DesignReport design_report(const ProbeSet& set, const OrthonormalBasis& basis) {
  const RMatrix x = design_matrix(set, basis);
  const int d2 = static_cast<int>(x.cols());
  DesignReport rep;

  const RMatrix xtx = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(xtx, Eigen::EigenvaluesOnly);
  rep.eigenvalues = es.eigenvalues().reverse();

  Eigen::JacobiSVD<RMatrix> svd(x);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  rep.rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > 1e-9 * smax) ++rep.rank;
  rep.complete = rep.rank == d2;

  if (!rep.complete) {
    rep.umse_criterion = std::numeric_limits<double>::infinity();
    rep.cond = std::numeric_limits<double>::infinity();
    return rep;
  }
  // Tr (X^T X)^-1 = sum 1/sigma_k^2
  double tr = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) tr += 1.0 / (s(k) * s(k));
  rep.umse_criterion = static_cast<double>(set.size()) * tr;
  rep.cond = smax / s(s.size() - 1);
  return rep;
}

// ---------------------------------------------------------------------------
// Families

namespace {

const Complex kI(0.0, 1.0);

CVector ket(std::initializer_list<Complex> v) {
  CVector k(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& c : v) k(i++) = c;
  return k;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

struct QubitKets {
  CVector zero, one, plus, minus, r, l;
};

QubitKets qubit_kets() {
  const double h = 1.0 / std::sqrt(2.0);
  return {ket({1, 0}), ket({0, 1}), ket({h, h}), ket({h, -h}), ket({h, -kI * h}), ket({h, kI * h})};
}

DensityMatrix bloch_state(const Eigen::Vector3d& r) {
  CMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + r.z());
  m(1, 1) = 0.5 * (1.0 - r.z());
  m(0, 1) = 0.5 * Complex(r.x(), -r.y());
  m(1, 0) = 0.5 * Complex(r.x(), r.y());
  return DensityMatrix(HermitianOp(m));
}

}  // namespace

ProbeSet sic_states_d4() {
  const double x = std::sqrt(2.0 + std::sqrt(5.0));
  const Complex i = kI;
  // rows of the fiducial matrix; column n is state n
  const Complex rows[4][16] = {
      {x, x, x, x, i, i, -i, -i, i, i, -i, -i, i, i, -i, -i},
      {1, 1, -1, -1, x, x, x, x, i, -i, i, -i, 1, -1, 1, -1},
      {1, -1, 1, -1, 1, -1, 1, -1, x, x, x, x, -i, i, i, -i},
      {1, -1, -1, 1, -i, i, i, -i, -1, 1, 1, -1, x, x, x, x},
  };
  std::vector<CVector> kets;
  std::vector<std::string> labels;
  for (int n = 0; n < 16; ++n) {
    CVector k(4);
    for (int r = 0; r < 4; ++r) k(r) = rows[r][n];
    kets.push_back(k / k.norm());
    labels.push_back("sic" + std::to_string(n));
  }
  return probe_set_from_kets(kets, labels);
}

ProbeSet sic_states_d2() { return platonic_states(4); }

ProbeSet mub_states(int d) {
  const QubitKets q = qubit_kets();
  if (d == 2) {
    return probe_set_from_kets({q.zero, q.one, q.plus, q.minus, q.r, q.l}, {"0", "1", "+", "-", "R", "L"});
  }
  if (d != 4) throw Error(ErrorCode::InvalidDimension, "mub_states: only d = 2 and d = 4 are supported");
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<CVector> k;
  std::vector<std::string> lab;
  auto add = [&](const CVector& v, const std::string& name) {
    k.push_back(v);
    lab.push_back(name);
  };
  add(kron(q.zero, q.zero), "A|00>");
  add(kron(q.zero, q.one), "A|01>");
  add(kron(q.one, q.zero), "A|10>");
  add(kron(q.one, q.one), "A|11>");
  add(kron(q.r, q.plus), "B|R+>");
  add(kron(q.r, q.minus), "B|R->");
  add(kron(q.l, q.plus), "B|L+>");
  add(kron(q.l, q.minus), "B|L->");
  add(kron(q.plus, q.r), "C|+R>");
  add(kron(q.minus, q.r), "C|-R>");
  add(kron(q.plus, q.l), "C|+L>");
  add(kron(q.minus, q.l), "C|-L>");
  add(h * (kron(q.r, q.zero) + kI * kron(q.l, q.one)), "D|R0>+i|L1>");
  add(h * (kron(q.r, q.zero) - kI * kron(q.l, q.one)), "D|R0>-i|L1>");
  add(h * (kron(q.r, q.one) + kI * kron(q.l, q.zero)), "D|R1>+i|L0>");
  add(h * (kron(q.r, q.one) - kI * kron(q.l, q.zero)), "D|R1>-i|L0>");
  add(h * (kron(q.r, q.r) + kI * kron(q.l, q.l)), "E|RR>+i|LL>");
  add(h * (kron(q.r, q.r) - kI * kron(q.l, q.l)), "E|RR>-i|LL>");
  add(h * (kron(q.r, q.l) + kI * kron(q.l, q.r)), "E|RL>+i|LR>");
  add(h * (kron(q.r, q.l) - kI * kron(q.l, q.r)), "E|RL>-i|LR>");
  return probe_set_from_kets(k, lab);
}

ProbeSet cube_states() {
  const QubitKets q = qubit_kets();
  const std::vector<CVector> one = {q.zero, q.one, q.plus, q.minus, q.r, q.l};
  const char* names[] = {"0", "1", "+", "-", "R", "L"};
  std::vector<CVector> kets;
  std::vector<std::string> labels;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      kets.push_back(kron(one[a], one[b]));
      labels.push_back(std::string("|") + names[a] + names[b] + ">");
    }
  }
  return probe_set_from_kets(kets, labels);
}

ProbeSet gpb_states(const CMatrix& basis) {
  const auto d = static_cast<int>(basis.rows());
  if (basis.cols() != d || d < 1) throw Error(ErrorCode::InvalidDimension, "gpb_states: basis must be d x d");
  const double dev = (basis.adjoint() * basis - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) throw Error(ErrorCode::InvalidArgument, "gpb_states: basis vectors are not orthonormal");
  const double h = 1.0 / std::sqrt(2.0);
  std::vector<CVector> kets;
  std::vector<std::string> labels;
  for (int i = 0; i < d; ++i) {
    kets.push_back(basis.col(i));
    labels.push_back("z" + std::to_string(i));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      kets.push_back(h * (basis.col(i) + basis.col(j)));
      labels.push_back("x" + std::to_string(i) + std::to_string(j));
      kets.push_back(h * (basis.col(i) + kI * basis.col(j)));
      labels.push_back("y" + std::to_string(i) + std::to_string(j));
    }
  }
  return probe_set_from_kets(kets, labels);
}

ProbeSet gpb_states(int d) { return gpb_states(CMatrix::Identity(d, d)); }

std::vector<Eigen::Vector3d> platonic_vertices(int m) {
  using V = Eigen::Vector3d;
  std::vector<V> v;
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  switch (m) {
    case 4: {
      // already has vertex 0 at +z
      const double s = std::sqrt(2.0);
      return {V(0, 0, 1), V(2 * s / 3, 0, -1.0 / 3), V(-s / 3, std::sqrt(2.0 / 3), -1.0 / 3),
              V(-s / 3, -std::sqrt(2.0 / 3), -1.0 / 3)};
    }
    case 6:
      return {V(0, 0, 1), V(0, 0, -1), V(1, 0, 0), V(-1, 0, 0), V(0, 1, 0), V(0, -1, 0)};
    case 8:
      for (int sx : {1, -1})
        for (int sy : {1, -1})
          for (int sz : {1, -1}) v.emplace_back(sx, sy, sz);
      break;
    case 12:
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          v.emplace_back(0, a, b * phi);
          v.emplace_back(a, b * phi, 0);
          v.emplace_back(b * phi, 0, a);
        }
      break;
    case 20:
      for (int sx : {1, -1})
        for (int sy : {1, -1})
          for (int sz : {1, -1}) v.emplace_back(sx, sy, sz);
      for (int a : {1, -1})
        for (int b : {1, -1}) {
          v.emplace_back(0, a / phi, b * phi);
          v.emplace_back(a / phi, b * phi, 0);
          v.emplace_back(b * phi, 0, a / phi);
        }
      break;
    default:
      throw Error(ErrorCode::InvalidArgument, "platonic_states: M must be one of 4, 6, 8, 12, 20");
  }
  for (auto& p : v) p.normalize();
  // rotate vertex 0 onto +z about the axis v0 x z
  const V z(0, 0, 1);
  const Eigen::Quaterniond rot = Eigen::Quaterniond::FromTwoVectors(v.front(), z);
  for (auto& p : v) p = rot * p;
  v.front() = z;
  return v;
}

ProbeSet platonic_states(int m) {
  const auto verts = platonic_vertices(m);
  std::vector<DensityMatrix> states;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < verts.size(); ++k) {
    states.push_back(bloch_state(verts[k]));
    labels.push_back("v" + std::to_string(k));
  }
  return ProbeSet(std::move(states), labels);
}

ProbeSet random_pure_set(int m, int d, Rng& rng) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "random_pure_set: M must be >= 1");
  std::vector<CVector> kets;
  std::vector<std::string> labels;
  for (int j = 0; j < m; ++j) {
    kets.push_back(haar_random_ket(d, rng));
    labels.push_back("r" + std::to_string(j));
  }
  return probe_set_from_kets(kets, labels);
}

ProbeSet random_pure_set(int m, int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure_set(m, d, rng);
}

// ---------------------------------------------------------------------------
// Optimality formulas

OptimumValues theorem1_optimum(int d, int n, double shots) {
  if (d < 2 || n < 2 || !(shots > 0)) throw Error(ErrorCode::InvalidArgument, "theorem1_optimum: need d >= 2, n >= 2, N > 0");
  const double dd = d;
  return {(n - 1) * (dd * dd * dd * dd + dd * dd * dd - dd * dd) / (4.0 * shots), std::sqrt(dd + 1.0)};
}

RVector theorem1_eigenvalues(int d, int m) {
  RVector e = RVector::Constant(d * d, static_cast<double>(m) / (d * (d + 1.0)));
  e(0) = static_cast<double>(m) / d;
  return e;
}

OptimumValues theorem2_optimum(int qubits, int n, double shots) {
  if (qubits < 1 || n < 2 || !(shots > 0)) throw Error(ErrorCode::InvalidArgument, "theorem2_optimum: need m >= 1, n >= 2, N > 0");
  return {std::pow(20.0, qubits) * (n - 1) / (4.0 * shots), std::pow(3.0, qubits / 2.0)};
}

PerturbationBounds perturbation_bounds(const ProbeSet& set, double eps) {
  if (eps < 0) throw Error(ErrorCode::InvalidArgument, "perturbation_bounds: eps must be >= 0");
  const DesignReport rep = design_report(set);
  if (!rep.complete) throw Error(ErrorCode::SingularDesign, "perturbation_bounds: incomplete probe set");
  const double m = static_cast<double>(set.size());
  const double d = set.dim();
  const double l1 = rep.eigenvalues(0);
  const double lmin = rep.eigenvalues(rep.eigenvalues.size() - 1);
  if (eps > lmin / (2.0 * m)) {
    throw Error(ErrorCode::PreconditionViolated, "perturbation_bounds: eps exceeds lambda_min / (2M)");
  }
  const double gap = lmin - 2.0 * m * eps;
  PerturbationBounds b;
  if (eps == 0.0) return b;
  b.criterion_bound = 2.0 * d * d * m * m * eps / (gap * gap);
  b.cond_bound = m * eps * (l1 + lmin) / (gap * gap);
  return b;
}

}  // namespace qdt
