#include "qdt/measurement.hpp"

#include <algorithm>
#include <cmath>

namespace qdt {

MeasurementPlan::MeasurementPlan(ProbeSet set, std::uint64_t shots) : probe_set(std::move(set)), total_shots(shots) {
  const std::uint64_t m = probe_set.size();
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "MeasurementPlan: empty probe set");
  allocation.assign(m, shots / m);
  for (std::uint64_t j = 0; j < shots % m; ++j) ++allocation[j];
}

RMatrix born_matrix(const Povm& povm, const ProbeSet& set) {
  if (povm.dim() != set.dim()) throw Error(ErrorCode::InvalidDimension, "born_matrix: POVM and probe dimensions differ");
  const auto n = static_cast<Eigen::Index>(povm.size());
  const auto m = static_cast<Eigen::Index>(set.size());
  RMatrix p(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CMatrix& e = povm[static_cast<std::size_t>(i)].matrix();
    for (Eigen::Index j = 0; j < m; ++j) {
      // Tr(A B) = sum_kl A_kl B_lk; both Hermitian so this is sum conj(A) .* B
      const CMatrix& r = set[static_cast<std::size_t>(j)].matrix();
      const Complex t = (e.conjugate().array() * r.array()).sum();
      if (std::abs(t.imag()) > 1e-10) throw Error(ErrorCode::NotHermitian, "born_matrix: complex probability");
      p(i, j) = std::clamp(t.real(), 0.0, 1.0);
    }
  }
  return p;
}

FrequencyData sample_frequencies(const Povm& povm, const MeasurementPlan& plan, const Rng& rng) {
  const RMatrix p = born_matrix(povm, plan.probe_set);
  const auto n = p.rows();
  FrequencyData out;
  out.freqs.resize(n, p.cols());
  out.shots = plan.allocation;
  out.seed = rng.seed();
  out.stream = rng.stream();
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    const std::uint64_t shots = plan.allocation[static_cast<std::size_t>(j)];
    if (shots == 0) throw Error(ErrorCode::InvalidArgument, "sample_frequencies: probe with zero shots");
    Rng sub = rng.split(static_cast<std::uint64_t>(j));
    std::uint64_t left = shots;
    double mass = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::uint64_t count;
      if (i == n - 1) {
        count = left;
      } else {
        const double q = mass > 0 ? std::clamp(p(i, j) / mass, 0.0, 1.0) : 0.0;
        count = sub.binomial(left, q);
        mass -= p(i, j);
      }
      left -= count;
      out.freqs(i, j) = static_cast<double>(count) / static_cast<double>(shots);
    }
  }
  return out;
}

FrequencyData sample_frequencies(const Povm& povm, const MeasurementPlan& plan, std::uint64_t seed) {
  return sample_frequencies(povm, plan, Rng(seed));
}

FrequencyData exact_frequencies(const Povm& povm, const ProbeSet& set) {
  FrequencyData out;
  out.freqs = born_matrix(povm, set);
  out.exact = true;
  return out;
}

}  // namespace qdt
