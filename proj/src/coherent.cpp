#include "qdt/coherent.hpp"

#include <cmath>
#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "parallel.hpp"

namespace qdt {

CVector coherent_truncated(Complex alpha, int d) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "coherent_truncated: d must be >= 1");
  CVector v(d);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int i = 1; i < d; ++i) v(i) = v(i - 1) * alpha / std::sqrt(static_cast<double>(i));
  return v;
}

Complex coherent_overlap(Complex beta, Complex alpha) {
  return std::exp(-0.5 * (std::norm(beta) + std::norm(alpha)) + std::conj(beta) * alpha);
}

CVector CoherentSuperposition::ket(int d) const {
  CVector v = CVector::Zero(d);
  for (const auto& t : terms) v += t.c * coherent_truncated(t.alpha, d);
  return v;
}

double CoherentSuperposition::full_norm2() const {
  Complex s = 0.0;
  for (const auto& a : terms)
    for (const auto& b : terms) s += std::conj(a.c) * b.c * coherent_overlap(a.alpha, b.alpha);
  return s.real();
}

namespace {

constexpr double kMinNorm2 = 1e-12;

double cost_impl(const CoherentSuperposition& sup, const CVector& target, bool aligned) {
  if (target.size() != sup.dim) throw Error(ErrorCode::InvalidDimension, "superposition_cost: target dimension");
  const CVector v = sup.ket();
  const double n2 = v.squaredNorm();
  if (!(n2 > kMinNorm2)) throw Error(ErrorCode::InvalidArgument, "superposition_cost: superposition norm is ~0");
  const Complex ov = target.dot(v);  // <psi|psi~>
  const double overlap = aligned ? std::abs(ov) : ov.real();
  const double dist = std::max(0.0, 2.0 - 2.0 * overlap / std::sqrt(n2));
  return dist / n2;
}

struct Objective {
  const CVector* target;
  int s;
  int d;
};

CoherentSuperposition unpack(const double* x, int s, int d) {
  CoherentSuperposition sup;
  sup.dim = d;
  for (int k = 0; k < s; ++k) sup.terms.push_back({Complex(x[4 * k], x[4 * k + 1]), Complex(x[4 * k + 2], x[4 * k + 3])});
  const double n2 = sup.full_norm2();
  if (n2 > kMinNorm2) {
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& t : sup.terms) t.c *= scale;
  }
  return sup;
}

double objective(const gsl_vector* x, void* params) {
  const auto* p = static_cast<const Objective*>(params);
  const CoherentSuperposition sup = unpack(x->data, p->s, p->d);
  if (!(sup.full_norm2() > 0.5)) return 1e6;
  const CVector v = sup.ket();
  if (!(v.squaredNorm() > kMinNorm2)) return 1e6;
  return cost_impl(sup, *p->target, true);
}

}  // namespace

double superposition_cost(const CoherentSuperposition& sup, const CVector& target) { return cost_impl(sup, target, true); }

double superposition_cost_unaligned(const CoherentSuperposition& sup, const CVector& target) {
  return cost_impl(sup, target, false);
}

OptimizedSuperposition optimize_superposition(const CVector& target, int s, int starts, std::uint64_t seed, int max_iters) {
  if (s < 1 || starts < 1) throw Error(ErrorCode::InvalidArgument, "optimize_superposition: need s >= 1 and starts >= 1");
  const int d = static_cast<int>(target.size());
  const CVector psi = target / target.norm();
  Objective obj{&psi, s, d};
  const int dim = 4 * s;

  gsl_set_error_handler_off();
  gsl_multimin_fminimizer* mz = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, static_cast<std::size_t>(dim));
  gsl_vector* x = gsl_vector_alloc(static_cast<std::size_t>(dim));
  gsl_vector* step = gsl_vector_alloc(static_cast<std::size_t>(dim));
  gsl_vector_set_all(step, 0.3);
  gsl_multimin_function fn{&objective, static_cast<std::size_t>(dim), &obj};

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_x(static_cast<std::size_t>(dim));
  for (int st = 0; st < starts; ++st) {
    Rng rng(seed, static_cast<std::uint64_t>(st));
    for (int k = 0; k < s; ++k) {
      const double rc = std::sqrt(rng.uniform()), tc = 2.0 * M_PI * rng.uniform();
      const double ra = 2.0 * std::sqrt(rng.uniform()), ta = 2.0 * M_PI * rng.uniform();
      gsl_vector_set(x, static_cast<std::size_t>(4 * k), rc * std::cos(tc));
      gsl_vector_set(x, static_cast<std::size_t>(4 * k + 1), rc * std::sin(tc));
      gsl_vector_set(x, static_cast<std::size_t>(4 * k + 2), ra * std::cos(ta));
      gsl_vector_set(x, static_cast<std::size_t>(4 * k + 3), ra * std::sin(ta));
    }
    gsl_multimin_fminimizer_set(mz, &fn, x, step);
    for (int it = 0; it < max_iters; ++it) {
      if (gsl_multimin_fminimizer_iterate(mz) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(mz), 1e-10) == GSL_SUCCESS) break;
    }
    const double f = gsl_multimin_fminimizer_minimum(mz);
    if (f < best) {
      best = f;
      const gsl_vector* xm = gsl_multimin_fminimizer_x(mz);
      for (int i = 0; i < dim; ++i) best_x[static_cast<std::size_t>(i)] = gsl_vector_get(xm, static_cast<std::size_t>(i));
    }
  }
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(mz);

  OptimizedSuperposition out;
  out.sup = unpack(best_x.data(), s, d);
  out.cost = superposition_cost(out.sup, psi);
  const double kept = out.sup.ket(d).squaredNorm();
  const double wide = out.sup.ket(d + kTailLevels).squaredNorm();
  out.discarded_weight = 1.0 - kept / wide;
  out.flagged = out.discarded_weight >= kDiscardFlag;
  return out;
}

double fock_coherent_infidelity_at(int n, double alpha_sq) {
  if (n < 0 || alpha_sq < 0) throw Error(ErrorCode::InvalidArgument, "fock_coherent_infidelity: n and |alpha|^2 must be >= 0");
  if (alpha_sq == 0.0) return n == 0 ? 0.0 : 1.0;
  // |<n|alpha>|^2 = e^{-a} a^n / n!
  const double logp = -alpha_sq + n * std::log(alpha_sq) - std::lgamma(n + 1.0);
  return 1.0 - std::exp(logp);
}

FockCoherent fock_coherent_infidelity(int n) {
  const double a = static_cast<double>(n);
  return {a, fock_coherent_infidelity_at(n, a)};
}

SuperposedSet superposed_probe_set(const ProbeSet& targets, int s, int starts, std::uint64_t seed, int max_iters,
                                   int workers) {
  SuperposedSet out;
  out.terms.resize(targets.size());
  detail::parallel_for(targets.size(), workers, [&](std::size_t j) {
    const SpectralDecomposition sd = spectral_decomp(targets[j].op());
    out.terms[j] = optimize_superposition(sd.vectors.col(0), s, starts, stream_id(seed, j), max_iters);
  });
  std::vector<DensityMatrix> states;
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    states.push_back(DensityMatrix::pure(out.terms[j].sup.ket()));
    labels.push_back(std::to_string(s) + "-coh:" + targets.labels()[j]);
    if (out.terms[j].flagged) ++out.flagged;
  }
  out.set = ProbeSet(std::move(states), labels);
  return out;
}

ProbeSet random_coherent_set(int m, int d, int s, Rng& rng) {
  std::vector<CVector> kets;
  std::vector<std::string> labels;
  for (int j = 0; j < m; ++j) {
    CoherentSuperposition sup;
    sup.dim = d;
    for (int k = 0; k < s; ++k) {
      const double rc = std::sqrt(rng.uniform()), tc = 2.0 * M_PI * rng.uniform();
      const double ra = 2.0 * std::sqrt(rng.uniform()), ta = 2.0 * M_PI * rng.uniform();
      sup.terms.push_back({std::polar(rc, tc), std::polar(ra, ta)});
    }
    CVector v = sup.ket();
    if (v.norm() < 1e-12) v = coherent_truncated(0.0, d);
    kets.push_back(v);
    labels.push_back(std::to_string(s) + "-coh-rand" + std::to_string(j));
  }
  return probe_set_from_kets(kets, labels);
}

}  // namespace qdt
