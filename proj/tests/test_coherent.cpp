#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qdt/coherent.hpp"
#include "qdt/text_io.hpp"

using namespace qdt;

TEST(Coherent, TruncatedKetAndOverlap) {
  const Complex a(0.7, -0.4), b(-0.3, 0.9);
  EXPECT_NEAR(coherent_truncated(a, 40).squaredNorm(), 1.0, 1e-14);
  EXPECT_NEAR(std::norm(coherent_overlap(b, a)), std::exp(-std::norm(a - b)), 1e-14);
  EXPECT_NEAR(std::abs(coherent_truncated(b, 40).dot(coherent_truncated(a, 40)) - coherent_overlap(b, a)), 0.0, 1e-13);
}

TEST(Coherent, CostNonNegativeAndZeroOnTarget) {
  Rng rng(61);
  for (int t = 0; t < 500; ++t) {
    CoherentSuperposition sup;
    sup.dim = 4;
    const int s = 1 + t % 3;
    for (int k = 0; k < s; ++k) sup.terms.push_back({Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal())});
    const CVector target = haar_random_ket(4, rng);
    if (sup.ket().squaredNorm() < 1e-10) continue;
    const double c = superposition_cost(sup, target);
    EXPECT_GE(c, 0.0);
    EXPECT_LE(c, superposition_cost_unaligned(sup, target) + 1e-12);
    const CVector self = sup.ket() / sup.ket().norm();
    EXPECT_NEAR(superposition_cost(sup, self), 0.0, 1e-12);
    // a global phase on the target changes only the unaligned cost
    EXPECT_NEAR(superposition_cost(sup, Complex(0, 1) * target), c, 1e-12);
  }
}

TEST(Coherent, FockValues) {
  const double want[] = {0.0, 0.6321, 0.7293};
  for (int n = 0; n < 3; ++n) {
    const auto f = fock_coherent_infidelity(n);
    EXPECT_NEAR(f.infidelity, want[n], 1e-3);
    EXPECT_NEAR(f.infidelity, oracle::fock_infidelity(n), 1e-14);
    EXPECT_EQ(f.alpha_sq, n);
  }
  for (int n = 1; n < 6; ++n) {
    const double best = fock_coherent_infidelity_at(n, n);
    EXPECT_LT(best, fock_coherent_infidelity_at(n, n * 0.95));
    EXPECT_LT(best, fock_coherent_infidelity_at(n, n * 1.05));
  }
  EXPECT_THROW(fock_coherent_infidelity(-1), Error);
}

TEST(Coherent, VacuumIsExact) {
  const auto r = optimize_superposition(CVector::Unit(4, 0), 1, 5, 3);
  EXPECT_LT(r.cost, 1e-10);
  EXPECT_LT(std::abs(r.sup.terms[0].alpha), 1e-4);
  EXPECT_NEAR(r.sup.full_norm2(), 1.0, 1e-12);
  EXPECT_FALSE(r.flagged);
}

TEST(Coherent, MoreTermsFitBetter) {
  const CVector target = CVector::Unit(4, 2);
  const double c1 = optimize_superposition(target, 1, 10, 4).cost;
  const double c2 = optimize_superposition(target, 2, 10, 4).cost;
  const double c3 = optimize_superposition(target, 3, 10, 4).cost;
  EXPECT_LT(c2, c1);
  EXPECT_LE(c3, c2 + 1e-9);
}

TEST(Coherent, OptimizerIsDeterministic) {
  Rng rng(62);
  const CVector target = haar_random_ket(4, rng);
  const auto a = optimize_superposition(target, 2, 6, 99), b = optimize_superposition(target, 2, 6, 99);
  std::ostringstream sa, sb;
  write_superposition_csv(sa, a.sup, 99);
  write_superposition_csv(sb, b.sup, 99);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_NE(sa.str().find("schema=qdt.superposition.v1 seed=99"), std::string::npos);
}

TEST(Coherent, SuperposedSetIndependentOfWorkers) {
  const auto a = superposed_probe_set(sic_states_d2(), 1, 3, 8, 4000, 1);
  const auto b = superposed_probe_set(sic_states_d2(), 1, 3, 8, 4000, 3);
  ASSERT_EQ(a.set.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(a.set[j].matrix(), b.set[j].matrix());
    EXPECT_NEAR(a.set[j].purity(), 1.0, 1e-10);
  }
}

TEST(Coherent, RandomSetIsPure) {
  Rng rng(63);
  const auto set = random_coherent_set(12, 4, 2, rng);
  ASSERT_EQ(set.size(), 12u);
  for (const auto& s : set.states()) EXPECT_NEAR(s.purity(), 1.0, 1e-10);
}
