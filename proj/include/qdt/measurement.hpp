#pragma once

#include <cstdint>
#include <vector>

#include "qdt/probe_sets.hpp"

namespace qdt {

/// Shot budget spread over a probe set. When M does not divide N the first
/// N mod M probes receive one extra shot.
struct MeasurementPlan {
  MeasurementPlan(ProbeSet set, std::uint64_t total_shots);

  ProbeSet probe_set;
  std::uint64_t total_shots;
  std::vector<std::uint64_t> allocation;
};

struct FrequencyData {
  RMatrix freqs;                       // n x M
  std::vector<std::uint64_t> shots;    // per probe; empty when exact
  bool exact = false;                  // infinite-shot limit
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// entry (i, j) = Tr(P_i rho_j), clipped to [0, 1].
RMatrix born_matrix(const Povm& povm, const ProbeSet& set);

/// One multinomial draw per probe via sequential binomial conditioning. Probe j
/// uses the sub-stream rng.split(j), so results do not depend on evaluation order.
FrequencyData sample_frequencies(const Povm& povm, const MeasurementPlan& plan, const Rng& rng);
FrequencyData sample_frequencies(const Povm& povm, const MeasurementPlan& plan, std::uint64_t seed);

FrequencyData exact_frequencies(const Povm& povm, const ProbeSet& set);

}  // namespace qdt
