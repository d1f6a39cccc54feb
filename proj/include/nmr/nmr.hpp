#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nmr/topology.hpp"
#include "nmr/trace.hpp"

namespace nmr {

// Self-stabilizing neighborhood mutual remainder on a static connected graph
// under synchronous global pulses. Each process publishes |N[i]|, tracks the
// max over its closed neighborhood, and cycles a clock modulo that max plus
// one; clock value 1 is the critical section.

struct NmrProcessState {
  int n_published = 1;  // exposed |N[i]|, 1..k
  int max_n = 1;        // max closed-neighborhood |N[j]| seen, 1..k
  int clock = 0;        // 0..k; post-stabilization 0..max_n

  bool operator==(const NmrProcessState&) const = default;
};

struct NmrConfiguration {
  std::vector<NmrProcessState> states;
  long pulse = 0;  // how many pulses this configuration has absorbed

  bool operator==(const NmrConfiguration&) const = default;
};

enum class Section { kCritical, kRemainder };

struct NmrStepResult {
  NmrConfiguration config;
  std::vector<Section> section;
  // For remainder processes: true when no closed-neighborhood clock is 1.
  // Always false for critical processes.
  std::vector<bool> rendezvous;
};

/// Value MaxN_i converges to: max closed-neighborhood size over N[i].
int stabilized_max_n(const Graph& g, int i);

/// One synchronous pulse. Every process reads its neighbors' states as of
/// the end of the previous pulse, so the returned configuration is a pure
/// function of (g, config).
NmrStepResult nmr_step(const Graph& g, const NmrConfiguration& config);

/// Applies nmr_step `horizon` times (horizon >= 1), logging PULSE, GRAPH,
/// ENTER_CS/EXIT_CS and RENDEZVOUS events. Pulse p has timestamp p, p >= 1.
Trace run_nmr(const Graph& g, const NmrConfiguration& initial, long horizon);

/// Clock 0, n_published = max_n = 1 everywhere.
NmrConfiguration zeros_nmr_init(const Graph& g);

NmrConfiguration explicit_nmr_init(const Graph& g,
                                   const std::vector<int>& clocks);

/// Every field drawn uniformly from its domain (n_published, max_n in 1..k;
/// clock in 0..k). Deterministic per seed.
NmrConfiguration adversarial_nmr_init(const Graph& g, std::uint64_t seed);

void validate_nmr_configuration(const Graph& g, const NmrConfiguration& c);

/// Iterates every clock vector in {0..k}^k with n_published/max_n held at
/// valid values, for exhaustive small-graph sweeps.
class NmrClockEnumerator {
 public:
  explicit NmrClockEnumerator(const Graph& g);
  std::optional<NmrConfiguration> next();
  long total() const { return total_; }

 private:
  const Graph& graph_;
  std::vector<int> clocks_;
  long total_ = 0;
  bool done_ = false;
};

}  // namespace nmr
