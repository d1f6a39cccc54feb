#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nmr/trace.hpp"

namespace nmr {

// Trace-based mechanical verification. Checkers are pure functions of the
// trace: they evaluate the whole log, record violations with timestamps,
// and pass iff every violation falls strictly before the declared
// stabilization prefix.
//
// "In CS" means an ENTER_CS..EXIT_CS interval, or for robot protocols the
// LOOK..COMPUTE span. Trying sections are empty in every implemented
// protocol, so rendezvous tests CS-freedom only.

struct Violation {
  double time = 0.0;
  std::vector<int> subjects;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

struct Verdict {
  bool pass = true;
  std::vector<Violation> violations;        // sample, capped
  std::size_t violation_count = 0;          // violations at time >= prefix
  std::size_t prefix_violation_count = 0;   // violations before the prefix
  std::size_t checks = 0;                   // assertions evaluated post-prefix
  std::optional<double> stabilization_time;

  bool operator==(const Verdict&) const = default;
};

/// At every CS-entry instant, no closed neighborhood holds more than l
/// members in CS. Requires GRAPH events (InputError otherwise).
Verdict check_l_exclusion(const Trace& trace, int l, double prefix = 0.0);

struct FairnessOptions {
  double prefix = 0.0;
  /// Per-subject window, in that subject's own pulses: every window of
  /// window_pulses[i] consecutive pulses must contain a CS entry.
  std::vector<long> window_pulses;
};
Verdict check_global_fairness(const Trace& trace, const FairnessOptions& options);

/// For every subject i, every window of |N[i]|+1 consecutive pulses (on the
/// global pulse grid) contains a pulse at which no member of N[i] is in CS.
Verdict check_local_rendezvous(const Trace& trace, double prefix = 0.0);

/// No MOVE interval of r_i may overlap a LOOK/COMPUTE span of any member of
/// N[i]; N[i] is anchored at the GRAPH in effect when the MOVE was issued.
/// Unbalanced MOVE intervals are an InputError.
Verdict check_move_atomic(const Trace& trace, double prefix = 0.0);

struct FsyncOptions {
  double prefix = 0.0;
  /// When set, every LOOK (resp. MOVE) must occur at this just-written light.
  std::optional<int> look_light;
  std::optional<int> move_light;
  /// Strict mode demands exactly one phase execution per robot per period.
  /// A stale regular-register read can stall a robot's clock at the phase
  /// value, making it act twice in one period; this switch tolerates such
  /// repeats (each robot acts at least once, never a conflicting phase).
  bool allow_stalled_repeats = false;
};
/// Post-prefix, the timeline must split into alternating LOOK+COMPUTE and
/// MOVE periods in which every robot acts exactly once, with no cross-phase
/// overlap. Boundary periods (first/last) are skipped as possibly cut off.
Verdict check_fsync(const Trace& trace, const FsyncOptions& options);

struct AgreementOptions {
  double prefix = 0.0;
  int modulus = 0;  // light values live in 0..modulus-1, cyclic
};
/// After every post-prefix light write, adjacent robots' lights differ by at
/// most one step in the cyclic order.
Verdict check_agreement(const Trace& trace, const AgreementOptions& options);

struct RecurrenceOptions {
  double prefix = 0.0;
  /// Per-subject window in own pulses; every window must contain >= 1 LOOK,
  /// >= 1 COMPUTE and >= 1 MOVE.
  std::vector<long> window_pulses;
};
Verdict check_phase_recurrence(const Trace& trace,
                               const RecurrenceOptions& options);

using CheckerFn = std::function<Verdict(const Trace&, double prefix)>;

/// Earliest pulse-aligned time t such that the checker passes, with at
/// least one assertion evaluated, on the suffix from t. nullopt = never.
std::optional<double> measure_stabilization(const Trace& trace,
                                            const CheckerFn& checker);

std::vector<long> uniform_windows(const Trace& trace, long window);

}  // namespace nmr
