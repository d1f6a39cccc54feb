#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nmr/checkers.hpp"
#include "nmr/nmr.hpp"
#include "nmr/world.hpp"

namespace nmr {

enum class ProtocolId { kNmr, kMoveAtomicGlobal, kMoveAtomicLocal, kFsync };
std::string_view to_string(ProtocolId protocol);

struct GraphSpec {
  // generator in {path, cycle, star, complete, random-connected}, or an
  // explicit edge list.
  std::string generator;
  int k = 0;
  std::vector<std::pair<int, int>> edges;
  bool explicit_edges = false;

  Graph build(std::uint64_t seed) const;
};

struct InitSpec {
  enum class Mode { kZeros, kAdversarial, kExplicit, kEnumerateAll };
  Mode mode = Mode::kZeros;
  std::vector<int> clocks;  // explicit NMR clocks
};

struct PositionsSpec {
  enum class Mode { kExplicit, kBox };
  Mode mode = Mode::kExplicit;
  std::vector<Point2D> points;
  int k = 0;          // box mode robot count
  double box = 2.0;   // box side length
};

struct ScheduleSpec {
  enum class Mode { kGlobal, kLocal, kLocalRandom };
  Mode mode = Mode::kGlobal;
  std::vector<double> offsets;
};

struct AdversarySpec {
  enum class Stops { kZero, kSeeded, kConstant };
  Stops stops = Stops::kZero;
  double stop_constant = 0.0;
  enum class Reads { kSeeded, kOld, kNew };
  Reads reads = Reads::kSeeded;
};

struct CheckerSpec {
  std::string id;  // l-exclusion | fairness | rendezvous | move-atomic |
                   // fsync | agreement | phase-recurrence
  std::optional<int> l;
  std::optional<long> window;        // fixed own-pulse window
  std::optional<long> window_coeff;  // window = coeff * clock wrap length
  std::optional<double> prefix;
  std::optional<bool> stall_tolerant;  // fsync periods tolerate clock stalls
};

struct Scenario {
  std::string name;
  ProtocolId protocol = ProtocolId::kNmr;
  GraphSpec graph;  // nmr only
  WorldConfig world;
  PositionsSpec positions;
  ScheduleSpec schedule;
  std::string algorithm = "centroid";
  int d_bound = 0;
  InitSpec init;
  long horizon = 0;
  std::vector<std::uint64_t> seeds{0};
  std::vector<CheckerSpec> checkers;  // defaults per protocol when empty
  AdversarySpec adversary;
  std::optional<double> prefix_override;
  std::optional<bool> measure;  // force stabilization measurement on/off
};

/// Parses the JSON scenario format (// comments allowed). InputError on any
/// malformed or out-of-domain field.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);

struct CheckOutcome {
  std::string id;
  double prefix = 0.0;
  Verdict verdict;
  std::optional<double> measured_stabilization;

  bool operator==(const CheckOutcome&) const = default;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::string label;
  bool pass = true;
  std::size_t event_count = 0;
  double prefix = 0.0;
  int maxn_bound = 0;
  std::optional<long> maxn_stabilization_pulse;  // nmr
  std::optional<double> stabilization;  // max over measured checker values
  std::vector<CheckOutcome> outcomes;
};

struct RunArtifacts {
  RunSummary summary;
  Trace trace;
};

/// One deterministic run: build the instance for `seed`, simulate, check.
RunArtifacts run_scenario_once(const Scenario& scenario, std::uint64_t seed,
                               bool measure_stabilization_times = true);

struct SweepReport {
  long runs = 0;
  long passed = 0;
  std::vector<RunSummary> summaries;       // in input order
  std::vector<RunArtifacts> failures;      // capped sample with traces
  std::optional<double> stabilization_max;
  std::optional<double> stabilization_mean;

  bool all_pass() const { return runs > 0 && passed == runs; }
  double pass_rate() const {
    return runs == 0 ? 0.0 : static_cast<double>(passed) / runs;
  }
};

/// Runs every seed independently (jobs > 1 uses threads; the report is a
/// pure function of the inputs either way).
SweepReport sweep_scenario(const Scenario& scenario,
                           const std::vector<std::uint64_t>& seeds,
                           int jobs = 1);

/// init.mode == kEnumerateAll: every initial configuration in the enumerated
/// space. Stabilization measurement defaults off at this scale.
SweepReport run_enumerate_all(const Scenario& scenario);

/// Cheap structural measurement: first pulse index from which every MaxN
/// equals its stabilized value (0, 1 or 2; never more by construction).
long maxn_stabilization_pulse(const Graph& g, const NmrConfiguration& initial);

}  // namespace nmr
