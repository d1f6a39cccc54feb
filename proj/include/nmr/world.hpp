#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmr/topology.hpp"
#include "nmr/trace.hpp"

namespace nmr {

/// Robot substrate parameters. The pulse period is the time unit: phases
/// triggered at a pulse finish strictly before that robot's next pulse.
struct WorldConfig {
  int k = 0;           // robot count
  double phi = 1.0;    // visibility radius
  double y_cap = 0.2;  // max movement per time unit, y_cap < phi
  double sigma = 0.05; // minimum guaranteed progress per MOVE

  // LOOK and COMPUTE use neighbors up to phi - y_cap; a robot beyond phi
  // cannot penetrate that zone within one time unit.
  double look_radius() const { return phi - y_cap; }
  void validate() const;
};

struct PulseSchedule {
  enum class Mode { kGlobal, kLocal };

  Mode mode = Mode::kGlobal;
  std::vector<double> offsets;  // per robot, in [0, 1); all zero in GLOBAL

  static PulseSchedule global(int k);
  /// Offsets must lie in [0, 1); duplicates are perturbed deterministically
  /// from `perturb_seed` until pairwise distinct.
  static PulseSchedule local(std::vector<double> offsets,
                             std::uint64_t perturb_seed = 0);
  static PulseSchedule local_random(int k, std::uint64_t seed);
};

struct PulseEvent {
  double time = 0.0;
  int robot = 0;
};

/// Robot i pulses at offset_i, offset_i+1, ..., offset_i+horizon-1, merged
/// and sorted by (time, robot).
std::vector<PulseEvent> pulse_sequence(const PulseSchedule& schedule,
                                       long horizon);

/// Alg-3 clock display: value v shown as (v/3).(v%3).
struct TripledLight {
  int major = 0;
  int minor = 0;

  static TripledLight from_value(int value) { return {value / 3, value % 3}; }
  int value() const { return 3 * major + minor; }
  std::string to_string() const;
};

struct SnapshotEntry {
  Point2D offset;  // relative to the observer
  int nlight = 1;
  int light = 0;
  int user_color = 0;
};

/// Instantaneous LOOK observation: robots within look_radius, excluding the
/// observer itself; distance ties are included.
struct Snapshot {
  std::vector<SnapshotEntry> robots;
};

struct ComputeResult {
  Point2D target;
  std::int64_t user_state = 0;
  int user_color = 0;
};

/// The user algorithm plugged into the LCM cycle. Must be deterministic.
class LcmAlgorithm {
 public:
  virtual ~LcmAlgorithm() = default;
  virtual std::string_view name() const = 0;
  virtual ComputeResult compute(const Snapshot& snapshot, Point2D self,
                                std::int64_t user_state) const = 0;
};

/// Test fixtures: "stay", "centroid", "step-east".
std::unique_ptr<LcmAlgorithm> make_algorithm(std::string_view name,
                                             const WorldConfig& world);

struct RobotState {
  Point2D position;
  int nlight = 1;   // exposed |N[i]|, 1..k
  int light = 0;    // protocol clock light (raw value)
  int max_n = 1;    // 1..k
  bool lc = false;  // next operation is LOOK
  int clock = 0;    // Clock or Lclock, per protocol
  Point2D pending_target;       // buffered COMPUTE output, consumed by MOVE
  std::int64_t user_state = 0;  // opaque, owned by the user algorithm
  int user_color = 0;
};

/// Adversary input: how far along min(d, y_cap) a MOVE actually travels,
/// in [0, 1]; the sigma floor still applies.
using StopFractionFn = std::function<double(int robot, long move_index)>;
/// Regular-register adversary: true picks the value from before the
/// overlapping write. Indexed by the reader's own pulse ordinal so scripts
/// stay aligned regardless of whether a given read overlaps a write.
using RegisterChoiceFn =
    std::function<bool(int reader, int readee, long reader_pulse)>;

StopFractionFn zero_stop_fractions();
StopFractionFn constant_stop_fractions(double fraction);
StopFractionFn seeded_stop_fractions(std::uint64_t seed);
RegisterChoiceFn constant_register_choices(bool take_old);
RegisterChoiceFn seeded_register_choices(std::uint64_t seed);

struct MovePlan {
  Point2D destination;
  double traveled = 0.0;
  double duration = 0.0;  // strictly below one time unit
};

/// Movement rule for one MOVE phase: straight toward the target, capped at
/// y_cap, guaranteed progress sigma, and an adversary stop anywhere past
/// that; a target within sigma is always reached exactly.
MovePlan plan_move(const WorldConfig& world, Point2D from, Point2D target,
                   double stop_fraction);

enum class RobotProtocol { kMoveAtomicGlobal, kMoveAtomicLocal, kFsync };

std::string_view to_string(RobotProtocol protocol);

/// Raw light domain size: k+1 (global move-atomic), 3k+3 (local
/// move-atomic), 6D+1 (fsync).
int light_domain_size(RobotProtocol protocol, int k, int d_bound);
int clock_domain_size(RobotProtocol protocol, int k, int d_bound);

std::vector<RobotState> zeroed_robot_init(const std::vector<Point2D>& positions);
/// Lights, clocks, LC, Nlight and MaxN drawn uniformly from their declared
/// domains; deterministic per seed.
std::vector<RobotState> adversarial_robot_init(RobotProtocol protocol,
                                               const WorldConfig& world,
                                               const std::vector<Point2D>& positions,
                                               int d_bound,
                                               std::uint64_t seed);

/// Exhaustive (light, clock, LC) per-robot sweep for tiny instances. With
/// `clocks_and_lc_only`, lights start coupled to clocks and only
/// (clock, LC) vary, which keeps k=3 sweeps at desk scale.
class RobotInitEnumerator {
 public:
  RobotInitEnumerator(RobotProtocol protocol, const WorldConfig& world,
                      std::vector<Point2D> positions, int d_bound,
                      bool clocks_and_lc_only = false);
  std::optional<std::vector<RobotState>> next();
  long total() const { return total_; }

 private:
  RobotProtocol protocol_;
  std::vector<Point2D> positions_;
  std::vector<long> digits_;
  long per_robot_ = 0;
  long total_ = 0;
  bool coupled_ = false;
  bool done_ = false;
  int light_domain_ = 0;
  int clock_domain_ = 0;
};

struct RobotEngineOptions {
  bool record_trace = true;
  /// Recompute the visibility graph at every pulse. Fsync scenarios default
  /// to a static graph (computed once from the initial positions).
  bool dynamic_graph = true;
};

/// Deterministic single-run engine: replays the pulse sequence and applies
/// the protocol step at each pulse. Light and Nlight writes are timestamped
/// at the pulse instant; point reads return the value most recently written
/// strictly before the read, which under global pulses is exactly the
/// previous round's value.
class RobotEngine {
 public:
  RobotEngine(RobotProtocol protocol, WorldConfig world, PulseSchedule schedule,
              std::vector<RobotState> initial,
              std::unique_ptr<const LcmAlgorithm> algorithm,
              int d_bound = 0,
              StopFractionFn stop_fractions = zero_stop_fractions(),
              RegisterChoiceFn register_choices = constant_register_choices(false),
              RobotEngineOptions options = {});
  ~RobotEngine();
  RobotEngine(const RobotEngine&) = delete;
  RobotEngine& operator=(const RobotEngine&) = delete;

  using PulseHook = std::function<void(const RobotEngine&, const PulseEvent&)>;
  /// Runs `horizon` time units (one-shot). The hook, when given, fires after
  /// each processed pulse.
  void run(long horizon, const PulseHook& hook = nullptr);

  const WorldConfig& world() const { return world_; }
  const PulseSchedule& schedule() const { return schedule_; }
  const std::vector<RobotState>& states() const { return states_; }
  const RobotState& state(int i) const { return states_.at(i); }
  /// Position with linear interpolation inside a MOVE window.
  Point2D position_at(int i, double time) const;
  /// Instantaneous snapshot of robots within look_radius of robot i.
  Snapshot look(int i, double time) const;
  Graph visibility_graph(double time) const;
  /// Max MaxN value any robot held at any pulse of the run.
  int maxn_bound() const { return maxn_bound_; }
  long pulse_count(int i) const { return pulse_counts_.at(i); }

  const Trace& trace() const { return trace_; }
  /// Sorts by time and moves the trace out.
  Trace take_trace();

 private:
  struct Cell {
    int prev = 0;
    double prev_time = 0.0;
    int curr = 0;
    double curr_time = 0.0;
  };
  struct MoveRecord {
    double start = 0.0;
    double end = 0.0;
    Point2D from;
    Point2D to;
  };

  void process_pulse(const PulseEvent& pulse);
  void step_move_atomic_global(int robot, double now);
  void step_move_atomic_local(int robot, double now);
  void step_fsync(int robot, double now);
  const Graph& graph_at(double now);
  void do_move(int robot, double now);
  void do_look_compute(int robot, double now);
  int read_point(const Cell& cell, double now) const;
  int read_regular(int reader, int readee, double now);
  void write_cell(Cell& cell, double now, int value);
  void emit(TraceEvent event);

  RobotProtocol protocol_;
  WorldConfig world_;
  PulseSchedule schedule_;
  std::vector<RobotState> states_;
  std::unique_ptr<const LcmAlgorithm> algorithm_;
  int d_bound_ = 0;
  StopFractionFn stop_fractions_;
  RegisterChoiceFn register_choices_;
  RobotEngineOptions options_;

  std::vector<Cell> light_cells_;
  std::vector<Cell> nlight_cells_;
  std::vector<Cell> color_cells_;
  std::vector<MoveRecord> moves_;
  std::vector<long> move_counts_;
  std::vector<long> pulse_counts_;
  std::optional<Graph> cached_graph_;
  double cached_graph_time_ = 0.0;
  double last_graph_emit_time_ = -1.0;
  Trace trace_;
  int maxn_bound_ = 0;
  bool ran_ = false;
};

}  // namespace nmr
