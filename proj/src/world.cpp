#include "nmr/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "nmr/rand.hpp"

namespace nmr {

namespace {

// MOVE occupies at most this fraction of the inter-pulse gap, so MOVE_END
// always lands strictly before the robot's next pulse.
constexpr double kMoveWindow = 0.9;
// COMPUTE is logged this far after its LOOK; the pair forms the CS span.
constexpr double kComputeOffset = 0.125;
constexpr double kBeforeEverything = -1.0e300;

}  // namespace

void WorldConfig::validate() const {
  if (k < 1) throw InputError("world needs at least one robot");
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (!(y_cap > 0.0) || !(y_cap < phi))
    throw InputError("need 0 < y_cap < phi");
  // A MOVE must achieve sigma within one time unit whose travel cap is y_cap.
  if (!(sigma <= y_cap)) throw InputError("need sigma <= y_cap");
  if (!std::isfinite(phi) || !std::isfinite(y_cap) || !std::isfinite(sigma))
    throw InputError("world parameters must be finite");
}

PulseSchedule PulseSchedule::global(int k) {
  if (k < 1) throw InputError("schedule needs at least one robot");
  PulseSchedule schedule;
  schedule.mode = Mode::kGlobal;
  schedule.offsets.assign(k, 0.0);
  return schedule;
}

PulseSchedule PulseSchedule::local(std::vector<double> offsets,
                                   std::uint64_t perturb_seed) {
  if (offsets.empty()) throw InputError("schedule needs at least one robot");
  for (double o : offsets)
    if (!std::isfinite(o) || o < 0.0 || o >= 1.0)
      throw InputError("local pulse offsets must lie in [0, 1)");
  Rng rng(mix_seed(perturb_seed, 0x6f6666736574ULL));
  auto distinct = [&offsets] {
    std::set<double> seen(offsets.begin(), offsets.end());
    return seen.size() == offsets.size();
  };
  while (!distinct()) {
    std::set<double> seen;
    for (double& o : offsets) {
      if (!seen.insert(o).second)
        o = std::fmod(o + (1.0 + rng.below(997)) * 1e-4, 1.0);
      else
        seen.insert(o);
    }
  }
  PulseSchedule schedule;
  schedule.mode = Mode::kLocal;
  schedule.offsets = std::move(offsets);
  return schedule;
}

PulseSchedule PulseSchedule::local_random(int k, std::uint64_t seed) {
  if (k < 1) throw InputError("schedule needs at least one robot");
  Rng rng(mix_seed(seed, 0x70756c7365ULL));
  std::vector<double> offsets(k);
  for (double& o : offsets) o = rng.unit();
  return local(std::move(offsets), seed);
}

std::vector<PulseEvent> pulse_sequence(const PulseSchedule& schedule,
                                       long horizon) {
  if (horizon < 1) throw InputError("horizon must be >= 1");
  std::vector<PulseEvent> events;
  events.reserve(static_cast<std::size_t>(horizon) * schedule.offsets.size());
  for (long n = 0; n < horizon; ++n)
    for (int i = 0; i < static_cast<int>(schedule.offsets.size()); ++i)
      events.push_back({schedule.offsets[i] + static_cast<double>(n), i});
  std::sort(events.begin(), events.end(),
            [](const PulseEvent& a, const PulseEvent& b) {
              if (a.time != b.time) return a.time < b.time;
              return a.robot < b.robot;
            });
  return events;
}

std::string TripledLight::to_string() const {
  return std::to_string(major) + "." + std::to_string(minor);
}

namespace {

class StayAlgorithm final : public LcmAlgorithm {
 public:
  std::string_view name() const override { return "stay"; }
  ComputeResult compute(const Snapshot&, Point2D self,
                        std::int64_t user_state) const override {
    return {self, user_state, 0};
  }
};

class CentroidAlgorithm final : public LcmAlgorithm {
 public:
  std::string_view name() const override { return "centroid"; }
  ComputeResult compute(const Snapshot& snapshot, Point2D self,
                        std::int64_t user_state) const override {
    if (snapshot.robots.empty()) return {self, user_state, 0};
    double sx = 0.0, sy = 0.0;
    for (const auto& entry : snapshot.robots) {
      sx += entry.offset.x;
      sy += entry.offset.y;
    }
    const double n = static_cast<double>(snapshot.robots.size());
    return {{self.x + sx / n, self.y + sy / n}, user_state, 0};
  }
};

class StepEastAlgorithm final : public LcmAlgorithm {
 public:
  explicit StepEastAlgorithm(double step) : step_(step) {}
  std::string_view name() const override { return "step-east"; }
  ComputeResult compute(const Snapshot&, Point2D self,
                        std::int64_t user_state) const override {
    return {{self.x + step_, self.y}, user_state, 0};
  }

 private:
  double step_;
};

}  // namespace

std::unique_ptr<LcmAlgorithm> make_algorithm(std::string_view name,
                                             const WorldConfig& world) {
  if (name == "stay") return std::make_unique<StayAlgorithm>();
  if (name == "centroid") return std::make_unique<CentroidAlgorithm>();
  if (name == "step-east")
    return std::make_unique<StepEastAlgorithm>(world.y_cap / 2.0);
  throw InputError("unknown algorithm: " + std::string(name));
}

StopFractionFn zero_stop_fractions() {
  return [](int, long) { return 0.0; };
}

StopFractionFn constant_stop_fractions(double fraction) {
  if (fraction < 0.0 || fraction > 1.0)
    throw InputError("stop fraction outside [0, 1]");
  return [fraction](int, long) { return fraction; };
}

StopFractionFn seeded_stop_fractions(std::uint64_t seed) {
  return [seed](int robot, long move_index) {
    const std::uint64_t h =
        mix_seed(seed, 0x73746f70ULL + static_cast<std::uint64_t>(robot) * 0x1000003ULL +
                           static_cast<std::uint64_t>(move_index));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  };
}

RegisterChoiceFn constant_register_choices(bool take_old) {
  return [take_old](int, int, long) { return take_old; };
}

RegisterChoiceFn seeded_register_choices(std::uint64_t seed) {
  return [seed](int reader, int readee, long reader_pulse) {
    const std::uint64_t h =
        mix_seed(seed, 0x72656164ULL + static_cast<std::uint64_t>(reader) * 0x100000001b3ULL +
                           static_cast<std::uint64_t>(readee) * 0x1000193ULL +
                           static_cast<std::uint64_t>(reader_pulse));
    return (h & 1u) != 0;
  };
}

std::string_view to_string(RobotProtocol protocol) {
  switch (protocol) {
    case RobotProtocol::kMoveAtomicGlobal: return "move-atomic-global";
    case RobotProtocol::kMoveAtomicLocal: return "move-atomic-local";
    case RobotProtocol::kFsync: return "fsync";
  }
  return "unknown";
}

int light_domain_size(RobotProtocol protocol, int k, int d_bound) {
  switch (protocol) {
    case RobotProtocol::kMoveAtomicGlobal: return k + 1;
    case RobotProtocol::kMoveAtomicLocal: return 3 * k + 3;
    case RobotProtocol::kFsync: return 6 * d_bound + 1;
  }
  return 0;
}

int clock_domain_size(RobotProtocol protocol, int k, int d_bound) {
  return light_domain_size(protocol, k, d_bound);
}

std::vector<RobotState> zeroed_robot_init(
    const std::vector<Point2D>& positions) {
  std::vector<RobotState> states(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    states[i].position = positions[i];
    states[i].pending_target = positions[i];
  }
  return states;
}

std::vector<RobotState> adversarial_robot_init(
    RobotProtocol protocol, const WorldConfig& world,
    const std::vector<Point2D>& positions, int d_bound, std::uint64_t seed) {
  if (static_cast<int>(positions.size()) != world.k)
    throw InputError("positions size does not match robot count");
  Rng rng(mix_seed(seed, 0x696e6974ULL));
  const int lights = light_domain_size(protocol, world.k, d_bound);
  const int clocks = clock_domain_size(protocol, world.k, d_bound);
  auto states = zeroed_robot_init(positions);
  for (auto& st : states) {
    st.nlight = static_cast<int>(rng.between(1, world.k));
    st.max_n = static_cast<int>(rng.between(1, world.k));
    st.lc = rng.coin();
    st.light = static_cast<int>(rng.below(lights));
    st.clock = protocol == RobotProtocol::kFsync
                   ? st.light
                   : static_cast<int>(rng.below(clocks));
  }
  return states;
}

RobotInitEnumerator::RobotInitEnumerator(RobotProtocol protocol,
                                         const WorldConfig& world,
                                         std::vector<Point2D> positions,
                                         int d_bound, bool clocks_and_lc_only)
    : protocol_(protocol),
      positions_(std::move(positions)),
      coupled_(clocks_and_lc_only) {
  if (static_cast<int>(positions_.size()) != world.k)
    throw InputError("positions size does not match robot count");
  light_domain_ = light_domain_size(protocol, world.k, d_bound);
  clock_domain_ = clock_domain_size(protocol, world.k, d_bound);
  if (protocol == RobotProtocol::kFsync) {
    // The min-clock protocol has no LC and mirrors the clock in the light,
    // so the light value is the whole per-robot state space.
    per_robot_ = light_domain_;
  } else {
    per_robot_ = coupled_
                     ? clock_domain_ * 2L
                     : static_cast<long>(light_domain_) * clock_domain_ * 2L;
  }
  digits_.assign(positions_.size(), 0);
  total_ = 1;
  for (std::size_t i = 0; i < positions_.size(); ++i) total_ *= per_robot_;
}

std::optional<std::vector<RobotState>> RobotInitEnumerator::next() {
  if (done_) return std::nullopt;
  auto states = zeroed_robot_init(positions_);
  for (std::size_t i = 0; i < states.size(); ++i) {
    long code = digits_[i];
    auto& st = states[i];
    if (protocol_ == RobotProtocol::kFsync) {
      st.light = st.clock = static_cast<int>(code);
      continue;
    }
    st.lc = (code % 2) != 0;
    code /= 2;
    st.clock = static_cast<int>(code % clock_domain_);
    code /= clock_domain_;
    st.light = coupled_ ? st.clock : static_cast<int>(code % light_domain_);
  }
  std::size_t i = 0;
  for (; i < digits_.size(); ++i) {
    if (digits_[i] + 1 < per_robot_) {
      ++digits_[i];
      break;
    }
    digits_[i] = 0;
  }
  if (i == digits_.size()) done_ = true;
  return states;
}

RobotEngine::RobotEngine(RobotProtocol protocol, WorldConfig world,
                         PulseSchedule schedule,
                         std::vector<RobotState> initial,
                         std::unique_ptr<const LcmAlgorithm> algorithm,
                         int d_bound, StopFractionFn stop_fractions,
                         RegisterChoiceFn register_choices,
                         RobotEngineOptions options)
    : protocol_(protocol),
      world_(world),
      schedule_(std::move(schedule)),
      states_(std::move(initial)),
      algorithm_(std::move(algorithm)),
      d_bound_(d_bound),
      stop_fractions_(std::move(stop_fractions)),
      register_choices_(std::move(register_choices)),
      options_(options) {
  world_.validate();
  if (static_cast<int>(states_.size()) != world_.k)
    throw InputError("initial states size does not match robot count");
  if (static_cast<int>(schedule_.offsets.size()) != world_.k)
    throw InputError("schedule size does not match robot count");
  if (!algorithm_) throw InputError("missing user algorithm");
  if (protocol_ == RobotProtocol::kMoveAtomicGlobal &&
      schedule_.mode != PulseSchedule::Mode::kGlobal)
    throw InputError("move-atomic-global requires a global pulse schedule");
  if ((protocol_ == RobotProtocol::kMoveAtomicLocal ||
       protocol_ == RobotProtocol::kFsync) &&
      schedule_.mode != PulseSchedule::Mode::kLocal)
    throw InputError(std::string(to_string(protocol_)) +
                     " requires a local pulse schedule");
  if (protocol_ == RobotProtocol::kFsync) {
    if (d_bound_ < 1) throw InputError("fsync needs d_bound >= 1");
    const int modulus = 6 * d_bound_ + 1;
    for (const auto& st : states_)
      if (st.light < 0 || st.light >= modulus)
        throw InputError("fsync light outside 0..6D");
  }

  const int k = world_.k;
  light_cells_.resize(k);
  nlight_cells_.resize(k);
  color_cells_.resize(k);
  moves_.resize(k);
  move_counts_.assign(k, 0);
  pulse_counts_.assign(k, 0);
  for (int i = 0; i < k; ++i) {
    const auto& st = states_[i];
    if (!finite(st.position)) throw InputError("non-finite robot position");
    light_cells_[i] = {st.light, kBeforeEverything, st.light,
                       kBeforeEverything};
    nlight_cells_[i] = {st.nlight, kBeforeEverything, st.nlight,
                        kBeforeEverything};
    color_cells_[i] = {st.user_color, kBeforeEverything, st.user_color,
                       kBeforeEverything};
    moves_[i] = {kBeforeEverything, kBeforeEverything, st.position,
                 st.position};
  }
  std::vector<Point2D> positions(k);
  for (int i = 0; i < k; ++i) positions[i] = states_[i].position;
  Graph initial_graph = Graph::geometric(positions, world_.phi);
  if (protocol_ == RobotProtocol::kFsync &&
      initial_graph.max_component_diameter() > d_bound_)
    throw InputError("d_bound below the communication graph diameter");
  if (!options_.dynamic_graph) {
    cached_graph_ = std::move(initial_graph);
    cached_graph_time_ = kBeforeEverything;
  }
}

RobotEngine::~RobotEngine() = default;

Point2D RobotEngine::position_at(int i, double time) const {
  const auto& move = moves_.at(i);
  if (time <= move.start) return move.from;
  if (time >= move.end) return move.to;
  const double f = (time - move.start) / (move.end - move.start);
  return {move.from.x + f * (move.to.x - move.from.x),
          move.from.y + f * (move.to.y - move.from.y)};
}

Graph RobotEngine::visibility_graph(double time) const {
  std::vector<Point2D> positions(world_.k);
  for (int i = 0; i < world_.k; ++i) positions[i] = position_at(i, time);
  return Graph::geometric(positions, world_.phi);
}

int RobotEngine::read_point(const Cell& cell, double now) const {
  return cell.curr_time < now ? cell.curr : cell.prev;
}

int RobotEngine::read_regular(int reader, int readee, double now) {
  const Cell& cell = light_cells_[readee];
  // One write per readee per time unit at most; a write inside the elapsed
  // unit overlaps the read segment and the adversary picks old or new.
  if (cell.curr_time > now - 1.0 && cell.curr_time < now) {
    const bool take_old =
        register_choices_(reader, readee, pulse_counts_[reader] - 1);
    return take_old ? cell.prev : cell.curr;
  }
  return read_point(cell, now);
}

void RobotEngine::write_cell(Cell& cell, double now, int value) {
  cell.prev = cell.curr;
  cell.prev_time = cell.curr_time;
  cell.curr = value;
  cell.curr_time = now;
}

Snapshot RobotEngine::look(int i, double time) const {
  Snapshot snapshot;
  const Point2D self = position_at(i, time);
  const double r2 = world_.look_radius() * world_.look_radius();
  for (int j = 0; j < world_.k; ++j) {
    if (j == i) continue;
    const Point2D pj = position_at(j, time);
    if (squared_distance(self, pj) > r2) continue;
    snapshot.robots.push_back({{pj.x - self.x, pj.y - self.y},
                               read_point(nlight_cells_[j], time),
                               read_point(light_cells_[j], time),
                               read_point(color_cells_[j], time)});
  }
  return snapshot;
}

void RobotEngine::emit(TraceEvent event) {
  if (options_.record_trace) trace_.append(std::move(event));
}

const Graph& RobotEngine::graph_at(double now) {
  if (!options_.dynamic_graph) return *cached_graph_;
  if (!cached_graph_ || cached_graph_time_ != now) {
    cached_graph_ = visibility_graph(now);
    cached_graph_time_ = now;
  }
  return *cached_graph_;
}

MovePlan plan_move(const WorldConfig& world, Point2D from, Point2D target,
                   double stop_fraction) {
  if (!finite(target))
    throw InputError("MOVE target has non-finite coordinates");
  if (!(stop_fraction >= 0.0 && stop_fraction <= 1.0))
    throw InputError("stop fraction outside [0, 1]");
  const double d = distance(from, target);
  const double capped = std::min(d, world.y_cap);
  const double sigma_eff = std::min(world.sigma, capped);
  // Within sigma the target is always reached; otherwise the adversary may
  // stop the robot anywhere past the guaranteed sigma progress.
  const double traveled =
      d <= world.sigma ? d : std::max(sigma_eff, stop_fraction * capped);
  Point2D to = from;
  if (d > 0.0 && traveled > 0.0) {
    const double f = traveled / d;
    to = {from.x + f * (target.x - from.x), from.y + f * (target.y - from.y)};
  }
  return {to, traveled, traveled / world.y_cap * kMoveWindow};
}

void RobotEngine::do_move(int robot, double now) {
  auto& st = states_[robot];
  const MovePlan plan =
      plan_move(world_, st.position, st.pending_target,
                stop_fractions_(robot, move_counts_[robot]++));
  emit(move_start_event(now, robot));
  emit(move_end_event(now + plan.duration, robot));
  moves_[robot] = {now, now + plan.duration, st.position, plan.destination};
  st.position = plan.destination;
}

void RobotEngine::do_look_compute(int robot, double now) {
  auto& st = states_[robot];
  emit(look_event(now, robot));
  const Snapshot snapshot = look(robot, now);
  const ComputeResult result =
      algorithm_->compute(snapshot, st.position, st.user_state);
  if (!finite(result.target))
    throw InputError("algorithm produced a non-finite target");
  st.pending_target = result.target;
  st.user_state = result.user_state;
  if (result.user_color != st.user_color) {
    st.user_color = result.user_color;
    write_cell(color_cells_[robot], now, result.user_color);
  }
  emit(compute_event(now + kComputeOffset, robot));
}

void RobotEngine::process_pulse(const PulseEvent& pulse) {
  ++pulse_counts_[pulse.robot];
  const double now = pulse.time;
  const Graph& graph = graph_at(now);
  if (last_graph_emit_time_ != now) {
    emit(graph_event(now, graph.node_count(), graph.edge_list()));
    last_graph_emit_time_ = now;
  }
  if (protocol_ == RobotProtocol::kFsync && options_.dynamic_graph &&
      graph.max_component_diameter() > d_bound_)
    throw InputError("d_bound below the communication graph diameter");
  emit(pulse_event(now, pulse.robot));
  switch (protocol_) {
    case RobotProtocol::kMoveAtomicGlobal:
      step_move_atomic_global(pulse.robot, now);
      break;
    case RobotProtocol::kMoveAtomicLocal:
      step_move_atomic_local(pulse.robot, now);
      break;
    case RobotProtocol::kFsync:
      step_fsync(pulse.robot, now);
      break;
  }
}

void RobotEngine::run(long horizon, const PulseHook& hook) {
  if (ran_) throw InputError("engine already ran");
  ran_ = true;
  for (const auto& pulse : pulse_sequence(schedule_, horizon)) {
    process_pulse(pulse);
    if (hook) hook(*this, pulse);
  }
  trace_.sort_by_time();
}

Trace RobotEngine::take_trace() {
  trace_.sort_by_time();
  return std::move(trace_);
}

}  // namespace nmr
