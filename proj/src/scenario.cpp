#include "nmr/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "nmr/rand.hpp"

namespace nmr {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxFailureArtifacts = 5;
constexpr long kMaxEnumeratedRuns = 2'000'000;

[[noreturn]] void fail(const std::string& message) {
  throw InputError("scenario: " + message);
}

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const char* where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return key == k;
        }) == known.end())
      fail(std::string("unknown field '") + key + "' in " + where);
  }
}

template <typename T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    fail(std::string("bad value for ") + what);
  }
}

GraphSpec parse_graph(const json& j) {
  GraphSpec spec;
  if (!j.is_object()) fail("graph must be an object");
  reject_unknown(j, {"generator", "k", "edges"}, "graph");
  spec.k = get_as<int>(need(j, "k"), "graph.k");
  if (j.contains("edges")) {
    spec.explicit_edges = true;
    for (const auto& e : need(j, "edges"))
      spec.edges.emplace_back(get_as<int>(e.at(0), "edge"),
                              get_as<int>(e.at(1), "edge"));
  } else {
    spec.generator = get_as<std::string>(need(j, "generator"), "generator");
  }
  return spec;
}

InitSpec parse_init(const json& j) {
  InitSpec spec;
  if (j.is_string()) {
    const auto mode = j.get<std::string>();
    if (mode == "zeros") spec.mode = InitSpec::Mode::kZeros;
    else if (mode == "adversarial") spec.mode = InitSpec::Mode::kAdversarial;
    else if (mode == "enumerate-all") spec.mode = InitSpec::Mode::kEnumerateAll;
    else fail("unknown init mode: " + mode);
    return spec;
  }
  if (!j.is_object()) fail("init must be a string or object");
  reject_unknown(j, {"mode", "clocks"}, "init");
  const auto mode = get_as<std::string>(need(j, "mode"), "init.mode");
  if (mode == "zeros") spec.mode = InitSpec::Mode::kZeros;
  else if (mode == "adversarial") spec.mode = InitSpec::Mode::kAdversarial;
  else if (mode == "enumerate-all") spec.mode = InitSpec::Mode::kEnumerateAll;
  else if (mode == "explicit") {
    spec.mode = InitSpec::Mode::kExplicit;
    for (const auto& c : need(j, "clocks"))
      spec.clocks.push_back(get_as<int>(c, "init.clocks"));
  } else {
    fail("unknown init mode: " + mode);
  }
  return spec;
}

PositionsSpec parse_positions(const json& j) {
  PositionsSpec spec;
  if (!j.is_object()) fail("positions must be an object");
  reject_unknown(j, {"mode", "points", "k", "size"}, "positions");
  const auto mode = get_as<std::string>(need(j, "mode"), "positions.mode");
  if (mode == "explicit") {
    spec.mode = PositionsSpec::Mode::kExplicit;
    for (const auto& p : need(j, "points"))
      spec.points.push_back(
          {get_as<double>(p.at(0), "point"), get_as<double>(p.at(1), "point")});
    spec.k = static_cast<int>(spec.points.size());
    if (spec.k < 1) fail("positions.points must be non-empty");
  } else if (mode == "box") {
    spec.mode = PositionsSpec::Mode::kBox;
    spec.k = get_as<int>(need(j, "k"), "positions.k");
    spec.box = get_as<double>(need(j, "size"), "positions.size");
    if (spec.k < 1 || !(spec.box > 0.0)) fail("bad box positions");
  } else {
    fail("unknown positions mode: " + mode);
  }
  return spec;
}

ScheduleSpec parse_schedule(const json& j) {
  ScheduleSpec spec;
  if (!j.is_object()) fail("schedule must be an object");
  reject_unknown(j, {"mode", "offsets"}, "schedule");
  const auto mode = get_as<std::string>(need(j, "mode"), "schedule.mode");
  if (mode == "global") {
    spec.mode = ScheduleSpec::Mode::kGlobal;
  } else if (mode == "local") {
    if (j.contains("offsets")) {
      spec.mode = ScheduleSpec::Mode::kLocal;
      for (const auto& o : j.at("offsets"))
        spec.offsets.push_back(get_as<double>(o, "offset"));
    } else {
      spec.mode = ScheduleSpec::Mode::kLocalRandom;
    }
  } else if (mode == "local-random") {
    spec.mode = ScheduleSpec::Mode::kLocalRandom;
  } else {
    fail("unknown schedule mode: " + mode);
  }
  return spec;
}

AdversarySpec parse_adversary(const json& j) {
  AdversarySpec spec;
  if (!j.is_object()) fail("adversary must be an object");
  reject_unknown(j, {"stops", "stop_constant", "reads"}, "adversary");
  if (j.contains("stops")) {
    const auto stops = get_as<std::string>(j.at("stops"), "adversary.stops");
    if (stops == "zero") spec.stops = AdversarySpec::Stops::kZero;
    else if (stops == "seeded") spec.stops = AdversarySpec::Stops::kSeeded;
    else if (stops == "constant") {
      spec.stops = AdversarySpec::Stops::kConstant;
      spec.stop_constant =
          get_as<double>(need(j, "stop_constant"), "stop_constant");
    } else fail("unknown adversary.stops: " + stops);
  }
  if (j.contains("reads")) {
    const auto reads = get_as<std::string>(j.at("reads"), "adversary.reads");
    if (reads == "seeded") spec.reads = AdversarySpec::Reads::kSeeded;
    else if (reads == "old") spec.reads = AdversarySpec::Reads::kOld;
    else if (reads == "new") spec.reads = AdversarySpec::Reads::kNew;
    else fail("unknown adversary.reads: " + reads);
  }
  return spec;
}

std::vector<CheckerSpec> parse_checkers(const json& j) {
  std::vector<CheckerSpec> specs;
  if (!j.is_array()) fail("checkers must be an array");
  for (const auto& c : j) {
    if (!c.is_object()) fail("checker entries must be objects");
    reject_unknown(c,
                   {"id", "l", "window", "window_coeff", "prefix",
                    "stall_tolerant"},
                   "checker");
    CheckerSpec spec;
    spec.id = get_as<std::string>(need(c, "id"), "checker.id");
    if (c.contains("l")) spec.l = get_as<int>(c.at("l"), "checker.l");
    if (c.contains("window"))
      spec.window = get_as<long>(c.at("window"), "checker.window");
    if (c.contains("window_coeff"))
      spec.window_coeff =
          get_as<long>(c.at("window_coeff"), "checker.window_coeff");
    if (c.contains("prefix"))
      spec.prefix = get_as<double>(c.at("prefix"), "checker.prefix");
    if (c.contains("stall_tolerant"))
      spec.stall_tolerant =
          get_as<bool>(c.at("stall_tolerant"), "checker.stall_tolerant");
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<std::uint64_t> parse_seeds(const json& j) {
  std::vector<std::uint64_t> seeds;
  if (j.is_number_unsigned() || j.is_number_integer()) {
    seeds.push_back(get_as<std::uint64_t>(j, "seeds"));
  } else if (j.is_array()) {
    for (const auto& s : j) seeds.push_back(get_as<std::uint64_t>(s, "seeds"));
  } else if (j.is_object()) {
    reject_unknown(j, {"from", "to"}, "seeds");
    const auto from = get_as<std::uint64_t>(need(j, "from"), "seeds.from");
    const auto to = get_as<std::uint64_t>(need(j, "to"), "seeds.to");
    if (to < from) fail("seeds.to < seeds.from");
    for (std::uint64_t s = from; s <= to; ++s) seeds.push_back(s);
  } else {
    fail("seeds must be a number, list, or {from, to}");
  }
  if (seeds.empty()) fail("empty seed set");
  return seeds;
}

}  // namespace

std::string_view to_string(ProtocolId protocol) {
  switch (protocol) {
    case ProtocolId::kNmr: return "nmr";
    case ProtocolId::kMoveAtomicGlobal: return "move-atomic-global";
    case ProtocolId::kMoveAtomicLocal: return "move-atomic-local";
    case ProtocolId::kFsync: return "fsync";
  }
  return "unknown";
}

Graph GraphSpec::build(std::uint64_t seed) const {
  if (explicit_edges) return Graph::from_edges(k, edges);
  if (generator == "path") return Graph::path(k);
  if (generator == "cycle") return Graph::cycle(k);
  if (generator == "star") return Graph::star(k - 1);
  if (generator == "complete") return Graph::complete(k);
  if (generator == "random-connected") return Graph::random_connected(k, seed);
  throw InputError("scenario: unknown graph generator: " + generator);
}

Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  reject_unknown(j,
                 {"name", "protocol", "graph", "world", "positions",
                  "schedule", "algorithm", "fsync", "init", "horizon", "seeds",
                  "checkers", "adversary", "prefix", "measure"},
                 "scenario");

  Scenario scenario;
  scenario.name = get_as<std::string>(need(j, "name"), "name");
  const auto protocol = get_as<std::string>(need(j, "protocol"), "protocol");
  if (protocol == "nmr") scenario.protocol = ProtocolId::kNmr;
  else if (protocol == "move-atomic-global")
    scenario.protocol = ProtocolId::kMoveAtomicGlobal;
  else if (protocol == "move-atomic-local")
    scenario.protocol = ProtocolId::kMoveAtomicLocal;
  else if (protocol == "fsync") scenario.protocol = ProtocolId::kFsync;
  else fail("unknown protocol: " + protocol);

  scenario.horizon = get_as<long>(need(j, "horizon"), "horizon");
  if (scenario.horizon < 1) fail("horizon must be >= 1");
  scenario.init = parse_init(need(j, "init"));
  if (j.contains("seeds")) scenario.seeds = parse_seeds(j.at("seeds"));
  if (j.contains("checkers"))
    scenario.checkers = parse_checkers(j.at("checkers"));
  if (j.contains("adversary"))
    scenario.adversary = parse_adversary(j.at("adversary"));
  if (j.contains("prefix"))
    scenario.prefix_override = get_as<double>(j.at("prefix"), "prefix");
  if (j.contains("measure"))
    scenario.measure = get_as<bool>(j.at("measure"), "measure");

  if (scenario.protocol == ProtocolId::kNmr) {
    scenario.graph = parse_graph(need(j, "graph"));
    if (scenario.init.mode == InitSpec::Mode::kExplicit &&
        static_cast<int>(scenario.init.clocks.size()) != scenario.graph.k)
      fail("init.clocks size must equal graph.k");
    return scenario;
  }

  const auto& world = need(j, "world");
  reject_unknown(world, {"phi", "y", "sigma"}, "world");
  scenario.world.phi = get_as<double>(need(world, "phi"), "world.phi");
  scenario.world.y_cap = get_as<double>(need(world, "y"), "world.y");
  scenario.world.sigma = get_as<double>(need(world, "sigma"), "world.sigma");
  scenario.positions = parse_positions(need(j, "positions"));
  scenario.world.k = scenario.positions.k;
  scenario.world.validate();
  scenario.schedule = parse_schedule(need(j, "schedule"));
  if (scenario.schedule.mode == ScheduleSpec::Mode::kLocal &&
      static_cast<int>(scenario.schedule.offsets.size()) !=
          scenario.positions.k)
    fail("schedule.offsets size must equal robot count");
  if (j.contains("algorithm"))
    scenario.algorithm = get_as<std::string>(j.at("algorithm"), "algorithm");
  if (scenario.protocol == ProtocolId::kFsync) {
    const auto& fsync = need(j, "fsync");
    reject_unknown(fsync, {"d_bound"}, "fsync");
    scenario.d_bound = get_as<int>(need(fsync, "d_bound"), "fsync.d_bound");
    if (scenario.d_bound < 1) fail("fsync.d_bound must be >= 1");
  }
  if (scenario.init.mode == InitSpec::Mode::kExplicit)
    fail("explicit init is only supported for the nmr protocol");
  return scenario;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_scenario_text(text);
}

long maxn_stabilization_pulse(const Graph& g, const NmrConfiguration& initial) {
  auto correct = [&](const NmrConfiguration& c) {
    for (int i = 0; i < g.node_count(); ++i)
      if (c.states[i].max_n != stabilized_max_n(g, i)) return false;
    return true;
  };
  // n_published is exact from pulse 1, so MaxN is exact from pulse 2 onward;
  // only the first two configurations can disagree.
  const auto after1 = nmr_step(g, initial).config;
  if (correct(initial) && correct(after1)) return 0;
  if (correct(after1)) return 1;
  return 2;
}

namespace {

struct ResolvedChecker {
  std::string id;
  double prefix = 0.0;
  CheckerFn fn;
};

long wrap_length(ProtocolId protocol, int maxn_bound, int d_bound) {
  switch (protocol) {
    case ProtocolId::kNmr:
    case ProtocolId::kMoveAtomicGlobal:
      return maxn_bound + 1;
    case ProtocolId::kMoveAtomicLocal:
      return 3L * maxn_bound + 3;
    case ProtocolId::kFsync:
      return 6L * d_bound + 1;
  }
  return 1;
}

double default_prefix(const Scenario& scenario, int maxn_bound) {
  if (scenario.prefix_override) return *scenario.prefix_override;
  switch (scenario.protocol) {
    case ProtocolId::kNmr:
      return 2.0;
    case ProtocolId::kMoveAtomicGlobal:
      return 2.0 + static_cast<double>(maxn_bound + 1);
    case ProtocolId::kMoveAtomicLocal:
      return 2.0 + static_cast<double>(3 * maxn_bound + 3);
    case ProtocolId::kFsync:
      return static_cast<double>(8 * scenario.d_bound + 1);
  }
  return 0.0;
}

std::vector<CheckerSpec> default_checkers(const Scenario& scenario) {
  switch (scenario.protocol) {
    case ProtocolId::kNmr:
      return {{.id = "l-exclusion"}, {.id = "fairness"}, {.id = "rendezvous"}};
    case ProtocolId::kMoveAtomicGlobal:
    case ProtocolId::kMoveAtomicLocal:
      return {{.id = "move-atomic"}, {.id = "phase-recurrence"}};
    case ProtocolId::kFsync:
      // Instantaneous within-one agreement is a k=2 property (the wrap
      // front breaks it on longer chains); scenarios opt in explicitly.
      return {{.id = "fsync"}};
  }
  return {};
}

// Window/prefix parameters are resolved against the finished run: NMR
// windows come from the static graph, robot windows from the engine's
// observed MaxN bound.
std::vector<ResolvedChecker> resolve_checkers(const Scenario& scenario,
                                              const Graph* graph,
                                              int maxn_bound,
                                              double run_prefix) {
  auto specs =
      scenario.checkers.empty() ? default_checkers(scenario) : scenario.checkers;
  std::vector<ResolvedChecker> resolved;
  for (const auto& spec : specs) {
    ResolvedChecker checker;
    checker.id = spec.id;
    checker.prefix = spec.prefix.value_or(run_prefix);
    const long wrap = wrap_length(scenario.protocol, maxn_bound,
                                  scenario.d_bound);
    if (spec.id == "l-exclusion") {
      if (!graph && !spec.l)
        throw InputError("l-exclusion needs an explicit l for robot runs");
      const int l = spec.l.value_or(graph ? graph->max_degree() + 1 : 1);
      checker.fn = [l](const Trace& trace, double prefix) {
        return check_l_exclusion(trace, l, prefix);
      };
    } else if (spec.id == "fairness") {
      std::vector<long> windows;
      if (graph) {
        for (int i = 0; i < graph->node_count(); ++i)
          windows.push_back(stabilized_max_n(*graph, i) + 1);
      }
      const long fixed = spec.window.value_or(
          spec.window_coeff.value_or(1) * wrap);
      checker.fn = [windows, fixed](const Trace& trace, double prefix) {
        FairnessOptions options;
        options.prefix = prefix;
        options.window_pulses =
            windows.empty() ? uniform_windows(trace, fixed) : windows;
        return check_global_fairness(trace, options);
      };
    } else if (spec.id == "rendezvous") {
      checker.fn = [](const Trace& trace, double prefix) {
        return check_local_rendezvous(trace, prefix);
      };
    } else if (spec.id == "move-atomic") {
      checker.fn = [](const Trace& trace, double prefix) {
        return check_move_atomic(trace, prefix);
      };
    } else if (spec.id == "phase-recurrence") {
      // Default window: two clock wraps (LOOK to the clear MOVE slot and
      // back) plus transition slack, the bound the acceptance oracle pins.
      const long window = spec.window.value_or(
          spec.window_coeff ? *spec.window_coeff * wrap : 2 * wrap + 3);
      checker.fn = [window](const Trace& trace, double prefix) {
        RecurrenceOptions options;
        options.prefix = prefix;
        options.window_pulses = uniform_windows(trace, window);
        return check_phase_recurrence(trace, options);
      };
    } else if (spec.id == "fsync") {
      if (scenario.protocol != ProtocolId::kFsync)
        throw InputError("fsync checker needs the fsync protocol constants");
      const int d = scenario.d_bound;
      const bool tolerant = spec.stall_tolerant.value_or(false);
      checker.fn = [d, tolerant](const Trace& trace, double prefix) {
        FsyncOptions options;
        options.prefix = prefix;
        options.look_light = 2 * d;
        options.move_light = 4 * d;
        options.allow_stalled_repeats = tolerant;
        return check_fsync(trace, options);
      };
    } else if (spec.id == "agreement") {
      if (scenario.protocol != ProtocolId::kFsync)
        throw InputError("agreement checker needs the fsync modulus");
      const int modulus = 6 * scenario.d_bound + 1;
      checker.fn = [modulus](const Trace& trace, double prefix) {
        AgreementOptions options;
        options.prefix = prefix;
        options.modulus = modulus;
        return check_agreement(trace, options);
      };
    } else {
      throw InputError("scenario: unknown checker id: " + spec.id);
    }
    resolved.push_back(std::move(checker));
  }
  return resolved;
}

std::vector<Point2D> build_positions(const Scenario& scenario,
                                     std::uint64_t seed) {
  if (scenario.positions.mode == PositionsSpec::Mode::kExplicit)
    return scenario.positions.points;
  Rng rng(mix_seed(seed, 0x706f73ULL));
  std::vector<Point2D> points(scenario.positions.k);
  for (auto& p : points) {
    p.x = rng.unit() * scenario.positions.box;
    p.y = rng.unit() * scenario.positions.box;
  }
  return points;
}

PulseSchedule build_schedule(const Scenario& scenario, std::uint64_t seed) {
  switch (scenario.schedule.mode) {
    case ScheduleSpec::Mode::kGlobal:
      return PulseSchedule::global(scenario.positions.k);
    case ScheduleSpec::Mode::kLocal:
      return PulseSchedule::local(scenario.schedule.offsets, seed);
    case ScheduleSpec::Mode::kLocalRandom:
      return PulseSchedule::local_random(scenario.positions.k, seed);
  }
  throw InputError("scenario: bad schedule");
}

RobotProtocol robot_protocol(ProtocolId protocol) {
  switch (protocol) {
    case ProtocolId::kMoveAtomicGlobal:
      return RobotProtocol::kMoveAtomicGlobal;
    case ProtocolId::kMoveAtomicLocal:
      return RobotProtocol::kMoveAtomicLocal;
    case ProtocolId::kFsync:
      return RobotProtocol::kFsync;
    case ProtocolId::kNmr:
      break;
  }
  throw InputError("not a robot protocol");
}

StopFractionFn build_stop_fractions(const Scenario& scenario,
                                    std::uint64_t seed) {
  switch (scenario.adversary.stops) {
    case AdversarySpec::Stops::kZero:
      return zero_stop_fractions();
    case AdversarySpec::Stops::kSeeded:
      return seeded_stop_fractions(mix_seed(seed, 0x73746f7073ULL));
    case AdversarySpec::Stops::kConstant:
      return constant_stop_fractions(scenario.adversary.stop_constant);
  }
  return zero_stop_fractions();
}

RegisterChoiceFn build_register_choices(const Scenario& scenario,
                                        std::uint64_t seed) {
  switch (scenario.adversary.reads) {
    case AdversarySpec::Reads::kSeeded:
      return seeded_register_choices(mix_seed(seed, 0x7265616473ULL));
    case AdversarySpec::Reads::kOld:
      return constant_register_choices(true);
    case AdversarySpec::Reads::kNew:
      return constant_register_choices(false);
  }
  return constant_register_choices(false);
}

RunArtifacts finish_run(const Scenario& scenario, std::uint64_t seed,
                        std::string label, Trace trace, const Graph* graph,
                        int maxn_bound,
                        std::optional<long> maxn_stab_pulse,
                        bool measure_times) {
  RunArtifacts artifacts;
  auto& summary = artifacts.summary;
  summary.seed = seed;
  summary.label = std::move(label);
  summary.event_count = trace.size();
  summary.maxn_bound = maxn_bound;
  summary.maxn_stabilization_pulse = maxn_stab_pulse;
  summary.prefix = default_prefix(scenario, maxn_bound);

  const auto checkers =
      resolve_checkers(scenario, graph, maxn_bound, summary.prefix);
  for (const auto& checker : checkers) {
    CheckOutcome outcome;
    outcome.id = checker.id;
    outcome.prefix = checker.prefix;
    outcome.verdict = checker.fn(trace, checker.prefix);
    if (measure_times) {
      outcome.measured_stabilization =
          measure_stabilization(trace, checker.fn);
      outcome.verdict.stabilization_time = outcome.measured_stabilization;
    }
    summary.pass = summary.pass && outcome.verdict.pass;
    if (outcome.measured_stabilization) {
      summary.stabilization =
          std::max(summary.stabilization.value_or(0.0),
                   *outcome.measured_stabilization);
    }
    summary.outcomes.push_back(std::move(outcome));
  }
  artifacts.trace = std::move(trace);
  return artifacts;
}

RunArtifacts run_nmr_once(const Scenario& scenario, std::uint64_t seed,
                          const NmrConfiguration& initial, std::string label,
                          bool measure_times) {
  const Graph graph = scenario.graph.build(seed);
  Trace trace = run_nmr(graph, initial, scenario.horizon);
  const long stab = maxn_stabilization_pulse(graph, initial);
  return finish_run(scenario, seed, std::move(label), std::move(trace), &graph,
                    /*maxn_bound=*/graph.node_count(), stab, measure_times);
}

RunArtifacts run_robots_once(const Scenario& scenario, std::uint64_t seed,
                             std::vector<RobotState> initial,
                             std::string label, bool measure_times) {
  const auto protocol = robot_protocol(scenario.protocol);
  RobotEngineOptions options;
  // Stationary robots keep the initial communication graph; with real
  // movement the graph is recomputed and the fsync diameter bound is
  // revalidated at every pulse.
  options.dynamic_graph = scenario.algorithm != "stay";
  RobotEngine engine(protocol, scenario.world, build_schedule(scenario, seed),
                     std::move(initial),
                     make_algorithm(scenario.algorithm, scenario.world),
                     scenario.d_bound, build_stop_fractions(scenario, seed),
                     build_register_choices(scenario, seed), options);
  engine.run(scenario.horizon);
  const int maxn_bound = engine.maxn_bound();
  return finish_run(scenario, seed, std::move(label), engine.take_trace(),
                    nullptr, maxn_bound, std::nullopt, measure_times);
}

std::vector<RobotState> build_robot_init(const Scenario& scenario,
                                         std::uint64_t seed) {
  const auto positions = build_positions(scenario, seed);
  switch (scenario.init.mode) {
    case InitSpec::Mode::kZeros:
      return zeroed_robot_init(positions);
    case InitSpec::Mode::kAdversarial:
      return adversarial_robot_init(robot_protocol(scenario.protocol),
                                    scenario.world, positions,
                                    scenario.d_bound, seed);
    default:
      throw InputError("unsupported robot init mode for a single run");
  }
}

}  // namespace

RunArtifacts run_scenario_once(const Scenario& scenario, std::uint64_t seed,
                               bool measure_stabilization_times) {
  if (scenario.init.mode == InitSpec::Mode::kEnumerateAll)
    throw InputError("enumerate-all scenarios run via run_enumerate_all");
  if (scenario.protocol == ProtocolId::kNmr) {
    const Graph graph = scenario.graph.build(seed);
    NmrConfiguration initial;
    switch (scenario.init.mode) {
      case InitSpec::Mode::kZeros:
        initial = zeros_nmr_init(graph);
        break;
      case InitSpec::Mode::kAdversarial:
        initial = adversarial_nmr_init(graph, seed);
        break;
      case InitSpec::Mode::kExplicit:
        initial = explicit_nmr_init(graph, scenario.init.clocks);
        break;
      default:
        throw InputError("bad init mode");
    }
    return run_nmr_once(scenario, seed, initial,
                        "seed-" + std::to_string(seed),
                        measure_stabilization_times);
  }
  return run_robots_once(scenario, seed, build_robot_init(scenario, seed),
                         "seed-" + std::to_string(seed),
                         measure_stabilization_times);
}

namespace {

void aggregate(SweepReport& report) {
  double total = 0.0;
  long counted = 0;
  for (const auto& summary : report.summaries) {
    if (summary.pass) ++report.passed;
    if (summary.stabilization) {
      report.stabilization_max =
          std::max(report.stabilization_max.value_or(0.0),
                   *summary.stabilization);
      total += *summary.stabilization;
      ++counted;
    }
  }
  if (counted > 0) report.stabilization_mean = total / counted;
}

}  // namespace

SweepReport sweep_scenario(const Scenario& scenario,
                           const std::vector<std::uint64_t>& seeds,
                           int jobs) {
  if (seeds.empty()) throw InputError("sweep needs at least one seed");
  const bool measure =
      scenario.measure.value_or(seeds.size() <= 64);
  SweepReport report;
  report.runs = static_cast<long>(seeds.size());
  std::vector<std::optional<RunArtifacts>> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (;;) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= seeds.size()) return;
      try {
        results[idx] = run_scenario_once(scenario, seeds[idx], measure);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& thread : threads) thread.join();
  }
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);

  for (auto& result : results) {
    if (!result->summary.pass &&
        report.failures.size() < kMaxFailureArtifacts)
      report.failures.push_back(*result);
    report.summaries.push_back(std::move(result->summary));
  }
  aggregate(report);
  return report;
}

SweepReport run_enumerate_all(const Scenario& scenario) {
  if (scenario.init.mode != InitSpec::Mode::kEnumerateAll)
    throw InputError("scenario init mode is not enumerate-all");
  const bool measure = scenario.measure.value_or(false);
  const std::uint64_t seed = scenario.seeds.front();
  SweepReport report;

  auto absorb = [&](RunArtifacts artifacts) {
    ++report.runs;
    if (!artifacts.summary.pass &&
        report.failures.size() < kMaxFailureArtifacts)
      report.failures.push_back(artifacts);
    report.summaries.push_back(std::move(artifacts.summary));
  };

  if (scenario.protocol == ProtocolId::kNmr) {
    const Graph graph = scenario.graph.build(seed);
    NmrClockEnumerator enumerator(graph);
    if (enumerator.total() > kMaxEnumeratedRuns)
      throw InputError("enumerate-all space too large");
    long case_index = 0;
    while (auto initial = enumerator.next()) {
      absorb(run_nmr_once(scenario, seed, *initial,
                          "case-" + std::to_string(case_index++), measure));
    }
  } else {
    const auto positions = build_positions(scenario, seed);
    RobotInitEnumerator enumerator(robot_protocol(scenario.protocol),
                                   scenario.world, positions, scenario.d_bound);
    if (enumerator.total() > kMaxEnumeratedRuns)
      throw InputError("enumerate-all space too large");
    long case_index = 0;
    while (auto initial = enumerator.next()) {
      absorb(run_robots_once(scenario, seed, std::move(*initial),
                             "case-" + std::to_string(case_index++), measure));
    }
  }
  report.passed = 0;
  aggregate(report);
  return report;
}

}  // namespace nmr
