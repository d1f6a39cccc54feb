#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "nmr/rand.hpp"
#include "nmr/world.hpp"
#include "test_util.hpp"

using namespace nmr;

namespace {

WorldConfig small_world(int k) {
  return {.k = k, .phi = 1.0, .y_cap = 0.2, .sigma = 0.05};
}

std::unique_ptr<RobotEngine> make_engine(const WorldConfig& world,
                                         std::vector<Point2D> positions,
                                         std::vector<RobotState> states = {}) {
  if (states.empty()) states = zeroed_robot_init(positions);
  return std::make_unique<RobotEngine>(
      RobotProtocol::kMoveAtomicGlobal, world, PulseSchedule::global(world.k),
      std::move(states), make_algorithm("stay", world));
}

}  // namespace

TEST_CASE("world config validation") {
  CHECK_NOTHROW(small_world(3).validate());
  WorldConfig bad = small_world(3);
  bad.sigma = 0.3;  // sigma > y_cap is unsatisfiable
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = small_world(3);
  bad.y_cap = 1.0;  // y_cap must stay below phi
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = small_world(3);
  bad.sigma = -0.1;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = small_world(0);
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("global pulse sequence") {
  const auto events = pulse_sequence(PulseSchedule::global(3), 2);
  REQUIRE(events.size() == 6);
  for (int i = 0; i < 3; ++i) {
    CHECK(events[i].time == 0.0);
    CHECK(events[i].robot == i);
    CHECK(events[3 + i].time == 1.0);
  }
  CHECK_THROWS_AS(pulse_sequence(PulseSchedule::global(3), 0), InputError);
}

TEST_CASE("local pulse sequence interleaves by offset") {
  const auto schedule = PulseSchedule::local({0.0, 0.4});
  const auto events = pulse_sequence(schedule, 2);
  REQUIRE(events.size() == 4);
  CHECK(events[0].robot == 0);
  CHECK(events[0].time == 0.0);
  CHECK(events[1].robot == 1);
  CHECK(events[1].time == 0.4);
  CHECK(events[2].robot == 0);
  CHECK(events[2].time == 1.0);
  CHECK(events[3].robot == 1);
  CHECK(events[3].time == 1.4);
}

TEST_CASE("distinct offsets never produce simultaneous pulses") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto schedule = PulseSchedule::local_random(5, seed);
    std::set<double> offsets(schedule.offsets.begin(),
                             schedule.offsets.end());
    CHECK(offsets.size() == 5);
    const auto events = pulse_sequence(schedule, 4);
    std::set<double> times;
    for (const auto& event : events) CHECK(times.insert(event.time).second);
  }
}

TEST_CASE("duplicate local offsets are perturbed deterministically") {
  const auto a = PulseSchedule::local({0.25, 0.25, 0.5}, 11);
  const auto b = PulseSchedule::local({0.25, 0.25, 0.5}, 11);
  CHECK(a.offsets == b.offsets);
  std::set<double> distinct(a.offsets.begin(), a.offsets.end());
  CHECK(distinct.size() == 3);
  CHECK_THROWS_AS(PulseSchedule::local({0.5, 1.5}), InputError);
}

TEST_CASE("movement rule") {
  const WorldConfig world = small_world(1);
  SUBCASE("targets within sigma are reached exactly") {
    const auto plan =
        plan_move(world, {0, 0}, {world.sigma / 2, 0}, 0.0);
    CHECK(plan.destination.x == doctest::Approx(world.sigma / 2));
    CHECK(plan.traveled == doctest::Approx(world.sigma / 2));
  }
  SUBCASE("an early stop still makes sigma progress") {
    const auto plan = plan_move(world, {0, 0}, {10 * world.sigma, 0}, 0.0);
    CHECK(plan.traveled == doctest::Approx(world.sigma));
  }
  SUBCASE("standing still is allowed") {
    const auto plan = plan_move(world, {1, 2}, {1, 2}, 1.0);
    CHECK(plan.traveled == 0.0);
    CHECK(plan.duration == 0.0);
  }
  SUBCASE("travel is capped at y_cap and fits in the pulse gap") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const Point2D target{rng.unit() * 4 - 2, rng.unit() * 4 - 2};
      const auto plan = plan_move(world, {0, 0}, target, rng.unit());
      CHECK(plan.traveled <= world.y_cap + 1e-12);
      CHECK(plan.duration < 1.0);
    }
  }
  SUBCASE("non-finite targets are rejected") {
    const double nan = std::nan("");
    CHECK_THROWS_AS(plan_move(world, {0, 0}, {nan, 0}, 0.0), InputError);
  }
}

TEST_CASE("snapshot radius is phi - y, closed at the boundary") {
  const WorldConfig world = small_world(3);
  const double lr = world.look_radius();
  SUBCASE("isolated robot sees nothing") {
    auto engine = make_engine(world, {{0, 0}, {10, 0}, {20, 0}});
    CHECK(engine->look(0, 0.0).robots.empty());
  }
  SUBCASE("exactly phi - y away is included") {
    auto engine = make_engine(world, {{0, 0}, {lr, 0}, {20, 0}});
    CHECK(engine->look(0, 0.0).robots.size() == 1);
  }
  SUBCASE("inside phi but outside phi - y: graph edge without snapshot entry") {
    auto engine = make_engine(world, {{0, 0}, {lr + world.y_cap / 2, 0}, {20, 0}});
    CHECK(engine->look(0, 0.0).robots.empty());
    CHECK(engine->visibility_graph(0.0).has_edge(0, 1));
  }
}

TEST_CASE("visibility graph distances") {
  const WorldConfig world = small_world(2);
  auto near = make_engine(world, {{0, 0}, {0.5 * world.phi, 0}});
  CHECK(near->visibility_graph(0.0).has_edge(0, 1));
  auto far = make_engine(world, {{0, 0}, {2.0 * world.phi, 0}});
  CHECK_FALSE(far->visibility_graph(0.0).has_edge(0, 1));
}

TEST_CASE("a robot beyond phi cannot reach the look zone within a unit") {
  // Triangle inequality on the continuous motion model: starting beyond phi
  // and moving at most y_cap keeps it beyond phi - y_cap at every instant.
  const WorldConfig world = small_world(2);
  Rng rng(17);
  for (int round = 0; round < 300; ++round) {
    const Point2D observer{0, 0};
    const double angle = rng.unit() * 6.283185307179586;
    const double start_distance = world.phi + rng.unit() * 0.5 + 1e-9;
    const Point2D from{start_distance * std::cos(angle),
                       start_distance * std::sin(angle)};
    const double move_angle = rng.unit() * 6.283185307179586;
    const double move_len = rng.unit() * world.y_cap;
    const Point2D to{from.x + move_len * std::cos(move_angle),
                     from.y + move_len * std::sin(move_angle)};
    for (int s = 0; s <= 10; ++s) {
      const double f = s / 10.0;
      const Point2D at{from.x + f * (to.x - from.x),
                       from.y + f * (to.y - from.y)};
      CHECK(distance(observer, at) > world.look_radius());
    }
  }
}

TEST_CASE("adversarial motion outside phi never alters a snapshot") {
  const WorldConfig world = small_world(3);
  // Robot 1 is inside the look zone, robot 2 beyond phi. Moving robot 2
  // anywhere within its per-unit cap leaves the snapshot of robot 0 intact.
  Rng rng(23);
  for (int round = 0; round < 50; ++round) {
    const double d2 = world.phi + 1e-6 + rng.unit();
    std::vector<Point2D> positions{{0, 0}, {0.3, 0}, {d2, 0}};
    auto states = zeroed_robot_init(positions);
    const double angle = rng.unit() * 6.283185307179586;
    const double len = rng.unit() * world.y_cap;
    auto moved = states;
    moved[2].position = {d2 + len * std::cos(angle),
                         len * std::sin(angle)};
    auto base = make_engine(world, positions, states);
    auto perturbed = make_engine(world, positions, moved);
    const auto a = base->look(0, 0.0);
    const auto b = perturbed->look(0, 0.0);
    REQUIRE(a.robots.size() == 1);
    REQUIRE(b.robots.size() == 1);
    CHECK(a.robots[0].offset.x == b.robots[0].offset.x);
    CHECK(a.robots[0].offset.y == b.robots[0].offset.y);
  }
}

TEST_CASE("phases finish strictly before the robot's next pulse") {
  const WorldConfig world = small_world(4);
  RobotEngine engine(RobotProtocol::kMoveAtomicLocal, world,
                     PulseSchedule::local_random(4, 5),
                     adversarial_robot_init(RobotProtocol::kMoveAtomicLocal,
                                            world,
                                            {{0, 0}, {0.4, 0}, {0.4, 0.4}, {0.9, 0.2}},
                                            0, 5),
                     make_algorithm("centroid", world), 0,
                     seeded_stop_fractions(5));
  engine.run(20);
  const Trace trace = engine.take_trace();
  for (int robot = 0; robot < 4; ++robot) {
    const auto pulses = testing::event_times(trace, robot, EventKind::kPulse);
    auto next_pulse_after = [&](double t) {
      for (double p : pulses)
        if (p > t) return p;
      return std::numeric_limits<double>::infinity();
    };
    for (const auto kind :
         {EventKind::kMoveEnd, EventKind::kCompute, EventKind::kLook}) {
      for (double t : testing::event_times(trace, robot, kind)) {
        const auto starts = testing::event_times(trace, robot, EventKind::kPulse);
        const auto it = std::upper_bound(starts.begin(), starts.end(), t);
        if (it == starts.begin()) continue;
        const double own_pulse = *(it - 1);
        CHECK(t < next_pulse_after(own_pulse));
      }
    }
  }
}

TEST_CASE("identical runs give byte-identical traces") {
  const WorldConfig world = small_world(3);
  auto run_once = [&] {
    RobotEngine engine(
        RobotProtocol::kMoveAtomicGlobal, world, PulseSchedule::global(3),
        adversarial_robot_init(RobotProtocol::kMoveAtomicGlobal, world,
                               {{0, 0}, {0.5, 0}, {0.2, 0.4}}, 0, 9),
        make_algorithm("centroid", world), 0, seeded_stop_fractions(9));
    engine.run(25);
    return engine.take_trace().to_jsonl();
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("builtin algorithms") {
  const WorldConfig world = small_world(2);
  const Snapshot empty;
  const auto stay = make_algorithm("stay", world);
  CHECK(stay->compute(empty, {1, 2}, 0).target.x == 1);
  Snapshot two;
  two.robots.push_back({{1.0, 0.0}, 1, 0, 0});
  two.robots.push_back({{0.0, 1.0}, 1, 0, 0});
  const auto centroid = make_algorithm("centroid", world);
  const auto result = centroid->compute(two, {0, 0}, 0);
  CHECK(result.target.x == doctest::Approx(0.5));
  CHECK(result.target.y == doctest::Approx(0.5));
  const auto east = make_algorithm("step-east", world);
  CHECK(east->compute(empty, {0, 0}, 0).target.x ==
        doctest::Approx(world.y_cap / 2));
  CHECK_THROWS_AS(make_algorithm("warp", world), InputError);
}

TEST_CASE("robot init enumerator covers the small domains") {
  const WorldConfig world = small_world(2);
  RobotInitEnumerator enumerator(RobotProtocol::kMoveAtomicGlobal, world,
                                 {{0, 0}, {0.5, 0}}, 0);
  // per robot: lights (k+1) x clocks (k+1) x lc 2 = 18; squared = 324
  CHECK(enumerator.total() == 324);
  long count = 0;
  bool saw_zeroed = true;
  bool found_zero_case = false;
  while (auto states = enumerator.next()) {
    ++count;
    saw_zeroed = true;
    for (const auto& st : *states) {
      if (st.light != 0 || st.clock != 0 || st.lc) saw_zeroed = false;
    }
    if (saw_zeroed) found_zero_case = true;
  }
  CHECK(count == 324);
  CHECK(found_zero_case);
}

TEST_CASE("adversarial robot init is deterministic and in-domain") {
  const WorldConfig world = small_world(4);
  const std::vector<Point2D> positions{{0, 0}, {0.1, 0}, {0.2, 0}, {0.3, 0}};
  const auto a = adversarial_robot_init(RobotProtocol::kMoveAtomicLocal, world,
                                        positions, 0, 77);
  const auto b = adversarial_robot_init(RobotProtocol::kMoveAtomicLocal, world,
                                        positions, 0, 77);
  for (int i = 0; i < 4; ++i) {
    CHECK(a[i].light == b[i].light);
    CHECK(a[i].clock == b[i].clock);
    CHECK(a[i].lc == b[i].lc);
    CHECK(a[i].light < light_domain_size(RobotProtocol::kMoveAtomicLocal, 4, 0));
    CHECK(a[i].nlight >= 1);
    CHECK(a[i].nlight <= 4);
  }
}
