#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nmr/scenario.hpp"
#include "test_util.hpp"

using namespace nmr;

namespace {

const char* kPath3 = R"({
  // bundled-style scenario
  "name": "alg1-path3",
  "protocol": "nmr",
  "graph": {"generator": "path", "k": 3},
  "init": "zeros",
  "horizon": 40,
  "seeds": 1
})";

const char* kRobots = R"({
  "name": "alg2-smoke",
  "protocol": "move-atomic-global",
  "world": {"phi": 1.0, "y": 0.2, "sigma": 0.05},
  "positions": {"mode": "explicit", "points": [[0,0],[0.5,0],[0.2,0.4]]},
  "schedule": {"mode": "global"},
  "algorithm": "centroid",
  "init": "adversarial",
  "horizon": 50,
  "seeds": {"from": 1, "to": 3}
})";

}  // namespace

TEST_CASE("scenario parsing accepts comments and validates fields") {
  const Scenario scenario = parse_scenario_text(kPath3);
  CHECK(scenario.name == "alg1-path3");
  CHECK(scenario.protocol == ProtocolId::kNmr);
  CHECK(scenario.graph.k == 3);
  CHECK(scenario.horizon == 40);
  CHECK(scenario.seeds == std::vector<std::uint64_t>{1});

  CHECK_THROWS_AS(parse_scenario_text("{"), InputError);
  CHECK_THROWS_AS(parse_scenario_text(R"({"name":"x"})"), InputError);
  CHECK_THROWS_AS(parse_scenario_text(R"({
    "name":"x","protocol":"nmr","graph":{"generator":"path","k":3},
    "init":"zeros","horizon":10,"typo_field":1})"),
                  InputError);
  CHECK_THROWS_AS(parse_scenario_text(R"({
    "name":"x","protocol":"warp","graph":{"generator":"path","k":3},
    "init":"zeros","horizon":10})"),
                  InputError);
  CHECK_THROWS_AS(parse_scenario_text(R"({
    "name":"x","protocol":"nmr","graph":{"generator":"path","k":3},
    "init":"zeros","horizon":0})"),
                  InputError);
}

TEST_CASE("seed range parsing") {
  const Scenario scenario = parse_scenario_text(R"({
    "name":"x","protocol":"nmr","graph":{"generator":"path","k":3},
    "init":"zeros","horizon":10,"seeds":{"from":2,"to":5}})");
  CHECK(scenario.seeds == std::vector<std::uint64_t>{2, 3, 4, 5});
  CHECK_THROWS_AS(parse_scenario_text(R"({
    "name":"x","protocol":"nmr","graph":{"generator":"path","k":3},
    "init":"zeros","horizon":10,"seeds":{"from":5,"to":2}})"),
                  InputError);
}

TEST_CASE("alg1-path3 run passes and stabilizes MaxN at pulse two") {
  const Scenario scenario = parse_scenario_text(kPath3);
  const auto artifacts = run_scenario_once(scenario, 1);
  CHECK(artifacts.summary.pass);
  REQUIRE(artifacts.summary.maxn_stabilization_pulse.has_value());
  CHECK(*artifacts.summary.maxn_stabilization_pulse == 2);
  CHECK(artifacts.summary.outcomes.size() == 3);  // default nmr checkers
  for (const auto& outcome : artifacts.summary.outcomes)
    CHECK(outcome.verdict.pass);
  CHECK(artifacts.trace.size() == artifacts.summary.event_count);
}

TEST_CASE("robot scenario smoke run") {
  const Scenario scenario = parse_scenario_text(kRobots);
  const auto report = sweep_scenario(scenario, scenario.seeds, 1);
  CHECK(report.runs == 3);
  CHECK(report.all_pass());
}

TEST_CASE("sweeps are deterministic and parallelism-invariant") {
  const Scenario scenario = parse_scenario_text(kRobots);
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6};
  const auto a = sweep_scenario(scenario, seeds, 1);
  const auto b = sweep_scenario(scenario, seeds, 4);
  REQUIRE(a.summaries.size() == b.summaries.size());
  CHECK(a.passed == b.passed);
  for (std::size_t i = 0; i < a.summaries.size(); ++i) {
    CHECK(a.summaries[i].label == b.summaries[i].label);
    CHECK(a.summaries[i].pass == b.summaries[i].pass);
    CHECK(a.summaries[i].event_count == b.summaries[i].event_count);
    CHECK(a.summaries[i].outcomes == b.summaries[i].outcomes);
  }
  CHECK_THROWS_AS(sweep_scenario(scenario, {}, 1), InputError);
}

TEST_CASE("identical runs serialize byte-identically") {
  const Scenario scenario = parse_scenario_text(kRobots);
  const auto a = run_scenario_once(scenario, 2);
  const auto b = run_scenario_once(scenario, 2);
  CHECK(a.trace.to_jsonl() == b.trace.to_jsonl());
  CHECK(a.summary.outcomes == b.summary.outcomes);
}

TEST_CASE("enumerate-all covers the whole clock space") {
  const Scenario scenario = parse_scenario_text(R"({
    "name":"k2-exhaustive","protocol":"nmr",
    "graph":{"generator":"complete","k":2},
    "init":"enumerate-all","horizon":20})");
  const auto report = run_enumerate_all(scenario);
  CHECK(report.runs == 9);  // {0..k}^k with k = 2
  CHECK(report.all_pass());
}

TEST_CASE("fsync scenario with an undersized diameter bound is rejected") {
  const Scenario scenario = parse_scenario_text(R"({
    "name":"fsync-bad","protocol":"fsync",
    "world": {"phi": 1.0, "y": 0.2, "sigma": 0.05},
    "positions": {"mode": "explicit", "points": [[0,0],[0.8,0],[1.6,0]]},
    "schedule": {"mode": "local", "offsets": [0.0, 0.3, 0.6]},
    "algorithm": "stay",
    "fsync": {"d_bound": 1},
    "init": "zeros",
    "horizon": 30})");
  CHECK_THROWS_AS(run_scenario_once(scenario, 1), InputError);
}

TEST_CASE("fsync scenario runs and checks out") {
  const Scenario scenario = parse_scenario_text(R"({
    "name":"fsync-pair","protocol":"fsync",
    "world": {"phi": 1.0, "y": 0.2, "sigma": 0.05},
    "positions": {"mode": "explicit", "points": [[0,0],[0.4,0]]},
    "schedule": {"mode": "local", "offsets": [0.0, 0.5]},
    "algorithm": "stay",
    "fsync": {"d_bound": 1},
    "init": "adversarial",
    "horizon": 160,
    "adversary": {"reads": "new"}})");
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto artifacts = run_scenario_once(scenario, seed);
    CHECK(artifacts.summary.pass);
  }
}

TEST_CASE("explicit nmr init and graph literals") {
  const Scenario scenario = parse_scenario_text(R"({
    "name":"explicit","protocol":"nmr",
    "graph":{"k":3,"edges":[[0,1],[1,2]]},
    "init":{"mode":"explicit","clocks":[3,3,3]},
    "horizon":25})");
  const auto artifacts = run_scenario_once(scenario, 0);
  CHECK(artifacts.summary.pass);
  CHECK_THROWS_AS(parse_scenario_text(R"({
    "name":"explicit","protocol":"nmr",
    "graph":{"k":3,"edges":[[0,1],[1,2]]},
    "init":{"mode":"explicit","clocks":[3,3]},
    "horizon":25})"),
                  InputError);
}
