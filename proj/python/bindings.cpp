// Python bindings for the simulator core: graph construction, the NMR
// engine, the robot protocols via scenarios, and the trace checkers.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nmr/checkers.hpp"
#include "nmr/nmr.hpp"
#include "nmr/scenario.hpp"
#include "nmr/world.hpp"

namespace py = pybind11;
using namespace nmr;

namespace {

py::dict verdict_to_dict(const Verdict& verdict) {
  py::dict d;
  d["pass"] = verdict.pass;
  d["violations"] = verdict.violation_count;
  d["prefix_violations"] = verdict.prefix_violation_count;
  d["checks"] = verdict.checks;
  if (verdict.stabilization_time)
    d["stabilization_time"] = *verdict.stabilization_time;
  else
    d["stabilization_time"] = py::none();
  py::list samples;
  for (const auto& violation : verdict.violations) {
    py::dict v;
    v["time"] = violation.time;
    v["subjects"] = violation.subjects;
    v["rule"] = violation.rule;
    samples.append(std::move(v));
  }
  d["violation_samples"] = std::move(samples);
  return d;
}

py::dict summary_to_dict(const RunSummary& summary) {
  py::dict d;
  d["label"] = summary.label;
  d["seed"] = summary.seed;
  d["pass"] = summary.pass;
  d["events"] = summary.event_count;
  d["prefix"] = summary.prefix;
  d["maxn_bound"] = summary.maxn_bound;
  if (summary.maxn_stabilization_pulse)
    d["maxn_stabilization_pulse"] = *summary.maxn_stabilization_pulse;
  if (summary.stabilization) d["stabilization_time"] = *summary.stabilization;
  py::dict checkers;
  for (const auto& outcome : summary.outcomes)
    checkers[py::str(outcome.id)] = verdict_to_dict(outcome.verdict);
  d["checkers"] = std::move(checkers);
  return d;
}

}  // namespace

PYBIND11_MODULE(_nmrsim, m) {
  m.doc() = "pulse-driven mutual remainder / LCM robot simulator";

  py::register_exception<InputError>(m, "InputError");

  py::class_<Graph>(m, "Graph")
      .def_static("path", &Graph::path, py::arg("k"))
      .def_static("cycle", &Graph::cycle, py::arg("k"))
      .def_static("star", &Graph::star, py::arg("leaves"))
      .def_static("complete", &Graph::complete, py::arg("k"))
      .def_static("random_connected", &Graph::random_connected, py::arg("k"),
                  py::arg("seed"))
      .def_static(
          "from_edges",
          [](int k, const std::vector<std::pair<int, int>>& edges,
             bool require_connected) {
            return Graph::from_edges(k, edges, require_connected);
          },
          py::arg("k"), py::arg("edges"), py::arg("require_connected") = true)
      .def_static(
          "geometric",
          [](const std::vector<std::pair<double, double>>& points,
             double radius) {
            std::vector<Point2D> positions;
            for (auto [x, y] : points) positions.push_back({x, y});
            return Graph::geometric(positions, radius);
          },
          py::arg("points"), py::arg("radius"))
      .def_property_readonly("k", &Graph::node_count)
      .def("neighbors", &Graph::neighbors, py::arg("i"))
      .def("closed_neighborhood", &Graph::closed_neighborhood, py::arg("i"))
      .def("degree", &Graph::degree, py::arg("i"))
      .def("max_degree", &Graph::max_degree)
      .def("diameter", &Graph::diameter)
      .def("is_connected", &Graph::is_connected)
      .def("has_edge", &Graph::has_edge, py::arg("i"), py::arg("j"))
      .def("edge_list", &Graph::edge_list)
      .def("stabilized_max_n",
           [](const Graph& g, int i) { return stabilized_max_n(g, i); },
           py::arg("i"));

  py::class_<Trace>(m, "Trace")
      .def("to_jsonl", &Trace::to_jsonl)
      .def_static("from_jsonl",
                  [](const std::string& text) {
                    return Trace::from_jsonl_string(text);
                  },
                  py::arg("text"))
      .def("__len__", &Trace::size)
      .def("events", [](const Trace& trace) {
        py::list events;
        for (const auto& event : trace.events()) {
          py::dict d;
          d["t"] = event.time;
          d["subject"] = event.subject;
          d["kind"] = std::string(to_string(event.kind));
          if (event.kind == EventKind::kLightSet) d["light"] = event.light;
          if (event.kind == EventKind::kGraph) {
            d["k"] = event.node_count;
            d["edges"] = event.edges;
          }
          events.append(std::move(d));
        }
        return events;
      });

  m.def(
      "run_nmr",
      [](const Graph& g, long horizon, py::object clocks, py::object seed) {
        NmrConfiguration initial;
        if (!clocks.is_none())
          initial = explicit_nmr_init(g, clocks.cast<std::vector<int>>());
        else if (!seed.is_none())
          initial = adversarial_nmr_init(g, seed.cast<std::uint64_t>());
        else
          initial = zeros_nmr_init(g);
        return run_nmr(g, initial, horizon);
      },
      py::arg("graph"), py::arg("horizon"), py::arg("clocks") = py::none(),
      py::arg("seed") = py::none(),
      "Simulate the neighborhood-mutual-remainder clock protocol.");

  m.def("check_l_exclusion",
        [](const Trace& trace, int l, double prefix) {
          return verdict_to_dict(check_l_exclusion(trace, l, prefix));
        },
        py::arg("trace"), py::arg("l"), py::arg("prefix") = 0.0);
  m.def("check_global_fairness",
        [](const Trace& trace, const std::vector<long>& windows,
           double prefix) {
          FairnessOptions options;
          options.prefix = prefix;
          options.window_pulses = windows;
          return verdict_to_dict(check_global_fairness(trace, options));
        },
        py::arg("trace"), py::arg("window_pulses"), py::arg("prefix") = 0.0);
  m.def("check_local_rendezvous",
        [](const Trace& trace, double prefix) {
          return verdict_to_dict(check_local_rendezvous(trace, prefix));
        },
        py::arg("trace"), py::arg("prefix") = 0.0);
  m.def("check_move_atomic",
        [](const Trace& trace, double prefix) {
          return verdict_to_dict(check_move_atomic(trace, prefix));
        },
        py::arg("trace"), py::arg("prefix") = 0.0);
  m.def("check_fsync",
        [](const Trace& trace, double prefix, py::object look_light,
           py::object move_light) {
          FsyncOptions options;
          options.prefix = prefix;
          if (!look_light.is_none()) options.look_light = look_light.cast<int>();
          if (!move_light.is_none()) options.move_light = move_light.cast<int>();
          return verdict_to_dict(check_fsync(trace, options));
        },
        py::arg("trace"), py::arg("prefix") = 0.0,
        py::arg("look_light") = py::none(), py::arg("move_light") = py::none());
  m.def("check_agreement",
        [](const Trace& trace, int modulus, double prefix) {
          return verdict_to_dict(
              check_agreement(trace, {.prefix = prefix, .modulus = modulus}));
        },
        py::arg("trace"), py::arg("modulus"), py::arg("prefix") = 0.0);
  m.def("check_phase_recurrence",
        [](const Trace& trace, long window, double prefix) {
          RecurrenceOptions options;
          options.prefix = prefix;
          options.window_pulses = uniform_windows(trace, window);
          return verdict_to_dict(check_phase_recurrence(trace, options));
        },
        py::arg("trace"), py::arg("window"), py::arg("prefix") = 0.0);

  py::class_<Scenario>(m, "Scenario");
  m.def("load_scenario", &load_scenario_file, py::arg("path"));
  m.def("parse_scenario", &parse_scenario_text, py::arg("text"));
  m.def(
      "run_scenario",
      [](const Scenario& scenario, std::uint64_t seed, bool measure) {
        const auto artifacts = run_scenario_once(scenario, seed, measure);
        py::dict d = summary_to_dict(artifacts.summary);
        d["trace_jsonl"] = artifacts.trace.to_jsonl();
        return d;
      },
      py::arg("scenario"), py::arg("seed") = 0,
      py::arg("measure") = true);
  m.def(
      "sweep_scenario",
      [](const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
         int jobs) {
        const auto report = sweep_scenario(scenario, seeds, jobs);
        py::dict d;
        d["runs"] = report.runs;
        d["passed"] = report.passed;
        d["pass_rate"] = report.pass_rate();
        if (report.stabilization_max)
          d["stabilization_max"] = *report.stabilization_max;
        if (report.stabilization_mean)
          d["stabilization_mean"] = *report.stabilization_mean;
        py::list summaries;
        for (const auto& summary : report.summaries)
          summaries.append(summary_to_dict(summary));
        d["summaries"] = std::move(summaries);
        return d;
      },
      py::arg("scenario"), py::arg("seeds"), py::arg("jobs") = 1);
}
