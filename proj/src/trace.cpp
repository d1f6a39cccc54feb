#include "nmr/trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace nmr {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPulse: return "PULSE";
    case EventKind::kEnterCs: return "ENTER_CS";
    case EventKind::kExitCs: return "EXIT_CS";
    case EventKind::kRendezvous: return "RENDEZVOUS";
    case EventKind::kLook: return "LOOK";
    case EventKind::kCompute: return "COMPUTE";
    case EventKind::kMoveStart: return "MOVE_START";
    case EventKind::kMoveEnd: return "MOVE_END";
    case EventKind::kLightSet: return "LIGHT_SET";
    case EventKind::kGraph: return "GRAPH";
  }
  return "UNKNOWN";
}

EventKind event_kind_from_string(std::string_view name) {
  static const std::pair<std::string_view, EventKind> table[] = {
      {"PULSE", EventKind::kPulse},
      {"ENTER_CS", EventKind::kEnterCs},
      {"EXIT_CS", EventKind::kExitCs},
      {"RENDEZVOUS", EventKind::kRendezvous},
      {"LOOK", EventKind::kLook},
      {"COMPUTE", EventKind::kCompute},
      {"MOVE_START", EventKind::kMoveStart},
      {"MOVE_END", EventKind::kMoveEnd},
      {"LIGHT_SET", EventKind::kLightSet},
      {"GRAPH", EventKind::kGraph},
  };
  for (auto [text, kind] : table)
    if (text == name) return kind;
  throw InputError("unknown trace event kind: " + std::string(name));
}

TraceEvent pulse_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kPulse};
}
TraceEvent enter_cs_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kEnterCs};
}
TraceEvent exit_cs_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kExitCs};
}
TraceEvent rendezvous_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kRendezvous};
}
TraceEvent look_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kLook};
}
TraceEvent compute_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kCompute};
}
TraceEvent move_start_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kMoveStart};
}
TraceEvent move_end_event(double time, int subject) {
  return {.time = time, .subject = subject, .kind = EventKind::kMoveEnd};
}
TraceEvent light_set_event(double time, int subject, int light) {
  return {.time = time,
          .subject = subject,
          .kind = EventKind::kLightSet,
          .light = light};
}
TraceEvent graph_event(double time, int node_count,
                       std::vector<std::pair<int, int>> edges) {
  return {.time = time,
          .subject = -1,
          .kind = EventKind::kGraph,
          .node_count = node_count,
          .edges = std::move(edges)};
}

void Trace::sort_by_time() {
  std::stable_sort(
      events_.begin(), events_.end(),
      [](const TraceEvent& a, const TraceEvent& b) { return a.time < b.time; });
}

namespace {

nlohmann::ordered_json event_to_json(const TraceEvent& event) {
  nlohmann::ordered_json j;
  j["t"] = event.time;
  j["subject"] = event.subject;
  j["kind"] = to_string(event.kind);
  if (event.kind == EventKind::kLightSet) j["light"] = event.light;
  if (event.kind == EventKind::kGraph) {
    j["k"] = event.node_count;
    auto edges = nlohmann::ordered_json::array();
    for (auto [a, b] : event.edges)
      edges.push_back(nlohmann::ordered_json::array({a, b}));
    j["edges"] = std::move(edges);
  }
  return j;
}

TraceEvent event_from_json(const nlohmann::json& j) {
  TraceEvent event;
  event.time = j.at("t").get<double>();
  event.subject = j.at("subject").get<int>();
  event.kind = event_kind_from_string(j.at("kind").get<std::string>());
  if (event.kind == EventKind::kLightSet)
    event.light = j.at("light").get<int>();
  if (event.kind == EventKind::kGraph) {
    event.node_count = j.at("k").get<int>();
    for (const auto& e : j.at("edges"))
      event.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  return event;
}

}  // namespace

void Trace::write_jsonl(std::ostream& out) const {
  for (const auto& event : events_) out << event_to_json(event).dump() << '\n';
}

std::string Trace::to_jsonl() const {
  std::ostringstream out;
  write_jsonl(out);
  return out.str();
}

Trace Trace::from_jsonl(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      trace.append(event_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("trace line " + std::to_string(line_number) + ": " +
                       e.what());
    }
  }
  return trace;
}

Trace Trace::from_jsonl_string(const std::string& text) {
  std::istringstream in(text);
  return from_jsonl(in);
}

}  // namespace nmr
