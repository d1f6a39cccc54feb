#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmr/common.hpp"

namespace nmr {

enum class EventKind {
  kPulse,
  kEnterCs,
  kExitCs,
  kRendezvous,
  kLook,
  kCompute,
  kMoveStart,
  kMoveEnd,
  kLightSet,
  kGraph,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);

/// One timestamped observation. `subject` is a process/robot id, or -1 for
/// whole-system events (GRAPH). Payload fields are meaningful per kind:
/// LIGHT_SET carries `light`, GRAPH carries `node_count` + `edges`.
struct TraceEvent {
  double time = 0.0;
  int subject = -1;
  EventKind kind = EventKind::kPulse;
  int light = 0;
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;

  bool operator==(const TraceEvent&) const = default;
};

TraceEvent pulse_event(double time, int subject);
TraceEvent enter_cs_event(double time, int subject);
TraceEvent exit_cs_event(double time, int subject);
TraceEvent rendezvous_event(double time, int subject);
TraceEvent look_event(double time, int subject);
TraceEvent compute_event(double time, int subject);
TraceEvent move_start_event(double time, int subject);
TraceEvent move_end_event(double time, int subject);
TraceEvent light_set_event(double time, int subject, int light);
TraceEvent graph_event(double time, int node_count,
                       std::vector<std::pair<int, int>> edges);

/// Append-only event log. Engines append in processing order and call
/// `sort_by_time()` once at the end of a run; ties keep append order, so
/// serialization is deterministic.
class Trace {
 public:
  void append(TraceEvent event) { events_.push_back(std::move(event)); }
  void sort_by_time();

  const std::vector<TraceEvent>& events() const { return events_; }
  bool empty() const { return events_.empty(); }
  std::size_t size() const { return events_.size(); }

  /// One JSON object per line:
  ///   {"t":1.0,"subject":0,"kind":"ENTER_CS"}
  /// plus "light" / "k","edges" payload keys where applicable.
  std::string to_jsonl() const;
  void write_jsonl(std::ostream& out) const;
  static Trace from_jsonl(std::istream& in);
  static Trace from_jsonl_string(const std::string& text);

  bool operator==(const Trace&) const = default;

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace nmr
