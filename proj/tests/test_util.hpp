#pragma once

// Shared helpers for the test suites: small-graph enumeration, an
// independent all-pairs shortest path oracle, and synthetic trace builders.

#include <algorithm>
#include <optional>
#include <vector>

#include "nmr/checkers.hpp"
#include "nmr/topology.hpp"
#include "nmr/trace.hpp"

namespace nmr::testing {

/// Every labeled connected simple graph on k nodes (k small: 1->1, 2->1,
/// 3->4, 4->38 graphs).
inline std::vector<Graph> all_connected_graphs(int k) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) slots.emplace_back(i, j);
  std::vector<Graph> graphs;
  for (unsigned long mask = 0; mask < (1ul << slots.size()); ++mask) {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t b = 0; b < slots.size(); ++b)
      if (mask & (1ul << b)) edges.push_back(slots[b]);
    Graph g = Graph::from_edges(k, edges, /*require_connected=*/false);
    if (g.is_connected()) graphs.push_back(std::move(g));
  }
  return graphs;
}

/// Floyd-Warshall diameter; the dual route against the BFS implementation.
inline std::optional<int> floyd_warshall_diameter(const Graph& g) {
  const int k = g.node_count();
  const int inf = 1 << 20;
  std::vector<std::vector<int>> dist(k, std::vector<int>(k, inf));
  for (int i = 0; i < k; ++i) dist[i][i] = 0;
  for (auto [a, b] : g.edge_list()) dist[a][b] = dist[b][a] = 1;
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        dist[i][j] = std::min(dist[i][j], dist[i][m] + dist[m][j]);
  int best = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (dist[i][j] >= inf) return std::nullopt;  // disconnected
      best = std::max(best, dist[i][j]);
    }
  return best;
}

/// Builder for hand-constructed violating traces.
class TraceBuilder {
 public:
  TraceBuilder& graph(double t, const Graph& g) {
    trace_.append(graph_event(t, g.node_count(), g.edge_list()));
    return *this;
  }
  TraceBuilder& graph(double t, int k,
                      std::vector<std::pair<int, int>> edges) {
    trace_.append(graph_event(t, k, std::move(edges)));
    return *this;
  }
  TraceBuilder& pulse(double t, int s) {
    trace_.append(pulse_event(t, s));
    return *this;
  }
  TraceBuilder& cs(double t_in, double t_out, int s) {
    trace_.append(enter_cs_event(t_in, s));
    trace_.append(exit_cs_event(t_out, s));
    return *this;
  }
  TraceBuilder& look(double t, int s) {
    trace_.append(look_event(t, s));
    return *this;
  }
  TraceBuilder& compute(double t, int s) {
    trace_.append(compute_event(t, s));
    return *this;
  }
  TraceBuilder& move(double t0, double t1, int s) {
    trace_.append(move_start_event(t0, s));
    trace_.append(move_end_event(t1, s));
    return *this;
  }
  TraceBuilder& light(double t, int s, int value) {
    trace_.append(light_set_event(t, s, value));
    return *this;
  }
  Trace build() {
    trace_.sort_by_time();
    return std::move(trace_);
  }

 private:
  Trace trace_;
};

/// Times at which `subject` enters the critical section.
inline std::vector<double> cs_entry_times(const Trace& trace, int subject) {
  std::vector<double> times;
  for (const auto& event : trace.events())
    if (event.subject == subject && event.kind == EventKind::kEnterCs)
      times.push_back(event.time);
  return times;
}

inline std::vector<double> event_times(const Trace& trace, int subject,
                                       EventKind kind) {
  std::vector<double> times;
  for (const auto& event : trace.events())
    if (event.subject == subject && event.kind == kind)
      times.push_back(event.time);
  return times;
}

/// Open neighborhood of i per the most recent GRAPH event at or before t.
inline std::vector<int> neighbors_at(const Trace& trace, double t, int i) {
  const TraceEvent* found = nullptr;
  for (const auto& event : trace.events())
    if (event.kind == EventKind::kGraph && event.time <= t) found = &event;
  std::vector<int> neighbors;
  if (!found) return neighbors;
  for (auto [a, b] : found->edges) {
    if (a == i) neighbors.push_back(b);
    if (b == i) neighbors.push_back(a);
  }
  return neighbors;
}

/// Light value of `subject` most recently written strictly before t.
inline std::optional<int> light_before(const Trace& trace, int subject,
                                       double t) {
  std::optional<int> value;
  for (const auto& event : trace.events())
    if (event.kind == EventKind::kLightSet && event.subject == subject &&
        event.time < t)
      value = event.light;
  return value;
}

inline std::optional<double> last_pulse_before(const Trace& trace, int subject,
                                               double t) {
  std::optional<double> found;
  for (const auto& event : trace.events())
    if (event.kind == EventKind::kPulse && event.subject == subject &&
        event.time < t)
      found = event.time;
  return found;
}

/// Tripled-clock guard shield: before any post-prefix LOOK of r_i, every
/// neighbor's most recent pulse must have observed r_i's light as 0.2 or
/// 1.0 (raw 2 or 3). Returns the number of violating observations.
inline long shield_violations(const Trace& trace, double prefix) {
  long violations = 0;
  for (const auto& event : trace.events()) {
    if (event.kind != EventKind::kLook || event.time < prefix) continue;
    for (int j : neighbors_at(trace, event.time, event.subject)) {
      const auto pulse = last_pulse_before(trace, j, event.time);
      if (!pulse) continue;
      const auto seen = light_before(trace, event.subject, *pulse);
      if (!seen) continue;  // pre-first-write, unrecorded initial light
      if (*seen != 2 && *seen != 3) ++violations;
    }
  }
  return violations;
}

/// MOVE slot rule for the tripled clock: every post-prefix MOVE must happen
/// at a pulse whose pre-increment clock (== last written light) is 1 mod 3.
inline long move_slot_violations(const Trace& trace, double prefix) {
  long violations = 0;
  for (const auto& event : trace.events()) {
    if (event.kind != EventKind::kMoveStart || event.time < prefix) continue;
    const auto pre = light_before(trace, event.subject, event.time);
    if (!pre) continue;
    if (*pre % 3 != 1) ++violations;
  }
  return violations;
}

}  // namespace nmr::testing
