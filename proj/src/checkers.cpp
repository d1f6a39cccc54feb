#include "nmr/checkers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>

namespace nmr {

namespace {

constexpr double kForever = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxRecordedViolations = 256;

void record(Verdict& verdict, double prefix, double time,
            std::vector<int> subjects, std::string rule) {
  if (time >= prefix)
    ++verdict.violation_count;
  else
    ++verdict.prefix_violation_count;
  if (verdict.violations.size() < kMaxRecordedViolations)
    verdict.violations.push_back({time, std::move(subjects), std::move(rule)});
  verdict.pass = verdict.violation_count == 0;
}

struct CsSpan {
  int subject = 0;
  double start = 0.0;
  double end = 0.0;
};

struct MoveInterval {
  int subject = 0;
  double start = 0.0;
  double end = 0.0;
};

// Adjacency view over one GRAPH event; nodes as uint64 masks for fast
// neighborhood emptiness tests (k <= 64 is far beyond desk scale).
struct GraphView {
  int k = 0;
  std::vector<std::vector<int>> adjacency;
  std::vector<std::uint64_t> closed_mask;

  static GraphView build(const TraceEvent& event) {
    if (event.node_count < 1 || event.node_count > 64)
      throw InputError("GRAPH event with unsupported node count");
    GraphView view;
    view.k = event.node_count;
    view.adjacency.resize(view.k);
    view.closed_mask.resize(view.k);
    for (int i = 0; i < view.k; ++i)
      view.closed_mask[i] = std::uint64_t{1} << i;
    for (auto [a, b] : event.edges) {
      if (a < 0 || a >= view.k || b < 0 || b >= view.k)
        throw InputError("GRAPH event edge out of range");
      view.adjacency[a].push_back(b);
      view.adjacency[b].push_back(a);
      view.closed_mask[a] |= std::uint64_t{1} << b;
      view.closed_mask[b] |= std::uint64_t{1} << a;
    }
    return view;
  }
};

struct TraceIndex {
  int subject_count = 0;
  std::vector<std::vector<double>> pulses_by_subject;
  std::vector<double> pulse_grid;  // distinct sorted times of all pulses
  std::vector<CsSpan> cs_spans;    // sorted by start
  std::vector<std::vector<CsSpan>> cs_by_subject;
  std::vector<MoveInterval> moves;
  std::vector<const TraceEvent*> graph_events;  // sorted by time
  std::vector<std::vector<std::pair<double, int>>> lights_by_subject;
  std::vector<std::vector<std::pair<double, EventKind>>> phases_by_subject;
  mutable std::map<const TraceEvent*, GraphView> graph_cache;

  const GraphView* graph_at(double time) const {
    const TraceEvent* found = nullptr;
    for (const auto* event : graph_events) {
      if (event->time > time) break;
      found = event;
    }
    if (!found) return nullptr;
    auto it = graph_cache.find(found);
    if (it == graph_cache.end())
      it = graph_cache.emplace(found, GraphView::build(*found)).first;
    return &it->second;
  }

  const GraphView* require_graph_at(double time) const {
    const auto* view = graph_at(time);
    if (!view)
      throw InputError("trace has no GRAPH event at or before t=" +
                       std::to_string(time));
    return view;
  }
};

TraceIndex build_index(const Trace& trace) {
  TraceIndex index;
  for (const auto& event : trace.events())
    index.subject_count = std::max(index.subject_count, event.subject + 1);
  const int n = index.subject_count;
  index.pulses_by_subject.resize(n);
  index.cs_by_subject.resize(n);
  index.lights_by_subject.resize(n);
  index.phases_by_subject.resize(n);

  std::vector<double> last_time(n, -kForever);
  std::vector<std::vector<double>> open_cs(n);
  std::vector<std::optional<double>> open_move(n);
  std::vector<std::optional<double>> pending_look(n);

  for (const auto& event : trace.events()) {
    const int s = event.subject;
    if (s >= 0) {
      if (event.time < last_time[s])
        throw InputError("events of subject " + std::to_string(s) +
                         " are not time-ordered");
      last_time[s] = event.time;
    }
    switch (event.kind) {
      case EventKind::kPulse:
        index.pulses_by_subject[s].push_back(event.time);
        index.pulse_grid.push_back(event.time);
        break;
      case EventKind::kEnterCs:
        open_cs[s].push_back(event.time);
        break;
      case EventKind::kExitCs: {
        if (open_cs[s].empty())
          throw InputError("EXIT_CS without matching ENTER_CS");
        const double start = open_cs[s].back();
        open_cs[s].pop_back();
        index.cs_spans.push_back({s, start, event.time});
        break;
      }
      case EventKind::kLook:
        if (pending_look[s])
          index.cs_spans.push_back({s, *pending_look[s], *pending_look[s]});
        pending_look[s] = event.time;
        index.phases_by_subject[s].emplace_back(event.time, EventKind::kLook);
        break;
      case EventKind::kCompute: {
        const double start = pending_look[s].value_or(event.time);
        pending_look[s].reset();
        index.cs_spans.push_back({s, start, event.time});
        index.phases_by_subject[s].emplace_back(event.time,
                                                EventKind::kCompute);
        break;
      }
      case EventKind::kMoveStart:
        if (open_move[s])
          throw InputError("nested MOVE_START for one subject");
        open_move[s] = event.time;
        index.phases_by_subject[s].emplace_back(event.time,
                                                EventKind::kMoveStart);
        break;
      case EventKind::kMoveEnd:
        if (!open_move[s])
          throw InputError("MOVE_END without matching MOVE_START");
        index.moves.push_back({s, *open_move[s], event.time});
        open_move[s].reset();
        break;
      case EventKind::kLightSet:
        index.lights_by_subject[s].emplace_back(event.time, event.light);
        break;
      case EventKind::kGraph:
        index.graph_events.push_back(&event);
        break;
      case EventKind::kRendezvous:
        break;
    }
  }
  for (int s = 0; s < n; ++s) {
    for (double start : open_cs[s]) index.cs_spans.push_back({s, start, kForever});
    if (pending_look[s])
      index.cs_spans.push_back({s, *pending_look[s], *pending_look[s]});
    if (open_move[s]) throw InputError("MOVE_START without matching MOVE_END");
  }
  std::sort(index.cs_spans.begin(), index.cs_spans.end(),
            [](const CsSpan& a, const CsSpan& b) { return a.start < b.start; });
  for (const auto& span : index.cs_spans)
    index.cs_by_subject[span.subject].push_back(span);
  std::sort(index.graph_events.begin(), index.graph_events.end(),
            [](const TraceEvent* a, const TraceEvent* b) {
              return a->time < b->time;
            });
  std::sort(index.pulse_grid.begin(), index.pulse_grid.end());
  index.pulse_grid.erase(
      std::unique(index.pulse_grid.begin(), index.pulse_grid.end()),
      index.pulse_grid.end());
  return index;
}

// Subjects in CS at each pulse-grid instant, as bit masks.
std::vector<std::uint64_t> cs_masks_on_grid(const TraceIndex& index) {
  if (index.subject_count > 64)
    throw InputError("more than 64 subjects unsupported");
  std::vector<std::uint64_t> masks(index.pulse_grid.size(), 0);
  for (const auto& span : index.cs_spans) {
    const auto lo = std::lower_bound(index.pulse_grid.begin(),
                                     index.pulse_grid.end(), span.start);
    for (auto it = lo; it != index.pulse_grid.end() && *it <= span.end; ++it)
      masks[static_cast<std::size_t>(it - index.pulse_grid.begin())] |=
          std::uint64_t{1} << span.subject;
  }
  return masks;
}

// Most recent light write at or before `time`; nullopt when none.
std::optional<int> light_at(const TraceIndex& index, int subject,
                            double time) {
  const auto& writes = index.lights_by_subject[subject];
  auto it = std::upper_bound(
      writes.begin(), writes.end(), time,
      [](double t, const std::pair<double, int>& w) { return t < w.first; });
  if (it == writes.begin()) return std::nullopt;
  return (it - 1)->second;
}

long pulse_slot(const std::vector<double>& pulses, double time) {
  auto it = std::upper_bound(pulses.begin(), pulses.end(), time);
  return static_cast<long>(it - pulses.begin()) - 1;
}

}  // namespace

std::vector<long> uniform_windows(const Trace& trace, long window) {
  int subjects = 0;
  for (const auto& event : trace.events())
    subjects = std::max(subjects, event.subject + 1);
  return std::vector<long>(static_cast<std::size_t>(subjects), window);
}

Verdict check_l_exclusion(const Trace& trace, int l, double prefix) {
  if (l < 1) throw InputError("l must be >= 1");
  const auto index = build_index(trace);
  if (index.subject_count > 64)
    throw InputError("more than 64 subjects unsupported");
  Verdict verdict;
  if (!index.cs_spans.empty() && index.graph_events.empty())
    throw InputError("l-exclusion needs GRAPH events");

  // Sweep CS entry instants, keeping the set of concurrently-open spans.
  std::vector<double> instants;
  for (const auto& span : index.cs_spans) instants.push_back(span.start);
  std::sort(instants.begin(), instants.end());
  instants.erase(std::unique(instants.begin(), instants.end()),
                 instants.end());
  std::multiset<std::pair<double, int>> active;  // (end, subject)
  std::size_t next_span = 0;
  for (double t : instants) {
    while (next_span < index.cs_spans.size() &&
           index.cs_spans[next_span].start <= t) {
      active.emplace(index.cs_spans[next_span].end,
                     index.cs_spans[next_span].subject);
      ++next_span;
    }
    while (!active.empty() && active.begin()->first < t)
      active.erase(active.begin());
    std::uint64_t mask = 0;
    for (auto [end, subject] : active) mask |= std::uint64_t{1} << subject;
    const auto* graph = index.require_graph_at(t);
    for (int i = 0; i < graph->k; ++i) {
      if (t >= prefix) ++verdict.checks;
      const std::uint64_t in_cs = mask & graph->closed_mask[i];
      if (std::popcount(in_cs) > l) {
        std::vector<int> offenders;
        for (int j = 0; j < graph->k; ++j)
          if (in_cs & (std::uint64_t{1} << j)) offenders.push_back(j);
        record(verdict, prefix, t, std::move(offenders), "l-exclusion");
      }
    }
  }
  return verdict;
}

Verdict check_global_fairness(const Trace& trace,
                              const FairnessOptions& options) {
  const auto index = build_index(trace);
  Verdict verdict;
  if (static_cast<int>(options.window_pulses.size()) < index.subject_count)
    throw InputError("fairness needs a window per subject");
  for (int i = 0; i < index.subject_count; ++i) {
    const auto& pulses = index.pulses_by_subject[i];
    if (pulses.empty()) continue;
    const long w = options.window_pulses[i];
    if (w < 1) throw InputError("fairness window must be >= 1");
    // CS entries mapped onto this subject's own pulse slots.
    std::vector<bool> enters(pulses.size(), false);
    for (const auto& span : index.cs_by_subject[i]) {
      const long slot = pulse_slot(pulses, span.start);
      if (slot >= 0) enters[static_cast<std::size_t>(slot)] = true;
    }
    std::vector<long> prefix_sum(pulses.size() + 1, 0);
    for (std::size_t a = 0; a < pulses.size(); ++a)
      prefix_sum[a + 1] = prefix_sum[a] + (enters[a] ? 1 : 0);
    for (std::size_t a = 0; a + w <= pulses.size(); ++a) {
      const bool counted = pulses[a] >= options.prefix;
      if (counted) ++verdict.checks;
      if (prefix_sum[a + w] - prefix_sum[a] == 0)
        record(verdict, options.prefix, pulses[a], {i}, "fairness");
    }
  }
  return verdict;
}

Verdict check_local_rendezvous(const Trace& trace, double prefix) {
  const auto index = build_index(trace);
  Verdict verdict;
  if (index.pulse_grid.empty()) return verdict;
  if (index.graph_events.empty())
    throw InputError("rendezvous needs GRAPH events");
  const auto masks = cs_masks_on_grid(index);
  for (std::size_t a = 0; a < index.pulse_grid.size(); ++a) {
    const double t = index.pulse_grid[a];
    const auto* graph = index.require_graph_at(t);
    for (int i = 0; i < graph->k; ++i) {
      const long window =
          static_cast<long>(graph->adjacency[i].size()) + 2;  // |N[i]| + 1
      if (a + static_cast<std::size_t>(window) > index.pulse_grid.size())
        continue;
      if (t >= prefix) ++verdict.checks;
      bool found = false;
      for (long b = 0; b < window; ++b)
        if ((masks[a + static_cast<std::size_t>(b)] &
             graph->closed_mask[i]) == 0) {
          found = true;
          break;
        }
      if (!found) record(verdict, prefix, t, {i}, "rendezvous");
    }
  }
  return verdict;
}

Verdict check_move_atomic(const Trace& trace, double prefix) {
  const auto index = build_index(trace);
  Verdict verdict;
  if (!index.moves.empty() && index.graph_events.empty())
    throw InputError("move-atomic needs GRAPH events");
  for (const auto& move : index.moves) {
    // Closed neighborhood anchored at the mover's issuing pulse.
    const auto* graph = index.require_graph_at(move.start);
    if (move.subject >= graph->k) continue;
    std::vector<int> nbhd = graph->adjacency[move.subject];
    nbhd.push_back(move.subject);
    for (int j : nbhd) {
      if (j >= index.subject_count) continue;
      if (move.start >= prefix) ++verdict.checks;
      for (const auto& span : index.cs_by_subject[j]) {
        if (span.start > move.end) break;
        if (span.end >= move.start)
          record(verdict, prefix, std::max(move.start, span.start),
                 {move.subject, j}, "move-atomic");
      }
    }
  }
  return verdict;
}

Verdict check_fsync(const Trace& trace, const FsyncOptions& options) {
  const auto index = build_index(trace);
  Verdict verdict;

  struct PhaseRecord {
    bool is_move = false;
    int subject = 0;
    double start = 0.0;
    double end = 0.0;
  };
  std::vector<PhaseRecord> records;
  for (const auto& span : index.cs_spans)
    if (span.start >= options.prefix)
      records.push_back({false, span.subject, span.start, span.end});
  for (const auto& move : index.moves)
    if (move.start >= options.prefix)
      records.push_back({true, move.subject, move.start, move.end});
  std::sort(records.begin(), records.end(),
            [](const PhaseRecord& a, const PhaseRecord& b) {
              if (a.start != b.start) return a.start < b.start;
              return a.subject < b.subject;
            });

  if (options.look_light || options.move_light) {
    for (const auto& rec : records) {
      ++verdict.checks;
      const auto light = light_at(index, rec.subject, rec.start);
      if (!rec.is_move && options.look_light &&
          light != *options.look_light)
        record(verdict, options.prefix, rec.start, {rec.subject},
               "fsync-look-light");
      if (rec.is_move && options.move_light && light != *options.move_light)
        record(verdict, options.prefix, rec.start, {rec.subject},
               "fsync-move-light");
    }
  }

  // Group maximal runs of same-phase records into periods.
  struct Period {
    bool is_move = false;
    double start = kForever;
    double end = -kForever;
    std::vector<int> actors;
  };
  std::vector<Period> periods;
  for (const auto& rec : records) {
    if (periods.empty() || periods.back().is_move != rec.is_move) {
      periods.push_back({rec.is_move, rec.start, rec.end, {}});
    }
    auto& period = periods.back();
    period.start = std::min(period.start, rec.start);
    period.end = std::max(period.end, rec.end);
    period.actors.push_back(rec.subject);
  }

  int robots = 0;
  for (int s = 0; s < index.subject_count; ++s)
    if (!index.pulses_by_subject[s].empty()) robots = s + 1;

  // Boundary periods may be cut off by the prefix or the horizon.
  for (std::size_t p = 1; p + 1 < periods.size(); ++p) {
    const auto& period = periods[p];
    ++verdict.checks;
    std::vector<int> seen(robots, 0);
    for (int actor : period.actors)
      if (actor < robots) ++seen[actor];
    bool ok = true;
    for (int s = 0; s < robots; ++s) {
      if (options.allow_stalled_repeats ? seen[s] < 1 : seen[s] != 1)
        ok = false;
    }
    if (!ok)
      record(verdict, options.prefix, period.start, period.actors,
             "fsync-period");
    if (period.start <= periods[p - 1].end)
      record(verdict, options.prefix, period.start, period.actors,
             "fsync-overlap");
  }
  if (!periods.empty() && periods.size() >= 2 &&
      periods.back().start <= periods[periods.size() - 2].end)
    record(verdict, options.prefix, periods.back().start,
           periods.back().actors, "fsync-overlap");
  return verdict;
}

Verdict check_agreement(const Trace& trace, const AgreementOptions& options) {
  if (options.modulus < 1) throw InputError("agreement needs a modulus");
  const auto index = build_index(trace);
  Verdict verdict;
  std::vector<std::optional<int>> current(
      static_cast<std::size_t>(index.subject_count));
  auto cyclic_gap = [&](int a, int b) {
    const int m = options.modulus;
    const int d = ((a - b) % m + m) % m;
    return std::min(d, m - d);
  };
  for (const auto& event : trace.events()) {
    if (event.kind != EventKind::kLightSet) continue;
    if (event.time >= options.prefix) {
      const auto* graph = index.graph_at(event.time);
      if (!graph) throw InputError("agreement needs GRAPH events");
      if (event.subject < graph->k) {
        for (int j : graph->adjacency[event.subject]) {
          if (j >= index.subject_count || !current[j]) continue;
          ++verdict.checks;
          if (cyclic_gap(event.light, *current[j]) > 1)
            record(verdict, options.prefix, event.time, {event.subject, j},
                   "agreement");
        }
      }
    }
    current[event.subject] = event.light;
  }
  return verdict;
}

Verdict check_phase_recurrence(const Trace& trace,
                               const RecurrenceOptions& options) {
  const auto index = build_index(trace);
  Verdict verdict;
  if (static_cast<int>(options.window_pulses.size()) < index.subject_count)
    throw InputError("recurrence needs a window per subject");
  struct Tracked {
    EventKind kind;
    const char* rule;
  };
  static constexpr Tracked kTracked[] = {
      {EventKind::kLook, "recurrence-look"},
      {EventKind::kCompute, "recurrence-compute"},
      {EventKind::kMoveStart, "recurrence-move"},
  };
  for (int i = 0; i < index.subject_count; ++i) {
    const auto& pulses = index.pulses_by_subject[i];
    if (pulses.empty()) continue;
    const long w = options.window_pulses[i];
    if (w < 1) throw InputError("recurrence window must be >= 1");
    for (const auto& tracked : kTracked) {
      std::vector<long> prefix_sum(pulses.size() + 1, 0);
      std::vector<long> counts(pulses.size(), 0);
      for (const auto& [time, kind] : index.phases_by_subject[i]) {
        if (kind != tracked.kind) continue;
        const long slot = pulse_slot(pulses, time);
        if (slot >= 0) ++counts[static_cast<std::size_t>(slot)];
      }
      for (std::size_t a = 0; a < pulses.size(); ++a)
        prefix_sum[a + 1] = prefix_sum[a] + counts[a];
      for (std::size_t a = 0; a + w <= pulses.size(); ++a) {
        if (pulses[a] >= options.prefix) ++verdict.checks;
        if (prefix_sum[a + w] - prefix_sum[a] == 0)
          record(verdict, options.prefix, pulses[a], {i}, tracked.rule);
      }
    }
  }
  return verdict;
}

std::optional<double> measure_stabilization(const Trace& trace,
                                            const CheckerFn& checker) {
  std::vector<double> candidates{0.0};
  for (const auto& event : trace.events())
    if (event.kind == EventKind::kPulse) candidates.push_back(event.time);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  // Closure makes pass monotone in the suffix start, so binary search for
  // the first passing candidate; a pass with zero evaluated assertions is
  // vacuous, and since post-prefix assertion counts only shrink as the
  // prefix grows, a vacuous first pass means no meaningful suffix passes.
  auto passes = [&](std::size_t idx) {
    return checker(trace, candidates[idx]).pass;
  };
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  if (!passes(hi)) return std::nullopt;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (passes(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  const Verdict verdict = checker(trace, candidates[lo]);
  if (verdict.pass && verdict.checks > 0) return candidates[lo];
  return std::nullopt;
}

}  // namespace nmr
