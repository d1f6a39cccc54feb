#include "nmr/nmr.hpp"

#include <algorithm>

#include "nmr/rand.hpp"

namespace nmr {

int stabilized_max_n(const Graph& g, int i) {
  int best = 0;
  for (int j : g.closed_neighborhood(i))
    best = std::max(best, g.closed_size(j));
  return best;
}

void validate_nmr_configuration(const Graph& g, const NmrConfiguration& c) {
  const int k = g.node_count();
  if (static_cast<int>(c.states.size()) != k)
    throw InputError("configuration size does not match graph");
  for (const auto& s : c.states) {
    if (s.n_published < 1 || s.n_published > k)
      throw InputError("n_published outside 1..k");
    if (s.max_n < 1 || s.max_n > k) throw InputError("max_n outside 1..k");
    if (s.clock < 0 || s.clock > k) throw InputError("clock outside 0..k");
  }
}

NmrStepResult nmr_step(const Graph& g, const NmrConfiguration& config) {
  validate_nmr_configuration(g, config);
  const int k = g.node_count();
  NmrStepResult result;
  result.config.states.resize(k);
  result.config.pulse = config.pulse + 1;
  result.section.assign(k, Section::kRemainder);
  result.rendezvous.assign(k, false);

  for (int i = 0; i < k; ++i) {
    auto& next = result.config.states[i];
    next.n_published = g.closed_size(i);
    int max_n = 0;
    for (int j : g.closed_neighborhood(i))
      max_n = std::max(max_n, config.states[j].n_published);
    next.max_n = max_n;
    next.clock = (config.states[i].clock + 1) % (max_n + 1);
    if (next.clock == 1) result.section[i] = Section::kCritical;
  }
  for (int i = 0; i < k; ++i) {
    if (result.section[i] == Section::kCritical) continue;
    bool clear = true;
    for (int j : g.closed_neighborhood(i))
      if (result.config.states[j].clock == 1) {
        clear = false;
        break;
      }
    result.rendezvous[i] = clear;
  }
  return result;
}

Trace run_nmr(const Graph& g, const NmrConfiguration& initial, long horizon) {
  if (horizon < 1) throw InputError("horizon must be >= 1");
  validate_nmr_configuration(g, initial);
  Trace trace;
  const auto edges = g.edge_list();
  NmrConfiguration config = initial;
  for (long p = 1; p <= horizon; ++p) {
    const double t = static_cast<double>(p);
    trace.append(graph_event(t, g.node_count(), edges));
    auto step = nmr_step(g, config);
    for (int i = 0; i < g.node_count(); ++i) {
      trace.append(pulse_event(t, i));
      if (step.section[i] == Section::kCritical) {
        // Entry and exit land inside the same pulse slot.
        trace.append(enter_cs_event(t, i));
        trace.append(exit_cs_event(t + 0.5, i));
      } else if (step.rendezvous[i]) {
        trace.append(rendezvous_event(t, i));
      }
    }
    config = std::move(step.config);
  }
  trace.sort_by_time();
  return trace;
}

NmrConfiguration zeros_nmr_init(const Graph& g) {
  NmrConfiguration config;
  config.states.assign(g.node_count(), NmrProcessState{});
  return config;
}

NmrConfiguration explicit_nmr_init(const Graph& g,
                                   const std::vector<int>& clocks) {
  auto config = zeros_nmr_init(g);
  if (clocks.size() != config.states.size())
    throw InputError("clock vector size does not match graph");
  for (std::size_t i = 0; i < clocks.size(); ++i)
    config.states[i].clock = clocks[i];
  validate_nmr_configuration(g, config);
  return config;
}

NmrConfiguration adversarial_nmr_init(const Graph& g, std::uint64_t seed) {
  const int k = g.node_count();
  Rng rng(mix_seed(seed, 0x6e6d72ULL));
  NmrConfiguration config;
  config.states.resize(k);
  for (auto& s : config.states) {
    s.n_published = static_cast<int>(rng.between(1, k));
    s.max_n = static_cast<int>(rng.between(1, k));
    s.clock = static_cast<int>(rng.between(0, k));
  }
  return config;
}

NmrClockEnumerator::NmrClockEnumerator(const Graph& g)
    : graph_(g), clocks_(g.node_count(), 0) {
  total_ = 1;
  for (int i = 0; i < g.node_count(); ++i) total_ *= g.node_count() + 1;
}

std::optional<NmrConfiguration> NmrClockEnumerator::next() {
  if (done_) return std::nullopt;
  auto config = explicit_nmr_init(graph_, clocks_);
  // Odometer increment over {0..k} per digit.
  const int k = graph_.node_count();
  int i = 0;
  for (; i < k; ++i) {
    if (clocks_[i] < k) {
      ++clocks_[i];
      break;
    }
    clocks_[i] = 0;
  }
  if (i == k) done_ = true;
  return config;
}

}  // namespace nmr
