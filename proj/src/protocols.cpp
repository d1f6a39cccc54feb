#include <algorithm>
#include <limits>

#include "nmr/world.hpp"

// The three LCM protocol steps. Shared conventions: MaxN is recomputed from
// Nlight reads at every pulse, light writes land at the pulse instant, and
// COMPUTE output is buffered in the state and consumed by the next MOVE.

namespace nmr {

void RobotEngine::step_move_atomic_global(int robot, double now) {
  const Graph& graph = graph_at(now);
  const auto nbhd = graph.closed_neighborhood(robot);
  auto& st = states_[robot];

  int maxn = 0;
  bool all_nonzero = true;
  for (int j : nbhd) {
    maxn = std::max(maxn, read_point(nlight_cells_[j], now));
    if (read_point(light_cells_[j], now) == 0) all_nonzero = false;
  }

  if (all_nonzero && !st.lc) {
    // No closed neighbor published light 0, so none enters the critical
    // section this pulse: safe to MOVE.
    do_move(robot, now);
    st.lc = true;
  } else if (read_point(light_cells_[robot], now) == 0 && st.lc) {
    do_look_compute(robot, now);
    st.lc = false;
  }

  st.clock = (st.clock + 1) % (maxn + 1);
  st.max_n = maxn;
  st.light = st.clock;
  write_cell(light_cells_[robot], now, st.light);
  emit(light_set_event(now, robot, st.light));
  // Nlight is republished every pulse: an adversarial Nlight below |N[i]|
  // would otherwise pin MaxN low enough that the zero-light slots of the
  // neighborhood can cover every pulse and starve the MOVE guard forever.
  st.nlight = static_cast<int>(nbhd.size());
  write_cell(nlight_cells_[robot], now, st.nlight);
  maxn_bound_ = std::max(maxn_bound_, maxn);
}

void RobotEngine::step_move_atomic_local(int robot, double now) {
  const Graph& graph = graph_at(now);
  const auto nbhd = graph.closed_neighborhood(robot);
  auto& st = states_[robot];

  // Tripled clock: raw values 2 (= 0.2), 3 (= 1.0) and 4 (= 1.1) shield a
  // neighbor that is about to LOOK or has just done so.
  int maxn = 0;
  bool clear = true;
  for (int j : nbhd) {
    maxn = std::max(maxn, read_point(nlight_cells_[j], now));
    const int light = read_point(light_cells_[j], now);
    if (light == 2 || light == 3 || light == 4) clear = false;
  }

  if (clear && st.clock % 3 == 1 && !st.lc) {
    do_move(robot, now);
    st.lc = true;
  } else if (read_point(light_cells_[robot], now) == 3 && st.lc) {
    do_look_compute(robot, now);
    st.lc = false;
  }

  st.clock = (st.clock + 1) % (3 * maxn + 3);
  st.max_n = maxn;
  st.light = st.clock;
  write_cell(light_cells_[robot], now, st.light);
  emit(light_set_event(now, robot, st.light));
  // Same Nlight republish rationale as the global-pulse variant.
  st.nlight = static_cast<int>(nbhd.size());
  write_cell(nlight_cells_[robot], now, st.nlight);
  maxn_bound_ = std::max(maxn_bound_, maxn);
}

void RobotEngine::step_fsync(int robot, double now) {
  const Graph& graph = graph_at(now);
  auto& st = states_[robot];

  // N[robot] contains the robot itself, so the fold always sees a light.
  int min_light = std::numeric_limits<int>::max();
  for (int j : graph.closed_neighborhood(robot))
    min_light = std::min(min_light, read_regular(robot, j, now));

  const int modulus = 6 * d_bound_ + 1;
  st.light = (min_light + 1) % modulus;
  st.clock = st.light;
  write_cell(light_cells_[robot], now, st.light);
  emit(light_set_event(now, robot, st.light));

  if (st.light == 2 * d_bound_) {
    do_look_compute(robot, now);
  } else if (st.light == 4 * d_bound_) {
    do_move(robot, now);
  }
}

}  // namespace nmr
