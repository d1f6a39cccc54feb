#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nmr/common.hpp"

namespace nmr {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

bool finite(Point2D p);
double distance(Point2D a, Point2D b);
double squared_distance(Point2D a, Point2D b);

/// Undirected simple graph over node ids 0..k-1. Immutable once built;
/// safe to share across concurrent runs.
class Graph {
 public:
  /// Builds from an explicit edge list. Self-loops and duplicate edges are
  /// rejected. When `require_connected` (abstract process networks), a
  /// disconnected input is an InputError; geometric robot graphs pass false.
  static Graph from_edges(int node_count,
                          const std::vector<std::pair<int, int>>& edges,
                          bool require_connected = true);

  static Graph path(int node_count);
  static Graph cycle(int node_count);
  /// Star with `leaves` leaves; node 0 is the hub, node_count = leaves + 1.
  static Graph star(int leaves);
  static Graph complete(int node_count);
  /// Random spanning tree plus extra edges; always connected, deterministic
  /// per seed.
  static Graph random_connected(int node_count, std::uint64_t seed);

  /// Unit-disk style graph: edge (i,j) iff distance(p_i, p_j) <= radius.
  /// Distance ties count as visible. May be disconnected.
  static Graph geometric(const std::vector<Point2D>& positions, double radius);

  int node_count() const { return k_; }
  const std::vector<int>& neighbors(int i) const;
  /// N[i] = N(i) + {i}, sorted ascending.
  std::vector<int> closed_neighborhood(int i) const;
  int degree(int i) const;
  /// |N[i]| = degree(i) + 1.
  int closed_size(int i) const { return degree(i) + 1; }
  int max_degree() const;
  bool has_edge(int i, int j) const;
  bool is_connected() const;
  /// Max over node pairs of shortest-path hop distance. InputError when
  /// disconnected.
  int diameter() const;
  /// Largest diameter over connected components (0 for empty components).
  int max_component_diameter() const;
  /// Sorted (i < j) edge list.
  std::vector<std::pair<int, int>> edge_list() const;

  bool operator==(const Graph& other) const {
    return k_ == other.k_ && adjacency_ == other.adjacency_;
  }

 private:
  Graph(int k, std::vector<std::vector<int>> adjacency);
  void check_node(int i) const;

  int k_ = 0;
  std::vector<std::vector<int>> adjacency_;  // sorted per node
};

}  // namespace nmr
