#include "nmr/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "nmr/rand.hpp"

namespace nmr {

bool finite(Point2D p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double squared_distance(Point2D a, Point2D b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Point2D a, Point2D b) {
  return std::sqrt(squared_distance(a, b));
}

Graph::Graph(int k, std::vector<std::vector<int>> adjacency)
    : k_(k), adjacency_(std::move(adjacency)) {
  for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

void Graph::check_node(int i) const {
  if (i < 0 || i >= k_)
    throw InputError("node id " + std::to_string(i) + " out of range 0.." +
                     std::to_string(k_ - 1));
}

Graph Graph::from_edges(int node_count,
                        const std::vector<std::pair<int, int>>& edges,
                        bool require_connected) {
  if (node_count < 1) throw InputError("graph needs at least one node");
  std::vector<std::vector<int>> adjacency(node_count);
  for (auto [a, b] : edges) {
    if (a < 0 || a >= node_count || b < 0 || b >= node_count)
      throw InputError("edge endpoint out of range");
    if (a == b) throw InputError("self-loop rejected");
    auto& ra = adjacency[a];
    if (std::find(ra.begin(), ra.end(), b) != ra.end())
      throw InputError("duplicate edge rejected");
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  Graph g(node_count, std::move(adjacency));
  if (require_connected && !g.is_connected())
    throw InputError("graph is not connected");
  return g;
}

Graph Graph::path(int node_count) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < node_count; ++i) edges.emplace_back(i, i + 1);
  return from_edges(node_count, edges);
}

Graph Graph::cycle(int node_count) {
  if (node_count < 3) throw InputError("cycle needs at least 3 nodes");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < node_count; ++i)
    edges.emplace_back(i, (i + 1) % node_count);
  return from_edges(node_count, edges);
}

Graph Graph::star(int leaves) {
  if (leaves < 1) throw InputError("star needs at least 1 leaf");
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return from_edges(leaves + 1, edges);
}

Graph Graph::complete(int node_count) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) edges.emplace_back(i, j);
  return from_edges(node_count, edges);
}

Graph Graph::random_connected(int node_count, std::uint64_t seed) {
  if (node_count < 1) throw InputError("graph needs at least one node");
  Rng rng(mix_seed(seed, 0x6772617068ULL));
  std::vector<std::pair<int, int>> edges;
  // Random attachment tree keeps the graph connected.
  for (int i = 1; i < node_count; ++i)
    edges.emplace_back(static_cast<int>(rng.below(i)), i);
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) {
      if (std::find(edges.begin(), edges.end(), std::make_pair(i, j)) !=
          edges.end())
        continue;
      if (rng.below(100) < 25) edges.emplace_back(i, j);
    }
  return from_edges(node_count, edges);
}

Graph Graph::geometric(const std::vector<Point2D>& positions, double radius) {
  if (positions.empty()) throw InputError("graph needs at least one node");
  if (!(radius > 0.0)) throw InputError("radius must be positive");
  for (auto p : positions)
    if (!finite(p)) throw InputError("non-finite position");
  const int k = static_cast<int>(positions.size());
  const double r2 = radius * radius;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (squared_distance(positions[i], positions[j]) <= r2)
        edges.emplace_back(i, j);
  return from_edges(k, edges, /*require_connected=*/false);
}

const std::vector<int>& Graph::neighbors(int i) const {
  check_node(i);
  return adjacency_[i];
}

std::vector<int> Graph::closed_neighborhood(int i) const {
  check_node(i);
  std::vector<int> result = adjacency_[i];
  result.insert(std::lower_bound(result.begin(), result.end(), i), i);
  return result;
}

int Graph::degree(int i) const {
  check_node(i);
  return static_cast<int>(adjacency_[i].size());
}

int Graph::max_degree() const {
  int best = 0;
  for (const auto& row : adjacency_)
    best = std::max(best, static_cast<int>(row.size()));
  return best;
}

bool Graph::has_edge(int i, int j) const {
  check_node(i);
  check_node(j);
  const auto& row = adjacency_[i];
  return std::binary_search(row.begin(), row.end(), j);
}

namespace {

// BFS hop distances from `source`; unreachable nodes stay -1.
std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adjacency,
                               int source) {
  std::vector<int> dist(adjacency.size(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adjacency[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

}  // namespace

bool Graph::is_connected() const {
  const auto dist = bfs_distances(adjacency_, 0);
  return std::none_of(dist.begin(), dist.end(),
                      [](int d) { return d < 0; });
}

int Graph::diameter() const {
  int best = 0;
  for (int i = 0; i < k_; ++i) {
    const auto dist = bfs_distances(adjacency_, i);
    for (int d : dist) {
      if (d < 0) throw InputError("diameter of a disconnected graph");
      best = std::max(best, d);
    }
  }
  return best;
}

int Graph::max_component_diameter() const {
  int best = 0;
  for (int i = 0; i < k_; ++i) {
    const auto dist = bfs_distances(adjacency_, i);
    for (int d : dist) best = std::max(best, d);
  }
  return best;
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < k_; ++i)
    for (int j : adjacency_[i])
      if (i < j) edges.emplace_back(i, j);
  return edges;
}

}  // namespace nmr
