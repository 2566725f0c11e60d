#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "matchmix/rng.hpp"

namespace matchmix {

using Vertex = std::int32_t;
inline constexpr Vertex kNoVertex = -1;
using Edge = std::pair<Vertex, Vertex>;

// Largest graph any generator will build.
inline constexpr std::size_t kDefaultVertexBudget = std::size_t{1} << 24;

// Immutable undirected multigraph in compressed adjacency form. Neighbour
// lists are sorted and keep parallel edges with multiplicity.
class Graph {
 public:
  Graph() = default;
  // Self-loops are rejected; parallel edges are kept.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t vertex_count() const { return degree_.size(); }
  std::size_t edge_count() const { return adjacency_.size() / 2; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  int degree(Vertex v) const { return degree_[v]; }
  int max_degree() const { return max_degree_; }
  int min_degree() const { return min_degree_; }
  int multiplicity(Vertex u, Vertex v) const;
  bool has_edge(Vertex u, Vertex v) const { return multiplicity(u, v) > 0; }
  bool is_simple() const;
  bool is_regular() const { return max_degree_ == min_degree_; }
  bool is_connected() const;
  bool valid_vertex(Vertex v) const { return v >= 0 && static_cast<std::size_t>(v) < vertex_count(); }
  // Each undirected edge once (u < v), parallel edges repeated.
  std::vector<Edge> edge_list() const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adjacency_;
  std::vector<int> degree_;
  int max_degree_ = 0;
  int min_degree_ = 0;
};

struct BallMember {
  Vertex vertex;
  int distance;
};

// Induced subgraph on all vertices within `radius` of `center`; members are in
// BFS order.
struct BallView {
  Vertex center = kNoVertex;
  int radius = 0;
  std::vector<BallMember> members;
  std::vector<Edge> edges;

  std::size_t volume() const { return members.size(); }
};

struct Diameter {
  int value = 0;
  bool exact = true;  // false: lower bound from repeated double sweeps
};

Graph generate_cycle(int n);
Graph generate_path(int n);
Graph generate_complete(int n);
Graph generate_torus(int side, int dim, std::size_t max_vertices = kDefaultVertexBudget);
Graph generate_random_regular(int n, int d, Rng& rng);
// Vertex (lamps, walker) has index lamps * |V(base)| + walker.
Graph generate_lamplighter(const Graph& base, std::size_t max_vertices = kDefaultVertexBudget);

BallView ball(const Graph& g, Vertex center, int r);
// Members only (no edge list), cheaper for overlap tests.
std::vector<Vertex> ball_vertices(const Graph& g, Vertex center, int r);
std::vector<int> bfs_distances(const Graph& g, Vertex source);
Diameter diameter(const Graph& g);

void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);

}  // namespace matchmix
