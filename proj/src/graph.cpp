#include "matchmix/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>

#include "matchmix/error.hpp"

namespace matchmix {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n > static_cast<std::size_t>(INT32_MAX)) throw InvalidParameter("too many vertices");
  Graph g;
  g.degree_.assign(n, 0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw InvalidInput("edge endpoint out of range");
    if (u == v) throw InvalidInput("self-loop at vertex " + std::to_string(u));
    ++g.degree_[u];
    ++g.degree_[v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + g.degree_[v];
  g.adjacency_.assign(g.offsets_[n], 0);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : edges) {
    g.adjacency_[fill[u]++] = v;
    g.adjacency_[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(g.adjacency_.begin() + g.offsets_[v], g.adjacency_.begin() + g.offsets_[v + 1]);
  if (n > 0) {
    auto [lo, hi] = std::minmax_element(g.degree_.begin(), g.degree_.end());
    g.min_degree_ = *lo;
    g.max_degree_ = *hi;
  }
  return g;
}

int Graph::multiplicity(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  auto [lo, hi] = std::equal_range(nb.begin(), nb.end(), v);
  return static_cast<int>(hi - lo);
}

bool Graph::is_simple() const {
  for (std::size_t v = 0; v < vertex_count(); ++v) {
    auto nb = neighbors(static_cast<Vertex>(v));
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) return false;
  }
  return true;
}

bool Graph::is_connected() const {
  if (vertex_count() == 0) return true;
  auto dist = bfs_distances(*this, 0);
  return std::find(dist.begin(), dist.end(), -1) == dist.end();
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t u = 0; u < vertex_count(); ++u)
    for (Vertex v : neighbors(static_cast<Vertex>(u)))
      if (static_cast<Vertex>(u) < v) out.emplace_back(static_cast<Vertex>(u), v);
  return out;
}

Graph generate_cycle(int n) {
  if (n < 3) throw InvalidParameter("cycle needs n >= 3");
  std::vector<Edge> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, edges);
}

Graph generate_path(int n) {
  if (n < 1) throw InvalidParameter("path needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

Graph generate_complete(int n) {
  if (n < 1) throw InvalidParameter("complete graph needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph generate_torus(int side, int dim, std::size_t max_vertices) {
  if (side < 3) throw InvalidParameter("torus side must be >= 3");
  if (dim < 1) throw InvalidParameter("torus dimension must be >= 1");
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) {
    n *= static_cast<std::size_t>(side);
    if (n > max_vertices) throw InvalidParameter("torus exceeds size budget");
  }
  std::vector<Edge> edges;
  edges.reserve(n * dim);
  std::size_t stride = 1;
  for (int k = 0; k < dim; ++k) {
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t coord = (v / stride) % side;
      std::size_t next = coord + 1 == static_cast<std::size_t>(side) ? v - coord * stride : v + stride;
      edges.emplace_back(static_cast<Vertex>(v), static_cast<Vertex>(next));
    }
    stride *= side;
  }
  return Graph::from_edges(n, edges);
}

Graph generate_random_regular(int n, int d, Rng& rng) {
  if (d < 3) throw InvalidParameter("random regular graphs need d >= 3");
  if (n <= d) throw InvalidParameter("random regular graphs need n > d");
  if ((static_cast<long long>(n) * d) % 2 != 0) throw InvalidParameter("n*d must be even");
  std::vector<Vertex> stubs(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int j = 0; j < d; ++j) stubs[static_cast<std::size_t>(v) * d + j] = v;
  std::vector<Edge> edges(stubs.size() / 2);
  std::vector<std::vector<Vertex>> adj(n);
  const int budget = 100 * d;
  for (int attempt = 0; attempt < budget; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng);
    for (auto& a : adj) a.clear();
    bool ok = true;
    for (std::size_t i = 0; i < edges.size() && ok; ++i) {
      Vertex u = stubs[2 * i], v = stubs[2 * i + 1];
      if (u == v || std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end()) {
        ok = false;
        break;
      }
      adj[u].push_back(v);
      adj[v].push_back(u);
      edges[i] = {u, v};
    }
    if (!ok) continue;
    Graph g = Graph::from_edges(n, edges);
    if (g.is_connected()) return g;
  }
  throw GenerationFailure("configuration model exhausted its retry budget");
}

Graph generate_lamplighter(const Graph& base, std::size_t max_vertices) {
  const std::size_t k = base.vertex_count();
  if (k == 0) throw InvalidParameter("lamplighter base is empty");
  if (!base.is_simple()) throw InvalidParameter("lamplighter base must be simple");
  if (k >= 40 || (std::size_t{1} << k) * k > max_vertices)
    throw InvalidParameter("lamplighter exceeds size budget");
  const std::size_t states = std::size_t{1} << k;
  auto base_edges = base.edge_list();
  std::vector<Edge> edges;
  edges.reserve(states * base_edges.size() * 4);
  for (std::size_t lamps = 0; lamps < states; ++lamps) {
    for (auto [u, v] : base_edges) {
      std::size_t cleared = lamps & ~((std::size_t{1} << u) | (std::size_t{1} << v));
      for (std::size_t bu = 0; bu < 2; ++bu)
        for (std::size_t bv = 0; bv < 2; ++bv) {
          std::size_t target = cleared | (bu << u) | (bv << v);
          edges.emplace_back(static_cast<Vertex>(lamps * k + u), static_cast<Vertex>(target * k + v));
        }
    }
  }
  return Graph::from_edges(states * k, edges);
}

std::vector<Vertex> ball_vertices(const Graph& g, Vertex center, int r) {
  if (!g.valid_vertex(center)) throw InvalidInput("ball center out of range");
  std::unordered_map<Vertex, int> dist;
  std::vector<Vertex> order{center};
  dist.emplace(center, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    Vertex u = order[i];
    int du = dist[u];
    if (du == r) continue;
    for (Vertex w : g.neighbors(u))
      if (dist.emplace(w, du + 1).second) order.push_back(w);
  }
  return order;
}

BallView ball(const Graph& g, Vertex center, int r) {
  if (!g.valid_vertex(center)) throw InvalidInput("ball center out of range");
  if (r < 0) throw InvalidParameter("ball radius must be >= 0");
  BallView view;
  view.center = center;
  view.radius = r;
  std::unordered_map<Vertex, int> dist;
  dist.emplace(center, 0);
  view.members.push_back({center, 0});
  for (std::size_t i = 0; i < view.members.size(); ++i) {
    auto [u, du] = view.members[i];
    if (du == r) continue;
    for (Vertex w : g.neighbors(u))
      if (dist.emplace(w, du + 1).second) view.members.push_back({w, du + 1});
  }
  for (auto [u, du] : view.members)
    for (Vertex w : g.neighbors(u))
      if (u < w && dist.count(w)) view.edges.emplace_back(u, w);
  return view;
}

std::vector<int> bfs_distances(const Graph& g, Vertex source) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::vector<Vertex> queue{source};
  dist[source] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    Vertex u = queue[i];
    for (Vertex w : g.neighbors(u))
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

namespace {
std::pair<Vertex, int> farthest(const Graph& g, Vertex s) {
  auto dist = bfs_distances(g, s);
  auto it = std::max_element(dist.begin(), dist.end());
  return {static_cast<Vertex>(it - dist.begin()), *it};
}
}  // namespace

Diameter diameter(const Graph& g) {
  const std::size_t n = g.vertex_count();
  if (n == 0) return {0, true};
  if (!g.is_connected()) throw InvalidInput("diameter of a disconnected graph");
  if (n <= 10000) {
    int best = 0;
    for (std::size_t v = 0; v < n; ++v) best = std::max(best, farthest(g, static_cast<Vertex>(v)).second);
    return {best, true};
  }
  // Double sweeps from a few spread-out seeds.
  int best = 0;
  for (int seed = 0; seed < 4; ++seed) {
    Vertex s = static_cast<Vertex>((n / 4) * seed);
    for (int sweep = 0; sweep < 3; ++sweep) {
      auto [far, d] = farthest(g, s);
      best = std::max(best, d);
      s = far;
    }
  }
  return {best, false};
}

void write_edge_list(std::ostream& out, const Graph& g) {
  auto edges = g.edge_list();
  out << g.vertex_count() << ' ' << edges.size() << '\n';
  for (auto [u, v] : edges) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  auto next_line = [&](std::string& l) {
    while (std::getline(in, l)) {
      auto p = l.find_first_not_of(" \t\r");
      if (p != std::string::npos && l[p] != '#') return true;
    }
    return false;
  };
  if (!next_line(line)) throw InvalidInput("empty edge list");
  std::istringstream header(line);
  long long n = -1, m = -1;
  if (!(header >> n >> m) || n < 0 || m < 0) throw InvalidInput("bad edge list header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (long long i = 0; i < m; ++i) {
    if (!next_line(line)) throw InvalidInput("edge list truncated");
    std::istringstream row(line);
    long long u, v;
    if (!(row >> u >> v)) throw InvalidInput("bad edge line: " + line);
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return Graph::from_edges(static_cast<std::size_t>(n), edges);
}

}  // namespace matchmix
