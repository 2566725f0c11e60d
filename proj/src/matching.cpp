#include "matchmix/matching.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "matchmix/error.hpp"

namespace matchmix {

Matching Matching::from_pairs(std::size_t n, std::span<const Edge> pairs) {
  Matching m;
  m.partner_.assign(n, kNoVertex);
  for (auto [u, v] : pairs) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw InvalidInput("matching vertex out of range");
    if (u == v) throw InvalidInput("matching pairs a vertex with itself");
    if (m.partner_[u] != kNoVertex || m.partner_[v] != kNoVertex)
      throw InvalidInput("vertex matched twice");
    m.partner_[u] = v;
    m.partner_[v] = u;
  }
  std::size_t free = std::count(m.partner_.begin(), m.partner_.end(), kNoVertex);
  if (free != n % 2) throw InvalidInput("matching must cover all vertices but at most one (odd n)");
  return m;
}

std::optional<Vertex> Matching::unmatched() const {
  auto it = std::find(partner_.begin(), partner_.end(), kNoVertex);
  if (it == partner_.end()) return std::nullopt;
  return static_cast<Vertex>(it - partner_.begin());
}

std::vector<Edge> Matching::pairs() const {
  std::vector<Edge> out;
  for (std::size_t v = 0; v < partner_.size(); ++v)
    if (partner_[v] > static_cast<Vertex>(v)) out.emplace_back(static_cast<Vertex>(v), partner_[v]);
  return out;
}

Matching sample_uniform_matching(int n, Rng& rng) {
  if (n < 2) throw InvalidParameter("matching needs n >= 2");
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Edge> pairs;
  pairs.reserve(n / 2);
  for (int i = 0; i + 1 < n; i += 2) pairs.emplace_back(order[i], order[i + 1]);
  return Matching::from_pairs(n, pairs);
}

void write_matching(std::ostream& out, const Matching& m) {
  for (auto [u, v] : m.pairs()) out << u << ' ' << v << '\n';
  if (auto w = m.unmatched()) out << "unmatched " << *w << '\n';
}

Matching read_matching(std::istream& in, std::size_t n) {
  std::vector<Edge> pairs;
  std::string line;
  std::optional<long long> declared;
  while (std::getline(in, line)) {
    auto p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos || line[p] == '#') continue;
    std::istringstream row(line);
    std::string first;
    row >> first;
    if (first == "unmatched") {
      long long w;
      if (!(row >> w)) throw InvalidInput("bad unmatched line");
      declared = w;
      continue;
    }
    long long u, v;
    try {
      u = std::stoll(first);
    } catch (...) {
      throw InvalidInput("bad matching line: " + line);
    }
    if (!(row >> v)) throw InvalidInput("bad matching line: " + line);
    pairs.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  Matching m = Matching::from_pairs(n, pairs);
  if (declared && (!m.unmatched() || *m.unmatched() != *declared))
    throw InvalidInput("declared unmatched vertex disagrees with the pairs");
  return m;
}

GStar::GStar(std::shared_ptr<const Graph> base, Matching matching, double eps)
    : base_(std::move(base)), matching_(std::move(matching)), eps_(eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
  if (!base_) throw InvalidInput("null base graph");
  if (matching_.size() != base_->vertex_count())
    throw InvalidInput("matching size differs from the graph");
  const std::size_t n = base_->vertex_count();
  total_.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto x = static_cast<Vertex>(v);
    total_[v] = base_->degree(x) + (matching_.is_matched(x) ? eps_ : 0.0);
    if (total_[v] <= 0.0) throw InvalidInput("isolated vertex with no matching edge");
    weight_sum_ += total_[v];
  }
}

double GStar::edge_weight(Vertex x, Vertex y) const {
  return base_->multiplicity(x, y) + (matching_.partner(x) == y ? eps_ : 0.0);
}

GStar augment(std::shared_ptr<const Graph> g, Matching m, double eps) {
  return GStar(std::move(g), std::move(m), eps);
}

GStar augment(const Graph& g, Matching m, double eps) {
  return GStar(std::make_shared<const Graph>(g), std::move(m), eps);
}

StarBallExploration explore_ball_star(const GStar& gs, Vertex x, int K, int R) {
  if (K < 0) throw InvalidParameter("K must be >= 0");
  if (R < 1) throw InvalidParameter("R must be >= 1");
  const Graph& g = gs.base();
  if (!g.valid_vertex(x)) throw InvalidInput("start vertex out of range");

  StarBallExploration out;
  std::unordered_set<Vertex> revealed;
  std::unordered_set<Vertex> considered{x};

  RevealedBall root{x, kNoVertex, ball_vertices(g, x, R)};
  revealed.insert(root.members.begin(), root.members.end());
  out.levels.push_back({std::move(root)});

  for (int level = 0; level < K; ++level) {
    std::vector<RevealedBall> next;
    for (const RevealedBall& b : out.levels[level]) {
      for (Vertex v : b.members) {
        if (v == b.center || !considered.insert(v).second) continue;
        Vertex w = gs.partner(v);
        if (w == kNoVertex) continue;
        considered.insert(w);
        RevealedBall child{w, v, ball_vertices(g, w, R)};
        bool overlap = std::any_of(child.members.begin(), child.members.end(),
                                   [&](Vertex u) { return revealed.count(u) > 0; });
        if (overlap) out.overlap_events.push_back({level + 1, v});
        revealed.insert(child.members.begin(), child.members.end());
        next.push_back(std::move(child));
      }
    }
    out.levels.push_back(std::move(next));
  }
  out.revealed = revealed.size();
  return out;
}

bool is_k_root(const GStar& gs, Vertex x, int K, int R) {
  return explore_ball_star(gs, x, K, R).overlap_events.empty();
}

RootFraction count_k_roots(const GStar& gs, int K, int R, std::size_t sample_size, Rng& rng) {
  if (sample_size == 0) throw InvalidParameter("sample_size must be >= 1");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < sample_size; ++i) {
    auto x = static_cast<Vertex>(uniform_index(rng, gs.vertex_count()));
    roots += is_k_root(gs, x, K, R) ? 1 : 0;
  }
  RootFraction r;
  r.sample_size = sample_size;
  r.fraction = static_cast<double>(roots) / sample_size;
  r.ci = std::sqrt(r.fraction * (1.0 - r.fraction) / sample_size);
  return r;
}

}  // namespace matchmix
