#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "matchmix/graph.hpp"
#include "matchmix/rng.hpp"

namespace matchmix {

// Fixed-point-free involution on all vertices but at most one; a vertex is
// left unmatched exactly when the vertex count is odd.
class Matching {
 public:
  Matching() = default;
  static Matching from_pairs(std::size_t n, std::span<const Edge> pairs);

  std::size_t size() const { return partner_.size(); }
  Vertex partner(Vertex v) const { return partner_[v]; }  // kNoVertex if unmatched
  bool is_matched(Vertex v) const { return partner_[v] != kNoVertex; }
  std::optional<Vertex> unmatched() const;
  std::vector<Edge> pairs() const;
  std::span<const Vertex> partners() const { return partner_; }

 private:
  std::vector<Vertex> partner_;
};

Matching sample_uniform_matching(int n, Rng& rng);
void write_matching(std::ostream& out, const Matching& m);
Matching read_matching(std::istream& in, std::size_t n);

// Base graph plus a matching whose edges carry weight eps. The base graph is
// shared, never copied.
class GStar {
 public:
  GStar(std::shared_ptr<const Graph> base, Matching matching, double eps);

  const Graph& base() const { return *base_; }
  const std::shared_ptr<const Graph>& base_ptr() const { return base_; }
  const Matching& matching() const { return matching_; }
  double eps() const { return eps_; }
  std::size_t vertex_count() const { return base_->vertex_count(); }
  Vertex partner(Vertex v) const { return matching_.partner(v); }

  double total_weight(Vertex v) const { return total_[v]; }
  double weight_sum() const { return weight_sum_; }
  // Multiplicity of base edges plus eps if y is the partner of x.
  double edge_weight(Vertex x, Vertex y) const;
  double transition(Vertex x, Vertex y) const { return edge_weight(x, y) / total_[x]; }
  double stationary(Vertex v) const { return total_[v] / weight_sum_; }
  int max_degree() const { return base_->max_degree(); }

 private:
  std::shared_ptr<const Graph> base_;
  Matching matching_;
  double eps_;
  std::vector<double> total_;
  double weight_sum_ = 0.0;
};

GStar augment(std::shared_ptr<const Graph> g, Matching m, double eps);
GStar augment(const Graph& g, Matching m, double eps);

struct RevealedBall {
  Vertex center = kNoVertex;
  Vertex attached_from = kNoVertex;  // vertex whose long-range edge led here
  std::vector<Vertex> members;
};

struct OverlapEvent {
  int level;
  Vertex vertex;  // the vertex whose partner's ball overlapped
};

struct StarBallExploration {
  std::vector<std::vector<RevealedBall>> levels;
  std::vector<OverlapEvent> overlap_events;
  std::size_t revealed = 0;
};

// Reveal the R-ball of x, then for every not-yet-considered non-centre member
// the R-ball around its partner, for K levels. A new ball touching anything
// already revealed is an overlap.
StarBallExploration explore_ball_star(const GStar& gs, Vertex x, int K, int R);
bool is_k_root(const GStar& gs, Vertex x, int K, int R);

struct RootFraction {
  double fraction = 1.0;
  double ci = 0.0;  // one-sigma binomial radius
  std::size_t sample_size = 0;
};

RootFraction count_k_roots(const GStar& gs, int K, int R, std::size_t sample_size, Rng& rng);

}  // namespace matchmix
