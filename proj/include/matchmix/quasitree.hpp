#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "matchmix/graph.hpp"
#include "matchmix/rng.hpp"

namespace matchmix {

using CopyId = std::uint64_t;
// Parent of the root; also the far side of the extra root edge in
// "recross" mode.
inline constexpr CopyId kNoCopy = 0;

struct QuasiTreeOptions {
  // Give the root centre a long-range edge to an outside vertex. Used to
  // estimate the return probability across a single long-range edge.
  bool root_parent_edge = false;
  // Copies beyond this count trigger eviction of stale subtrees.
  std::size_t copy_cap = std::size_t{1} << 20;
  // Cached ball geometries, keyed by centre.
  std::size_t ball_cache_cap = std::size_t{1} << 15;
};

// Geometry of the R-ball around one base vertex, explored by BFS only as far
// as a walker needs it.
class LazyBall {
 public:
  LazyBall(const Graph& g, Vertex center, int R);

  Vertex center() const { return center_; }
  // Distance of a discovered vertex to the centre (-1 if not discovered).
  int distance(Vertex u) const;
  // Neighbours of u inside the induced ball, with multiplicity. The span may
  // refer to an internal buffer that the next call overwrites.
  std::span<const Vertex> neighbors(Vertex u);
  // Explore the whole ball.
  void complete();
  std::size_t discovered() const { return dist_.size(); }
  std::vector<Vertex> members();

 private:
  void ensure(int radius);

  const Graph* g_;
  Vertex center_;
  int R_;
  int explored_ = 0;
  std::unordered_map<Vertex, int> dist_;
  std::vector<Vertex> frontier_;
  std::vector<Vertex> order_;
  std::vector<Vertex> scratch_;
};

// Lazily grown quasi-tree of R-balls: the root ball is centred at a uniform
// vertex, every non-centre vertex of every ball owns a long-range edge to a
// child ball with a fresh uniform centre, and non-root centres link back to
// their parent.
class QuasiTree {
 public:
  QuasiTree(std::shared_ptr<const Graph> g, int R, double eps, Rng& rng,
            QuasiTreeOptions opts = {});

  const Graph& base() const { return *g_; }
  const std::shared_ptr<const Graph>& base_ptr() const { return g_; }
  int R() const { return R_; }
  double eps() const { return eps_; }
  bool root_parent_edge() const { return opts_.root_parent_edge; }

  CopyId root() const { return 1; }
  bool contains(CopyId c) const { return copies_.count(c) > 0; }
  Vertex center(CopyId c) const { return copy(c).center; }
  CopyId parent(CopyId c) const { return copy(c).parent; }
  // Vertex of the parent copy holding the long-range edge into c.
  Vertex entry_vertex(CopyId c) const { return copy(c).entry; }
  int depth(CopyId c) const { return copy(c).depth; }
  std::size_t copy_count() const { return copies_.size(); }
  std::size_t created_count() const { return next_id_ - 1; }
  std::size_t evicted_count() const { return evicted_; }

  bool has_long_range(CopyId c, Vertex u) const;
  CopyId child(CopyId c, Vertex u);
  std::optional<CopyId> find_child(CopyId c, Vertex u) const;
  // Ball geometry of copy c; the reference stays valid until the next call
  // that may create a ball (ball_of or child).
  LazyBall& ball_of(CopyId c);
  bool is_descendant(CopyId d, CopyId a) const;
  // Ancestor of c at the given depth (c itself if already there).
  CopyId ancestor_at(CopyId c, int depth) const;

  // Stamp a visit. Eviction drops the least recently stamped half of the
  // copies, never an ancestor of `current`.
  void touch(CopyId c);
  void maybe_evict(CopyId current);

 private:
  struct Copy {
    Vertex center;
    CopyId parent;
    Vertex entry;
    int depth;
    std::uint64_t last_visit = 0;
    std::unordered_map<Vertex, CopyId> children;
  };

  const Copy& copy(CopyId c) const;
  Copy& copy(CopyId c);
  Vertex fresh_center();

  std::shared_ptr<const Graph> g_;
  int R_;
  double eps_;
  QuasiTreeOptions opts_;
  Rng rng_;
  CopyId next_id_ = 1;
  std::uint64_t clock_ = 0;
  std::size_t evicted_ = 0;
  std::unordered_map<CopyId, Copy> copies_;
  std::unordered_map<Vertex, std::unique_ptr<LazyBall>> balls_;
};

struct TreeStep {
  CopyId copy;
  Vertex vertex;
};

// A long-range crossing at `time`: the step from time-1 to time. The edge is
// named by the copy on its child side (kNoCopy for the extra root edge).
struct Crossing {
  std::size_t time;
  CopyId edge;
  int from_level;
  int to_level;
};

struct TreeTrajectory {
  std::vector<TreeStep> steps;
  std::vector<int> levels;
  std::vector<Crossing> crossings;
  bool horizon_exceeded = false;  // target level not reached within max_steps
  bool exited_root = false;       // crossed the extra root edge (walk stops)
  bool reached_target = false;

  std::size_t horizon() const { return levels.empty() ? 0 : levels.size() - 1; }
};

struct WalkStop {
  std::size_t max_steps = 0;
  std::optional<int> target_level;
  bool record_steps = true;  // store (copy, vertex) per step
};

TreeTrajectory tree_walk(QuasiTree& qt, Rng& rng, const WalkStop& stop,
                         std::optional<Vertex> start_vertex = std::nullopt);

// Per level k = 1..L, the last crossing between levels k-1 and k before the
// terminal time (the first visit to target_level, or the end).
std::vector<CopyId> loop_erasure(const TreeTrajectory& traj,
                                 std::optional<int> target_level = std::nullopt);

struct RegenerationRecord {
  int K = 0;
  std::vector<std::size_t> sigma;  // sigma[0] = first time at level K
  std::vector<int> phi;
  std::size_t horizon = 0;
  std::size_t buffer = 0;
};

RegenerationRecord regenerations(const TreeTrajectory& traj, int K, std::size_t buffer);

struct DeltaOptions {
  std::size_t edges = 8;  // independent trees, one sampled edge each
  std::size_t step_cap = 0;  // 0: automatic
};

struct DeltaEstimate {
  double delta_hat = 0.0;  // largest per-edge return frequency
  double ci = 0.0;         // one-sigma Wilson half-width at that edge
  double pooled = 0.0;
  double pooled_ci = 0.0;
  double residual_bias = 0.0;  // delta_hat ^ escape_levels
  std::size_t edges = 0;
  std::size_t trials = 0;
  std::size_t returns = 0;
  std::size_t capped = 0;  // walks that hit the step cap (counted as escapes)
  std::vector<double> per_edge;
};

DeltaEstimate estimate_delta(std::shared_ptr<const Graph> g, int R, double eps, std::size_t trials,
                             int escape_levels, Rng& rng, const DeltaOptions& opts = {});

struct SpeedOptions {
  std::size_t buffer = 0;  // 0: 10/eps
  int K = 0;
  bool keep_records = false;
};

struct SpeedEstimate {
  double nu_hat = 0.0;
  double ci = 0.0;  // one-sigma delta-method radius
  double mean_sigma_increment = 0.0;
  double sigma_increment_se = 0.0;
  double mean_phi_increment = 0.0;
  double phi_increment_se = 0.0;
  std::size_t increments = 0;
  std::vector<RegenerationRecord> records;
};

SpeedEstimate estimate_speed(std::shared_ptr<const Graph> g, int R, double eps, std::size_t walks,
                             std::size_t horizon, Rng& rng, const SpeedOptions& opts = {});

// Fractions of walks whose position at the first visit to level M lies below
// each level-1 edge.
std::map<CopyId, double> estimate_theta_tilde(QuasiTree& qt, int M, std::size_t walks, Rng& rng,
                                              std::size_t max_steps = 0);

struct EntropyRateParams {
  std::size_t trees = 8;
  std::size_t walks_per_tree = 2000;
  std::size_t horizon = 0;        // per MC walk; 0: 60/eps
  std::size_t buffer = 0;         // 0: 10/eps
  double support_budget = 500.0;  // max exp(H1) for the MC estimator
  double surrogate_tol = 1e-6;
  std::size_t surrogate_starts = 4;
  std::optional<double> phi_increment_mean;  // measured E[phi2 - phi1]
  int K = 0;
};

struct EntropyRateEstimate {
  double h_hat = 0.0;          // surrogate H1, one level per long-range step; authoritative
  double h_surrogate_h1 = 0.0;  // H1 of the killed-walk endpoint law
  double phi_increment_mean = 1.0;
  std::optional<double> h_mc;
  std::optional<double> h_mc_ci;
  double V_hat = 0.0;
  bool mc_skipped = false;  // support budget exceeded
  std::size_t mc_samples = 0;
};

EntropyRateEstimate estimate_entropy_rate(std::shared_ptr<const Graph> g, int R, double eps,
                                          const EntropyRateParams& params, Rng& rng);

struct IncrementStats {
  std::size_t count = 0;
  double sigma_mean = 0.0, sigma_var = 0.0;
  double phi_mean = 0.0, phi_var = 0.0;
  std::vector<std::pair<std::size_t, double>> sigma_tail;  // (r, P(dsigma >= r))
  std::vector<std::pair<int, double>> phi_tail;            // (r, P(dphi >= r))
  double sigma_tail_slope = 0.0;  // d log P / d(r eps), least squares
  double phi_tail_ratio = 0.0;    // max over r of P(>= r+1)/P(>= r), r >= 1
};

IncrementStats increment_stats(std::span<const RegenerationRecord> records, double eps);

}  // namespace matchmix
