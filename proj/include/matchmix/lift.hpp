#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "matchmix/matching.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {

using LiftCopy = std::uint32_t;
inline constexpr LiftCopy kNoLiftCopy = UINT32_MAX;

struct LiftStep {
  LiftCopy copy;
  Vertex vertex;
};

// A G*-path mapped into the full quasi-tree: every copy is a copy of all of G,
// the root copy (index 0) is centred at the start vertex, and a matching step
// moves to the parent from a non-root centre and otherwise to the child keyed
// (copy, vertex), centred at the partner of that vertex.
struct LiftedWalk {
  struct CopyInfo {
    LiftCopy parent;
    Vertex center;
    Vertex entry;  // vertex of the parent copy owning the edge into this copy
    int depth;
  };

  std::vector<CopyInfo> copies;
  std::vector<LiftStep> path;
  std::vector<int> levels;
  std::vector<StepKind> kinds;
  std::vector<std::size_t> crossing_times;  // time t: step t-1 -> t is long-range
  std::vector<std::size_t> distinct_visits;  // per copy, whole path
  bool full_tree = true;

  Vertex root_vertex() const { return copies.front().center; }
  std::size_t length() const { return kinds.size(); }
  bool is_descendant(LiftCopy d, LiftCopy a) const;
  LiftCopy ancestor_at(LiftCopy c, int depth) const;
};

// Incremental form of lift(), for walks that stop on reaching a level.
class Lifter {
 public:
  Lifter(const GStar& gs, Vertex start, bool full_tree = true);
  // Append one step; throws InvalidPath if it is not a step of G*.
  void push(Vertex next, StepKind kind);
  int level() const { return walk_.levels.back(); }
  LiftCopy copy() const { return walk_.path.back().copy; }
  std::size_t distinct_in_current() const { return walk_.distinct_visits[copy()]; }
  bool crossed_root_edge() const { return crossed_root_edge_; }
  const LiftedWalk& walk() const { return walk_; }
  LiftedWalk take() { return std::move(walk_); }

 private:
  const GStar* gs_;
  LiftedWalk walk_;
  std::unordered_map<std::uint64_t, LiftCopy> children_;
  std::unordered_map<std::uint64_t, char> visited_;
  bool crossed_root_edge_ = false;
};

// full_tree = false lifts into the quasi-tree whose root vertex has no
// long-range edge; crossing it is then an invalid path.
LiftedWalk lift(const GStar& gs, const TaggedPath& path, bool full_tree = true);
// Tags an untagged path; a step along an edge that is both a base edge and the
// matching edge is a base step with probability 1/(1+eps).
TaggedPath tag_path(const GStar& gs, std::span<const Vertex> path, Rng& rng);

std::optional<std::size_t> tau_level(const LiftedWalk& lw, int ell);
bool omega0(const LiftedWalk& lw, int ell, int R);
bool omega1(const LiftedWalk& lw, int ell);
// xi_1..xi_ell of the walk stopped at tau_ell, as child-side copies.
std::vector<LiftCopy> lifted_loop_erasure(const LiftedWalk& lw, int ell);
TaggedPath reverse_path(const GStar& gs, const TaggedPath& path);

struct ReversalReport {
  std::size_t trials = 0;
  std::size_t qualifying = 0;
  std::size_t passes = 0;
  std::vector<std::string> failures;  // first few failing cases, for debugging
};

ReversalReport check_reversal_lemma(const GStar& gs, int ell, int R, std::size_t trials, Rng& rng,
                                    std::size_t max_steps = 0);

}  // namespace matchmix
