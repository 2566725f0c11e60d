#include "matchmix/lift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matchmix/error.hpp"

namespace matchmix {
namespace {
std::uint64_t key(LiftCopy c, Vertex v) {
  return (static_cast<std::uint64_t>(c) << 32) | static_cast<std::uint32_t>(v);
}
}  // namespace

bool LiftedWalk::is_descendant(LiftCopy d, LiftCopy a) const {
  while (d != kNoLiftCopy && copies[d].depth > copies[a].depth) d = copies[d].parent;
  return d == a;
}

LiftCopy LiftedWalk::ancestor_at(LiftCopy c, int depth) const {
  if (depth < 0 || depth > copies[c].depth) throw InvalidInput("no ancestor at that depth");
  while (copies[c].depth > depth) c = copies[c].parent;
  return c;
}

Lifter::Lifter(const GStar& gs, Vertex start, bool full_tree) : gs_(&gs) {
  if (!gs.base().valid_vertex(start)) throw InvalidPath("start vertex out of range");
  walk_.full_tree = full_tree;
  walk_.copies.push_back({kNoLiftCopy, start, kNoVertex, 0});
  walk_.path.push_back({0, start});
  walk_.levels.push_back(0);
  walk_.distinct_visits.push_back(1);
  visited_.emplace(key(0, start), 1);
}

void Lifter::push(Vertex y, StepKind kind) {
  const Graph& g = gs_->base();
  const LiftStep cur = walk_.path.back();
  const Vertex x = cur.vertex;
  if (!g.valid_vertex(y)) throw InvalidPath("vertex out of range");
  LiftCopy c = cur.copy;
  switch (kind) {
    case StepKind::Hold:
      if (x != y) throw InvalidPath("hold step changes vertex");
      break;
    case StepKind::Base:
      if (!g.has_edge(x, y)) throw InvalidPath("base step along a non-edge");
      break;
    case StepKind::Matching: {
      if (gs_->partner(x) != y) throw InvalidPath("matching step along a non-matching pair");
      const auto info = walk_.copies[c];
      if (c != 0 && x == info.center) {
        c = info.parent;
      } else {
        if (c == 0 && x == walk_.root_vertex()) {
          if (!walk_.full_tree) throw InvalidPath("root vertex has no long-range edge");
          crossed_root_edge_ = true;
        }
        auto [it, inserted] = children_.emplace(key(c, x), static_cast<LiftCopy>(walk_.copies.size()));
        if (inserted) {
          walk_.copies.push_back({c, y, x, info.depth + 1});
          walk_.distinct_visits.push_back(0);
        }
        c = it->second;
      }
      walk_.crossing_times.push_back(walk_.path.size());
      break;
    }
  }
  walk_.path.push_back({c, y});
  walk_.kinds.push_back(kind);
  walk_.levels.push_back(walk_.copies[c].depth);
  if (visited_.emplace(key(c, y), 1).second) ++walk_.distinct_visits[c];
}

LiftedWalk lift(const GStar& gs, const TaggedPath& path, bool full_tree) {
  if (path.vertices.empty()) throw InvalidPath("empty path");
  if (path.vertices.size() != path.kinds.size() + 1) throw InvalidPath("tags do not match the path");
  Lifter lifter(gs, path.vertices.front(), full_tree);
  for (std::size_t i = 0; i < path.kinds.size(); ++i) lifter.push(path.vertices[i + 1], path.kinds[i]);
  return lifter.take();
}

TaggedPath tag_path(const GStar& gs, std::span<const Vertex> path, Rng& rng) {
  if (path.empty()) throw InvalidPath("empty path");
  TaggedPath out;
  out.vertices.assign(path.begin(), path.end());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Vertex x = path[i], y = path[i + 1];
    bool base = gs.base().has_edge(x, y);
    bool match = gs.partner(x) == y;
    if (base && match)
      out.kinds.push_back(uniform01(rng) * (1.0 + gs.eps()) < 1.0 ? StepKind::Base : StepKind::Matching);
    else if (base)
      out.kinds.push_back(StepKind::Base);
    else if (match)
      out.kinds.push_back(StepKind::Matching);
    else if (x == y)
      out.kinds.push_back(StepKind::Hold);
    else
      throw InvalidPath("consecutive vertices are not G*-neighbours");
  }
  return out;
}

std::optional<std::size_t> tau_level(const LiftedWalk& lw, int ell) {
  if (ell < 1) throw InvalidParameter("ell must be >= 1");
  auto it = std::find(lw.levels.begin(), lw.levels.end(), ell);
  if (it == lw.levels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - lw.levels.begin());
}

namespace {
std::size_t require_tau(const LiftedWalk& lw, int ell) {
  auto tau = tau_level(lw, ell);
  if (!tau) throw InvalidInput("level ell is never reached");
  return *tau;
}
}  // namespace

bool omega0(const LiftedWalk& lw, int ell, int R) {
  const std::size_t tau = require_tau(lw, ell);
  std::unordered_map<std::uint64_t, char> seen;
  std::vector<std::size_t> count(lw.copies.size(), 0);
  for (std::size_t i = 0; i <= tau; ++i) {
    const auto& s = lw.path[i];
    if (seen.emplace(key(s.copy, s.vertex), 1).second && 2 * ++count[s.copy] > static_cast<std::size_t>(R))
      return false;
    if (i < tau && lw.kinds[i] == StepKind::Matching && s.copy == 0 && s.vertex == lw.root_vertex())
      return false;
  }
  return true;
}

std::vector<LiftCopy> lifted_loop_erasure(const LiftedWalk& lw, int ell) {
  const std::size_t tau = require_tau(lw, ell);
  std::vector<LiftCopy> xi(ell, kNoLiftCopy);
  for (std::size_t t : lw.crossing_times) {
    if (t > tau) break;
    LiftCopy a = lw.path[t - 1].copy, b = lw.path[t].copy;
    LiftCopy deeper = lw.copies[a].depth > lw.copies[b].depth ? a : b;
    int k = lw.copies[deeper].depth;
    if (k >= 1 && k <= ell) xi[k - 1] = deeper;
  }
  return xi;
}

bool omega1(const LiftedWalk& lw, int ell) {
  const std::size_t tau = require_tau(lw, ell);
  auto xi = lifted_loop_erasure(lw, ell);
  for (int k = 1; k <= ell / 2; ++k) {
    const int level = 2 * k - 1;
    for (std::size_t i = 0; i <= tau; ++i)
      if (lw.levels[i] == level && lw.ancestor_at(lw.path[i].copy, k) != xi[k - 1]) return false;
  }
  return true;
}

TaggedPath reverse_path(const GStar& gs, const TaggedPath& path) {
  const std::size_t k = path.kinds.size();
  if (path.vertices.size() != k + 1) throw InvalidInput("tags do not match the path");
  if (k == 0 || path.kinds.back() != StepKind::Matching)
    throw InvalidInput("the last step must cross a matching edge");
  if (gs.partner(path.vertices.back()) != path.vertices[k - 1])
    throw InvalidInput("the last step is not a matching pair");
  const Vertex tail = gs.partner(path.vertices.front());
  if (tail == kNoVertex) throw InvalidInput("the first vertex is unmatched");
  TaggedPath z;
  z.vertices.reserve(k + 1);
  for (std::size_t i = 0; i < k; ++i) z.vertices.push_back(path.vertices[k - 1 - i]);
  z.vertices.push_back(tail);
  for (std::size_t i = 0; i + 1 < k; ++i) z.kinds.push_back(path.kinds[k - 2 - i]);
  z.kinds.push_back(StepKind::Matching);
  return z;
}

ReversalReport check_reversal_lemma(const GStar& gs, int ell, int R, std::size_t trials, Rng& rng,
                                    std::size_t max_steps) {
  if (ell < 1) throw InvalidParameter("ell must be >= 1");
  if (R < 2) throw InvalidParameter("R must be >= 2");
  if (max_steps == 0)
    max_steps = static_cast<std::size_t>(std::ceil(200.0 * ell * (gs.max_degree() + 1) / gs.eps()));
  const Kernel k(gs, false);
  const std::size_t n = gs.vertex_count();
  ReversalReport rep;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    ++rep.trials;
    auto x0 = static_cast<Vertex>(uniform_index(rng, n));
    Lifter lifter(gs, x0);
    TaggedPath path;
    path.vertices.push_back(x0);
    Vertex x = x0;
    bool doomed = false;
    while (lifter.level() < ell && path.kinds.size() < max_steps) {
      StepKind kind;
      x = k.sample_step(x, rng, kind);
      lifter.push(x, kind);
      path.vertices.push_back(x);
      path.kinds.push_back(kind);
      // Omega_0 already fails; no need to walk further.
      if (lifter.crossed_root_edge() || 2 * lifter.distinct_in_current() > static_cast<std::size_t>(R)) {
        doomed = true;
        break;
      }
    }
    if (doomed || lifter.level() < ell || !gs.matching().is_matched(x0)) continue;
    const LiftedWalk& lw = lifter.walk();
    if (!omega0(lw, ell, R) || !omega1(lw, ell)) continue;
    ++rep.qualifying;
    const std::size_t tau = path.kinds.size();
    TaggedPath z = reverse_path(gs, path);
    LiftedWalk lz = lift(gs, z);
    auto tz = tau_level(lz, ell);
    bool ok = tz && *tz == tau && omega0(lz, ell, R) && omega1(lz, ell);
    if (ok) {
      ++rep.passes;
    } else if (rep.failures.size() < 5) {
      std::ostringstream msg;
      msg << "start " << x0 << " length " << tau << " tau_z "
          << (tz ? std::to_string(*tz) : std::string("absent"));
      rep.failures.push_back(msg.str());
    }
  }
  return rep;
}

}  // namespace matchmix
