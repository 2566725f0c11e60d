#include "matchmix/quasitree.hpp"

#include <algorithm>
#include <unordered_set>

#include "matchmix/error.hpp"

namespace matchmix {

LazyBall::LazyBall(const Graph& g, Vertex center, int R) : g_(&g), center_(center), R_(R) {
  dist_.emplace(center, 0);
  frontier_.push_back(center);
  order_.push_back(center);
}

int LazyBall::distance(Vertex u) const {
  auto it = dist_.find(u);
  return it == dist_.end() ? -1 : it->second;
}

void LazyBall::ensure(int radius) {
  radius = std::min(radius, R_);
  while (explored_ < radius) {
    std::vector<Vertex> next;
    for (Vertex u : frontier_)
      for (Vertex w : g_->neighbors(u))
        if (dist_.emplace(w, explored_ + 1).second) {
          next.push_back(w);
          order_.push_back(w);
        }
    ++explored_;
    frontier_ = std::move(next);
    if (frontier_.empty()) explored_ = R_;
  }
}

std::span<const Vertex> LazyBall::neighbors(Vertex u) {
  auto it = dist_.find(u);
  if (it == dist_.end()) throw InvalidInput("vertex not in ball");
  int d = it->second;
  if (d < R_) {
    ensure(d + 1);
    return g_->neighbors(u);
  }
  ensure(R_);
  scratch_.clear();
  for (Vertex w : g_->neighbors(u))
    if (dist_.count(w)) scratch_.push_back(w);
  return scratch_;
}

void LazyBall::complete() { ensure(R_); }

std::vector<Vertex> LazyBall::members() {
  complete();
  return order_;
}

QuasiTree::QuasiTree(std::shared_ptr<const Graph> g, int R, double eps, Rng& rng,
                     QuasiTreeOptions opts)
    : g_(std::move(g)), R_(R), eps_(eps), opts_(opts), rng_(rng()) {
  if (!g_ || g_->vertex_count() == 0) throw InvalidInput("quasi-tree needs a nonempty graph");
  if (R < 1) throw InvalidParameter("R must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
  CopyId id = next_id_++;
  copies_.emplace(id, Copy{fresh_center(), kNoCopy, kNoVertex, 0, 0, {}});
}

Vertex QuasiTree::fresh_center() {
  return static_cast<Vertex>(uniform_index(rng_, g_->vertex_count()));
}

const QuasiTree::Copy& QuasiTree::copy(CopyId c) const {
  auto it = copies_.find(c);
  if (it == copies_.end()) throw InvalidInput("unknown or evicted copy id");
  return it->second;
}

QuasiTree::Copy& QuasiTree::copy(CopyId c) {
  auto it = copies_.find(c);
  if (it == copies_.end()) throw InvalidInput("unknown or evicted copy id");
  return it->second;
}

bool QuasiTree::has_long_range(CopyId c, Vertex u) const {
  const Copy& cp = copy(c);
  if (u != cp.center) return true;
  return c != root() || opts_.root_parent_edge;
}

std::optional<CopyId> QuasiTree::find_child(CopyId c, Vertex u) const {
  const Copy& cp = copy(c);
  auto it = cp.children.find(u);
  if (it == cp.children.end()) return std::nullopt;
  return it->second;
}

CopyId QuasiTree::child(CopyId c, Vertex u) {
  Copy& cp = copy(c);
  if (u == cp.center) throw InvalidInput("a centre has no child edge");
  auto it = cp.children.find(u);
  if (it != cp.children.end()) return it->second;
  CopyId id = next_id_++;
  Copy fresh{fresh_center(), c, u, cp.depth + 1, ++clock_, {}};
  cp.children.emplace(u, id);
  copies_.emplace(id, std::move(fresh));
  return id;
}

LazyBall& QuasiTree::ball_of(CopyId c) {
  Vertex center = copy(c).center;
  auto it = balls_.find(center);
  if (it != balls_.end()) return *it->second;
  if (balls_.size() >= opts_.ball_cache_cap) balls_.clear();
  auto [pos, inserted] = balls_.emplace(center, std::make_unique<LazyBall>(*g_, center, R_));
  return *pos->second;
}

bool QuasiTree::is_descendant(CopyId d, CopyId a) const {
  int target = depth(a);
  while (d != kNoCopy && depth(d) > target) d = parent(d);
  return d == a;
}

CopyId QuasiTree::ancestor_at(CopyId c, int depth_wanted) const {
  if (depth_wanted < 0 || depth_wanted > depth(c)) throw InvalidInput("no ancestor at that depth");
  while (depth(c) > depth_wanted) c = parent(c);
  return c;
}

void QuasiTree::touch(CopyId c) { copy(c).last_visit = ++clock_; }

void QuasiTree::maybe_evict(CopyId current) {
  if (copies_.size() <= opts_.copy_cap) return;
  std::unordered_set<CopyId> keep;
  for (CopyId a = current; a != kNoCopy; a = parent(a)) keep.insert(a);
  std::vector<std::uint64_t> stamps;
  stamps.reserve(copies_.size());
  for (auto& [id, cp] : copies_) stamps.push_back(cp.last_visit);
  auto mid = stamps.begin() + stamps.size() / 2;
  std::nth_element(stamps.begin(), mid, stamps.end());
  const std::uint64_t threshold = *mid;
  // Walks enter and leave a copy through its parent, so the descendants of a
  // stale copy are stale as well; the orphan sweep below is a safety net.
  std::vector<CopyId> drop;
  for (auto& [id, cp] : copies_)
    if (cp.last_visit < threshold && !keep.count(id)) drop.push_back(id);
  for (CopyId id : drop) {
    Copy& cp = copies_.at(id);
    auto p = copies_.find(cp.parent);
    if (p != copies_.end()) p->second.children.erase(cp.entry);
  }
  for (CopyId id : drop) copies_.erase(id);
  // Anything whose parent vanished goes too.
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = copies_.begin(); it != copies_.end();) {
      if (it->second.parent != kNoCopy && !copies_.count(it->second.parent)) {
        it = copies_.erase(it);
        ++evicted_;
        changed = true;
      } else {
        ++it;
      }
    }
  }
  evicted_ += drop.size();
}

TreeTrajectory tree_walk(QuasiTree& qt, Rng& rng, const WalkStop& stop,
                         std::optional<Vertex> start_vertex) {
  if (stop.max_steps == 0 && !stop.target_level) throw InvalidParameter("walk needs a finite stop");
  if (stop.target_level && *stop.target_level < 0) throw InvalidParameter("target level < 0");
  TreeTrajectory traj;
  CopyId c = qt.root();
  Vertex center = qt.center(c);
  Vertex u = start_vertex.value_or(center);
  LazyBall* ball = &qt.ball_of(c);
  if (ball->distance(u) < 0) {
    ball->complete();
    if (ball->distance(u) < 0) throw InvalidInput("start vertex outside the root ball");
  }
  bool at_root = true;
  int level = 0;
  const double eps = qt.eps();
  const bool root_edge = qt.root_parent_edge();
  qt.touch(c);
  auto record = [&] {
    if (stop.record_steps) traj.steps.push_back({c, u});
    traj.levels.push_back(level);
  };
  record();
  if (stop.target_level && level == *stop.target_level) {
    traj.reached_target = true;
    return traj;
  }
  for (std::size_t t = 1; t <= stop.max_steps; ++t) {
    auto nb = ball->neighbors(u);
    const bool lr = u != center || !at_root || root_edge;
    const double deg = static_cast<double>(nb.size());
    const double r = uniform01(rng) * (deg + (lr ? eps : 0.0));
    if (r < deg || !lr) {
      u = nb[std::min(static_cast<std::size_t>(r), nb.size() - 1)];
    } else if (u == center) {
      if (at_root) {
        traj.crossings.push_back({t, kNoCopy, 0, -1});
        traj.exited_root = true;
        break;
      }
      CopyId from = c;
      qt.touch(from);
      u = qt.entry_vertex(from);
      c = qt.parent(from);
      traj.crossings.push_back({t, from, level, level - 1});
      --level;
      qt.touch(c);
      center = qt.center(c);
      at_root = c == qt.root();
      ball = &qt.ball_of(c);
    } else {
      qt.touch(c);
      CopyId d = qt.child(c, u);
      traj.crossings.push_back({t, d, level, level + 1});
      ++level;
      c = d;
      qt.touch(c);
      qt.maybe_evict(c);
      center = qt.center(c);
      u = center;
      at_root = false;
      ball = &qt.ball_of(c);
    }
    record();
    if (stop.target_level && level == *stop.target_level) {
      traj.reached_target = true;
      break;
    }
  }
  if (stop.target_level && !traj.reached_target && !traj.exited_root) traj.horizon_exceeded = true;
  return traj;
}

std::vector<CopyId> loop_erasure(const TreeTrajectory& traj, std::optional<int> target_level) {
  if (traj.levels.empty()) throw InvalidInput("empty trajectory");
  std::size_t terminal;
  if (target_level) {
    auto it = std::find(traj.levels.begin(), traj.levels.end(), *target_level);
    if (it == traj.levels.end()) throw InvalidInput("target level never reached");
    terminal = static_cast<std::size_t>(it - traj.levels.begin());
  } else {
    terminal = traj.levels.size() - 1;
    int top = *std::max_element(traj.levels.begin(), traj.levels.end());
    auto first = std::find(traj.levels.begin(), traj.levels.end(), top);
    if (static_cast<std::size_t>(first - traj.levels.begin()) != terminal)
      throw InvalidInput("trajectory must reach its maximum level only at its end");
  }
  const int L = traj.levels[terminal];
  std::vector<CopyId> xi(std::max(L, 0), kNoCopy);
  std::vector<char> seen(xi.size(), 0);
  for (const Crossing& c : traj.crossings) {
    if (c.time > terminal) break;
    int k = std::max(c.from_level, c.to_level);
    if (k >= 1 && k <= L) {
      xi[k - 1] = c.edge;
      seen[k - 1] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw InvalidInput("crossing record is missing a level");
  return xi;
}

RegenerationRecord regenerations(const TreeTrajectory& traj, int K, std::size_t buffer) {
  RegenerationRecord rec;
  rec.K = K;
  rec.buffer = buffer;
  rec.horizon = traj.horizon();
  auto it = std::find(traj.levels.begin(), traj.levels.end(), K);
  if (it == traj.levels.end()) throw InvalidInput("level K never reached");
  const auto sigma0 = static_cast<std::size_t>(it - traj.levels.begin());
  rec.sigma.push_back(sigma0);
  rec.phi.push_back(K);
  std::unordered_map<CopyId, int> count;
  count.reserve(traj.crossings.size());
  for (const Crossing& c : traj.crossings) ++count[c.edge];
  if (rec.horizon < buffer) return rec;
  const std::size_t last = rec.horizon - buffer;
  for (const Crossing& c : traj.crossings) {
    if (c.time > last) break;
    if (c.time <= sigma0 || c.edge == kNoCopy || c.to_level <= c.from_level) continue;
    if (c.to_level >= K + 1 && count[c.edge] == 1) {
      rec.sigma.push_back(c.time);
      rec.phi.push_back(c.to_level);
    }
  }
  return rec;
}

}  // namespace matchmix
