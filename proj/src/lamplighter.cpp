#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "matchmix/analysis.hpp"
#include "matchmix/error.hpp"

namespace matchmix {
namespace {

// Open-addressing map from packed states to probabilities. The laws below
// reach tens of millions of states, where node-based maps cost several times
// the memory.
class StateTable {
 public:
  static constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();

  explicit StateTable(std::size_t expected = 16) {
    std::size_t cap = 16;
    while (cap < 2 * expected) cap <<= 1;
    keys_.assign(cap, kEmpty);
    vals_.assign(cap, 0.0);
  }

  void add(std::uint64_t key, double p) {
    if (2 * (size_ + 1) > keys_.size()) grow();
    insert(key, p);
  }

  std::size_t size() const { return size_; }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != kEmpty) f(keys_[i], vals_[i]);
  }

 private:
  static std::size_t mix(std::uint64_t key) {
    key ^= key >> 33;
    key *= 0xff51afd7ed558ccdULL;
    key ^= key >> 33;
    return static_cast<std::size_t>(key);
  }

  void insert(std::uint64_t key, double p) {
    const std::size_t mask = keys_.size() - 1;
    for (std::size_t i = mix(key) & mask;; i = (i + 1) & mask) {
      if (keys_[i] == key) {
        vals_[i] += p;
        return;
      }
      if (keys_[i] == kEmpty) {
        keys_[i] = key;
        vals_[i] = p;
        ++size_;
        return;
      }
    }
  }

  void grow() {
    std::vector<std::uint64_t> keys(keys_.size() * 2, kEmpty);
    std::vector<double> vals(keys_.size() * 2, 0.0);
    keys.swap(keys_);
    vals.swap(vals_);
    size_ = 0;
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] != kEmpty) insert(keys[i], vals[i]);
  }

  std::vector<std::uint64_t> keys_;
  std::vector<double> vals_;
  std::size_t size_ = 0;
};

double table_entropy(const StateTable& t) {
  double h = 0.0;
  t.for_each([&](std::uint64_t, double p) {
    if (p > 0.0) h -= p * std::log(p);
  });
  return h;
}

}  // namespace

LamplighterReport lamplighter_entropy_check(const Graph& base, std::size_t t_max, std::size_t trials,
                                            Rng& rng, double c, std::size_t state_budget) {
  const std::size_t k = base.vertex_count();
  if (k == 0 || k > 57) throw InvalidParameter("lamplighter base must have 1..57 vertices");
  if (!base.is_simple() || !base.is_connected())
    throw InvalidParameter("lamplighter base must be simple and connected");
  if (trials == 0) throw InvalidParameter("trials must be positive");
  const Vertex o = 0;
  auto pack = [k](std::uint64_t mask, Vertex v) { return mask * k + static_cast<std::uint64_t>(v); };

  LamplighterReport rep;
  rep.c = c;

  // Range law of the base walk: states (visited set, position).
  std::vector<double> range_exact(t_max + 1, 0.0);
  {
    StateTable cur;
    cur.add(pack(std::uint64_t{1} << o, o), 1.0);
    range_exact[0] = 1.0;
    for (std::size_t t = 1; t <= t_max; ++t) {
      StateTable next(cur.size() * 2);
      cur.for_each([&](std::uint64_t key, double p) {
        std::uint64_t mask = key / k;
        auto u = static_cast<Vertex>(key % k);
        const double q = p / base.degree(u);
        for (Vertex v : base.neighbors(u)) next.add(pack(mask | (std::uint64_t{1} << v), v), q);
      });
      if (next.size() > state_budget) throw InvalidParameter("range law exceeds the state budget");
      double e = 0.0;
      next.for_each([&](std::uint64_t key, double p) { e += p * std::popcount(key / k); });
      range_exact[t] = e;
      cur = std::move(next);
    }
  }

  // Monte Carlo range for cross-checking.
  std::vector<double> mc_sum(t_max + 1, 0.0), mc_sq(t_max + 1, 0.0);
  std::vector<char> seen(k);
  for (std::size_t i = 0; i < trials; ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    Vertex u = o;
    seen[u] = 1;
    double size = 1.0;
    mc_sum[0] += 1.0;
    mc_sq[0] += 1.0;
    for (std::size_t t = 1; t <= t_max; ++t) {
      auto nb = base.neighbors(u);
      u = nb[uniform_index(rng, nb.size())];
      if (!seen[u]) {
        seen[u] = 1;
        size += 1.0;
      }
      mc_sum[t] += size;
      mc_sq[t] += size * size;
    }
  }

  // Entropy of the lamplighter walk from (all lamps off, o). After the first
  // step the lamp under the walker is a fresh fair bit independent of the rest,
  // so it is marginalised out: the reduced state keeps that bit cleared and
  // H(X_t) = H(reduced) + log 2.
  StateTable cur;
  cur.add(pack(0, o), 1.0);
  for (std::size_t t = 0; t <= t_max; ++t) {
    LamplighterPoint pt;
    pt.t = t;
    pt.h1 = t == 0 ? 0.0 : table_entropy(cur) + std::log(2.0);
    pt.states = cur.size();
    pt.range_exact = range_exact[t];
    const double mean = mc_sum[t] / trials;
    pt.range_mc = mean;
    pt.range_mc_se =
        trials > 1 ? std::sqrt(std::max(0.0, mc_sq[t] / trials - mean * mean) / (trials - 1)) : 0.0;
    pt.ok = t == 0 || pt.h1 >= c * pt.range_exact;
    rep.all_ok = rep.all_ok && pt.ok;
    rep.points.push_back(pt);
    if (t == t_max) break;

    StateTable next(cur.size() * 4);
    cur.for_each([&](std::uint64_t key, double p) {
      std::uint64_t mask = key / k;
      auto u = static_cast<Vertex>(key % k);
      const double q = p / (2.0 * base.degree(u));
      for (Vertex v : base.neighbors(u)) {
        const std::uint64_t cleared = mask & ~(std::uint64_t{1} << v);
        next.add(pack(cleared & ~(std::uint64_t{1} << u), v), q);
        next.add(pack(cleared | (std::uint64_t{1} << u), v), q);
      }
    });
    if (next.size() > state_budget) throw InvalidParameter("lamplighter law exceeds the state budget");
    cur = std::move(next);
  }
  return rep;
}

}  // namespace matchmix
