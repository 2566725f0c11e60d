#include <algorithm>
#include <cmath>
#include <numeric>

#include "matchmix/analysis.hpp"
#include "matchmix/error.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {
namespace {

// Small slack so that sets of mass exactly at the budget are admitted.
constexpr double kMassTol = 1e-12;

struct HitSearch {
  const Kernel& k;
  std::vector<double> thresholds;
  std::vector<std::size_t> hits;  // running max over candidate sets
  std::size_t t_max;

  // Survival h_s(x) = P_x(tau_A > s) with A the complement of `outside`.
  void add(const std::vector<char>& outside) {
    const std::size_t n = k.size();
    std::vector<double> h(n), next(n), scratch(n);
    for (std::size_t x = 0; x < n; ++x) h[x] = outside[x] ? 1.0 : 0.0;
    const double lowest = *std::min_element(thresholds.begin(), thresholds.end());
    std::vector<char> done(thresholds.size(), 0);
    for (std::size_t s = 0;; ++s) {
      const double top = *std::max_element(h.begin(), h.end());
      for (std::size_t i = 0; i < thresholds.size(); ++i)
        if (!done[i] && top <= thresholds[i]) {
          done[i] = 1;
          hits[i] = std::max(hits[i], s);
        }
      if (top <= lowest) return;
      if (s >= t_max) throw NotMixedByHorizon("hitting quantile not reached by the horizon");
      k.apply(h, next, scratch);
      for (std::size_t x = 0; x < n; ++x) h[x] = outside[x] ? next[x] : 0.0;
    }
  }
};

std::vector<Vertex> bfs_order(const Kernel& k, Vertex x) {
  const std::size_t n = k.size();
  std::vector<char> seen(n, 0);
  std::vector<Vertex> order{x};
  seen[x] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Vertex u = order[i];
    std::vector<Vertex> next;
    for (Vertex w : k.base().neighbors(u)) next.push_back(w);
    if (k.partner(u) != kNoVertex) next.push_back(k.partner(u));
    std::sort(next.begin(), next.end());
    for (Vertex w : next)
      if (!seen[w]) {
        seen[w] = 1;
        order.push_back(w);
      }
  }
  return order;
}

// Vertices by decreasing expected occupation over `horizon` steps from x.
std::vector<Vertex> occupation_order(const Kernel& k, Vertex x, std::size_t horizon) {
  const std::size_t n = k.size();
  std::vector<double> cur(n, 0.0), next(n), scratch(n), occ(n, 0.0);
  cur[x] = 1.0;
  for (std::size_t s = 0; s <= horizon; ++s) {
    for (std::size_t v = 0; v < n; ++v) occ[v] += cur[v];
    k.step(cur, next, scratch);
    std::swap(cur, next);
  }
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
    if (a == x || b == x) return a == x && b != x;
    return occ[a] > occ[b];
  });
  return order;
}

// Longest prefix of `order` whose mass stays within the budget.
std::vector<char> prefix_set(const Kernel& k, const std::vector<Vertex>& order, double budget) {
  std::vector<char> in(k.size(), 0);
  double mass = 0.0;
  for (Vertex v : order) {
    double m = k.stationary_mass()[v];
    if (mass + m > budget + kMassTol) break;
    mass += m;
    in[v] = 1;
  }
  return in;
}

}  // namespace

SandwichReport hit_mix_sandwich_check(const GStar& gs, double theta, const SandwichOptions& opts) {
  const std::size_t n = gs.vertex_count();
  if (n > 2000) throw InvalidParameter("hit/mix sandwich needs n <= 2000");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidParameter("theta must lie in (0, 1)");
  Kernel k(gs, opts.lazy);
  SandwichReport rep;
  rep.theta = theta;

  auto starts = all_starts(n);
  ProfileOptions po;
  po.stop_below = theta;
  auto curve = distance_profile(k, starts, opts.t_max, po);
  auto tm = try_mixing_time(curve, theta);
  if (!tm) throw NotMixedByHorizon("t_mix not reached by the horizon");
  rep.t_mix = *tm;

  auto rel = relaxation_times(k);
  rep.unbounded = rel.unbounded;
  rep.t_rel_abs = rel.t_rel_abs;

  const double small_budget = theta / 4.0;  // alpha = 1 - theta/4
  const double half_budget = 0.5;           // alpha = 1/2
  HitSearch main{k, {1.25 * theta, 0.75 * theta}, {0, 0}, opts.t_max};
  HitSearch half{k, {0.75 * theta}, {0}, opts.t_max};
  auto pi = k.stationary_mass();

  if (n <= opts.exhaustive_limit) {
    rep.exhaustive = true;
    std::vector<char> outside(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      double mass = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        outside[v] = (mask >> v) & 1;
        if (outside[v]) mass += pi[v];
      }
      if (mass <= half_budget + kMassTol) half.add(outside);
      if (mass <= small_budget + kMassTol) main.add(outside);
      ++rep.candidate_sets;
    }
  } else {
    std::vector<Vertex> centres = all_starts(n);
    if (n > opts.candidate_starts) {
      Rng rng = make_stream(opts.seed, 0);
      std::shuffle(centres.begin(), centres.end(), rng);
      centres.resize(opts.candidate_starts);
    }
    std::vector<std::vector<char>> small_sets, half_sets;
    for (Vertex x : centres) {
      for (const auto& order : {bfs_order(k, x), occupation_order(k, x, rep.t_mix)}) {
        small_sets.push_back(prefix_set(k, order, small_budget));
        half_sets.push_back(prefix_set(k, order, half_budget));
      }
    }
    for (auto* sets : {&small_sets, &half_sets}) {
      std::sort(sets->begin(), sets->end());
      sets->erase(std::unique(sets->begin(), sets->end()), sets->end());
    }
    for (const auto& s : small_sets) main.add(s);
    for (const auto& s : half_sets) half.add(s);
    rep.candidate_sets = small_sets.size() + half_sets.size();
  }

  rep.hit_lower = main.hits[0];
  rep.hit_upper = main.hits[1];
  rep.hit_half = half.hits[0];
  rep.lower_ok = rep.hit_lower <= rep.t_mix;
  rep.monotone_ok = rep.hit_upper <= rep.hit_half;
  if (rep.unbounded) {
    rep.upper_ok = true;
  } else {
    rep.upper_bound = rep.hit_upper + static_cast<std::size_t>(std::ceil(
                                          1.5 * rep.t_rel_abs * std::abs(std::log(theta / 4.0))));
    rep.upper_ok = rep.t_mix <= rep.upper_bound;
  }
  return rep;
}

}  // namespace matchmix
