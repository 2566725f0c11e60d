#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "matchmix/error.hpp"
#include "matchmix/parallel.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {

bool Distribution::valid(double tol) const {
  double s = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0)) return false;
    s += m;
  }
  return std::fabs(s - 1.0) <= tol;
}

Distribution point_mass(std::size_t n, Vertex v) {
  if (v < 0 || static_cast<std::size_t>(v) >= n) throw InvalidInput("vertex out of range");
  Distribution d{std::vector<double>(n, 0.0)};
  d.mass[v] = 1.0;
  return d;
}

Distribution stationary(const Kernel& k) {
  auto pi = k.stationary_mass();
  return Distribution{std::vector<double>(pi.begin(), pi.end())};
}

Distribution step(const Kernel& k, const Distribution& d) {
  if (d.size() != k.size()) throw InvalidInput("distribution length differs from the kernel");
  Distribution out{std::vector<double>(d.size())};
  std::vector<double> scratch(d.size());
  k.step(d.mass, out.mass, scratch);
  return out;
}

double tv(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("tv: length mismatch");
  return 0.5 * simd::l1_distance(a, b);
}

double tv(const Distribution& a, const Distribution& b) { return tv(a.mass, b.mass); }

std::vector<Vertex> all_starts(std::size_t n) {
  std::vector<Vertex> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

std::vector<Vertex> default_starts(const Kernel& k, Rng& rng, std::size_t sample) {
  const std::size_t n = k.size();
  if (n <= sample) return all_starts(n);
  std::vector<Vertex> pool = all_starts(n);
  // Partial Fisher-Yates: the first `sample` entries become a uniform subset.
  for (std::size_t i = 0; i < sample; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n - i)]);
  std::vector<Vertex> starts(pool.begin(), pool.begin() + sample);
  Vertex lo = 0, hi = 0;
  for (std::size_t v = 1; v < n; ++v) {
    if (k.total_weight(static_cast<Vertex>(v)) < k.total_weight(lo)) lo = static_cast<Vertex>(v);
    if (k.total_weight(static_cast<Vertex>(v)) > k.total_weight(hi)) hi = static_cast<Vertex>(v);
  }
  starts.push_back(lo);
  starts.push_back(hi);
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

MixCurve distance_profile(const Kernel& k, std::span<const Vertex> starts, std::size_t t_max,
                          const ProfileOptions& opts) {
  const std::size_t n = k.size();
  if (starts.empty()) throw InvalidInput("distance_profile needs at least one start");
  for (Vertex x : starts)
    if (x < 0 || static_cast<std::size_t>(x) >= n) throw InvalidInput("start vertex out of range");
  auto pi = k.stationary_mass();

  // Each start evolves on its own O(n) buffers; curves are combined afterwards.
  std::vector<std::vector<double>> per_start(starts.size());
  parallel_for(starts.size(), opts.jobs, [&](std::size_t i) {
    std::vector<double> cur(n, 0.0), next(n), scratch(n);
    cur[starts[i]] = 1.0;
    auto& curve = per_start[i];
    curve.reserve(std::min<std::size_t>(t_max + 1, 1 << 16));
    curve.push_back(tv(cur, pi));
    for (std::size_t t = 1; t <= t_max; ++t) {
      if (curve.back() <= opts.stop_below) break;
      k.step(cur, next, scratch);
      std::swap(cur, next);
      curve.push_back(tv(cur, pi));
    }
  });

  std::size_t len = 0;
  for (auto& c : per_start) len = std::max(len, c.size());
  MixCurve out;
  out.starts.assign(starts.begin(), starts.end());
  out.values.assign(len, 0.0);
  double weight_total = 0.0;
  for (Vertex x : starts) weight_total += pi[x];
  for (std::size_t i = 0; i < per_start.size(); ++i) {
    const auto& c = per_start[i];
    for (std::size_t t = 0; t < len; ++t) {
      // A start that stopped early stays below stop_below; hold its last value.
      double v = t < c.size() ? c[t] : c.back();
      if (opts.average)
        out.values[t] += pi[starts[i]] / weight_total * v;
      else
        out.values[t] = std::max(out.values[t], v);
    }
  }
  return out;
}

std::optional<std::size_t> try_mixing_time(const MixCurve& c, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidParameter("theta must lie in (0, 1)");
  for (std::size_t t = 0; t < c.values.size(); ++t)
    if (c.values[t] <= theta) return t;
  return std::nullopt;
}

std::size_t mixing_time(const MixCurve& c, double theta) {
  auto t = try_mixing_time(c, theta);
  if (!t)
    throw NotMixedByHorizon("curve stays above theta=" + std::to_string(theta) + " up to t=" +
                            std::to_string(c.values.empty() ? 0 : c.values.size() - 1));
  return *t;
}

void write_mix_curve_csv(std::ostream& out, const MixCurve& c) {
  out << "t,d_hat\n";
  out.precision(17);
  for (std::size_t t = 0; t < c.values.size(); ++t) out << t << ',' << c.values[t] << '\n';
}

TaggedPath sample_tagged_path(const Kernel& k, Vertex start, std::size_t t, Rng& rng) {
  if (start < 0 || static_cast<std::size_t>(start) >= k.size())
    throw InvalidInput("start vertex out of range");
  TaggedPath p;
  p.vertices.reserve(t + 1);
  p.kinds.reserve(t);
  p.vertices.push_back(start);
  Vertex x = start;
  for (std::size_t i = 0; i < t; ++i) {
    StepKind kind;
    x = k.sample_step(x, rng, kind);
    p.vertices.push_back(x);
    p.kinds.push_back(kind);
  }
  return p;
}

std::vector<Vertex> sample_path(const Kernel& k, Vertex start, std::size_t t, Rng& rng) {
  return sample_tagged_path(k, start, t, rng).vertices;
}

std::vector<double> survival_probabilities(const Kernel& k, const std::vector<char>& in_target,
                                           std::size_t s) {
  const std::size_t n = k.size();
  if (in_target.size() != n) throw InvalidInput("target mask length differs from the kernel");
  std::vector<double> u(n), next(n), scratch(n), keep(n);
  for (std::size_t v = 0; v < n; ++v) keep[v] = in_target[v] ? 0.0 : 1.0;
  u = keep;
  for (std::size_t j = 0; j < s; ++j) {
    k.apply(u, next, scratch);
    simd::hadamard(next, keep, u);
  }
  return u;
}

std::vector<HittingEstimate> hitting_time_quantile(const Kernel& k, std::span<const Vertex> target,
                                                   std::span<const Vertex> starts, std::size_t s,
                                                   std::size_t trials, Rng& rng,
                                                   std::size_t exact_limit) {
  const std::size_t n = k.size();
  if (target.empty()) throw InvalidInput("hitting target is empty");
  std::vector<char> in_target(n, 0);
  for (Vertex a : target) {
    if (a < 0 || static_cast<std::size_t>(a) >= n) throw InvalidInput("target vertex out of range");
    in_target[a] = 1;
  }
  std::vector<HittingEstimate> out;
  out.reserve(starts.size());
  if (n <= exact_limit) {
    auto u = survival_probabilities(k, in_target, s);
    for (Vertex x : starts) out.push_back({x, u.at(x), 0.0, true});
    return out;
  }
  if (trials == 0) throw InvalidParameter("Monte-Carlo hitting needs trials >= 1");
  for (Vertex x : starts) {
    std::size_t survived = 0;
    for (std::size_t tr = 0; tr < trials; ++tr) {
      Vertex y = x;
      bool hit = in_target[y];
      for (std::size_t j = 0; j < s && !hit; ++j) {
        StepKind kind;
        y = k.sample_step(y, rng, kind);
        hit = in_target[y];
      }
      survived += hit ? 0 : 1;
    }
    double p = static_cast<double>(survived) / trials;
    out.push_back({x, p, std::sqrt(std::max(p * (1 - p), 1.0 / trials) / trials), false});
  }
  return out;
}

}  // namespace matchmix
