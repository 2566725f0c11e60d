#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "matchmix/error.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {

double entropy_b(std::span<const double> p, int b) {
  if (b < 1) throw InvalidParameter("entropy order b must be >= 1");
  double h = 0.0;
  for (double x : p) {
    if (x <= 0.0) continue;
    double l = -std::log(x);
    double term = x;
    for (int i = 0; i < b; ++i) term *= l;
    h += term;
  }
  return h;
}

namespace {
void check_order(int b) {
  if (b != 1 && b != 2 && b != 4) throw InvalidParameter("entropy order b must be 1, 2 or 4");
}
}  // namespace

std::vector<double> entropy_profile(const Kernel& k, Vertex start, std::size_t t_max, int b) {
  check_order(b);
  const std::size_t n = k.size();
  std::vector<double> cur = point_mass(n, start).mass, next(n), scratch(n);
  std::vector<double> out{entropy_b(cur, b)};
  for (std::size_t t = 1; t <= t_max; ++t) {
    k.step(cur, next, scratch);
    std::swap(cur, next);
    out.push_back(entropy_b(cur, b));
  }
  return out;
}

EntropyProfiles entropy_profiles(const Kernel& k, Vertex start, std::size_t t_max) {
  const std::size_t n = k.size();
  std::vector<double> cur = point_mass(n, start).mass, next(n), scratch(n);
  EntropyProfiles p;
  for (std::size_t t = 0; t <= t_max; ++t) {
    if (t > 0) {
      k.step(cur, next, scratch);
      std::swap(cur, next);
    }
    p.h1.push_back(entropy_b(cur, 1));
    p.h2.push_back(entropy_b(cur, 2));
    p.h4.push_back(entropy_b(cur, 4));
  }
  return p;
}

void write_entropy_csv(std::ostream& out, const EntropyProfiles& p) {
  out << "t,H1,H2,H4\n";
  out.precision(17);
  for (std::size_t t = 0; t < p.h1.size(); ++t)
    out << t << ',' << p.h1[t] << ',' << p.h2[t] << ',' << p.h4[t] << '\n';
}

KilledLaw killed_endpoint_distribution(const Graph& g, std::span<const char> matched_mask,
                                       double eps, Vertex v, double tol) {
  const std::size_t n = g.vertex_count();
  if (!(tol > 0.0 && tol <= 0.01)) throw InvalidParameter("tol must lie in (0, 0.01]");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
  if (matched_mask.size() != n) throw InvalidInput("matched mask length differs from the graph");
  if (!g.valid_vertex(v)) throw InvalidInput("start vertex out of range");
  if (std::none_of(matched_mask.begin(), matched_mask.end(), [](char c) { return c != 0; }))
    throw NoKilling("no matched vertex: the walk is never killed");

  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(n);
  std::vector<double> inv(n), kill(n);
  for (std::size_t x = 0; x < n; ++x) {
    auto u = static_cast<Vertex>(x);
    for (Vertex y : g.neighbors(u)) {
      if (!rows[x].empty() && rows[x].back().first == y)
        rows[x].back().second += 1.0;
      else
        rows[x].emplace_back(y, 1.0);
    }
    double w = g.degree(u) + (matched_mask[x] ? eps : 0.0);
    inv[x] = 1.0 / w;
    kill[x] = matched_mask[x] ? eps / w : 0.0;
  }
  const auto adjacency = simd::EllMatrix::from_rows(rows);

  KilledLaw law;
  law.endpoint.assign(n, 0.0);
  std::vector<double> alive(n, 0.0), next(n), killed(n), scratch(n);
  alive[v] = 1.0;
  const auto cap = static_cast<std::size_t>(std::ceil(100.0 * (g.max_degree() + 1) / eps));
  double mass = 1.0;
  double m1 = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (; mass >= tol; ++k) {
    if (k > cap) throw NoKilling("alive mass did not fall below tol within the horizon cap");
    simd::hadamard(alive, kill, killed);
    double dead = simd::sum(killed);
    simd::add_inplace(law.endpoint, killed);
    m1 += dead * static_cast<double>(k);
    m2 += dead * static_cast<double>(k) * static_cast<double>(k);
    simd::hadamard(alive, inv, scratch);
    simd::ell_multiply(adjacency, scratch, next);
    std::swap(alive, next);
    mass = simd::sum(alive);
  }
  law.steps = k;
  law.residual = mass;
  law.accumulated = simd::sum(law.endpoint);
  law.mean_time = m1 / law.accumulated;
  law.second_moment = m2 / law.accumulated;
  return law;
}

double first_crossing_entropy(const GStar& gs, Vertex v, double tol, int b) {
  const std::size_t n = gs.vertex_count();
  std::vector<char> mask(n);
  for (std::size_t x = 0; x < n; ++x) mask[x] = gs.matching().is_matched(static_cast<Vertex>(x));
  auto law = killed_endpoint_distribution(gs.base(), mask, gs.eps(), v, tol);
  // The partner map is injective on the support, so the crossing target has
  // the same law up to relabelling; condition on having been killed.
  for (double& p : law.endpoint) p /= law.accumulated;
  return entropy_b(law.endpoint, b);
}

DirichletReport dirichlet_comparison(const GStar& gs) {
  const std::size_t n = gs.vertex_count();
  if (n > 2000) throw InvalidParameter("dirichlet_comparison is limited to n <= 2000");
  const Graph& g = gs.base();
  const double eps = gs.eps();
  DirichletReport r;
  r.upper_constant = 1.0 + g.max_degree();
  r.lower_holds = r.upper_holds = true;
  r.min_kernel_ratio = r.min_pi_ratio = std::numeric_limits<double>::infinity();
  r.max_kernel_ratio = r.max_pi_ratio = 0.0;

  double sum_star = 0.0, sum_k = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    auto u = static_cast<Vertex>(x);
    bool m = gs.matching().is_matched(u);
    sum_star += g.degree(u) + (m ? eps : 0.0);
    sum_k += g.degree(u) + (m ? 1.0 : 0.0);
  }
  const double slack = 1e-14;
  for (std::size_t x = 0; x < n; ++x) {
    auto u = static_cast<Vertex>(x);
    bool m = gs.matching().is_matched(u);
    double w_star = g.degree(u) + (m ? eps : 0.0);
    double w_k = g.degree(u) + (m ? 1.0 : 0.0);
    std::vector<Vertex> support(g.neighbors(u).begin(), g.neighbors(u).end());
    if (m) support.push_back(gs.partner(u));
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    for (Vertex y : support) {
      double mult = g.multiplicity(u, y);
      bool pair = gs.partner(u) == y;
      double p_star = (mult + (pair ? eps : 0.0)) / w_star;
      double p_k = (mult + (pair ? 1.0 : 0.0)) / w_k;
      if (eps * p_k > p_star * (1 + slack)) r.lower_holds = false;
      if (p_star > r.upper_constant * p_k * (1 + slack)) r.upper_holds = false;
      r.min_kernel_ratio = std::min(r.min_kernel_ratio, p_star / p_k);
      r.max_kernel_ratio = std::max(r.max_kernel_ratio, p_star / p_k);
    }
    double ratio = (w_star / sum_star) / (w_k / sum_k);
    r.min_pi_ratio = std::min(r.min_pi_ratio, ratio);
    r.max_pi_ratio = std::max(r.max_pi_ratio, ratio);
  }
  r.pi_within_weight_bounds =
      r.min_pi_ratio >= 1.0 / (1.0 + eps) * (1 - slack) && r.max_pi_ratio <= (1.0 + eps) * (1 + slack);
  return r;
}

}  // namespace matchmix
