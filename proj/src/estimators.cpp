#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "matchmix/error.hpp"
#include "matchmix/quasitree.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {
namespace {

// One-sigma Wilson score interval: returns (centre, half-width).
std::pair<double, double> wilson(std::size_t successes, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  const double z2 = 1.0;
  double p = static_cast<double>(successes) / n;
  double denom = 1.0 + z2 / n;
  double centre = (p + z2 / (2.0 * n)) / denom;
  double half = std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {centre, half};
}

void check_common(const std::shared_ptr<const Graph>& g, int R, double eps) {
  if (!g) throw InvalidInput("null graph");
  if (R < 1) throw InvalidParameter("R must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps must lie in (0, 1]");
}

std::size_t default_buffer(double eps) { return static_cast<std::size_t>(std::ceil(10.0 / eps)); }

}  // namespace

DeltaEstimate estimate_delta(std::shared_ptr<const Graph> g, int R, double eps, std::size_t trials,
                             int escape_levels, Rng& rng, const DeltaOptions& opts) {
  check_common(g, R, eps);
  if (escape_levels < 10) throw InvalidParameter("escape_levels must be >= 10");
  if (trials == 0) throw InvalidParameter("trials must be >= 1");
  const std::size_t edges = std::max<std::size_t>(1, std::min(opts.edges, trials));
  const std::size_t cap =
      opts.step_cap ? opts.step_cap
                    : static_cast<std::size_t>(std::ceil(50.0 * (escape_levels + 1) *
                                                         (g->max_degree() + 1) / eps));
  DeltaEstimate est;
  est.edges = edges;
  est.trials = trials;
  double best = -1.0;
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t n = trials / edges + (e < trials % edges ? 1 : 0);
    Rng tree_rng(rng());
    QuasiTreeOptions qo;
    qo.root_parent_edge = true;
    QuasiTree qt(g, R, eps, tree_rng, qo);
    std::size_t returns = 0;
    for (std::size_t i = 0; i < n; ++i) {
      WalkStop stop{cap, escape_levels, false};
      auto traj = tree_walk(qt, tree_rng, stop);
      if (traj.exited_root)
        ++returns;
      else if (!traj.reached_target)
        ++est.capped;
    }
    est.returns += returns;
    double p = static_cast<double>(returns) / n;
    est.per_edge.push_back(p);
    if (p > best) {
      best = p;
      est.delta_hat = p;
      est.ci = wilson(returns, n).second;
    }
  }
  est.pooled = static_cast<double>(est.returns) / trials;
  est.pooled_ci = wilson(est.returns, trials).second;
  est.residual_bias = std::pow(est.delta_hat, escape_levels);
  return est;
}

SpeedEstimate estimate_speed(std::shared_ptr<const Graph> g, int R, double eps, std::size_t walks,
                             std::size_t horizon, Rng& rng, const SpeedOptions& opts) {
  check_common(g, R, eps);
  if (static_cast<double>(horizon) < 50.0 / eps) throw InvalidParameter("horizon must be >= 50/eps");
  if (walks == 0) throw InvalidParameter("walks must be >= 1");
  const std::size_t buffer = opts.buffer ? opts.buffer : default_buffer(eps);
  std::vector<double> a, b;  // phi and sigma increments
  SpeedEstimate est;
  for (std::size_t w = 0; w < walks; ++w) {
    Rng tree_rng(rng());
    QuasiTree qt(g, R, eps, tree_rng);
    WalkStop stop{horizon, std::nullopt, false};
    auto traj = tree_walk(qt, tree_rng, stop);
    if (std::find(traj.levels.begin(), traj.levels.end(), opts.K) == traj.levels.end()) continue;
    auto rec = regenerations(traj, opts.K, buffer);
    for (std::size_t i = 1; i + 1 < rec.sigma.size(); ++i) {
      a.push_back(rec.phi[i + 1] - rec.phi[i]);
      b.push_back(static_cast<double>(rec.sigma[i + 1] - rec.sigma[i]));
    }
    if (opts.keep_records) est.records.push_back(std::move(rec));
  }
  const std::size_t N = a.size();
  est.increments = N;
  if (N < 10) throw InsufficientData("fewer than 10 regeneration increments observed");
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / N;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / N;
  est.nu_hat = ma / mb;
  double va = 0, vb = 0, vr = 0;
  for (std::size_t i = 0; i < N; ++i) {
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
    double r = a[i] - est.nu_hat * b[i];
    vr += r * r;
  }
  est.mean_phi_increment = ma;
  est.mean_sigma_increment = mb;
  est.phi_increment_se = std::sqrt(va / (N - 1) / N);
  est.sigma_increment_se = std::sqrt(vb / (N - 1) / N);
  est.ci = std::sqrt(vr / (N - 1) / N) / mb;
  return est;
}

std::map<CopyId, double> estimate_theta_tilde(QuasiTree& qt, int M, std::size_t walks, Rng& rng,
                                              std::size_t max_steps) {
  if (M < 1) throw InvalidParameter("M must be >= 1");
  if (walks == 0) throw InvalidParameter("walks must be >= 1");
  if (max_steps == 0)
    max_steps = static_cast<std::size_t>(
        std::ceil(1000.0 * M * (qt.base().max_degree() + 1) / qt.eps()));
  std::map<CopyId, std::size_t> counts;
  std::size_t reached = 0;
  for (std::size_t w = 0; w < walks; ++w) {
    WalkStop stop{max_steps, M, true};
    auto traj = tree_walk(qt, rng, stop);
    if (!traj.reached_target) continue;
    ++reached;
    ++counts[qt.ancestor_at(traj.steps.back().copy, 1)];
  }
  if (reached == 0) throw InsufficientData("no walk reached level M");
  std::map<CopyId, double> out;
  for (auto [e, c] : counts) out[e] = static_cast<double>(c) / reached;
  return out;
}

EntropyRateEstimate estimate_entropy_rate(std::shared_ptr<const Graph> g, int R, double eps,
                                          const EntropyRateParams& params, Rng& rng) {
  check_common(g, R, eps);
  EntropyRateEstimate est;
  const std::size_t n = g->vertex_count();

  // Surrogate: entropy of the first long-range target, averaged over starts.
  std::vector<char> all_matched(n, 1);
  const std::size_t starts = std::max<std::size_t>(1, params.surrogate_starts);
  double h1 = 0.0;
  for (std::size_t i = 0; i < starts; ++i) {
    auto v = static_cast<Vertex>(uniform_index(rng, n));
    auto law = killed_endpoint_distribution(*g, all_matched, eps, v, params.surrogate_tol);
    for (double& p : law.endpoint) p /= law.accumulated;
    h1 += entropy_b(law.endpoint, 1);
  }
  est.h_surrogate_h1 = h1 / starts;
  // The first long-range target carries one level's worth of entropy.
  est.h_hat = est.h_surrogate_h1;

  if (params.phi_increment_mean) {
    est.phi_increment_mean = *params.phi_increment_mean;
  } else {
    auto horizon = static_cast<std::size_t>(std::ceil(400.0 / eps));
    est.phi_increment_mean = estimate_speed(g, R, eps, 10, horizon, rng).mean_phi_increment;
  }

  if (std::exp(est.h_surrogate_h1) > params.support_budget) {
    est.mc_skipped = true;
    return est;
  }

  // Monte-Carlo: -log of the empirical frequency of the first regeneration
  // edge within one tree, Miller-Madow corrected, per level of that edge.
  const std::size_t horizon =
      params.horizon ? params.horizon : static_cast<std::size_t>(std::ceil(60.0 / eps));
  const std::size_t buffer = params.buffer ? params.buffer : default_buffer(eps);
  std::vector<double> per_tree;
  std::vector<double> all_terms;
  double phi_sum = 0.0;
  std::size_t phi_count = 0;
  for (std::size_t t = 0; t < params.trees; ++t) {
    Rng tree_rng(rng());
    QuasiTree qt(g, R, eps, tree_rng);
    std::vector<CopyId> firsts;
    for (std::size_t w = 0; w < params.walks_per_tree; ++w) {
      WalkStop stop{horizon, std::nullopt, false};
      auto traj = tree_walk(qt, tree_rng, stop);
      if (std::find(traj.levels.begin(), traj.levels.end(), params.K) == traj.levels.end()) continue;
      auto rec = regenerations(traj, params.K, buffer);
      if (rec.sigma.size() < 2) continue;
      auto it = std::find_if(traj.crossings.begin(), traj.crossings.end(),
                             [&](const Crossing& c) { return c.time == rec.sigma[1]; });
      firsts.push_back(it->edge);
      phi_sum += rec.phi[1] - params.K;
      ++phi_count;
    }
    if (firsts.size() < 2) continue;
    std::unordered_map<CopyId, std::size_t> freq;
    for (CopyId e : firsts) ++freq[e];
    double plug_in = 0.0;
    for (CopyId e : firsts) {
      double term = -std::log(static_cast<double>(freq[e]) / firsts.size());
      plug_in += term;
      all_terms.push_back(term);
    }
    plug_in /= firsts.size();
    per_tree.push_back(plug_in + (freq.size() - 1.0) / (2.0 * firsts.size()));
    est.mc_samples += firsts.size();
  }
  if (per_tree.empty() || phi_count == 0) {
    est.mc_skipped = true;
    return est;
  }
  const double phi_mean = phi_sum / phi_count;
  double mean = std::accumulate(per_tree.begin(), per_tree.end(), 0.0) / per_tree.size();
  double var = 0.0;
  for (double x : per_tree) var += (x - mean) * (x - mean);
  est.h_mc = mean / phi_mean;
  est.h_mc_ci = per_tree.size() > 1
                    ? std::sqrt(var / (per_tree.size() - 1) / per_tree.size()) / phi_mean
                    : 0.0;
  double tm = std::accumulate(all_terms.begin(), all_terms.end(), 0.0) / all_terms.size();
  double tv2 = 0.0;
  for (double x : all_terms) tv2 += (x - tm) * (x - tm);
  est.V_hat = all_terms.size() > 1 ? tv2 / (all_terms.size() - 1) : 0.0;
  return est;
}

IncrementStats increment_stats(std::span<const RegenerationRecord> records, double eps) {
  std::vector<std::size_t> ds;
  std::vector<int> dp;
  for (const auto& rec : records)
    for (std::size_t i = 1; i + 1 < rec.sigma.size(); ++i) {
      ds.push_back(rec.sigma[i + 1] - rec.sigma[i]);
      dp.push_back(rec.phi[i + 1] - rec.phi[i]);
    }
  IncrementStats st;
  st.count = ds.size();
  if (st.count < 100) throw InsufficientData("increment_stats needs at least 100 increments");
  const double N = static_cast<double>(st.count);
  st.sigma_mean = static_cast<double>(std::accumulate(ds.begin(), ds.end(), std::size_t{0})) / N;
  st.phi_mean = static_cast<double>(std::accumulate(dp.begin(), dp.end(), 0LL)) / N;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    st.sigma_var += (ds[i] - st.sigma_mean) * (ds[i] - st.sigma_mean) / (N - 1);
    st.phi_var += (dp[i] - st.phi_mean) * (dp[i] - st.phi_mean) / (N - 1);
  }

  std::sort(ds.begin(), ds.end());
  const std::size_t max_s = ds.back();
  const std::size_t stride = std::max<std::size_t>(1, max_s / 200);
  // Tail points backed by at least 20 samples enter the slope fit.
  std::vector<double> xs, ys;
  for (std::size_t r = 1; r <= max_s; r += stride) {
    auto ge = static_cast<double>(ds.end() - std::lower_bound(ds.begin(), ds.end(), r));
    st.sigma_tail.emplace_back(r, ge / N);
    if (ge >= 20) {
      xs.push_back(r * eps);
      ys.push_back(std::log(ge / N));
    }
  }
  if (xs.size() >= 2) {
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    st.sigma_tail_slope = sxx > 0 ? sxy / sxx : 0.0;
  }

  const int max_p = *std::max_element(dp.begin(), dp.end());
  std::vector<double> ge(max_p + 2, 0.0);
  for (int x : dp)
    for (int r = 1; r <= x; ++r) ge[r] += 1.0;
  for (int r = 1; r <= max_p; ++r) st.phi_tail.emplace_back(r, ge[r] / N);
  for (int r = 1; r <= max_p; ++r)
    if (ge[r] >= 20) st.phi_tail_ratio = std::max(st.phi_tail_ratio, ge[r + 1] / ge[r]);
  return st;
}

}  // namespace matchmix
