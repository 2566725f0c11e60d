#include "matchmix/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "matchmix/error.hpp"
#include "matchmix/parallel.hpp"
#include "matchmix/quasitree.hpp"
#include "matchmix/walk.hpp"

namespace matchmix {
namespace {

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidParameter("cannot parse " + what + " from '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v))
    throw InvalidParameter("cannot parse " + what + " from '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  double v = parse_number(text, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidParameter(what + " must be an integer");
  return static_cast<int>(v);
}

// Exact integer root or failure.
int integer_root(long long n, int dim) {
  auto r = static_cast<long long>(std::llround(std::pow(static_cast<double>(n), 1.0 / dim)));
  for (long long c = std::max(1LL, r - 1); c <= r + 1; ++c) {
    long long p = 1;
    for (int i = 0; i < dim; ++i) p *= c;
    if (p == n) return static_cast<int>(c);
  }
  throw InvalidParameter("torus size " + std::to_string(n) + " is not a perfect power of dimension " +
                         std::to_string(dim));
}

double g_named(const std::string& name, double n) {
  const double ln = std::log(n);
  if (name == "sqrt-log") return std::sqrt(ln);
  if (name == "log-log") return std::log(ln);
  throw InvalidParameter("unknown g function '" + name + "'");
}

std::optional<std::size_t> opt_tmix(const MixCurve& c, double theta) { return try_mixing_time(c, theta); }

}  // namespace

std::string FamilySpec::name() const {
  switch (kind) {
    case FamilyKind::Cycle: return "cycle";
    case FamilyKind::Torus: return "torus:" + std::to_string(dim);
    case FamilyKind::RandomRegular: return "random-regular:" + std::to_string(d);
    case FamilyKind::Lamplighter: return "lamplighter:" + (base ? base->name() : std::string("?"));
  }
  return "?";
}

bool FamilySpec::polynomial_growth() const {
  return kind == FamilyKind::Cycle || kind == FamilyKind::Torus;
}

FamilySpec parse_family(const std::string& text) {
  FamilySpec spec;
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "cycle") {
    if (!arg.empty()) throw InvalidParameter("cycle takes no argument");
    spec.kind = FamilyKind::Cycle;
  } else if (head == "torus") {
    spec.kind = FamilyKind::Torus;
    if (!arg.empty()) spec.dim = parse_int(arg, "torus dimension");
    if (spec.dim < 1) throw InvalidParameter("torus dimension must be >= 1");
  } else if (head == "random-regular") {
    spec.kind = FamilyKind::RandomRegular;
    if (!arg.empty()) spec.d = parse_int(arg, "degree");
    if (spec.d < 3) throw InvalidParameter("random-regular degree must be >= 3");
  } else if (head == "lamplighter") {
    spec.kind = FamilyKind::Lamplighter;
    spec.base = std::make_shared<FamilySpec>(parse_family(arg.empty() ? "cycle" : arg));
  } else {
    throw InvalidParameter("unknown family '" + text + "'");
  }
  return spec;
}

Graph build_family(const FamilySpec& spec, long long n, Rng& rng) {
  if (n < 1 || n > static_cast<long long>(kDefaultVertexBudget))
    throw InvalidParameter("size out of range");
  switch (spec.kind) {
    case FamilyKind::Cycle: return generate_cycle(static_cast<int>(n));
    case FamilyKind::Torus: return generate_torus(integer_root(n, spec.dim), spec.dim);
    case FamilyKind::RandomRegular: return generate_random_regular(static_cast<int>(n), spec.d, rng);
    case FamilyKind::Lamplighter: {
      if (!spec.base) throw InvalidParameter("lamplighter needs a base family");
      return generate_lamplighter(build_family(*spec.base, n, rng));
    }
  }
  throw InvalidParameter("unknown family");
}

double EpsRule::eps(double n) const {
  const double ln = std::log(n);
  double e = 0.0;
  switch (kind) {
    case EpsRuleKind::Fixed: e = value; break;
    case EpsRuleKind::Power: e = std::pow(n, -value); break;
    case EpsRuleKind::InvLog: e = value / ln; break;
    case EpsRuleKind::ExpG: e = std::exp(-ln / g_named(g, n)); break;
  }
  if (!(e > 0.0 && e <= 1.0))
    throw InvalidParameter("eps rule " + describe() + " gives eps=" + std::to_string(e) +
                           " outside (0, 1] at n=" + std::to_string(n));
  return e;
}

double EpsRule::g_of(double n, bool polynomial_growth) const {
  if (kind == EpsRuleKind::ExpG) return g_named(g, n);
  const double e = eps(n);
  if (polynomial_growth) return e < 1.0 ? std::log(n) / std::log(1.0 / e) : INFINITY;
  return e * std::log(n);
}

std::string EpsRule::describe() const {
  char buf[64];
  auto shortest = [&](double v) {
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  switch (kind) {
    case EpsRuleKind::Fixed: return "fixed:" + shortest(value);
    case EpsRuleKind::Power: return "power:" + shortest(value);
    case EpsRuleKind::InvLog: return "inv-log:" + shortest(value);
    case EpsRuleKind::ExpG: return "exp-g:" + g;
  }
  return "?";
}

EpsRule parse_eps_rule(const std::string& text) {
  EpsRule rule;
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    rule.kind = EpsRuleKind::Fixed;
    rule.value = parse_number(text, "eps");
  } else {
    std::string head = text.substr(0, colon);
    std::string arg = text.substr(colon + 1);
    if (head == "fixed") {
      rule.kind = EpsRuleKind::Fixed;
      rule.value = parse_number(arg, "eps");
    } else if (head == "power") {
      rule.kind = EpsRuleKind::Power;
      rule.value = parse_number(arg, "exponent");
      if (!(rule.value >= 0.0)) throw InvalidParameter("power exponent must be >= 0");
    } else if (head == "inv-log") {
      rule.kind = EpsRuleKind::InvLog;
      rule.value = parse_number(arg, "constant");
      if (!(rule.value > 0.0)) throw InvalidParameter("inv-log constant must be > 0");
    } else if (head == "exp-g") {
      rule.kind = EpsRuleKind::ExpG;
      rule.g = arg;
      g_named(arg, 16.0);
    } else {
      throw InvalidParameter("unknown eps rule '" + text + "'");
    }
  }
  if (rule.kind == EpsRuleKind::Fixed && !(rule.value > 0.0 && rule.value <= 1.0))
    throw InvalidParameter("eps must lie in (0, 1]");
  return rule;
}

void ExperimentConfig::validate() const {
  if (sizes.empty()) throw InvalidParameter("at least one size is required");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw InvalidParameter("sizes must be strictly increasing");
  for (long long n : sizes) {
    double vertices = static_cast<double>(n);
    if (family.kind == FamilyKind::Lamplighter) vertices = std::ldexp(static_cast<double>(n), static_cast<int>(std::min(n, 60LL)));
    eps.eps(std::max(vertices, 2.0));
  }
  if (thetas.empty()) throw InvalidParameter("at least one theta is required");
  for (double th : thetas)
    if (!(th > 0.0 && th < 1.0)) throw InvalidParameter("theta must lie in (0, 1)");
  if (seeds.empty()) throw InvalidParameter("at least one seed is required");
  if (t_max == 0) throw InvalidParameter("t_max must be positive");
  if (!(halving > 0.0 && halving <= 1.0)) throw InvalidParameter("halving must lie in (0, 1]");
  if (!(r_factor > 0.0)) throw InvalidParameter("r_factor must be positive");
  if (predict && speed_walks == 0) throw InvalidParameter("speed_walks must be positive");
}

bool MixRow::mixed() const {
  return std::all_of(t_mix.begin(), t_mix.end(), [](const auto& t) { return t.has_value(); }) &&
         t_half && t_quarter;
}

std::optional<std::size_t> MixRow::at(double theta) const {
  for (std::size_t i = 0; i < thetas.size(); ++i)
    if (thetas[i] == theta) return t_mix[i];
  return std::nullopt;
}

namespace {

MixRow compute_row(const ExperimentConfig& cfg, long long size, std::uint64_t seed) {
  Rng rng = make_stream(seed, static_cast<std::uint64_t>(size));
  auto g = std::make_shared<const Graph>(build_family(cfg.family, size, rng));
  const auto n = static_cast<long long>(g->vertex_count());
  MixRow row;
  row.family = cfg.family.name();
  row.n = n;
  row.eps = cfg.eps.eps(static_cast<double>(n));
  row.seed = seed;
  row.thetas = cfg.thetas;

  GStar gs(g, sample_uniform_matching(static_cast<int>(n), rng), row.eps);
  Kernel k(gs, cfg.lazy);
  auto starts = cfg.all_starts ? all_starts(g->vertex_count()) : default_starts(k, rng, cfg.start_sample);
  const double lowest = std::min(0.25, *std::min_element(cfg.thetas.begin(), cfg.thetas.end()));
  ProfileOptions po;
  po.stop_below = lowest;
  auto curve = distance_profile(k, starts, cfg.t_max, po);
  for (double th : cfg.thetas) row.t_mix.push_back(opt_tmix(curve, th));
  row.t_half = opt_tmix(curve, 0.5);
  row.t_quarter = opt_tmix(curve, 0.25);
  if (row.t_quarter) row.t_quarter_eps = static_cast<double>(*row.t_quarter) * row.eps;

  auto lo = std::min_element(cfg.thetas.begin(), cfg.thetas.end()) - cfg.thetas.begin();
  auto hi = std::max_element(cfg.thetas.begin(), cfg.thetas.end()) - cfg.thetas.begin();
  if (row.t_mix[lo] && row.t_mix[hi]) {
    row.width = static_cast<double>(*row.t_mix[lo]) - static_cast<double>(*row.t_mix[hi]);
    if (row.t_half && *row.t_half > 0) row.ratio = *row.width / static_cast<double>(*row.t_half);
  }

  if (cfg.predict) {
    const int R = static_cast<int>(std::ceil(cfg.r_factor / row.eps));
    const auto horizon = static_cast<std::size_t>(std::ceil(cfg.speed_horizon_factor / row.eps));
    SpeedOptions so;
    so.K = cfg.K;
    auto speed = estimate_speed(g, R, row.eps, cfg.speed_walks, horizon, rng, so);
    EntropyRateParams ep;
    ep.trees = 0;  // the surrogate is authoritative here
    ep.phi_increment_mean = speed.mean_phi_increment;
    auto ent = estimate_entropy_rate(g, R, row.eps, ep, rng);
    auto delta = estimate_delta(g, R, row.eps, 400, 10, rng);
    row.nu_hat = speed.nu_hat;
    row.h_hat = ent.h_hat;
    row.V_hat = ent.V_hat;
    row.delta_hat = delta.delta_hat;
    if (speed.nu_hat > 0.0 && ent.h_hat > 0.0) {
      const double t0 = std::log(static_cast<double>(n)) / (speed.nu_hat * ent.h_hat);
      const double g_n = cfg.eps.g_of(static_cast<double>(n), cfg.family.polynomial_growth());
      row.t0_pred = t0;
      row.t_w = std::isfinite(g_n) && g_n > 0.0 ? t0 / std::sqrt(g_n) : 0.0;
      row.L = speed.nu_hat * (t0 + cfg.window_B * *row.t_w) / 2.0;
    }
  }

  if (cfg.kroot_samples > 0)
    row.kroot_fraction = count_k_roots(gs, cfg.kroot_K, cfg.kroot_R, cfg.kroot_samples, rng).fraction;

  if (cfg.compare_base) {
    Kernel base = Kernel::simple_walk(g, cfg.lazy);
    ProfileOptions bo;
    bo.stop_below = 0.5;
    auto bc = distance_profile(base, starts, cfg.t_max, bo);
    row.tmix_base_half = opt_tmix(bc, 0.5);
  }
  return row;
}

CutoffReport run_rows(const ExperimentConfig& cfg) {
  cfg.validate();
  CutoffReport report;
  report.config = cfg;
  if (cfg.eps.kind == EpsRuleKind::Power) {
    // The no-cutoff regime needs eps >> 1/diam^2.
    for (long long size : cfg.sizes) {
      Rng rng = make_stream(cfg.seeds.front(), static_cast<std::uint64_t>(size));
      Graph g = build_family(cfg.family, size, rng);
      double e = cfg.eps.eps(static_cast<double>(g.vertex_count()));
      double diam = diameter(g).value;
      if (e * diam * diam < 10.0) {
        std::ostringstream os;
        os << "n=" << g.vertex_count() << ": eps*diam^2=" << e * diam * diam
           << " is not large; the eps >> 1/diam^2 hypothesis is doubtful";
        report.warnings.push_back(os.str());
        std::cerr << "warning: " << os.str() << "\n";
      }
    }
  }
  std::vector<std::pair<long long, std::uint64_t>> jobs;
  for (long long size : cfg.sizes)
    for (std::uint64_t seed : cfg.seeds) jobs.emplace_back(size, seed);
  report.rows.resize(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    report.rows[i] = compute_row(cfg, jobs[i].first, jobs[i].second);
    std::cerr << "row n=" << report.rows[i].n << " seed=" << jobs[i].second << " done\n";
  });
  summarize(report);
  return report;
}

}  // namespace

void summarize(CutoffReport& report) {
  const auto& cfg = report.config;
  report.summary.clear();
  report.partial = false;
  for (const auto& row : report.rows)
    if (!row.mixed()) report.partial = true;

  // Rows are grouped by vertex count in order of first appearance.
  for (const auto& row : report.rows) {
    auto it = std::find_if(report.summary.begin(), report.summary.end(),
                           [&](const SizeSummary& s) { return s.n == row.n; });
    if (it == report.summary.end()) {
      report.summary.push_back({row.n, row.eps, {}, {}, {}});
    }
  }
  for (auto& s : report.summary) {
    double ratio = 0, half = 0, quarter = 0;
    std::size_t count = 0, ok_ratio = 0, ok_half = 0, ok_quarter = 0;
    for (const auto& row : report.rows) {
      if (row.n != s.n) continue;
      ++count;
      if (row.ratio) ratio += *row.ratio, ++ok_ratio;
      if (row.t_half) half += static_cast<double>(*row.t_half), ++ok_half;
      if (row.t_quarter) quarter += static_cast<double>(*row.t_quarter), ++ok_quarter;
    }
    if (ok_ratio == count) s.mean_ratio = ratio / count;
    if (ok_half == count) s.mean_t_half = half / count;
    if (ok_quarter == count) s.mean_t_quarter = quarter / count;
  }

  report.verdict.reset();
  if (report.summary.size() >= 3) {
    bool complete = std::all_of(report.summary.begin(), report.summary.end(),
                                [](const SizeSummary& s) { return s.mean_ratio.has_value(); });
    if (!complete) {
      report.verdict = "inconclusive";
    } else {
      bool decreasing = true, floor_ok = true;
      for (std::size_t i = 0; i < report.summary.size(); ++i) {
        double r = *report.summary[i].mean_ratio;
        if (i > 0 && !(r < *report.summary[i - 1].mean_ratio)) decreasing = false;
        if (r < cfg.no_cutoff_floor) floor_ok = false;
      }
      bool halved = *report.summary.back().mean_ratio < cfg.halving * *report.summary.front().mean_ratio;
      if (decreasing && halved)
        report.verdict = "cutoff-consistent";
      else if (floor_ok)
        report.verdict = "no-cutoff-consistent";
      else
        report.verdict = "inconclusive";
    }
  }
  for (auto& row : report.rows) {
    if (!row.mixed())
      row.classification = "not-mixed";
    else
      row.classification = report.verdict.value_or("inconclusive");
  }
}

CutoffReport cutoff_profile(const ExperimentConfig& cfg) { return run_rows(cfg); }

CutoffReport phase_scan(const ExperimentConfig& cfg) {
  ExperimentConfig scan = cfg;
  if (scan.kroot_samples == 0) scan.kroot_samples = 200;
  return run_rows(scan);
}

double pairing_mean(const std::vector<std::vector<double>>& w) {
  const std::size_t size = w.size();
  if (size < 2) throw InvalidInput("pairing needs at least two indices");
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j)
      if (i != j) total += w[i][j];
  return total / static_cast<double>(size - 1);
}

double pairing_b(const std::vector<std::vector<double>>& w) {
  double b = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j)
      if (i != j) b = std::max(b, w[i][j] + w[j][i]);
  return b;
}

std::vector<std::vector<double>> random_weights(std::size_t size, Rng& rng, double max_weight) {
  std::vector<std::vector<double>> w(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j)
      if (i != j) w[i][j] = max_weight * uniform01(rng);
  return w;
}

PairingReport pairing_concentration(const std::vector<std::vector<double>>& w, std::size_t trials,
                                    std::span<const double> a_grid, Rng& rng) {
  const std::size_t size = w.size();
  if (size == 0 || size % 2 != 0) throw InvalidParameter("pairing needs an even, nonempty index set");
  for (const auto& r : w) {
    if (r.size() != size) throw InvalidInput("weight matrix must be square");
    for (double x : r)
      if (!(x >= 0.0)) throw InvalidInput("weights must be nonnegative");
  }
  if (trials == 0) throw InvalidParameter("trials must be positive");
  PairingReport rep;
  rep.size = size;
  rep.m = pairing_mean(w);
  rep.b = pairing_b(w);
  rep.trials = trials;
  std::vector<std::size_t> below(a_grid.size(), 0);
  std::vector<std::size_t> perm(size);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t t = 0; t < trials; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    double s = 0.0;
    for (std::size_t i = 0; i < size; i += 2) s += w[perm[i]][perm[i + 1]] + w[perm[i + 1]][perm[i]];
    for (std::size_t a = 0; a < a_grid.size(); ++a)
      if (s < rep.m - a_grid[a]) ++below[a];
  }
  for (std::size_t a = 0; a < a_grid.size(); ++a) {
    PairingPoint pt;
    pt.a = a_grid[a];
    pt.empirical = static_cast<double>(below[a]) / trials;
    pt.sigma = std::sqrt(pt.empirical * (1.0 - pt.empirical) / trials);
    pt.bound = rep.b > 0.0 && rep.m > 0.0 ? std::exp(-pt.a * pt.a / (4.0 * rep.b * rep.m)) : 1.0;
    pt.ok = pt.empirical <= pt.bound + 3.0 * pt.sigma;
    rep.all_ok = rep.all_ok && pt.ok;
    rep.points.push_back(pt);
  }
  return rep;
}

HeatKernelReport heat_kernel_check(const Graph& g, std::size_t t_max) {
  const std::size_t n = g.vertex_count();
  if (n == 0) throw InvalidInput("empty graph");
  if (!g.is_regular()) throw InvalidInput("heat-kernel check expects a vertex-transitive graph");
  HeatKernelReport rep;
  rep.t_hi = std::min(t_max, n * n / 16);
  Kernel k = Kernel::simple_walk(g, true);
  auto dist = bfs_distances(g, 0);
  std::vector<double> volume_at;  // volume_at[r] = |B(o, r)|
  for (int d : dist) {
    if (static_cast<std::size_t>(d) >= volume_at.size()) volume_at.resize(d + 1, 0.0);
    volume_at[d] += 1.0;
  }
  for (std::size_t r = 1; r < volume_at.size(); ++r) volume_at[r] += volume_at[r - 1];
  auto V = [&](std::size_t r) { return r < volume_at.size() ? volume_at[r] : static_cast<double>(n); };

  std::vector<double> cur(n, 0.0), next(n, 0.0), scratch(n, 0.0);
  cur[0] = 1.0;
  rep.curve.push_back({0, 1.0, 1.0, 1.0, 0.0});
  bool first = true;
  for (std::size_t t = 1; t <= rep.t_hi; ++t) {
    k.step(cur, next, scratch);
    std::swap(cur, next);
    HeatPoint pt;
    pt.t = t;
    pt.diagonal = cur[0];
    pt.volume = V(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(t)))));
    pt.ratio = pt.diagonal * pt.volume;
    pt.sqrt_t_max = std::sqrt(static_cast<double>(t)) * simd::max_value(cur);
    rep.sup_sqrt_t_max = std::max(rep.sup_sqrt_t_max, pt.sqrt_t_max);
    if (t >= rep.t_lo) {
      if (first) {
        rep.ratio_min = rep.ratio_max = pt.ratio;
        first = false;
      }
      rep.ratio_min = std::min(rep.ratio_min, pt.ratio);
      rep.ratio_max = std::max(rep.ratio_max, pt.ratio);
    }
    rep.curve.push_back(pt);
  }
  return rep;
}

}  // namespace matchmix
