// Acceptance run: one PASS/FAIL line per criterion. Bands and tolerances
// below were calibrated once on reference runs and are frozen here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "matchmix/analysis.hpp"
#include "matchmix/parallel.hpp"
#include "matchmix/quasitree.hpp"
#include "matchmix/verify.hpp"
#include "matchmix/walk.hpp"
#include "oracles.hpp"

using namespace matchmix;

namespace {

constexpr std::uint64_t kSeed = 20240611;

// Criterion 3-6 bands.
constexpr double kDeltaUpperC = 3.0;
constexpr double kSigmaEpsLo = 0.1, kSigmaEpsHi = 20.0;
constexpr double kPhiExcessC = 5.0;
constexpr double kNuEpsLo = 0.02, kNuEpsHi = 1.0;
// observed 1.85..3.07 on torus 512^2
constexpr double kTorusEntropyLo = 1.2, kTorusEntropyHi = 4.0;
// observed 0.84..2.14 on a random 3-regular graph with 4096 vertices
constexpr double kExpanderEntropyLo = 0.5, kExpanderEntropyHi = 3.0;
// Criterion 7.
constexpr double kRelaxC = 20.0;
// Criterion 8: observed t(1/2)/log n of 1.56..1.66.
constexpr double kExpanderTmixLo = 1.2, kExpanderTmixHi = 2.2;
// Criterion 9: observed t(1/4) eps of 4.9..5.4.
constexpr double kCycleTmixEpsLo = 3.0, kCycleTmixEpsHi = 8.0;
constexpr double kWidthFloor = 0.2;
// Criterion 10.
constexpr double kPredictionFactor = 3.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

int g_failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = secs < limit_seconds;
  bool pass = o.pass && in_time;
  if (!pass) ++g_failures;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1fs/%.0fs", secs, limit_seconds);
  std::cout << "[" << (id < 10 ? " " : "") << id << "] " << (pass ? "PASS" : "FAIL") << "  " << name << "  ("
            << buf << (in_time ? "" : " over time") << ")  " << o.detail << std::endl;
}

Outcome from_suite(const SuiteResult& r) {
  Outcome o{r.passed, r.line()};
  for (const auto& n : r.notes) o.detail += "; " + n;
  return o;
}

// Quasi-tree measurements shared by criteria 3 to 5.
struct GridPoint {
  double eps;
  DeltaEstimate delta;
  SpeedEstimate speed;
  IncrementStats inc;
};

std::vector<GridPoint> quasi_tree_grid() {
  static std::vector<GridPoint> grid;
  if (!grid.empty()) return grid;
  auto g = std::make_shared<const Graph>(generate_torus(256, 2));
  std::uint64_t stream = 0;
  for (double eps : {0.2, 0.1, 0.05, 0.02}) {
    Rng rng = make_stream(kSeed, stream++);
    const int R = static_cast<int>(std::ceil(4.0 / eps));
    GridPoint p;
    p.eps = eps;
    p.delta = estimate_delta(g, R, eps, 2000, 10, rng);
    SpeedOptions so;
    so.keep_records = true;
    p.speed = estimate_speed(g, R, eps, 40, static_cast<std::size_t>(std::ceil(2000.0 / eps)), rng, so);
    p.inc = increment_stats(p.speed.records, eps);
    grid.push_back(std::move(p));
  }
  return grid;
}

Outcome exactness() {
  Outcome o = from_suite(exactness_suite(50, kSeed));
  // second opinion from the plain-loop oracle on a few small instances
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 8; ++i) {
    Rng rng = make_stream(kSeed, 100 + i);
    int n = 8 + 2 * static_cast<int>(uniform_index(rng, 28));
    GStar gs(std::make_shared<const Graph>(generate_random_regular(n, 3, rng)), sample_uniform_matching(n, rng),
             0.05 + 0.95 * uniform01(rng));
    Kernel k(gs, i % 2 == 0);
    auto curve = distance_profile(k, all_starts(n), 100);
    std::vector<int> starts(n);
    for (int v = 0; v < n; ++v) starts[v] = v;
    auto ref = oracle::profile(oracle::transition(gs, i % 2 == 0), oracle::stationary(oracle::weights(gs)), starts, 100);
    for (std::size_t t = 0; t < ref.size(); ++t) worst = std::max(worst, std::abs(ref[t] - curve.values[t]));
  }
  o.pass = o.pass && worst < 1e-10;
  o.detail += (Detail() << "; independent profile oracle worst " << worst).str();
  return o;
}

Outcome delta_bounds() {
  Outcome o;
  Detail d;
  for (const auto& p : quasi_tree_grid()) {
    const double lower = p.eps / (4 + p.eps) - 3 * p.delta.ci;
    const double upper = kDeltaUpperC * std::cbrt(p.eps);
    bool ok = p.delta.delta_hat >= lower && p.delta.delta_hat <= upper;
    o.pass = o.pass && ok;
    d << "eps " << p.eps << ": " << p.delta.delta_hat << " in [" << lower << ", " << upper << "]; ";
  }
  o.detail = d.str();
  return o;
}

Outcome regeneration_moments() {
  Outcome o;
  Detail d;
  for (const auto& p : quasi_tree_grid()) {
    const double se = p.inc.sigma_mean * p.eps;
    const double phi_sigma = std::sqrt(p.inc.phi_var / static_cast<double>(p.inc.count));
    const double excess = p.inc.phi_mean - 1;
    const double cap = kPhiExcessC * p.delta.delta_hat * p.delta.delta_hat + 3 * phi_sigma;
    bool ok = se >= kSigmaEpsLo && se <= kSigmaEpsHi && excess <= cap && p.inc.sigma_tail_slope < 0;
    o.pass = o.pass && ok;
    d << "eps " << p.eps << ": E[dsigma]eps " << se << ", E[dphi]-1 " << excess << " <= " << cap << ", slope "
      << p.inc.sigma_tail_slope << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome speed() {
  Outcome o;
  Detail d;
  for (const auto& p : quasi_tree_grid()) {
    const double cap = p.eps / (1 + p.eps) + 3 * p.speed.ci;
    const double ratio = p.speed.nu_hat / p.eps;
    bool ok = p.speed.nu_hat <= cap && ratio >= kNuEpsLo && ratio <= kNuEpsHi;
    o.pass = o.pass && ok;
    d << "eps " << p.eps << ": nu " << p.speed.nu_hat << " <= " << cap << ", nu/eps " << ratio << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome entropy_scaling() {
  Outcome o;
  Detail d;
  EntropyRateParams params;
  params.trees = 0;
  params.phi_increment_mean = 1.0;
  auto torus = std::make_shared<const Graph>(generate_torus(256, 2));
  d << "torus H1/log(1/eps):";
  std::uint64_t stream = 50;
  for (double eps : {0.2, 0.1, 0.05, 0.02}) {
    Rng rng = make_stream(kSeed, stream++);
    auto est = estimate_entropy_rate(torus, static_cast<int>(std::ceil(4 / eps)), eps, params, rng);
    double r = est.h_surrogate_h1 / std::log(1 / eps);
    o.pass = o.pass && r >= kTorusEntropyLo && r <= kTorusEntropyHi;
    d << " " << r;
  }
  Rng grng = make_stream(kSeed, 60);
  auto rr = std::make_shared<const Graph>(generate_random_regular(4096, 3, grng));
  d << "; random 3-regular H1*eps:";
  for (double eps : {0.5, 0.25, 0.125}) {
    Rng rng = make_stream(kSeed, stream++);
    auto est = estimate_entropy_rate(rr, static_cast<int>(std::ceil(4 / eps)), eps, params, rng);
    double r = est.h_surrogate_h1 * eps;
    o.pass = o.pass && r >= kExpanderEntropyLo && r <= kExpanderEntropyHi;
    d << " " << r;
  }
  o.detail = d.str();
  return o;
}

Outcome relaxation_bound() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = make_stream(kSeed, 200 + i);
    const double eps = i < 10 ? 0.5 : 0.1;
    Graph g = i % 3 == 0   ? generate_cycle(1000 + static_cast<int>(i))
              : i % 3 == 1 ? generate_torus(30 + static_cast<int>(i % 10), 2)
                           : generate_random_regular(2000, 3, rng);
    const int n = static_cast<int>(g.vertex_count());
    GStar gs(std::make_shared<const Graph>(std::move(g)), sample_uniform_matching(n, rng), eps);
    auto r = relaxation_times(Kernel(gs, false));
    double scaled = r.unbounded ? INFINITY : r.t_rel_abs * eps;
    worst = std::max(worst, scaled);
    o.pass = o.pass && scaled <= kRelaxC;
  }
  o.detail = (Detail() << "max t_rel_abs * eps = " << worst << " (bound " << kRelaxC << ")").str();
  return o;
}

Outcome expander_cutoff() {
  ExperimentConfig cfg;
  cfg.family = parse_family("random-regular:3");
  cfg.eps = parse_eps_rule("fixed:0.25");
  cfg.sizes = {1024, 2048, 4096, 8192};
  cfg.seeds = {kSeed, kSeed + 1, kSeed + 2};
  cfg.jobs = default_jobs();
  auto rep = cutoff_profile(cfg);
  Outcome o;
  Detail d;
  d << "mean ratio:";
  bool decreasing = true, band = true;
  for (std::size_t i = 0; i < rep.summary.size(); ++i) {
    const auto& s = rep.summary[i];
    if (!s.mean_ratio || !s.mean_t_half) return {false, "not mixed"};
    d << " " << *s.mean_ratio;
    if (i > 0 && !(*s.mean_ratio < *rep.summary[i - 1].mean_ratio)) decreasing = false;
    double scaled = *s.mean_t_half / std::log(static_cast<double>(s.n));
    band = band && scaled >= kExpanderTmixLo && scaled <= kExpanderTmixHi;
  }
  const double first = *rep.summary.front().mean_ratio, last = *rep.summary.back().mean_ratio;
  bool halved = last < cfg.halving * first;
  d << "; t(1/2)/log n:";
  for (const auto& s : rep.summary) d << " " << *s.mean_t_half / std::log(static_cast<double>(s.n));
  d << "; decreasing " << (decreasing ? "yes" : "no") << ", final < 0.5 first " << (halved ? "yes" : "no")
    << ", verdict " << rep.verdict.value_or("none");
  o.pass = decreasing && halved && band;
  o.detail = d.str();
  return o;
}

Outcome cycle_no_cutoff() {
  ExperimentConfig cfg;
  cfg.family = parse_family("cycle");
  cfg.eps = parse_eps_rule("power:0.5");
  cfg.sizes = {1024, 2048, 4096, 8192};
  cfg.seeds = {kSeed};
  cfg.jobs = default_jobs();
  auto rep = cutoff_profile(cfg);
  Outcome o;
  Detail d;
  for (const auto& r : rep.rows) {
    if (!r.t_quarter_eps || !r.ratio) return {false, "not mixed"};
    o.pass = o.pass && *r.t_quarter_eps >= kCycleTmixEpsLo && *r.t_quarter_eps <= kCycleTmixEpsHi &&
             *r.ratio >= kWidthFloor;
    d << "n " << r.n << ": t(1/4)eps " << *r.t_quarter_eps << ", ratio " << *r.ratio << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome prediction() {
  ExperimentConfig cfg;
  cfg.family = parse_family("torus");
  cfg.eps = parse_eps_rule("exp-g:sqrt-log");
  cfg.sizes = {4096, 16384};
  cfg.seeds = {kSeed};
  cfg.predict = true;
  cfg.jobs = default_jobs();
  auto rep = cutoff_profile(cfg);
  Outcome o;
  Detail d;
  for (const auto& r : rep.rows) {
    if (!r.t_half || !r.t0_pred) return {false, "missing t_mix or prediction"};
    double ratio = *r.t0_pred / static_cast<double>(*r.t_half);
    o.pass = o.pass && ratio <= kPredictionFactor && ratio >= 1 / kPredictionFactor;
    d << "n " << r.n << ": t(1/2) " << *r.t_half << ", t0 " << *r.t0_pred << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome pairing() {
  Outcome o = from_suite(pairing_suite(100000, kSeed));
  double worst = 0.0;
  Rng rng = make_stream(kSeed, 300);
  for (std::size_t size : {2u, 4u, 6u, 8u}) {
    auto w = random_weights(size, rng);
    worst = std::max(worst, std::abs(pairing_mean(w) - oracle::exhaustive_pairing_mean(w)));
  }
  o.pass = o.pass && worst < 1e-12;
  o.detail += (Detail() << "; exhaustive m worst " << worst).str();
  return o;
}

}  // namespace

int main() {
  std::cout << "acceptance run, seed " << kSeed << std::endl;
  criterion(1, "exactness against dense oracles", 60, exactness);
  criterion(2, "path reversal", 120, [] { return from_suite(reversal_suite(10000, 10, kSeed)); });
  criterion(3, "delta bounds", 300, delta_bounds);
  criterion(4, "regeneration moments", 300, regeneration_moments);
  criterion(5, "speed", 300, speed);
  criterion(6, "entropy scaling", 180, entropy_scaling);
  criterion(7, "relaxation bound", 180, relaxation_bound);
  criterion(8, "cutoff trend, expander", 900, expander_cutoff);
  criterion(9, "no cutoff, cycle", 900, cycle_no_cutoff);
  criterion(10, "t0 prediction, torus", 1200, prediction);
  criterion(11, "pairing concentration", 120, pairing);
  criterion(12, "heat-kernel bands", 180, [] { return from_suite(heat_kernel_suite()); });
  criterion(13, "hit/mix sandwich", 120, [] { return from_suite(sandwich_suite(20, kSeed)); });
  criterion(14, "lamplighter entropy", 120, [] { return from_suite(lamplighter_suite(20000, kSeed)); });
  std::cout << (g_failures == 0 ? "all criteria pass" : std::to_string(g_failures) + " criteria fail") << std::endl;
  return g_failures == 0 ? 0 : 1;
}
