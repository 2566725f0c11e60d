#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matchmix/graph.hpp"
#include "matchmix/matching.hpp"
#include "matchmix/rng.hpp"

namespace matchmix {

enum class FamilyKind { Cycle, Torus, RandomRegular, Lamplighter };

struct FamilySpec {
  FamilyKind kind = FamilyKind::Cycle;
  int dim = 2;  // torus
  int d = 3;    // random regular
  std::shared_ptr<FamilySpec> base;  // lamplighter

  std::string name() const;
  // Polynomial-growth families have entropy f(t) = log(1+t); the others
  // linear entropy f(t) = t.
  bool polynomial_growth() const;
};

// Accepts "cycle", "torus" or "torus:<dim>", "random-regular" or
// "random-regular:<d>", "lamplighter:<base family>".
FamilySpec parse_family(const std::string& text);
// n is the vertex count; for lamplighters it is the base size.
Graph build_family(const FamilySpec& spec, long long n, Rng& rng);

enum class EpsRuleKind { Fixed, Power, InvLog, ExpG };

struct EpsRule {
  EpsRuleKind kind = EpsRuleKind::Fixed;
  double value = 0.25;          // fixed eps, exponent a, or constant c
  std::string g = "sqrt-log";   // for ExpG: "sqrt-log" or "log-log"

  double eps(double n) const;
  // g(n) of eps = exp(-log n / g(n)); derived from eps for the other rules.
  double g_of(double n, bool polynomial_growth) const;
  std::string describe() const;
};

// "fixed:<eps>", "power:<a>" (n^-a), "inv-log:<c>" (c / log n),
// "exp-g:<g>" (exp(-log n / g(n))).
EpsRule parse_eps_rule(const std::string& text);

struct ExperimentConfig {
  FamilySpec family;
  std::vector<long long> sizes;
  EpsRule eps;
  std::vector<double> thetas{0.25, 0.5, 0.75};
  std::vector<std::uint64_t> seeds{1};
  std::size_t t_max = 200000;
  std::size_t start_sample = 64;
  bool all_starts = false;
  bool lazy = false;
  unsigned jobs = 1;
  // Trend thresholds (artifact conventions).
  double halving = 0.5;
  double no_cutoff_floor = 0.2;
  double band_spread = 3.0;
  // Quasi-tree predictions of t0.
  bool predict = false;
  double r_factor = 4.0;  // R = ceil(r_factor / eps)
  std::size_t speed_walks = 20;
  double speed_horizon_factor = 400.0;  // horizon = factor / eps
  double window_B = 1.0;
  int K = 0;
  int M = 1;
  // K-root fractions (0 samples: skip).
  std::size_t kroot_samples = 0;
  int kroot_K = 1;
  int kroot_R = 3;
  // Also measure the base graph alone (lazy walks only).
  bool compare_base = false;

  void validate() const;
};

struct MixRow {
  std::string family;
  long long n = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> thetas;
  std::vector<std::optional<std::size_t>> t_mix;  // absent: not mixed by horizon
  std::optional<std::size_t> t_half, t_quarter;
  std::optional<double> width;  // t_mix(min theta) - t_mix(max theta)
  std::optional<double> ratio;  // width / t_mix(1/2)
  std::optional<double> t_quarter_eps;
  std::optional<double> nu_hat, h_hat, V_hat, delta_hat;
  std::optional<double> t0_pred, t_w, L;
  std::optional<double> kroot_fraction;
  std::optional<std::size_t> tmix_base_half;
  std::string classification;

  bool mixed() const;
  std::optional<std::size_t> at(double theta) const;
};

struct SizeSummary {
  long long n = 0;
  double eps = 0.0;
  std::optional<double> mean_ratio;
  std::optional<double> mean_t_half;
  std::optional<double> mean_t_quarter;
};

struct CutoffReport {
  ExperimentConfig config;
  std::vector<MixRow> rows;
  std::vector<SizeSummary> summary;
  std::optional<std::string> verdict;  // absent with fewer than three sizes
  bool partial = false;
  std::vector<std::string> warnings;
};

CutoffReport cutoff_profile(const ExperimentConfig& cfg);
CutoffReport phase_scan(const ExperimentConfig& cfg);
// Per-size summaries, the trend verdict and row labels; a pure function of
// the rows and the thresholds in the config.
void summarize(CutoffReport& report);

struct PairingPoint {
  double a = 0.0;
  double empirical = 0.0;  // P(S < m - a)
  double sigma = 0.0;
  double bound = 0.0;      // exp(-a^2 / (4 b m))
  bool ok = true;          // empirical <= bound + 3 sigma
};

struct PairingReport {
  std::size_t size = 0;
  double m = 0.0;
  double b = 0.0;
  std::size_t trials = 0;
  std::vector<PairingPoint> points;
  bool all_ok = true;
};

// Mean of sum_i w(i, eta(i)) over uniform pairings: sum_{i != j} w_ij / (|I| - 1).
double pairing_mean(const std::vector<std::vector<double>>& w);
double pairing_b(const std::vector<std::vector<double>>& w);
std::vector<std::vector<double>> random_weights(std::size_t size, Rng& rng, double max_weight = 1.0);
PairingReport pairing_concentration(const std::vector<std::vector<double>>& w, std::size_t trials,
                                    std::span<const double> a_grid, Rng& rng);

struct HeatPoint {
  std::size_t t;
  double diagonal;      // P^t(o, o)
  double volume;        // V(floor(sqrt t))
  double ratio;         // diagonal * volume
  double sqrt_t_max;    // sqrt(t) * max_y P^t(o, y)
};

struct HeatKernelReport {
  std::size_t t_lo = 16;
  std::size_t t_hi = 0;
  double ratio_min = 0.0, ratio_max = 0.0;  // over t_lo <= t <= t_hi
  double sup_sqrt_t_max = 0.0;              // over 1 <= t <= t_hi
  std::vector<HeatPoint> curve;
};

HeatKernelReport heat_kernel_check(const Graph& g, std::size_t t_max);

struct LamplighterPoint {
  std::size_t t = 0;
  double h1 = 0.0;
  double range_exact = 0.0;
  double range_mc = 0.0;
  double range_mc_se = 0.0;
  std::size_t states = 0;
  bool ok = true;  // h1 >= c * E|R_t|
};

struct LamplighterReport {
  double c = 0.3;
  std::vector<LamplighterPoint> points;
  bool all_ok = true;
};

// Exact entropy of the lamplighter walk (never materialising the lamplighter
// graph) against the expected range of the base walk.
LamplighterReport lamplighter_entropy_check(const Graph& base, std::size_t t_max,
                                            std::size_t trials, Rng& rng, double c = 0.3,
                                            std::size_t state_budget = std::size_t{1} << 26);

struct SandwichOptions {
  bool lazy = false;
  std::size_t exhaustive_limit = 14;  // all target sets up to this n
  std::size_t candidate_starts = 64;
  std::size_t t_max = 1000000;
  std::uint64_t seed = 1;
};

struct SandwichReport {
  double theta = 0.0;
  std::size_t t_mix = 0;
  std::size_t hit_lower = 0;      // hit_{1-theta/4}(5 theta/4)
  std::size_t hit_upper = 0;      // hit_{1-theta/4}(3 theta/4)
  std::size_t hit_half = 0;       // hit_{1/2}(3 theta/4)
  double t_rel_abs = 0.0;
  bool unbounded = false;
  std::size_t upper_bound = 0;    // hit_upper + ceil(1.5 t_rel_abs |log(theta/4)|)
  bool lower_ok = false;
  bool upper_ok = false;          // true when skipped because unbounded
  bool monotone_ok = false;
  bool exhaustive = false;        // false: hit values are lower bounds
  std::size_t candidate_sets = 0;
};

SandwichReport hit_mix_sandwich_check(const GStar& gs, double theta, const SandwichOptions& opts = {});

}  // namespace matchmix
