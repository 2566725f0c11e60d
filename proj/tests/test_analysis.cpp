#include <cmath>
#include <memory>

#include "doctest.h"
#include "matchmix/analysis.hpp"
#include "matchmix/error.hpp"
#include "matchmix/report.hpp"
#include "matchmix/walk.hpp"
#include "oracles.hpp"

using namespace matchmix;

TEST_CASE("family and eps-rule parsing") {
  CHECK(parse_family("cycle").kind == FamilyKind::Cycle);
  auto t3 = parse_family("torus:3");
  CHECK(t3.kind == FamilyKind::Torus);
  CHECK(t3.dim == 3);
  CHECK(parse_family("random-regular:4").d == 4);
  auto lamp = parse_family("lamplighter:cycle");
  CHECK(lamp.kind == FamilyKind::Lamplighter);
  REQUIRE(lamp.base);
  CHECK(lamp.base->kind == FamilyKind::Cycle);
  CHECK_THROWS_AS(parse_family("hypercube"), InvalidParameter);

  Rng rng(1);
  CHECK_THROWS_AS(build_family(parse_family("torus"), 1000, rng), InvalidParameter);
  CHECK(build_family(parse_family("torus"), 1024, rng).vertex_count() == 1024);

  CHECK(parse_eps_rule("fixed:0.25").eps(100) == 0.25);
  CHECK(parse_eps_rule("power:0.5").eps(1024) == doctest::Approx(1.0 / 32));
  CHECK(parse_eps_rule("exp-g:sqrt-log").eps(4096) == doctest::Approx(std::exp(-std::sqrt(std::log(4096.0)))));
  CHECK(parse_eps_rule("fixed:0.05").describe() == "fixed:0.05");
  CHECK_THROWS_AS(parse_eps_rule("fixed:1.5"), InvalidParameter);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.sizes = {256, 128};
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg.sizes = {128, 256};
  cfg.validate();
  cfg.thetas = {0.0};
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
}

TEST_CASE("cutoff profile rows and verdicts") {
  ExperimentConfig cfg;
  cfg.family = parse_family("random-regular:3");
  cfg.eps = parse_eps_rule("fixed:0.5");
  cfg.sizes = {256};
  auto one = cutoff_profile(cfg);
  CHECK(one.rows.size() == 1);
  CHECK_FALSE(one.verdict.has_value());
  const auto& row = one.rows[0];
  REQUIRE(row.mixed());
  // widths are nonnegative and t_mix is nonincreasing in theta
  CHECK(*row.at(0.25) >= *row.at(0.5));
  CHECK(*row.at(0.5) >= *row.at(0.75));
  CHECK(*row.width >= 0.0);

  // identical config and seed give identical bytes
  CHECK(to_json(one).dump() == to_json(cutoff_profile(cfg)).dump());

  // the verdict is recomputed from the rows alone
  CutoffReport synth;
  synth.config = cfg;
  for (long long n : {100, 200, 400}) {
    MixRow r;
    r.n = n;
    r.thetas = cfg.thetas;
    r.t_mix = {std::size_t(20), std::size_t(10), std::size_t(5)};
    r.t_half = 10;
    r.t_quarter = 20;
    r.width = n == 100 ? 15.0 : n == 200 ? 10.0 : 5.0;
    r.ratio = *r.width / 10.0;
    synth.rows.push_back(r);
  }
  summarize(synth);
  CHECK(synth.verdict == std::optional<std::string>("cutoff-consistent"));
  synth.rows[2].ratio = 1.0;
  summarize(synth);
  CHECK(synth.verdict == std::optional<std::string>("no-cutoff-consistent"));
}

TEST_CASE("not mixed by the horizon gives a partial report") {
  ExperimentConfig cfg;
  cfg.family = parse_family("cycle");
  cfg.eps = parse_eps_rule("fixed:0.01");
  cfg.sizes = {2000};
  cfg.t_max = 5;
  auto rep = cutoff_profile(cfg);
  CHECK(rep.partial);
  CHECK(rep.rows[0].classification == "not-mixed");
}

TEST_CASE("phase scan regimes") {
  // eps far below 1/t_mix of the base: the matching barely matters
  ExperimentConfig cfg;
  cfg.family = parse_family("cycle");
  cfg.eps = parse_eps_rule("fixed:0.000001");
  cfg.sizes = {128};
  cfg.lazy = true;
  cfg.compare_base = true;
  cfg.all_starts = true;
  auto rep = phase_scan(cfg);
  const auto& row = rep.rows[0];
  REQUIRE(row.t_half);
  REQUIRE(row.tmix_base_half);
  double rel = std::abs(static_cast<double>(*row.t_half) - static_cast<double>(*row.tmix_base_half)) /
               static_cast<double>(*row.tmix_base_half);
  CHECK(rel <= 0.2);
  CHECK(row.kroot_fraction.has_value());

  // eps = 1 mixes in order log n
  ExperimentConfig one;
  one.family = parse_family("random-regular:3");
  one.eps = parse_eps_rule("fixed:1");
  one.sizes = {512, 2048};
  auto r1 = phase_scan(one);
  for (const auto& r : r1.rows) {
    double ratio = static_cast<double>(*r.t_half) / std::log(static_cast<double>(r.n));
    CHECK(ratio > 0.3);
    CHECK(ratio < 5.0);
  }

  // power rule below the eps * diam^2 >= 10 guide warns
  ExperimentConfig slow;
  slow.family = parse_family("cycle");
  slow.eps = parse_eps_rule("power:2.5");
  slow.sizes = {64};
  slow.t_max = 10;
  CHECK_FALSE(phase_scan(slow).warnings.empty());
}

TEST_CASE("pairing concentration") {
  Rng rng(3);
  for (std::size_t size : {2u, 4u, 6u, 8u}) {
    auto w = random_weights(size, rng);
    CHECK(std::abs(pairing_mean(w) - oracle::exhaustive_pairing_mean(w)) < 1e-12);
  }

  std::vector<std::vector<double>> flat(10, std::vector<double>(10, 0.7));
  for (std::size_t i = 0; i < 10; ++i) flat[i][i] = 0.0;
  double grid[] = {0.01, 0.5, 2.0};
  auto rep = pairing_concentration(flat, 1000, grid, rng);
  CHECK(rep.m == doctest::Approx(10 * 0.7));
  for (const auto& p : rep.points) CHECK(p.empirical == 0.0);

  auto w = random_weights(200, rng);
  double m = pairing_mean(w);
  std::vector<double> a_grid{0.05 * m, 0.1 * m, 0.2 * m, 1.1 * m};
  auto r = pairing_concentration(w, 20000, a_grid, rng);
  CHECK(r.all_ok);
  CHECK(r.points.back().empirical == 0.0);
}

TEST_CASE("heat kernel check") {
  auto rep = heat_kernel_check(generate_cycle(64), 256);
  REQUIRE_FALSE(rep.curve.empty());
  CHECK(rep.curve[0].t == 0);
  CHECK(rep.curve[0].diagonal == 1.0);
  CHECK(rep.t_hi == 256);
  CHECK(rep.ratio_min > 0.5);
}

TEST_CASE("lamplighter entropy") {
  Rng rng(4);
  auto rep = lamplighter_entropy_check(generate_cycle(6), 6, 2000, rng);
  REQUIRE(rep.points.size() >= 2);
  CHECK(rep.points[0].t == 0);
  CHECK(rep.points[0].range_exact == 1.0);
  CHECK(rep.points[1].range_exact == doctest::Approx(2.0));
  CHECK(rep.all_ok);
  for (const auto& p : rep.points) CHECK(std::abs(p.range_mc - p.range_exact) <= 4 * p.range_mc_se + 1e-12);
}

TEST_CASE("hit and mix sandwich") {
  Rng rng(5);
  // the whole vertex set is hit at time 0
  GStar gs(std::make_shared<const Graph>(generate_random_regular(64, 3, rng)), sample_uniform_matching(64, rng), 0.4);
  Kernel k(gs, false);
  auto h = survival_probabilities(k, std::vector<char>(64, 1), 0);
  for (double x : h) CHECK(x == 0.0);

  auto rep = hit_mix_sandwich_check(gs, 0.25);
  CHECK(rep.lower_ok);
  CHECK(rep.upper_ok);
  CHECK(rep.monotone_ok);
  CHECK(rep.hit_lower <= rep.t_mix);

  // exhaustive on a tiny instance, against the dense oracle
  GStar tiny(std::make_shared<const Graph>(generate_cycle(10)), sample_uniform_matching(10, rng), 0.7);
  auto small = hit_mix_sandwich_check(tiny, 0.25);
  CHECK(small.exhaustive);
  auto p = oracle::transition(tiny, false);
  auto pi = oracle::stationary(oracle::weights(tiny));
  std::vector<int> all(10);
  for (int i = 0; i < 10; ++i) all[i] = i;
  auto curve = oracle::profile(p, pi, all, 2000);
  CHECK(small.t_mix == *oracle::first_below(curve, 0.25));
  CHECK(small.lower_ok);
  CHECK(small.upper_ok);

  auto near_one = hit_mix_sandwich_check(tiny, 0.999);
  CHECK(near_one.t_mix == 0);
  CHECK(near_one.hit_lower == 0);
}
