#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "doctest.h"
#include "matchmix/error.hpp"
#include "matchmix/matching.hpp"
#include "oracles.hpp"

using namespace matchmix;

namespace {

Matching pairs(std::size_t n, std::initializer_list<Edge> p) {
  std::vector<Edge> v(p);
  return Matching::from_pairs(n, v);
}

Graph path3() {
  Edge e[] = {{0, 1}, {1, 2}};
  return Graph::from_edges(3, e);
}

}  // namespace

TEST_CASE("uniform matching sampler") {
  Rng rng(1);
  Matching m2 = sample_uniform_matching(2, rng);
  CHECK(m2.partner(0) == 1);
  CHECK(m2.partner(1) == 0);

  const std::size_t draws = 100000;
  std::map<Vertex, std::size_t> by_partner_of_0;
  for (std::size_t i = 0; i < draws; ++i) ++by_partner_of_0[sample_uniform_matching(4, rng).partner(0)];
  CHECK(by_partner_of_0.size() == 3);
  for (auto [v, c] : by_partner_of_0) {
    double f = static_cast<double>(c) / draws;
    CHECK(std::abs(f - 1.0 / 3) <= 3 * oracle::binomial_sigma(1.0 / 3, draws));
  }

  std::map<Vertex, std::size_t> lonely;
  for (std::size_t i = 0; i < draws; ++i) {
    Matching m = sample_uniform_matching(3, rng);
    REQUIRE(m.unmatched().has_value());
    ++lonely[*m.unmatched()];
    Vertex u = *m.unmatched();
    Vertex a = (u + 1) % 3, b = (u + 2) % 3;
    CHECK(m.partner(a) == b);
  }
  for (auto [v, c] : lonely) {
    double f = static_cast<double>(c) / draws;
    CHECK(std::abs(f - 1.0 / 3) <= 3 * oracle::binomial_sigma(1.0 / 3, draws));
  }
}

TEST_CASE("matching validation and io") {
  CHECK_THROWS_AS(pairs(4, {{0, 1}, {1, 2}}), InvalidInput);
  CHECK_THROWS_AS(pairs(4, {{0, 0}, {1, 2}}), InvalidInput);
  Rng rng(2);
  Matching m = sample_uniform_matching(11, rng);
  std::stringstream ss;
  write_matching(ss, m);
  Matching back = read_matching(ss, 11);
  for (Vertex v = 0; v < 11; ++v) CHECK(back.partner(v) == m.partner(v));
}

TEST_CASE("augment kernel values") {
  auto c4 = std::make_shared<const Graph>(generate_cycle(4));
  GStar gs(c4, pairs(4, {{0, 2}, {1, 3}}), 0.5);
  CHECK(gs.transition(0, 2) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(gs.transition(0, 1) == doctest::Approx(0.4).epsilon(1e-15));
  for (double eps : {0.01, 0.3, 1.0}) {
    GStar g2(c4, pairs(4, {{0, 2}, {1, 3}}), eps);
    for (Vertex v = 0; v < 4; ++v) CHECK(g2.stationary(v) == doctest::Approx(0.25));
  }

  GStar p(std::make_shared<const Graph>(path3()), pairs(3, {{0, 2}}), 1.0);
  for (Vertex v = 0; v < 3; ++v) {
    CHECK(p.total_weight(v) == doctest::Approx(2.0));
    CHECK(p.stationary(v) == doctest::Approx(1.0 / 3));
  }

  CHECK_THROWS_AS(GStar(c4, pairs(4, {{0, 2}, {1, 3}}), 1.5), InvalidParameter);
  CHECK_THROWS_AS(GStar(c4, pairs(4, {{0, 2}, {1, 3}}), 0.0), InvalidParameter);
}

TEST_CASE("ball-star exploration") {
  Rng rng(4);
  auto c20 = std::make_shared<const Graph>(generate_cycle(20));
  GStar any(c20, sample_uniform_matching(20, rng), 0.5);
  auto e0 = explore_ball_star(any, 0, 0, 2);
  CHECK(e0.levels.size() == 1);
  CHECK(e0.overlap_events.empty());
  CHECK(is_k_root(any, 5, 0, 2));

  // member 1 of B(0, 1) is paired with 2, at distance 2 from the centre
  GStar close(c20, pairs(20, {{1, 2}, {0, 10}, {3, 13}, {4, 14}, {5, 15}, {6, 16}, {7, 17}, {8, 18}, {9, 19}, {11, 12}}),
              0.5);
  CHECK_FALSE(explore_ball_star(close, 0, 1, 1).overlap_events.empty());

  // a neighbour of x matched to x
  GStar adjacent(c20, pairs(20, {{0, 1}, {2, 12}, {3, 13}, {4, 14}, {5, 15}, {6, 16}, {7, 17}, {8, 18}, {9, 19}, {10, 11}}),
                 0.5);
  CHECK_FALSE(is_k_root(adjacent, 0, 1, 1));
  CHECK_FALSE(is_k_root(adjacent, 0, 1, 3));
}

TEST_CASE("k-root fractions") {
  Rng rng(6);
  auto c12 = std::make_shared<const Graph>(generate_cycle(12));
  // partners sit at distance 6, far from every radius-1 star
  GStar far(c12, pairs(12, {{0, 6}, {1, 7}, {2, 8}, {3, 9}, {4, 10}, {5, 11}}), 0.5);
  CHECK(count_k_roots(far, 0, 1, 200, rng).fraction == 1.0);

  auto c = std::make_shared<const Graph>(generate_cycle(100000));
  GStar big(c, sample_uniform_matching(100000, rng), 0.3);
  CHECK(count_k_roots(big, 0, 3, 100, rng).fraction == 1.0);
  auto f = count_k_roots(big, 1, 3, 2000, rng);
  CHECK(f.fraction >= 0.95);

  // overlap probability at K = 1 against b(R)^{2K+3} / n, b(R) = |B(R)| = 7
  std::size_t overlaps = 0;
  const std::size_t trials = 1000;
  for (std::size_t i = 0; i < trials; ++i) {
    GStar gs(c, sample_uniform_matching(100000, rng), 0.3);
    overlaps += is_k_root(gs, static_cast<Vertex>(uniform_index(rng, 100000)), 1, 3) ? 0 : 1;
  }
  double bound = std::pow(7.0, 5) / 100000;
  CHECK(static_cast<double>(overlaps) / trials <= 4 * bound);

  std::size_t non_roots = 0, sampled = 0;
  for (int rep = 0; rep < 20; ++rep) {
    GStar gs(c, sample_uniform_matching(100000, rng), 0.3);
    auto r = count_k_roots(gs, 1, 3, 200, rng);
    non_roots += static_cast<std::size_t>(std::lround((1 - r.fraction) * 200));
    sampled += 200;
  }
  CHECK(static_cast<double>(non_roots) / sampled < 0.05);
}
