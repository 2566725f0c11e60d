#include <algorithm>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "matchmix/error.hpp"
#include "matchmix/walk.hpp"
#include "oracles.hpp"

using namespace matchmix;

namespace {

std::shared_ptr<const Graph> shared(Graph g) { return std::make_shared<const Graph>(std::move(g)); }

GStar c4_instance(double eps = 0.5) {
  std::vector<Edge> p{{0, 2}, {1, 3}};
  return GStar(shared(generate_cycle(4)), Matching::from_pairs(4, p), eps);
}

GStar c8_instance() {
  Rng rng(8);
  return GStar(shared(generate_cycle(8)), sample_uniform_matching(8, rng), 1.0);
}

std::vector<int> every_vertex(std::size_t n) {
  std::vector<int> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i);
  return v;
}

}  // namespace

TEST_CASE("stationary distribution") {
  GStar c4 = c4_instance();
  Kernel k(c4, false);
  for (double p : stationary(k).mass) CHECK(p == doctest::Approx(0.25));

  std::vector<Edge> e{{0, 1}, {1, 2}}, m{{0, 2}};
  GStar path(shared(Graph::from_edges(3, e)), Matching::from_pairs(3, m), 1.0);
  for (double p : stationary(Kernel(path, false)).mass) CHECK(p == doctest::Approx(1.0 / 3));

  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    GStar gs(shared(generate_random_regular(200, 3, rng)), sample_uniform_matching(200, rng), 0.1 + 0.09 * i);
    for (bool lazy : {false, true}) {
      Kernel kk(gs, lazy);
      Distribution pi = stationary(kk);
      Distribution next = step(kk, pi);
      double l1 = 0.0;
      for (std::size_t x = 0; x < pi.size(); ++x) l1 += std::abs(next.mass[x] - pi.mass[x]);
      CHECK(l1 < 1e-12);
    }
  }
}

TEST_CASE("one step of the kernel") {
  GStar c4 = c4_instance();
  Kernel k(c4, false);
  Distribution row = step(k, point_mass(4, 0));
  CHECK(row.mass[0] == 0.0);
  CHECK(row.mass[1] == doctest::Approx(0.4));
  CHECK(row.mass[2] == doctest::Approx(0.2));
  CHECK(row.mass[3] == doctest::Approx(0.4));

  Kernel lazy(c4, true);
  Distribution d{{0.1, 0.2, 0.3, 0.4}};
  Distribution a = step(lazy, d), b = step(k, d);
  for (std::size_t x = 0; x < 4; ++x) CHECK(a.mass[x] == doctest::Approx((d.mass[x] + b.mass[x]) / 2));
}

TEST_CASE("total variation") {
  Distribution a{{0.5, 0.5, 0.0}}, b{{0.0, 0.5, 0.5}};
  CHECK(tv(a, a) == 0.0);
  CHECK(tv(a, b) == doctest::Approx(0.5));
  Distribution u{std::vector<double>(10, 0.1)};
  CHECK(tv(point_mass(10, 3), u) == doctest::Approx(0.9));
}

TEST_CASE("distance profile against dense powers") {
  GStar gs = c8_instance();
  Kernel k(gs, true);
  auto starts = all_starts(8);
  MixCurve c = distance_profile(k, starts, 60);
  auto p = oracle::transition(gs, true);
  auto w = oracle::weights(gs);
  auto pi = oracle::stationary(w);
  auto ref = oracle::profile(p, pi, every_vertex(8), 60);
  REQUIRE(c.values.size() == ref.size());
  for (std::size_t t = 0; t < ref.size(); ++t) CHECK(std::abs(c.values[t] - ref[t]) < 1e-10);
  CHECK(c.values[0] == doctest::Approx(1.0 - *std::min_element(pi.begin(), pi.end())));
  for (std::size_t t = 1; t < c.values.size(); ++t) CHECK(c.values[t] <= c.values[t - 1] + 1e-15);
  CHECK(mixing_time(c, 0.25) == *oracle::first_below(ref, 0.25));
}

TEST_CASE("mixing time on synthetic curves") {
  MixCurve c;
  for (int t = 0; t < 10; ++t) c.values.push_back(std::pow(2.0, -t));
  CHECK(mixing_time(c, 0.25) == 2);
  MixCurve low{{}, {0.5, 0.2, 0.1}};
  CHECK(mixing_time(low, 0.6) == 0);
  CHECK_FALSE(try_mixing_time(c, 1e-9).has_value());
  CHECK_THROWS_AS(mixing_time(c, 1e-9), NotMixedByHorizon);
}

TEST_CASE("sampled paths") {
  GStar c4 = c4_instance();
  Kernel k(c4, false);
  Rng rng(11);
  auto p0 = sample_path(k, 2, 0, rng);
  CHECK(p0 == std::vector<Vertex>{2});

  const std::size_t draws = 100000;
  std::vector<std::size_t> freq(4, 0);
  for (std::size_t i = 0; i < draws; ++i) ++freq[sample_path(k, 0, 1, rng)[1]];
  double row[] = {0.0, 0.4, 0.2, 0.4};
  for (int y = 0; y < 4; ++y)
    CHECK(std::abs(static_cast<double>(freq[y]) / draws - row[y]) <= 3 * oracle::binomial_sigma(row[y], draws) + 1e-12);

  Kernel lazy(c4, true);
  auto tp = sample_tagged_path(lazy, 0, draws, rng);
  std::size_t holds = std::count(tp.kinds.begin(), tp.kinds.end(), StepKind::Hold);
  CHECK(std::abs(static_cast<double>(holds) / draws - 0.5) <= 3 * oracle::binomial_sigma(0.5, draws));
  for (std::size_t i = 0; i < tp.length(); ++i)
    if (tp.kinds[i] == StepKind::Hold) CHECK(tp.vertices[i] == tp.vertices[i + 1]);
}

TEST_CASE("hitting probabilities") {
  GStar gs = c8_instance();
  Kernel k(gs, false);
  Rng rng(12);
  std::vector<Vertex> everything(8);
  for (Vertex v = 0; v < 8; ++v) everything[v] = v;
  for (auto& h : hitting_time_quantile(k, everything, everything, 5, 100, rng)) CHECK(h.exceed == 0.0);

  std::vector<Vertex> target{0, 3};
  std::vector<Vertex> starts{0, 1, 2, 5, 6};
  std::vector<char> in_a(8, 0);
  in_a[0] = in_a[3] = 1;
  auto ref = oracle::survival(oracle::transition(gs, false), in_a, 4);
  const std::size_t trials = 100000;
  auto mc = hitting_time_quantile(k, target, starts, 4, trials, rng, 0);
  for (auto& h : mc) {
    CHECK_FALSE(h.exact);
    if (h.start == 0) CHECK(h.exceed == 0.0);
    CHECK(std::abs(h.exceed - ref[h.start]) <= 3 * oracle::binomial_sigma(ref[h.start], trials));
  }
  auto exact = hitting_time_quantile(k, target, starts, 4, trials, rng);
  for (auto& h : exact) CHECK(std::abs(h.exceed - ref[h.start]) < 1e-12);

  // absorbing-chain solve: expected hitting times E_y tau_A from the
  // survival tail sum agree with the linear system
  auto p = oracle::transition(gs, false);
  oracle::Mat a = oracle::zeros(8);
  oracle::Vec rhs(8, 0.0);
  for (int x = 0; x < 8; ++x) {
    a[x][x] = 1.0;
    if (in_a[x]) continue;
    rhs[x] = 1.0;
    for (int y = 0; y < 8; ++y)
      if (!in_a[y]) a[x][y] -= p[x][y];
  }
  auto expect = oracle::solve(a, rhs);
  std::vector<double> tail(8, 0.0);
  for (std::size_t s = 0; s < 3000; ++s) {
    auto h = survival_probabilities(k, in_a, s);
    for (int x = 0; x < 8; ++x) tail[x] += h[x];
  }
  for (int x = 0; x < 8; ++x) CHECK(tail[x] == doctest::Approx(expect[x]).epsilon(1e-9));
}

TEST_CASE("relaxation times") {
  auto c4 = Kernel::simple_walk(generate_cycle(4), true);
  auto ev = spectrum(c4);
  REQUIRE(ev.size() == 4);
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(0.5));
  CHECK(ev[2] == doctest::Approx(0.5));
  CHECK(ev[3] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(relaxation_times(c4).t_rel == doctest::Approx(2.0));

  auto bip = relaxation_times(Kernel::simple_walk(generate_cycle(4), false));
  CHECK(bip.unbounded);

  Rng rng(21);
  GStar gs(shared(generate_random_regular(40, 3, rng)), sample_uniform_matching(40, rng), 0.37);
  auto p = oracle::transition(gs, false);
  auto pi = oracle::stationary(oracle::weights(gs));
  auto ref = oracle::reversible_spectrum(p, pi);
  auto got = spectrum(Kernel(gs, false));
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-10);
  auto rt = relaxation_times(Kernel(gs, false));
  CHECK(rt.lambda2 == doctest::Approx(ref[1]).epsilon(1e-10));
  CHECK(rt.lambda_star == doctest::Approx(std::max(ref[1], -ref.back())).epsilon(1e-10));

  // the iterative path agrees with the dense solve
  RelaxationOptions it;
  it.exact_limit = 0;
  it.tol = 1e-12;
  auto approx = relaxation_times(Kernel(gs, false), it);
  CHECK_FALSE(approx.exact);
  CHECK(approx.lambda_star == doctest::Approx(rt.lambda_star).epsilon(1e-6));
}

TEST_CASE("entropy profiles") {
  Rng rng(3);
  Graph g = generate_random_regular(100, 3, rng);
  Kernel k = Kernel::simple_walk(g, false);
  for (int b : {1, 2, 4}) {
    auto h = entropy_profile(k, 0, 30, b);
    CHECK(h[0] == 0.0);
    CHECK(h[1] == doctest::Approx(std::pow(std::log(3.0), b)));
    for (double x : h) CHECK(x <= std::pow(std::log(100.0), b) + 1e-9);
  }
}

TEST_CASE("killed endpoint law") {
  std::vector<Edge> e{{0, 1}};
  Graph k2 = Graph::from_edges(2, e);
  std::vector<char> both{1, 1};
  for (double eps : {0.1, 0.5, 1.0}) {
    auto law = killed_endpoint_distribution(k2, both, eps, 0, 1e-14);
    CHECK(law.endpoint[0] / law.accumulated == doctest::Approx((1 + eps) / (2 + eps)));
    CHECK(law.residual <= 1e-14);
    CHECK(law.accumulated >= 1 - 1e-14);
  }
  auto one = killed_endpoint_distribution(k2, both, 1.0, 0, 1e-14);
  CHECK(one.endpoint[0] == doctest::Approx(2.0 / 3));
  CHECK(one.endpoint[1] == doctest::Approx(1.0 / 3));

  std::vector<Edge> m{{0, 1}};
  GStar gs(shared(k2), Matching::from_pairs(2, m), 0.5);
  double p = 1.5 / 2.5;
  CHECK(first_crossing_entropy(gs, 0, 1e-14, 1) ==
        doctest::Approx(-p * std::log(p) - (1 - p) * std::log(1 - p)));

  Rng rng(4);
  Graph rr = generate_random_regular(60, 3, rng);
  std::vector<char> mask(60, 1);
  mask[7] = 0;
  auto law = killed_endpoint_distribution(rr, mask, 0.3, 2, 1e-13);
  auto ref = oracle::killed_law(rr, mask, 0.3, 2);
  for (int v = 0; v < 60; ++v) CHECK(std::abs(law.endpoint[v] - ref[v]) < 1e-11);
  CHECK(law.endpoint[7] == 0.0);
}

TEST_CASE("dirichlet comparison") {
  Rng rng(9);
  auto g = shared(generate_random_regular(30, 3, rng));
  GStar one(g, sample_uniform_matching(30, rng), 1.0);
  auto r = dirichlet_comparison(one);
  CHECK(r.min_kernel_ratio == doctest::Approx(1.0));
  CHECK(r.max_kernel_ratio == doctest::Approx(1.0));

  auto c = c4_instance(0.5);
  auto d = dirichlet_comparison(c);
  CHECK(d.lower_holds);
  CHECK(d.upper_holds);
  CHECK(d.pi_within_weight_bounds);
  CHECK(d.min_pi_ratio >= 1 / 1.5 - 1e-12);
  CHECK(d.max_pi_ratio <= 1.5 + 1e-12);
}
