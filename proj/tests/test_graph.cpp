#include <sstream>

#include "doctest.h"
#include "matchmix/error.hpp"
#include "matchmix/graph.hpp"
#include "matchmix/walk.hpp"

using namespace matchmix;

TEST_CASE("cycle generator") {
  Graph c3 = generate_cycle(3);
  CHECK(c3.vertex_count() == 3);
  CHECK(c3.edge_count() == 3);
  CHECK(c3.is_regular());
  CHECK(c3.max_degree() == 2);

  Graph c4 = generate_cycle(4);
  CHECK(diameter(c4).value == 2);
  // bipartite: the non-lazy walk has eigenvalue -1
  auto ev = spectrum(Kernel::simple_walk(c4, false));
  CHECK(ev.back() == doctest::Approx(-1.0));

  CHECK_THROWS_AS(generate_cycle(2), InvalidParameter);
}

TEST_CASE("torus generator") {
  Graph t = generate_torus(3, 2);
  CHECK(t.vertex_count() == 9);
  CHECK(t.edge_count() == 18);
  CHECK(t.is_regular());
  CHECK(t.max_degree() == 4);
  CHECK(ball(t, 0, 1).volume() == 5);

  Graph t1 = generate_torus(5, 1);
  Graph c5 = generate_cycle(5);
  CHECK(t1.edge_list() == c5.edge_list());
}

TEST_CASE("random regular generator") {
  Rng rng(3);
  Graph k4 = generate_random_regular(4, 3, rng);
  CHECK(k4.is_simple());
  CHECK(k4.edge_count() == 6);
  for (Vertex u = 0; u < 4; ++u)
    for (Vertex v = 0; v < 4; ++v)
      if (u != v) CHECK(k4.has_edge(u, v));
  CHECK_THROWS_AS(generate_random_regular(5, 3, rng), InvalidParameter);

  for (int seed = 0; seed < 10; ++seed) {
    Rng r(100 + seed);
    Graph g = generate_random_regular(10000, 3, r);
    CHECK(g.is_simple());
    CHECK(g.is_connected());
    auto rel = relaxation_times(Kernel::simple_walk(g, false));
    CHECK(rel.lambda2 < 0.96);
  }
}

TEST_CASE("lamplighter generator") {
  Graph l3 = generate_lamplighter(generate_cycle(3));
  CHECK(l3.vertex_count() == 24);
  CHECK(l3.is_regular());
  CHECK(l3.max_degree() == 8);

  // K2 by hand: state (lamps, walker); a step toggles the current lamp or
  // not, moves, then toggles the new lamp or not.
  Edge e{0, 1};
  Graph k2 = Graph::from_edges(2, std::span<const Edge>(&e, 1));
  Graph l2 = generate_lamplighter(k2);
  CHECK(l2.vertex_count() == 8);
  CHECK(l2.is_regular());
  CHECK(l2.max_degree() == 4);
  for (Vertex lamps = 0; lamps < 4; ++lamps)
    for (Vertex w = 0; w < 2; ++w) {
      Vertex from = lamps * 2 + w;
      int hits = 0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          Vertex l = lamps ^ (a << w) ^ (b << (1 - w));
          hits += l2.multiplicity(from, l * 2 + (1 - w));
        }
      CHECK(hits == 4);
    }
  CHECK(l2.is_connected());

  // disconnected base gives a disconnected lamplighter
  Edge e2[] = {{0, 1}, {2, 3}};
  Graph split = Graph::from_edges(4, e2);
  CHECK_FALSE(split.is_connected());
  CHECK_FALSE(generate_lamplighter(split).is_connected());
}

TEST_CASE("balls and diameter") {
  Graph c10 = generate_cycle(10);
  BallView b = ball(c10, 0, 2);
  CHECK(b.volume() == 5);
  CHECK(b.edges.size() == 4);
  BallView b0 = ball(c10, 3, 0);
  CHECK(b0.volume() == 1);
  CHECK(b0.edges.empty());

  CHECK(diameter(c10).value == 5);
  CHECK(diameter(generate_torus(3, 2)).value == 2);
  CHECK(diameter(generate_complete(4)).value == 1);
}

TEST_CASE("edge list round trip") {
  Rng rng(5);
  Graph g = generate_random_regular(50, 3, rng);
  std::stringstream ss;
  write_edge_list(ss, g);
  Graph h = read_edge_list(ss);
  CHECK(h.vertex_count() == g.vertex_count());
  CHECK(h.edge_list() == g.edge_list());

  std::stringstream bad("3 1\n0 7\n");
  CHECK_THROWS_AS(read_edge_list(bad), Error);
}
