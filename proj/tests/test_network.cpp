#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "ppbary/location.hpp"
#include "ppbary/network.hpp"
#include "net_util.hpp"
#include "test_util.hpp"

using namespace ppbary;
using ppbary::testing::Oracle;
using ppbary::testing::random_connected;

namespace {

Network path_abc() {
  Network net;
  const auto a = net.add_vertex("A"), b = net.add_vertex("B"), c = net.add_vertex("C");
  net.add_edge(a, b, 1.0);
  net.add_edge(b, c, 1.0);
  return net;
}

Network star() {
  Network net;
  const auto h = net.add_vertex("H");
  for (const char* leaf : {"L1", "L2", "L3"}) net.add_edge(h, net.add_vertex(leaf), 1.0);
  return net;
}

}  // namespace

TEST_CASE("graph construction rules") {
  Network net;
  const auto a = net.add_vertex("a"), b = net.add_vertex("b");
  CHECK(net.add_vertex("a") == a);
  CHECK(net.add_edge(a, b, 3.0) == 0u);
  CHECK(net.add_edge(b, a, 2.0) == 0u);
  CHECK(net.edge(0).length == 2.0);
  CHECK_FALSE(net.add_edge(a, a, 1.0).has_value());
  CHECK_THROWS_AS(net.add_edge(a, b, 0.0), DomainError);
  CHECK(net.connected());
  net.add_vertex("c");
  CHECK_FALSE(net.connected());
  CHECK_THROWS_AS(build_distance_matrix(net, {}), DomainError);
}

TEST_CASE("edge list and coordinate parsing") {
  std::istringstream edges("# comment\nA B 1.5\nB C 2\n\nA C 5 # long way\n");
  Network net = Network::read_edge_list(edges);
  CHECK(net.vertex_count() == 3);
  CHECK(net.edge_count() == 3);
  std::istringstream coords("A 0 0\nB 1.5 0\nC 1.5 2\n");
  net.read_coordinates(coords);
  CHECK(net.has_coordinates());
  const auto mid = net.coordinates(NetPoint::on_edge(1, 1.0));
  CHECK(mid[0] == doctest::Approx(1.5));
  CHECK(mid[1] == doctest::Approx(1.0));
  std::istringstream bad("A B\n");
  CHECK_THROWS_AS(Network::read_edge_list(bad), DomainError);
  std::istringstream unknown("Z 0 0\n");
  CHECK_THROWS_AS(net.read_coordinates(unknown), DomainError);
}

TEST_CASE("canonical network points") {
  const Network net = path_abc();
  CHECK(net.canonical(NetPoint::on_edge(0, 0.0)) == NetPoint::at_vertex(0));
  CHECK(net.canonical(NetPoint::on_edge(0, 1.0)) == NetPoint::at_vertex(1));
  CHECK(net.canonical(NetPoint::on_edge(0, 0.5)) == NetPoint::on_edge(0, 0.5));
  CHECK_THROWS_AS(net.canonical(NetPoint::on_edge(0, 1.5)), DomainError);
  CHECK_THROWS_AS(net.canonical(NetPoint::on_edge(7, 0.5)), DomainError);
}

TEST_CASE("distance matrix examples") {
  Network tri;
  const auto a = tri.add_vertex("a"), b = tri.add_vertex("b"), c = tri.add_vertex("c");
  tri.add_edge(a, b, 1);
  tri.add_edge(b, c, 1);
  tri.add_edge(a, c, 1);
  const auto dm = build_distance_matrix(tri, {});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(dm(i, j) == (i == j ? 0.0 : 1.0));
  }

  const Network path = path_abc();
  const NetPoint mid = NetPoint::on_edge(0, 0.5);
  const auto pm = build_distance_matrix(path, {mid, mid});
  CHECK(pm.size() == 4);
  CHECK(pm(pm.require_row(mid), 2) == doctest::Approx(1.5));
  CHECK_THROWS_AS(pm.require_row(NetPoint::on_edge(1, 0.25)), DomainError);
}

TEST_CASE("distance matrix equals an independent shortest path oracle") {
  Rng rng(53);
  for (int t = 0; t < 20; ++t) {
    const std::size_t nv = 2 + rng.uniform_index(49);
    const Network net = random_connected(rng, nv, false);
    std::vector<NetPoint> pts;
    for (int i = 0; i < 15; ++i) {
      const auto e = rng.uniform_index(net.edge_count());
      pts.push_back(NetPoint::on_edge(static_cast<std::int64_t>(e), rng.uniform(0, net.edge(e).length)));
    }
    pts.push_back(NetPoint::at_vertex(0));
    const auto dm = build_distance_matrix(net, pts, t % 2 == 0 ? 1 : 4);
    const Oracle oracle(net);
    std::vector<NetPoint> all;
    for (std::size_t v = 0; v < nv; ++v) all.push_back(NetPoint::at_vertex(static_cast<std::int64_t>(v)));
    all.insert(all.end(), pts.begin(), pts.end());
    for (const auto& x : all) {
      for (const auto& y : all) {
        const double got = dm(dm.require_row(x), dm.require_row(y));
        CHECK(got == doctest::Approx(oracle(x, y)).epsilon(1e-12));
        CHECK(got == dm(dm.require_row(y), dm.require_row(x)));
      }
    }
    // Inserting points leaves vertex distances unchanged.
    const auto bare = build_distance_matrix(net, {});
    for (std::size_t u = 0; u < nv; ++u) {
      for (std::size_t v = 0; v < nv; ++v) CHECK(bare(u, v) == doctest::Approx(dm(u, v)).epsilon(1e-14));
    }
  }
}

TEST_CASE("network median examples") {
  const Network s = star();
  const std::vector<NetPoint> leaves{NetPoint::at_vertex(1), NetPoint::at_vertex(2), NetPoint::at_vertex(3)};
  const auto sm = build_distance_matrix(s, leaves);
  Rng rng(1);
  CHECK(network_median_center(leaves, {}, sm, rng) == NetPoint::at_vertex(0));
  const std::vector<NetPoint> single{NetPoint::at_vertex(2)};
  CHECK(network_median_center(single, {}, sm, rng) == NetPoint::at_vertex(2));
}

TEST_CASE("three-way tie on a path is broken uniformly") {
  const Network p = path_abc();
  const std::vector<NetPoint> ends{NetPoint::at_vertex(0), NetPoint::at_vertex(2)};
  const auto dm = build_distance_matrix(p, ends);
  CHECK(network_median_candidates(ends, {}, dm).size() == 3);
  std::array<int, 3> hits{};
  constexpr int runs = 10000;
  for (int seed = 0; seed < runs; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    ++hits[static_cast<std::size_t>(network_median_center(ends, {}, dm, rng).vertex)];
  }
  for (int h : hits) CHECK(std::abs(h / static_cast<double>(runs) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("network median matches exhaustive enumeration") {
  Rng rng(59);
  for (int t = 0; t < 30; ++t) {
    const Network net = random_connected(rng, 3 + rng.uniform_index(20), false);
    std::vector<NetPoint> cluster;
    for (int i = 0; i < 6; ++i) {
      const auto e = rng.uniform_index(net.edge_count());
      cluster.push_back(net.canonical(
          NetPoint::on_edge(static_cast<std::int64_t>(e), rng.uniform(0, net.edge(e).length))));
    }
    const auto dm = build_distance_matrix(net, cluster);
    double best = 1e300;
    for (std::size_t r = 0; r < dm.size(); ++r) {
      double s = 0.0;
      for (const auto& x : cluster) s += dm(dm.require_row(x), r);
      best = std::min(best, s);
    }
    const NetPoint z = network_median_center(cluster, {}, dm, rng);
    double got = 0.0;
    for (const auto& x : cluster) got += dm(dm.require_row(x), dm.require_row(z));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
    const bool candidate = z.is_vertex() || std::find(cluster.begin(), cluster.end(), z) != cluster.end();
    CHECK(candidate);
  }
}

TEST_CASE("projection onto the network") {
  Network net;
  const auto a = net.add_vertex("a"), b = net.add_vertex("b"), c = net.add_vertex("c"),
             d = net.add_vertex("d");
  net.set_coordinates(a, 0, 0);
  net.set_coordinates(b, 1, 0);
  net.set_coordinates(c, 0, 1);
  net.set_coordinates(d, 1, 1);
  net.add_edge(a, b, 1);
  net.add_edge(c, d, 1);
  net.add_edge(a, c, 1);
  CHECK(project_to_network({0.25, 0.0}, net) == NetPoint::on_edge(0, 0.25));
  CHECK(project_to_network({0.5, 0.5}, net).edge == 0);
  CHECK(project_to_network({-1.0, -1.0}, net) == NetPoint::at_vertex(a));

  Network bare = path_abc();
  CHECK_THROWS_AS(project_to_network({0.0, 0.0}, bare), DomainError);
}

TEST_CASE("projection matches dense edge sampling") {
  Rng rng(61);
  const Network net = random_connected(rng, 12, true);
  for (int t = 0; t < 100; ++t) {
    const std::array<double, 2> q{rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
    const auto xy = net.coordinates(project_to_network(q, net));
    const double got = std::hypot(xy[0] - q[0], xy[1] - q[1]);
    double best = 1e300;
    for (const auto& e : net.edges()) {
      const auto a = net.coordinates(e.u), b = net.coordinates(e.v);
      const int steps = static_cast<int>(std::ceil(std::hypot(b[0] - a[0], b[1] - a[1]) / 1e-4));
      for (int s = 0; s <= steps; ++s) {
        const double u = static_cast<double>(s) / steps;
        best = std::min(best, std::hypot(a[0] + u * (b[0] - a[0]) - q[0], a[1] + u * (b[1] - a[1]) - q[1]));
      }
    }
    CHECK(got <= best + 1e-12);
    CHECK(best - got <= 1e-3);
  }
}

TEST_CASE("network space accepts edge endpoints and rejects other orders") {
  auto net = std::make_shared<Network>(path_abc());
  NetworkSpace space(net, build_distance_matrix(*net, {NetPoint::on_edge(1, 0.5)}));
  CHECK(space.distance(NetPoint::on_edge(0, 0.0), NetPoint::on_edge(1, 0.5)) == doctest::Approx(1.5));
  CHECK_THROWS_AS(space.check_location(NetPoint::on_edge(0, 0.3)), DomainError);
  CHECK_THROWS_AS(space.check_order(2.0), UnsupportedConfiguration);
  CHECK_THROWS_AS(space.check_location(Coords{0.0, 0.0}), DomainError);
}
