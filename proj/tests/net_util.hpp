#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ppbary/network.hpp"

namespace ppbary::testing {

inline Network random_connected(Rng& rng, std::size_t nv, bool with_coords) {
  Network net;
  for (std::size_t v = 0; v < nv; ++v) {
    net.add_vertex("v" + std::to_string(v));
    if (with_coords) net.set_coordinates(v, rng.uniform(0, 1), rng.uniform(0, 1));
  }
  auto length = [&](std::size_t u, std::size_t v) {
    if (!with_coords) return rng.uniform(0.1, 2.0);
    const auto a = net.coordinates(u), b = net.coordinates(v);
    return std::max(1e-3, std::hypot(a[0] - b[0], a[1] - b[1]));
  };
  for (std::size_t v = 1; v < nv; ++v) {
    const auto u = rng.uniform_index(v);
    net.add_edge(u, v, length(u, v));
  }
  for (std::size_t extra = 0; extra < nv; ++extra) {
    const auto u = rng.uniform_index(nv), v = rng.uniform_index(nv);
    if (u != v) net.add_edge(u, v, length(u, v));
  }
  return net;
}

// Floyd-Warshall on the vertices, then closed forms for points on edges.
struct Oracle {
  const Network& net;
  std::vector<std::vector<double>> d;

  explicit Oracle(const Network& n) : net(n) {
    const std::size_t nv = net.vertex_count();
    d.assign(nv, std::vector<double>(nv, 1e300));
    for (std::size_t v = 0; v < nv; ++v) d[v][v] = 0.0;
    for (const auto& e : net.edges()) d[e.u][e.v] = d[e.v][e.u] = std::min(d[e.u][e.v], e.length);
    for (std::size_t k = 0; k < nv; ++k) {
      for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t j = 0; j < nv; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
      }
    }
  }

  // (vertex, distance to it) pairs reachable directly from x.
  std::vector<std::pair<std::size_t, double>> exits(const NetPoint& x) const {
    if (x.is_vertex()) return {{static_cast<std::size_t>(x.vertex), 0.0}};
    const auto& e = net.edge(static_cast<std::size_t>(x.edge));
    return {{e.u, x.offset}, {e.v, e.length - x.offset}};
  }

  double operator()(const NetPoint& x, const NetPoint& y) const {
    double best = 1e300;
    for (const auto& [a, da] : exits(x)) {
      for (const auto& [b, db] : exits(y)) best = std::min(best, da + d[a][b] + db);
    }
    if (!x.is_vertex() && !y.is_vertex() && x.edge == y.edge) best = std::min(best, std::abs(x.offset - y.offset));
    return best;
  }
};

}  // namespace ppbary::testing
