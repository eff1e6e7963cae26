#include "ppbary/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <thread>

#include "parallel.hpp"
#include "ppbary/location.hpp"

namespace ppbary {

std::size_t Network::add_vertex(const std::string& name) {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  const std::size_t v = names_.size();
  names_.push_back(name);
  index_.emplace(name, v);
  coords_.emplace_back();
  return v;
}

std::optional<std::size_t> Network::add_edge(std::size_t u, std::size_t v, double length) {
  if (u >= names_.size() || v >= names_.size()) throw DomainError("edge endpoint out of range");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("edge lengths must be positive");
  if (u == v) return std::nullopt;
  const auto key = std::minmax(u, v);
  if (auto it = edge_index_.find(key); it != edge_index_.end()) {
    Edge& e = edges_[it->second];
    e.length = std::min(e.length, length);
    return it->second;
  }
  edges_.push_back({u, v, length});
  edge_index_.emplace(key, edges_.size() - 1);
  return edges_.size() - 1;
}

void Network::set_coordinates(std::size_t v, double x, double y) {
  coords_.at(v) = std::array<double, 2>{x, y};
}

std::optional<std::size_t> Network::find_vertex(const std::string& name) const {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  return std::nullopt;
}

bool Network::has_coordinates() const {
  return !coords_.empty() &&
         std::all_of(coords_.begin(), coords_.end(), [](const auto& c) { return c.has_value(); });
}

std::array<double, 2> Network::coordinates(std::size_t v) const {
  const auto& c = coords_.at(v);
  if (!c) throw DomainError("vertex " + names_[v] + " has no coordinates");
  return *c;
}

std::array<double, 2> Network::coordinates(const NetPoint& x) const {
  const NetPoint c = canonical(x);
  if (c.is_vertex()) return coordinates(static_cast<std::size_t>(c.vertex));
  const Edge& e = edges_[static_cast<std::size_t>(c.edge)];
  const auto a = coordinates(e.u), b = coordinates(e.v);
  const double t = c.offset / e.length;
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

NetPoint Network::canonical(const NetPoint& x) const {
  if (x.is_vertex()) {
    if (static_cast<std::size_t>(x.vertex) >= names_.size()) throw DomainError("unknown vertex");
    return NetPoint::at_vertex(x.vertex);
  }
  if (x.edge < 0 || static_cast<std::size_t>(x.edge) >= edges_.size()) {
    throw DomainError("unknown edge id " + std::to_string(x.edge));
  }
  const Edge& e = edges_[static_cast<std::size_t>(x.edge)];
  if (!(x.offset >= 0.0) || x.offset > e.length) throw DomainError("offset outside edge");
  if (x.offset == 0.0) return NetPoint::at_vertex(static_cast<std::int64_t>(e.u));
  if (x.offset == e.length) return NetPoint::at_vertex(static_cast<std::int64_t>(e.v));
  return NetPoint::on_edge(x.edge, x.offset);
}

bool Network::connected() const {
  const std::size_t n = names_.size();
  if (n == 0) return true;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    return parent[a] == a ? a : parent[a] = find(parent[a]);
  };
  std::size_t components = n;
  for (const auto& e : edges_) {
    const std::size_t a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

namespace {

std::string strip_comment(const std::string& line) {
  return line.substr(0, line.find('#'));
}

}  // namespace

Network Network::read_edge_list(std::istream& edges) {
  Network net;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(edges, line)) {
    ++lineno;
    std::istringstream in(strip_comment(line));
    std::string u, v;
    double length = 0.0;
    if (!(in >> u)) continue;
    if (!(in >> v >> length)) {
      throw DomainError("edge list line " + std::to_string(lineno) + ": expected 'u v length'");
    }
    const std::size_t a = net.add_vertex(u), b = net.add_vertex(v);
    net.add_edge(a, b, length);
  }
  return net;
}

void Network::read_coordinates(std::istream& coords) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(coords, line)) {
    ++lineno;
    std::istringstream in(strip_comment(line));
    std::string id;
    double x = 0.0, y = 0.0;
    if (!(in >> id)) continue;
    if (!(in >> x >> y)) {
      throw DomainError("coordinate line " + std::to_string(lineno) + ": expected 'id x y'");
    }
    const auto v = find_vertex(id);
    if (!v) throw DomainError("coordinates for unknown vertex " + id);
    set_coordinates(*v, x, y);
  }
}

std::optional<std::size_t> DistanceMatrixView::row_of(const NetPoint& x) const {
  if (x.is_vertex()) {
    if (static_cast<std::size_t>(x.vertex) < vertex_count_) return static_cast<std::size_t>(x.vertex);
    return std::nullopt;
  }
  if (!edge_rows_) return std::nullopt;
  if (auto it = edge_rows_->find({x.edge, x.offset}); it != edge_rows_->end()) return it->second;
  return std::nullopt;
}

std::size_t DistanceMatrixView::require_row(const NetPoint& x) const {
  const auto r = row_of(x);
  if (!r) throw DomainError("network point not covered by the distance matrix");
  return *r;
}

DistanceMatrixView build_distance_matrix(const Network& net, const std::vector<NetPoint>& points,
                                         unsigned threads) {
  if (!net.connected()) throw DomainError("network is not connected");
  const std::size_t nv = net.vertex_count();

  auto edge_rows = std::make_shared<std::map<std::pair<std::int64_t, double>, std::size_t>>();
  auto nodes = std::make_shared<std::vector<NetPoint>>();
  for (std::size_t v = 0; v < nv; ++v) nodes->push_back(NetPoint::at_vertex(static_cast<std::int64_t>(v)));
  for (const auto& raw : points) {
    const NetPoint x = net.canonical(raw);
    if (x.is_vertex()) continue;
    if (edge_rows->emplace(std::make_pair(x.edge, x.offset), nodes->size()).second) {
      nodes->push_back(x);
    }
  }
  const std::size_t n = nodes->size();

  // Split every edge at its inserted points (the map is ordered by edge, offset).
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  auto link = [&](std::size_t a, std::size_t b, double w) {
    adj[a].emplace_back(b, w);
    adj[b].emplace_back(a, w);
  };
  auto it = edge_rows->begin();
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    std::size_t prev = edge.u;
    double prev_offset = 0.0;
    for (; it != edge_rows->end() && it->first.first == static_cast<std::int64_t>(e); ++it) {
      link(prev, it->second, it->first.second - prev_offset);
      prev = it->second;
      prev_offset = it->first.second;
    }
    link(prev, edge.v, edge.length - prev_offset);
  }

  auto data = std::make_shared<std::vector<double>>(n * n, 0.0);
  auto dijkstra = [&](std::size_t source) {
    double* dist = data->data() + source * n;
    std::fill(dist, dist + n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        if (d + w < dist[v]) {
          dist[v] = d + w;
          heap.emplace(dist[v], v);
        }
      }
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(detail::resolve_threads(threads), static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t s = 0; s < n; ++s) dijkstra(s);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < n; s += workers) dijkstra(s);
      });
    }
  }
  // Both directions are computed independently; force exact symmetry.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = std::min((*data)[a * n + b], (*data)[b * n + a]);
      (*data)[a * n + b] = (*data)[b * n + a] = d;
    }
  }

  DistanceMatrixView view;
  view.n_ = n;
  view.vertex_count_ = nv;
  view.data_ = std::move(data);
  view.points_ = std::move(nodes);
  view.edge_rows_ = std::move(edge_rows);
  return view;
}

NetPoint project_to_network(const std::array<double, 2>& xy, const Network& net) {
  if (!net.has_coordinates()) throw DomainError("projection needs vertex coordinates");
  if (net.edge_count() == 0) {
    if (net.vertex_count() == 0) throw DomainError("projection onto an empty network");
    return NetPoint::at_vertex(0);
  }
  double best = std::numeric_limits<double>::infinity();
  NetPoint result;
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const auto& edge = net.edge(e);
    const auto a = net.coordinates(edge.u), b = net.coordinates(edge.v);
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((xy[0] - a[0]) * dx + (xy[1] - a[1]) * dy) / len2, 0.0, 1.0);
    const double px = a[0] + t * dx - xy[0], py = a[1] + t * dy - xy[1];
    const double d2 = px * px + py * py;
    if (d2 < best) {
      best = d2;
      result = NetPoint::on_edge(static_cast<std::int64_t>(e), t * edge.length);
    }
  }
  return net.canonical(result);
}

std::size_t NetworkSpace::row(const Location& x) const {
  const auto* a = std::get_if<NetPoint>(&x);
  if (a == nullptr) throw DomainError("network space given a Euclidean location");
  if (const auto r = dist_.row_of(*a)) return *r;
  return dist_.require_row(net_->canonical(*a));
}

double NetworkSpace::distance(const Location& x, const Location& y) const {
  return dist_(row(x), row(y));
}

void NetworkSpace::check_location(const Location& x) const { row(x); }

void NetworkSpace::check_order(double order) const {
  if (order != 1.0) {
    throw UnsupportedConfiguration("network centers are only available for p = 1");
  }
}

Location NetworkSpace::cluster_center(std::span<const Location> points,
                                      std::span<const double> weights, double order,
                                      const Location* incumbent, Rng& rng) const {
  check_order(order);
  std::vector<NetPoint> cluster;
  cluster.reserve(points.size());
  for (const auto& x : points) cluster.push_back(std::get<NetPoint>(x));
  const NetPoint z = network_median_center(cluster, weights, dist_, rng);
  if (incumbent != nullptr) {
    const double current = cluster_cost(*this, points, weights, *incumbent, 1.0);
    if (current < cluster_cost(*this, points, weights, Location(z), 1.0)) return *incumbent;
  }
  return z;
}

}  // namespace ppbary
