#pragma once

#include <array>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppbary/core.hpp"

namespace ppbary {

/// Undirected, edge-weighted simple graph with optional planar coordinates.
class Network {
 public:
  struct Edge {
    std::size_t u;
    std::size_t v;
    double length;
  };

  Network() = default;

  /// Returns the index of the vertex named `name`, creating it if needed.
  std::size_t add_vertex(const std::string& name);
  /// Adds an edge; a parallel edge only lowers the existing length and
  /// self-loops are ignored. Returns the edge id.
  std::optional<std::size_t> add_edge(std::size_t u, std::size_t v, double length);
  void set_coordinates(std::size_t v, double x, double y);

  std::size_t vertex_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& vertex_name(std::size_t v) const { return names_.at(v); }
  std::optional<std::size_t> find_vertex(const std::string& name) const;

  bool has_coordinates() const;
  std::array<double, 2> coordinates(std::size_t v) const;
  /// Planar position of a network point, interpolated along its edge.
  std::array<double, 2> coordinates(const NetPoint& x) const;

  /// Validates x and maps edge endpoints (offset 0 or length) to vertices.
  /// Throws DomainError for points off the network.
  NetPoint canonical(const NetPoint& x) const;

  bool connected() const;

  /// "u v length" lines; '#' starts a comment.
  static Network read_edge_list(std::istream& edges);
  /// "id x y" lines for vertices already present in the network.
  void read_coordinates(std::istream& coords);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index_;
  std::vector<std::optional<std::array<double, 2>>> coords_;
};

/// Shortest-path distances over the vertices plus all inserted data points.
/// Rows [0, V) are the vertices; identical points share a row. Immutable and
/// cheap to copy.
class DistanceMatrixView {
 public:
  DistanceMatrixView() = default;

  std::size_t size() const { return n_; }
  std::size_t vertex_count() const { return vertex_count_; }
  double operator()(std::size_t a, std::size_t b) const { return (*data_)[a * n_ + b]; }
  std::span<const double> row(std::size_t a) const {
    return std::span<const double>(*data_).subspan(a * n_, n_);
  }
  std::optional<std::size_t> row_of(const NetPoint& x) const;
  /// Throws DomainError when x has no row.
  std::size_t require_row(const NetPoint& x) const;
  const NetPoint& point_at(std::size_t row) const { return (*points_)[row]; }

 private:
  friend DistanceMatrixView build_distance_matrix(const Network&, const std::vector<NetPoint>&,
                                                  unsigned);
  std::size_t n_ = 0;
  std::size_t vertex_count_ = 0;
  std::shared_ptr<const std::vector<double>> data_;
  std::shared_ptr<const std::vector<NetPoint>> points_;
  std::shared_ptr<const std::map<std::pair<std::int64_t, double>, std::size_t>> edge_rows_;
};

/// Exact shortest-path distances among all vertices and the given points,
/// by Dijkstra from every node. Points on an edge split it. Throws
/// DomainError for a disconnected graph or a point off the network.
DistanceMatrixView build_distance_matrix(const Network& net, const std::vector<NetPoint>& points,
                                         unsigned threads = 1);

/// Nearest point (Euclidean) on any edge segment; ties go to the lowest edge id.
NetPoint project_to_network(const std::array<double, 2>& xy, const Network& net);

/// Ground space for p = 1 on a network, backed by a precomputed matrix.
class NetworkSpace : public GroundSpace {
 public:
  NetworkSpace(std::shared_ptr<const Network> net, DistanceMatrixView dist)
      : net_(std::move(net)), dist_(std::move(dist)) {}

  double distance(const Location& x, const Location& y) const override;
  Location cluster_center(std::span<const Location> points, std::span<const double> weights,
                          double order, const Location* incumbent, Rng& rng) const override;
  void check_location(const Location& x) const override;
  void check_order(double order) const override;

  const Network& network() const { return *net_; }
  const DistanceMatrixView& matrix() const { return dist_; }
  /// Matrix row of x; accepts non-canonical edge endpoints.
  std::size_t row(const Location& x) const;

 private:
  std::shared_ptr<const Network> net_;
  DistanceMatrixView dist_;
};

}  // namespace ppbary
