#include "ppbary/location.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace ppbary {

namespace {

double weight_at(std::span<const double> weights, std::size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

double norm(const Coords& a, const Coords& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

double median_objective(std::span<const Coords> points, std::span<const double> weights,
                        const Coords& z) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += weight_at(weights, i) * norm(points[i], z);
  return total;
}

// Norm of the summed weighted unit vectors from z towards all points not at z,
// and the weight sitting at z. z is optimal iff the former is <= the latter.
std::pair<double, double> subgradient_at(std::span<const Coords> points,
                                         std::span<const double> weights, const Coords& z,
                                         double snap) {
  Coords r(z.size(), 0.0);
  double at_z = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = norm(points[i], z);
    const double w = weight_at(weights, i);
    if (d <= snap) {
      at_z += w;
      continue;
    }
    for (std::size_t k = 0; k < z.size(); ++k) r[k] += w * (points[i][k] - z[k]) / d;
  }
  double rn = 0.0;
  for (double v : r) rn += v * v;
  return {std::sqrt(rn), at_z};
}

void check_nonempty(std::span<const Coords> points, std::span<const double> weights) {
  if (points.empty()) throw DomainError("center of an empty point set");
  if (!weights.empty() && weights.size() != points.size()) {
    throw DomainError("weights and points differ in length");
  }
  for (const auto& x : points) {
    if (x.size() != points.front().size()) throw DomainError("points differ in dimension");
  }
}

}  // namespace

Coords euclid_mean_center(std::span<const Coords> points, std::span<const double> weights) {
  check_nonempty(points, weights);
  Coords z(points.front().size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weight_at(weights, i);
    total += w;
    for (std::size_t d = 0; d < z.size(); ++d) z[d] += w * points[i][d];
  }
  for (double& v : z) v /= total;
  return z;
}

Coords weiszfeld_median(std::span<const Coords> points, std::span<const double> weights,
                        WeiszfeldOptions options) {
  check_nonempty(points, weights);
  if (!(options.tol > 0.0)) throw DomainError("Weiszfeld tolerance must be positive");
  const double snap = options.tol * 1e-3;
  const std::size_t dim = points.front().size();

  Coords z = euclid_mean_center(points, weights);
  Coords best = z;
  double best_obj = median_objective(points, weights, z);

  for (int it = 0; it < options.max_iter; ++it) {
    // The nearest data point is tested for optimality directly; convergence
    // onto a data point is otherwise very slow.
    std::size_t nearest = 0;
    double nearest_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = norm(points[i], z);
      if (d < nearest_d) {
        nearest_d = d;
        nearest = i;
      }
    }
    {
      const auto [r, at] = subgradient_at(points, weights, points[nearest], snap);
      if (r <= at) return points[nearest];
    }

    Coords num(dim, 0.0), grad(dim, 0.0);
    double denom = 0.0, at_z = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = norm(points[i], z);
      const double w = weight_at(weights, i);
      if (d <= snap) {
        at_z += w;
        continue;
      }
      denom += w / d;
      for (std::size_t k = 0; k < dim; ++k) {
        num[k] += w * points[i][k] / d;
        grad[k] += w * (points[i][k] - z[k]) / d;
      }
    }
    if (denom == 0.0) break;
    Coords next(dim);
    for (std::size_t k = 0; k < dim; ++k) next[k] = num[k] / denom;
    if (at_z > 0.0) {
      double rn = 0.0;
      for (double v : grad) rn += v * v;
      rn = std::sqrt(rn);
      const double keep = std::min(1.0, at_z / rn);
      for (std::size_t k = 0; k < dim; ++k) next[k] = (1.0 - keep) * next[k] + keep * z[k];
    }

    const double obj = median_objective(points, weights, next);
    assert(obj <= best_obj + 1e-9 * (1.0 + best_obj));
    const double step = norm(next, z);
    z = std::move(next);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
    if (step < options.tol) break;
  }
  return best;
}

std::vector<NetPoint> network_median_candidates(std::span<const NetPoint> cluster,
                                                std::span<const double> weights,
                                                const DistanceMatrixView& dist) {
  if (cluster.empty()) throw DomainError("center of an empty cluster");
  if (!weights.empty() && weights.size() != cluster.size()) {
    throw DomainError("weights and points differ in length");
  }
  std::vector<std::size_t> rows;
  rows.reserve(cluster.size());
  for (const auto& x : cluster) rows.push_back(dist.require_row(x));

  std::vector<std::size_t> candidates(dist.vertex_count());
  for (std::size_t v = 0; v < candidates.size(); ++v) candidates[v] = v;
  for (std::size_t r : rows) {
    if (r >= dist.vertex_count()) candidates.push_back(r);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<double> sums(candidates.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = dist.row(rows[i]);
    const double w = weight_at(weights, i);
    for (std::size_t c = 0; c < candidates.size(); ++c) sums[c] += w * row[candidates[c]];
  }
  const double best = *std::min_element(sums.begin(), sums.end());
  // Sums of the same distances in different order may differ in the last bits.
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  std::vector<NetPoint> result;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (sums[c] <= best + tol) result.push_back(dist.point_at(candidates[c]));
  }
  return result;
}

NetPoint network_median_center(std::span<const NetPoint> cluster, std::span<const double> weights,
                               const DistanceMatrixView& dist, Rng& rng) {
  const auto ties = network_median_candidates(cluster, weights, dist);
  if (ties.size() == 1) return ties.front();
  return ties[rng.uniform_index(ties.size())];
}

double EuclideanSpace::distance(const Location& x, const Location& y) const {
  return std::sqrt(distance_pow(x, y, 2.0));
}

double EuclideanSpace::distance_pow(const Location& x, const Location& y, double p) const {
  const auto* a = std::get_if<Coords>(&x);
  const auto* b = std::get_if<Coords>(&y);
  if (a == nullptr || b == nullptr) throw DomainError("Euclidean space given a network location");
  if (a->size() != b->size()) throw DomainError("points differ in dimension");
  double s = 0.0;
  for (std::size_t d = 0; d < a->size(); ++d) {
    const double t = (*a)[d] - (*b)[d];
    s += t * t;
  }
  if (p == 2.0) return s;
  if (p == 1.0) return std::sqrt(s);
  return std::pow(s, p / 2.0);
}

void EuclideanSpace::check_location(const Location& x) const {
  const auto* a = std::get_if<Coords>(&x);
  if (a == nullptr) throw DomainError("Euclidean space given a network location");
  if (a->size() != dim_) {
    throw DomainError("expected " + std::to_string(dim_) + " coordinates, got " +
                      std::to_string(a->size()));
  }
  for (double v : *a) {
    if (!std::isfinite(v)) throw DomainError("coordinates must be finite");
  }
}

void EuclideanSpace::check_order(double order) const {
  if (order != 1.0 && order != 2.0) {
    throw UnsupportedConfiguration("Euclidean centers are only available for p = 1 and p = 2");
  }
}

Location EuclideanSpace::cluster_center(std::span<const Location> points,
                                        std::span<const double> weights, double order,
                                        const Location* incumbent, Rng&) const {
  check_order(order);
  std::vector<Coords> coords;
  coords.reserve(points.size());
  for (const auto& x : points) coords.push_back(std::get<Coords>(x));
  Location z = order == 2.0 ? euclid_mean_center(coords, weights)
                            : weiszfeld_median(coords, weights, weiszfeld_);
  if (incumbent != nullptr &&
      cluster_cost(*this, points, weights, *incumbent, order) <
          cluster_cost(*this, points, weights, z, order)) {
    return *incumbent;
  }
  return z;
}

}  // namespace ppbary
