#pragma once

#include <span>
#include <vector>

#include "ppbary/core.hpp"
#include "ppbary/network.hpp"

namespace ppbary {

/// Weighted coordinatewise mean. Empty `weights` means unit weights.
Coords euclid_mean_center(std::span<const Coords> points, std::span<const double> weights = {});

struct WeiszfeldOptions {
  double tol = 1e-8;
  int max_iter = 1000;
};

/// Approximate geometric median (minimizer of sum_i w_i |x_i - z|).
///
/// Starts from the weighted mean and iterates the Weiszfeld map until the
/// step is below `tol`. When an iterate lands on a data point the
/// subgradient condition decides whether that point is optimal; if not, the
/// Vardi-Zhang modified step moves off it. Returns the best iterate seen.
Coords weiszfeld_median(std::span<const Coords> points, std::span<const double> weights = {},
                        WeiszfeldOptions options = {});

/// All minimizers of sum_i w_i d(x_i, z) over z in V ∪ cluster, in row order.
std::vector<NetPoint> network_median_candidates(std::span<const NetPoint> cluster,
                                                std::span<const double> weights,
                                                const DistanceMatrixView& dist);

/// A minimizer over V ∪ cluster; ties are broken uniformly with `rng`.
NetPoint network_median_center(std::span<const NetPoint> cluster, std::span<const double> weights,
                               const DistanceMatrixView& dist, Rng& rng);

/// R^D with the Euclidean metric. Centers: mean for p = 2, Weiszfeld for p = 1.
class EuclideanSpace : public GroundSpace {
 public:
  explicit EuclideanSpace(std::size_t dim = 2, WeiszfeldOptions weiszfeld = {})
      : dim_(dim), weiszfeld_(weiszfeld) {}

  double distance(const Location& x, const Location& y) const override;
  double distance_pow(const Location& x, const Location& y, double p) const override;
  Location cluster_center(std::span<const Location> points, std::span<const double> weights,
                          double order, const Location* incumbent, Rng& rng) const override;
  void check_location(const Location& x) const override;
  void check_order(double order) const override;

  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
  WeiszfeldOptions weiszfeld_;
};

}  // namespace ppbary
