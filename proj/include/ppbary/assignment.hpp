#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ppbary {

/// Upper end of the integer range costs are rescaled into.
inline constexpr std::int64_t kQuantizationRange = 1'000'000'000;

/// Square cost matrix (row-major) together with its integer rescaling
/// round((c - min) / (max - min) * 1e9); a constant matrix quantizes to zero.
class CostMatrix {
 public:
  CostMatrix(std::size_t n, std::vector<double> costs);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return costs_[i * n_ + j]; }
  std::int64_t quantized(std::size_t i, std::size_t j) const { return quantized_[i * n_ + j]; }
  std::span<const double> costs() const { return costs_; }
  std::span<const std::int64_t> quantized() const { return quantized_; }

  double real_cost(std::span<const std::size_t> perm) const;
  std::int64_t quantized_cost(std::span<const std::size_t> perm) const;

 private:
  std::size_t n_;
  std::vector<double> costs_;
  std::vector<std::int64_t> quantized_;
};

/// permutation[i] is the column assigned to row i.
struct Assignment {
  std::vector<std::size_t> permutation;
  double total_cost = 0.0;
  std::int64_t quantized_cost = 0;
};

/// Hungarian method on the real costs.
Assignment solve_exact(const CostMatrix& costs);
/// Hungarian method on the quantized costs.
Assignment solve_exact_quantized(const CostMatrix& costs);

/// Auction prices (one per column) and profits (one per row), kept between
/// calls to warm-start the next solve.
struct AuctionState {
  std::vector<double> prices;
  std::vector<double> profits;
  std::vector<std::size_t> assignment;
  double epsilon = 0.0;
};

struct AuctionResult {
  Assignment assignment;
  AuctionState state;
  /// True iff the last epsilon is below 1/n, which makes the quantized cost optimal.
  bool certified_optimal = false;
};

/// Forward auction with epsilon scaling on the quantized costs. Each phase
/// restarts from an empty assignment and keeps the prices of the previous one.
AuctionResult solve_auction(const CostMatrix& costs, std::span<const double> eps_schedule,
                            const AuctionState* warm_start = nullptr);

/// eps_i = 10^(l-i) / (n+1) with l the smallest length putting eps_1 in [1e7, 1e8).
std::vector<double> default_eps_schedule(std::size_t n);

}  // namespace ppbary
