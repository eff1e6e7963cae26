#include "ppbary/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "ppbary/core.hpp"

namespace ppbary {

CostMatrix::CostMatrix(std::size_t n, std::vector<double> costs)
    : n_(n), costs_(std::move(costs)), quantized_(costs_.size(), 0) {
  if (costs_.size() != n_ * n_) throw DomainError("cost matrix must be n x n");
  for (double c : costs_) {
    if (!std::isfinite(c)) throw DomainError("cost matrix entries must be finite");
  }
  if (costs_.empty()) return;
  const auto [lo, hi] = std::minmax_element(costs_.begin(), costs_.end());
  const double min = *lo, range = *hi - *lo;
  if (range <= 0.0) return;
  const double scale = static_cast<double>(kQuantizationRange) / range;
  for (std::size_t k = 0; k < costs_.size(); ++k) {
    const double q = std::round((costs_[k] - min) * scale);
    quantized_[k] = std::clamp(static_cast<std::int64_t>(q), std::int64_t{0}, kQuantizationRange);
  }
}

double CostMatrix::real_cost(std::span<const std::size_t> perm) const {
  double total = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) total += (*this)(i, perm[i]);
  return total;
}

std::int64_t CostMatrix::quantized_cost(std::span<const std::size_t> perm) const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) total += quantized(i, perm[i]);
  return total;
}

namespace {

// O(n^3) shortest augmenting path with potentials; 1-based internally.
template <typename T, typename Cost>
std::vector<std::size_t> hungarian(std::size_t n, Cost cost) {
  const T inf = std::numeric_limits<T>::max() / 4;
  std::vector<T> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      T delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const T cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 1; j <= n; ++j) perm[match[j] - 1] = j - 1;
  return perm;
}

Assignment finish(const CostMatrix& costs, std::vector<std::size_t> perm) {
  Assignment a;
  a.total_cost = costs.real_cost(perm);
  a.quantized_cost = costs.quantized_cost(perm);
  a.permutation = std::move(perm);
  return a;
}

}  // namespace

Assignment solve_exact(const CostMatrix& costs) {
  const std::size_t n = costs.size();
  return finish(costs, hungarian<double>(n, [&](std::size_t i, std::size_t j) { return costs(i, j); }));
}

Assignment solve_exact_quantized(const CostMatrix& costs) {
  const std::size_t n = costs.size();
  return finish(costs, hungarian<std::int64_t>(
                           n, [&](std::size_t i, std::size_t j) { return costs.quantized(i, j); }));
}

AuctionResult solve_auction(const CostMatrix& costs, std::span<const double> eps_schedule,
                            const AuctionState* warm_start) {
  if (eps_schedule.empty()) throw DomainError("auction needs a nonempty epsilon schedule");
  for (std::size_t s = 0; s < eps_schedule.size(); ++s) {
    if (!(eps_schedule[s] > 0.0)) throw DomainError("epsilon values must be positive");
    if (s > 0 && eps_schedule[s] > eps_schedule[s - 1]) {
      throw DomainError("epsilon schedule must be non-increasing");
    }
  }
  const std::size_t n = costs.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::vector<double> prices(n, 0.0);
  if (warm_start != nullptr && !warm_start->prices.empty()) {
    if (warm_start->prices.size() != n) throw DomainError("warm start dimension mismatch");
    // A common shift leaves all bids unchanged; it keeps prices small.
    const double lo = *std::min_element(warm_start->prices.begin(), warm_start->prices.end());
    for (std::size_t j = 0; j < n; ++j) prices[j] = warm_start->prices[j] - lo;
  }

  std::vector<std::size_t> row_to_col(n, kNone), col_to_row(n, kNone);
  std::deque<std::size_t> unassigned;
  for (double eps : eps_schedule) {
    std::fill(row_to_col.begin(), row_to_col.end(), kNone);
    std::fill(col_to_row.begin(), col_to_row.end(), kNone);
    unassigned.clear();
    for (std::size_t i = 0; i < n; ++i) unassigned.push_back(i);

    while (!unassigned.empty()) {
      const std::size_t i = unassigned.front();
      unassigned.pop_front();
      // Benefit of column j for row i is -cost - price; strict comparisons
      // keep the lowest index among ties.
      double best = -std::numeric_limits<double>::infinity();
      double second = best;
      std::size_t best_j = 0;
      const auto row = costs.quantized().subspan(i * n, n);
      for (std::size_t j = 0; j < n; ++j) {
        const double value = -static_cast<double>(row[j]) - prices[j];
        if (value > best) {
          second = best;
          best = value;
          best_j = j;
        } else if (value > second) {
          second = value;
        }
      }
      if (n == 1) second = best;
      prices[best_j] += best - second + eps;
      const std::size_t previous = col_to_row[best_j];
      if (previous != kNone) {
        row_to_col[previous] = kNone;
        unassigned.push_back(previous);
      }
      col_to_row[best_j] = i;
      row_to_col[i] = best_j;
    }
  }

  AuctionResult result;
  result.certified_optimal = eps_schedule.back() < 1.0 / static_cast<double>(n == 0 ? 1 : n);
  result.state.profits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = row_to_col[i];
    result.state.profits[i] = -static_cast<double>(costs.quantized(i, j)) - prices[j];
  }
  result.state.prices = std::move(prices);
  result.state.assignment = row_to_col;
  result.state.epsilon = eps_schedule.back();
  result.assignment = finish(costs, std::move(row_to_col));
  return result;
}

std::vector<double> default_eps_schedule(std::size_t n) {
  if (n == 0) throw DomainError("schedule needs n >= 1");
  // Smallest l with 10^(l-1) >= 1e7 (n+1), evaluated in integers.
  const double denom = static_cast<double>(n + 1);
  std::size_t l = 1;
  long double top = 1.0L;
  while (top < 1e7L * static_cast<long double>(n + 1)) {
    top *= 10.0L;
    ++l;
  }
  std::vector<double> eps(l);
  for (std::size_t i = 0; i < l; ++i) {
    eps[i] = std::pow(10.0, static_cast<double>(l - 1 - i)) / denom;
  }
  return eps;
}

}  // namespace ppbary
