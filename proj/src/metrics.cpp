#include "ppbary/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppbary/assignment.hpp"

namespace ppbary {

namespace {

double root(double value, double p) {
  if (p == 1.0) return value;
  if (p == 2.0) return std::sqrt(value);
  return std::pow(value, 1.0 / p);
}

void check_patterns(const GroundSpace& space, const PointPattern& xi, const PointPattern& eta) {
  for (const auto& x : xi) space.check_location(x);
  for (const auto& y : eta) space.check_location(y);
}

}  // namespace

DistanceResult tt_distance(const GroundSpace& space, const PointPattern& xi,
                           const PointPattern& eta, const Params& params) {
  check_patterns(space, xi, eta);
  const ExtendedDistance dprime(space, params);
  DistanceResult result;
  result.params = params;
  const std::size_t n = std::max(xi.size(), eta.size());
  if (n == 0) return result;

  std::vector<double> costs(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Location* x = i < xi.size() ? &xi[i] : nullptr;
    for (std::size_t j = 0; j < n; ++j) {
      const Location* y = j < eta.size() ? &eta[j] : nullptr;
      costs[i * n + j] = dprime.pow(x, y);
    }
  }
  const CostMatrix matrix(n, costs);
  const Assignment best = solve_exact(matrix);
  // Summing the matched costs in sorted order makes the value independent of
  // argument order.
  std::vector<double> matched(n);
  for (std::size_t i = 0; i < n; ++i) matched[i] = costs[i * n + best.permutation[i]];
  std::sort(matched.begin(), matched.end());
  double total = 0.0;
  for (double c : matched) total += c;
  result.value = root(total, params.order);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = best.permutation[i];
    MatchPair pair;
    if (i < xi.size()) pair.first = i;
    if (j < eta.size()) pair.second = j;
    if (pair.first || pair.second) result.matching.push_back(pair);
  }
  return result;
}

DistanceResult rtt_distance(const GroundSpace& space, const PointPattern& xi,
                            const PointPattern& eta, const Params& params) {
  DistanceResult result = tt_distance(space, xi, eta, params);
  const std::size_t n = std::max(xi.size(), eta.size());
  if (n > 0) result.value /= root(static_cast<double>(n), params.order);
  return result;
}

DistanceResult tt_distance_bruteforce(const GroundSpace& space, const PointPattern& xi,
                                      const PointPattern& eta, const Params& params) {
  params.validate();
  check_patterns(space, xi, eta);
  if (xi.size() > 8 || eta.size() > 8) throw DomainError("brute force limited to 8 points per pattern");
  const double p = params.order;
  const double delete_pow = std::pow(params.delete_cost(), p);
  const double add_pow = std::pow(params.add_cost(), p);

  std::vector<double> dist(xi.size() * eta.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (std::size_t j = 0; j < eta.size(); ++j) {
      dist[i * eta.size() + j] = space.distance_pow(xi[i], eta[j], p);
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::optional<std::size_t>> partner(xi.size()), best_partner;
  std::vector<bool> used(eta.size(), false);
  // Each point of xi is either deleted or matched to an unused point of eta;
  // the unmatched points of eta are added at the end.
  auto recurse = [&](auto&& self, std::size_t i, std::size_t matched, double acc) -> void {
    if (i == xi.size()) {
      const double total = acc + static_cast<double>(eta.size() - matched) * add_pow;
      if (total < best) {
        best = total;
        best_partner = partner;
      }
      return;
    }
    partner[i].reset();
    self(self, i + 1, matched, acc + delete_pow);
    for (std::size_t j = 0; j < eta.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      partner[i] = j;
      self(self, i + 1, matched + 1, acc + dist[i * eta.size() + j]);
      used[j] = false;
    }
    partner[i].reset();
  };
  recurse(recurse, 0, 0, 0.0);

  DistanceResult result;
  result.params = params;
  result.value = root(best, p);
  std::vector<bool> hit(eta.size(), false);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    result.matching.emplace_back(i, best_partner[i]);
    if (best_partner[i]) hit[*best_partner[i]] = true;
  }
  for (std::size_t j = 0; j < eta.size(); ++j) {
    if (!hit[j]) result.matching.emplace_back(std::nullopt, j);
  }
  return result;
}

double ospa_distance(const GroundSpace& space, const PointPattern& xi, const PointPattern& eta,
                     const Params& params, bool truncate) {
  params.validate();
  check_patterns(space, xi, eta);
  const PointPattern& small = xi.size() <= eta.size() ? xi : eta;
  const PointPattern& large = xi.size() <= eta.size() ? eta : xi;
  const std::size_t m = small.size(), n = large.size();
  if (n == 0) return 0.0;
  const double p = params.order;
  const double cp = std::pow(params.penalty, p);

  // Rows beyond m are dummies at zero cost; the (n - m) C^p term is added separately.
  std::vector<double> costs(n * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double c = space.distance_pow(small[i], large[j], p);
      if (truncate) c = std::min(c, cp);
      costs[i * n + j] = c;
    }
  }
  const Assignment best = solve_exact(CostMatrix(n, std::move(costs)));
  const double total = static_cast<double>(n - m) * cp + best.total_cost;
  return root(total / static_cast<double>(n), p);
}

double spike_time_distance(const GroundSpace& space, const PointPattern& xi,
                           const PointPattern& eta, double add_penalty, double delete_penalty,
                           double move_scale) {
  if (!(add_penalty > 0.0) || !(delete_penalty > 0.0)) {
    throw DomainError("spike time penalties must be positive");
  }
  if (!(move_scale > 0.0)) throw DomainError("move scale must be positive");
  Params params;
  params.order = 1.0;
  params.penalty = std::max(add_penalty, delete_penalty) / move_scale;
  params.add_penalty = add_penalty / move_scale;
  params.delete_penalty = delete_penalty / move_scale;
  return move_scale * tt_distance(space, xi, eta, params).value;
}

}  // namespace ppbary
