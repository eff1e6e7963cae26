#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ppbary/core.hpp"

namespace ppbary {

/// One pair of the optimal matching; an empty side means the point was
/// deleted (left side) or added (right side).
using MatchPair = std::pair<std::optional<std::size_t>, std::optional<std::size_t>>;

struct DistanceResult {
  double value = 0.0;
  std::vector<MatchPair> matching;
  Params params;
};

/// Transport-transform distance. The smaller pattern is padded with ℵ and the
/// d'^p assignment problem is solved exactly.
DistanceResult tt_distance(const GroundSpace& space, const PointPattern& xi,
                           const PointPattern& eta, const Params& params);

/// TT distance divided by max(|xi|, |eta|)^(1/p); zero for two empty patterns.
DistanceResult rtt_distance(const GroundSpace& space, const PointPattern& xi,
                            const PointPattern& eta, const Params& params);

/// Exhaustive minimum over all partial matchings. Test oracle, sizes <= 8.
DistanceResult tt_distance_bruteforce(const GroundSpace& space, const PointPattern& xi,
                                      const PointPattern& eta, const Params& params);

/// OSPA: ((n-m) C^p + min_pi sum_i d(x_i, y_pi(i))^p) / n, to the power 1/p,
/// with m <= n. When `truncate` is set, d is replaced by min(d, C).
double ospa_distance(const GroundSpace& space, const PointPattern& xi, const PointPattern& eta,
                     const Params& params, bool truncate = false);

/// Spike-time distance (p = 1) with add, delete and move penalties.
double spike_time_distance(const GroundSpace& space, const PointPattern& xi,
                           const PointPattern& eta, double add_penalty, double delete_penalty,
                           double move_scale = 1.0);

}  // namespace ppbary
