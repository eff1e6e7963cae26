#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ppbary/assignment.hpp"
#include "ppbary/core.hpp"

namespace ppbary {

class NetworkSpace;

/// Quality of the match between a center and the data point assigned to it.
enum class MatchState : std::uint8_t {
  happy,      // both real and closer than the truncation threshold
  miserable,  // real point at the threshold, or real point matched to ℵ
  to_aleph,   // the data point is ℵ
};

/// Data patterns, ground space and penalty for one barycenter problem.
/// Weights multiply the per-pattern costs (all 1 unless given).
class BarycenterProblem {
 public:
  BarycenterProblem(const GroundSpace& space, Params params, std::vector<PointPattern> patterns,
                    std::vector<double> weights = {});

  const GroundSpace& space() const { return *space_; }
  const Params& params() const { return dprime_.params(); }
  const ExtendedDistance& dprime() const { return dprime_; }
  double penalty_pow() const { return penalty_pow_; }

  std::size_t pattern_count() const { return patterns_.size(); }
  const PointPattern& pattern(std::size_t j) const { return patterns_[j]; }
  const std::vector<PointPattern>& patterns() const { return patterns_; }
  double weight(std::size_t j) const { return weights_[j]; }
  double total_weight() const { return total_weight_; }
  std::size_t max_cardinality() const;
  double mean_cardinality() const;

  /// Point `idx` of pattern j after padding; nullptr stands for ℵ.
  const Location* point(std::size_t j, std::size_t idx) const {
    return idx < patterns_[j].size() ? &patterns_[j][idx] : nullptr;
  }

 private:
  const GroundSpace* space_;
  ExtendedDistance dprime_;
  std::vector<PointPattern> patterns_;
  std::vector<double> weights_;
  double total_weight_ = 0.0;
  double penalty_pow_ = 0.0;
};

/// Centers z_1..z_n, the matchings and the per-pattern auction warm starts.
struct BarycenterState {
  std::vector<CenterSlot> centers;
  /// perm[j][i]: padded index of the point of pattern j matched to center i.
  std::vector<std::vector<std::size_t>> perm;
  /// match[j][i]: state of the pair (z_i, perm[j][i]).
  std::vector<std::vector<MatchState>> match;
  std::vector<AuctionState> auction;
  double cost = 0.0;

  std::size_t slots() const { return centers.size(); }
};

/// Pads everything to n = max(n_slots, max_j |xi_j|, |start|) slots, places
/// the start points in the first slots and matches by index.
BarycenterState make_state(const BarycenterProblem& problem, const PointPattern& start,
                           std::size_t n_slots = 0);

/// sum_j w_j sum_i d'(x_{perm_j(i), j}, z_i)^p recomputed from scratch.
double objective(const BarycenterProblem& problem, const BarycenterState& state);
void refresh_match_state(const BarycenterProblem& problem, BarycenterState& state);
/// Checks permutation validity, cost and match-state consistency. Returns an
/// empty string when all hold.
std::string check_state(const BarycenterProblem& problem, const BarycenterState& state);

struct PermOutcome {
  double cost = 0.0;
  bool certified = false;
};

/// Optimal matching of the centers with every pattern, by auction on the
/// d'^p matrix. With `keep_incumbent` a column whose current matching is at
/// least as cheap (on the real costs) is left unchanged.
PermOutcome optim_perm(const BarycenterProblem& problem, BarycenterState& state,
                       std::span<const double> eps_schedule, bool warm = true,
                       bool keep_incumbent = true, unsigned threads = 1);

/// Recenters every real center on its happy points. Returns how many moved.
std::size_t optim_bary(const BarycenterProblem& problem, BarycenterState& state, Rng& rng);

/// Moves centers to ℵ where that lowers their cluster cost. Returns the count.
std::size_t optim_delete(const BarycenterProblem& problem, BarycenterState& state);

/// Tries to bring ℵ-centers back to a location drawn from the miserable
/// points, after gathering the nearest miserable point of every pattern into
/// the cluster. Returns the number of centers added.
std::size_t optim_add(const BarycenterProblem& problem, BarycenterState& state, Rng& rng);

/// floor(2 / (k + 1) * sum_j |xi_j|): no barycenter needs more points.
std::size_t cardinality_upper_bound(std::span<const PointPattern> patterns);

enum class Algorithm { original, improved };

struct FitOptions {
  /// Stop once an iteration lowers the cost by less than this. Values <= 0
  /// select 1e-10 * (initial cost + 1).
  double delta = 0.0;
  int max_iter = 200;
  /// Iterations with delete/add steps in the improved variant.
  int del_add_iterations = 5;
  /// Working slot count; raised to max_j |xi_j| and |start| if smaller.
  std::size_t n_slots = 0;
  bool keep_incumbent_matching = true;
  unsigned threads = 1;
};

struct FitReport {
  PointPattern barycenter;
  /// Objective of the final (certified) matching.
  double objective = 0.0;
  int iterations = 0;
  /// Cost after the initial matching and after every iteration.
  std::vector<double> trace;
  std::vector<bool> trace_certified;
  std::vector<std::size_t> deleted;
  std::vector<std::size_t> added;
  bool converged = false;
  std::string warning;
  BarycenterState state;
};

/// Alternates matching, recentering, deletion and addition until the cost
/// decrease falls below delta or max_iter iterations ran.
FitReport kmeans_bary(const BarycenterProblem& problem, const PointPattern& start,
                      const FitOptions& options, Rng& rng);

/// Cheaper variant: delete/add only in the first iterations, and truncated
/// epsilon schedules that lengthen as the fit settles. Only a certified
/// matching may end the loop.
FitReport kmeans_bary_improved(const BarycenterProblem& problem, const PointPattern& start,
                               const FitOptions& options, Rng& rng);

FitReport fit(const BarycenterProblem& problem, const PointPattern& start, Algorithm algorithm,
              const FitOptions& options, Rng& rng);

/// Index ranges (1-based, inclusive) into the default schedule of length l
/// used by successive stages of the improved variant.
std::vector<std::pair<std::size_t, std::size_t>> improved_eps_stages(std::size_t l);

/// Uniform points in an axis-aligned box; cardinality 0 means the rounded
/// mean pattern size.
struct UniformWindow {
  Coords lower;
  Coords upper;
  std::size_t cardinality = 0;
};

/// Uniform draws (with replacement) from a candidate set.
struct CandidateSet {
  std::vector<Location> candidates;
  std::size_t cardinality = 0;
};

/// Starts supplied by the caller; n_starts is ignored.
struct FixedStarts {
  std::vector<PointPattern> starts;
};

using StartPolicy = std::variant<UniformWindow, CandidateSet, FixedStarts>;

PointPattern draw_start(const BarycenterProblem& problem, const StartPolicy& policy, Rng& rng);

struct RestartReport {
  FitReport best;
  std::size_t best_index = 0;
  std::vector<double> objectives;
  /// (max - min) / min over the objectives.
  double deviation = 0.0;
  double seconds = 0.0;
};

/// Runs the chosen algorithm from n_starts starts. Restart r uses the
/// stream rng.split(r), so results do not depend on `options.threads`.
RestartReport fit_with_restarts(const BarycenterProblem& problem, std::size_t n_starts,
                                const StartPolicy& policy, Algorithm algorithm,
                                const FitOptions& options, const Rng& rng);

/// (max(values) - reference) / reference; 0 when both are 0.
double relative_deviation(std::span<const double> values, double reference);

/// Replaces every center with several optimal locations on its happy points
/// by the projection of their mean coordinates back onto the network.
PointPattern average_tied_centers(const BarycenterProblem& problem, const BarycenterState& state,
                                  const NetworkSpace& space);

}  // namespace ppbary
