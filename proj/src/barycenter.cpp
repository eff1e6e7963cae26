#include "ppbary/barycenter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "ppbary/location.hpp"
#include "ppbary/network.hpp"

namespace ppbary {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

BarycenterProblem::BarycenterProblem(const GroundSpace& space, Params params,
                                     std::vector<PointPattern> patterns,
                                     std::vector<double> weights)
    : space_(&space),
      dprime_(space, params),
      patterns_(std::move(patterns)),
      weights_(std::move(weights)) {
  if (params.asymmetric()) throw DomainError("barycenters use the symmetric penalty only");
  if (patterns_.empty()) throw DomainError("barycenter of an empty list of patterns");
  space.check_order(params.order);
  for (const auto& xi : patterns_) {
    for (const auto& x : xi) space.check_location(x);
  }
  if (weights_.empty()) weights_.assign(patterns_.size(), 1.0);
  if (weights_.size() != patterns_.size()) throw DomainError("one weight per pattern expected");
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("pattern weights must be positive");
  }
  total_weight_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  penalty_pow_ = std::pow(params.penalty, params.order);
}

std::size_t BarycenterProblem::max_cardinality() const {
  std::size_t m = 0;
  for (const auto& xi : patterns_) m = std::max(m, xi.size());
  return m;
}

double BarycenterProblem::mean_cardinality() const {
  double total = 0.0;
  for (const auto& xi : patterns_) total += static_cast<double>(xi.size());
  return total / static_cast<double>(patterns_.size());
}

namespace {

MatchState classify(const BarycenterProblem& problem, const CenterSlot& z, const Location* x) {
  if (x == nullptr) return MatchState::to_aleph;
  if (!z) return MatchState::miserable;
  return problem.dprime().pow(&*z, x) < problem.dprime().cap_pow() ? MatchState::happy
                                                                    : MatchState::miserable;
}

const Location* slot_ptr(const CenterSlot& z) { return z ? &*z : nullptr; }

double column_cost(const BarycenterProblem& problem, const BarycenterState& state, std::size_t j) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.slots(); ++i) {
    total += problem.dprime().pow(slot_ptr(state.centers[i]), problem.point(j, state.perm[j][i]));
  }
  return total;
}

// Truncated cost of the cluster of center i if its center were z.
double cluster_cost_at(const BarycenterProblem& problem, const BarycenterState& state,
                       std::size_t i, const Location* z) {
  double total = 0.0;
  for (std::size_t j = 0; j < problem.pattern_count(); ++j) {
    total += problem.weight(j) * problem.dprime().pow(z, problem.point(j, state.perm[j][i]));
  }
  return total;
}

void refresh_center(const BarycenterProblem& problem, BarycenterState& state, std::size_t i) {
  for (std::size_t j = 0; j < problem.pattern_count(); ++j) {
    state.match[j][i] = classify(problem, state.centers[i], problem.point(j, state.perm[j][i]));
  }
}

struct HappySet {
  std::vector<Location> points;
  std::vector<double> weights;
};

HappySet happy_points(const BarycenterProblem& problem, const BarycenterState& state,
                      std::size_t i, const Location& z) {
  HappySet set;
  for (std::size_t j = 0; j < problem.pattern_count(); ++j) {
    const Location* x = problem.point(j, state.perm[j][i]);
    if (x != nullptr && problem.dprime().pow(&z, x) < problem.dprime().cap_pow()) {
      set.points.push_back(*x);
      set.weights.push_back(problem.weight(j));
    }
  }
  return set;
}

}  // namespace

BarycenterState make_state(const BarycenterProblem& problem, const PointPattern& start,
                           std::size_t n_slots) {
  for (const auto& z : start) problem.space().check_location(z);
  const std::size_t n = std::max({n_slots, problem.max_cardinality(), start.size()});
  BarycenterState state;
  state.centers.assign(n, kAleph);
  for (std::size_t i = 0; i < start.size(); ++i) state.centers[i] = start[i];
  const std::size_t k = problem.pattern_count();
  state.perm.assign(k, std::vector<std::size_t>(n));
  for (auto& column : state.perm) std::iota(column.begin(), column.end(), std::size_t{0});
  state.match.assign(k, std::vector<MatchState>(n, MatchState::to_aleph));
  state.auction.assign(k, AuctionState{});
  refresh_match_state(problem, state);
  state.cost = objective(problem, state);
  return state;
}

double objective(const BarycenterProblem& problem, const BarycenterState& state) {
  double total = 0.0;
  for (std::size_t j = 0; j < problem.pattern_count(); ++j) {
    total += problem.weight(j) * column_cost(problem, state, j);
  }
  return total;
}

void refresh_match_state(const BarycenterProblem& problem, BarycenterState& state) {
  for (std::size_t i = 0; i < state.slots(); ++i) refresh_center(problem, state, i);
}

std::string check_state(const BarycenterProblem& problem, const BarycenterState& state) {
  const std::size_t n = state.slots();
  if (state.perm.size() != problem.pattern_count()) return "wrong number of perm columns";
  for (std::size_t j = 0; j < state.perm.size(); ++j) {
    const auto& column = state.perm[j];
    if (column.size() != n) return "perm column of wrong length";
    std::vector<bool> seen(n, false);
    for (std::size_t idx : column) {
      if (idx >= n || seen[idx]) return "perm column " + std::to_string(j) + " is not a bijection";
      seen[idx] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (state.match[j][i] != classify(problem, state.centers[i], problem.point(j, column[i]))) {
        return "stale match state";
      }
    }
  }
  const double recomputed = objective(problem, state);
  if (std::abs(recomputed - state.cost) > 1e-9 * std::max(1.0, std::abs(recomputed))) {
    return "cost differs from recomputed objective";
  }
  return {};
}

PermOutcome optim_perm(const BarycenterProblem& problem, BarycenterState& state,
                       std::span<const double> eps_schedule, bool warm, bool keep_incumbent,
                       unsigned threads) {
  const std::size_t n = state.slots();
  const std::size_t k = problem.pattern_count();
  PermOutcome outcome;
  outcome.certified = !eps_schedule.empty() && eps_schedule.back() < 1.0 / static_cast<double>(n);
  if (n == 0) return outcome;

  std::vector<double> column_costs(k, 0.0);
  detail::parallel_for(k, threads, [&](std::size_t j) {
    std::vector<double> costs(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      const Location* z = slot_ptr(state.centers[i]);
      for (std::size_t c = 0; c < n; ++c) costs[i * n + c] = problem.dprime().pow(z, problem.point(j, c));
    }
    const CostMatrix matrix(n, std::move(costs));
    const AuctionState* start = warm && !state.auction[j].prices.empty() ? &state.auction[j] : nullptr;
    AuctionResult result = solve_auction(matrix, eps_schedule, start);
    const double incumbent = matrix.real_cost(state.perm[j]);
    if (keep_incumbent && incumbent <= result.assignment.total_cost) {
      column_costs[j] = incumbent;
    } else {
      state.perm[j] = std::move(result.assignment.permutation);
      column_costs[j] = result.assignment.total_cost;
    }
    state.auction[j] = std::move(result.state);
  });

  refresh_match_state(problem, state);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) total += problem.weight(j) * column_costs[j];
  state.cost = total;
  outcome.cost = total;
  return outcome;
}

std::size_t optim_bary(const BarycenterProblem& problem, BarycenterState& state, Rng& rng) {
  std::size_t moved = 0;
  for (std::size_t i = 0; i < state.slots(); ++i) {
    if (!state.centers[i]) continue;
    const Location current = *state.centers[i];
    const HappySet happy = happy_points(problem, state, i, current);
    // Without happy points the center is left for the deletion step.
    if (happy.points.empty()) continue;
    Location next = problem.space().cluster_center(happy.points, happy.weights,
                                                   problem.params().order, &current, rng);
    if (cluster_cost_at(problem, state, i, &next) <= cluster_cost_at(problem, state, i, &current)) {
      if (problem.space().distance(next, current) != 0.0) ++moved;
      state.centers[i] = std::move(next);
      refresh_center(problem, state, i);
    }
  }
  state.cost = objective(problem, state);
  return moved;
}

std::size_t optim_delete(const BarycenterProblem& problem, BarycenterState& state) {
  const double cp = problem.penalty_pow();
  std::size_t deleted = 0;
  for (std::size_t i = 0; i < state.slots(); ++i) {
    if (!state.centers[i]) continue;
    double total = 0.0, happy = 0.0;
    for (std::size_t j = 0; j < problem.pattern_count(); ++j) {
      total += problem.weight(j);
      if (state.match[j][i] == MatchState::happy) happy += problem.weight(j);
    }
    bool remove = 2.0 * happy < total;
    if (!remove) {
      double happy_cost = 0.0;
      for (std::size_t j = 0; j < problem.pattern_count(); ++j) {
        if (state.match[j][i] != MatchState::happy) continue;
        happy_cost += problem.weight(j) *
                      problem.dprime().pow(&*state.centers[i], problem.point(j, state.perm[j][i]));
      }
      remove = happy * cp < happy_cost + (total - happy) * cp;
    }
    if (remove) {
      state.centers[i] = kAleph;
      refresh_center(problem, state, i);
      ++deleted;
    }
  }
  state.cost = objective(problem, state);
  return deleted;
}

std::size_t optim_add(const BarycenterProblem& problem, BarycenterState& state, Rng& rng) {
  const std::size_t n = state.slots();
  const std::size_t k = problem.pattern_count();
  std::vector<std::size_t> aleph;
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.centers[i]) aleph.push_back(i);
  }
  if (aleph.empty()) return 0;

  // where[j][idx]: center currently matched to point idx of pattern j.
  std::vector<std::vector<std::size_t>> where(k, std::vector<std::size_t>(n, kNone));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) where[j][state.perm[j][i]] = i;
  }
  auto miserable = [&](std::size_t j, std::size_t idx) {
    return idx < problem.pattern(j).size() && state.match[j][where[j][idx]] == MatchState::miserable;
  };

  std::vector<std::pair<std::size_t, std::size_t>> supply;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t idx = 0; idx < problem.pattern(j).size(); ++idx) {
      if (miserable(j, idx)) supply.emplace_back(j, idx);
    }
  }

  const double cp = problem.penalty_pow();
  std::size_t added = 0;
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  for (std::size_t i : aleph) {
    if (supply.empty()) break;
    const std::size_t pick = rng.uniform_index(supply.size());
    const auto [j0, idx0] = supply[pick];
    supply.erase(supply.begin() + static_cast<std::ptrdiff_t>(pick));
    Location proposal = *problem.point(j0, idx0);

    // Gather the miserable point of every pattern closest to the proposal.
    swaps.clear();
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t best = kNone;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t idx = 0; idx < problem.pattern(j).size(); ++idx) {
        if (!miserable(j, idx)) continue;
        const double d = problem.space().distance_pow(proposal, problem.pattern(j)[idx],
                                                      problem.params().order);
        if (d < best_d) {
          best_d = d;
          best = idx;
        }
      }
      if (best == kNone) continue;
      const std::size_t other = where[j][best];
      if (other == i) continue;
      std::swap(state.perm[j][i], state.perm[j][other]);
      where[j][state.perm[j][i]] = i;
      where[j][state.perm[j][other]] = other;
      swaps.emplace_back(j, other);
    }

    const HappySet happy = happy_points(problem, state, i, proposal);
    if (!happy.points.empty()) {
      Location moved = problem.space().cluster_center(happy.points, happy.weights,
                                                      problem.params().order, &proposal, rng);
      if (cluster_cost_at(problem, state, i, &moved) <= cluster_cost_at(problem, state, i, &proposal)) {
        proposal = std::move(moved);
      }
    }
    double real_weight = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (problem.point(j, state.perm[j][i]) != nullptr) real_weight += problem.weight(j);
    }
    const double new_cost = cluster_cost_at(problem, state, i, &proposal);

    if (new_cost < real_weight * cp) {
      state.centers[i] = std::move(proposal);
      refresh_match_state(problem, state);
      std::erase_if(supply, [&](const auto& s) { return !miserable(s.first, s.second); });
      ++added;
    } else {
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it) {
        const auto [j, other] = *it;
        std::swap(state.perm[j][i], state.perm[j][other]);
        where[j][state.perm[j][i]] = i;
        where[j][state.perm[j][other]] = other;
      }
    }
  }
  state.cost = objective(problem, state);
  return added;
}

std::size_t cardinality_upper_bound(std::span<const PointPattern> patterns) {
  if (patterns.empty()) throw DomainError("cardinality bound needs at least one pattern");
  std::size_t total = 0;
  for (const auto& xi : patterns) total += xi.size();
  return 2 * total / (patterns.size() + 1);
}

namespace {

double default_delta(const FitOptions& options, double initial_cost) {
  return options.delta > 0.0 ? options.delta : 1e-10 * (initial_cost + 1.0);
}

FitReport finish_report(BarycenterState state, int iterations, bool converged,
                        std::vector<double> trace, std::vector<bool> certified,
                        std::vector<std::size_t> deleted, std::vector<std::size_t> added) {
  FitReport report;
  for (const auto& z : state.centers) {
    if (z) report.barycenter.push_back(*z);
  }
  report.objective = state.cost;
  report.iterations = iterations;
  report.converged = converged;
  if (!converged) report.warning = "iteration limit reached before convergence";
  report.trace = std::move(trace);
  report.trace_certified = std::move(certified);
  report.deleted = std::move(deleted);
  report.added = std::move(added);
  report.state = std::move(state);
  return report;
}

}  // namespace

FitReport kmeans_bary(const BarycenterProblem& problem, const PointPattern& start,
                      const FitOptions& options, Rng& rng) {
  BarycenterState state = make_state(problem, start, options.n_slots);
  if (state.slots() == 0) return finish_report(std::move(state), 0, true, {0.0}, {true}, {}, {});
  const auto schedule = default_eps_schedule(state.slots());
  const auto perm_step = [&] {
    return optim_perm(problem, state, schedule, true, options.keep_incumbent_matching,
                      options.threads);
  };

  perm_step();
  const double delta = default_delta(options, state.cost);
  std::vector<double> trace{state.cost};
  std::vector<bool> certified{true};
  std::vector<std::size_t> deleted, added;
  bool converged = false;
  int it = 0;
  while (it < options.max_iter) {
    ++it;
    const double old_cost = state.cost;
    optim_bary(problem, state, rng);
    deleted.push_back(optim_delete(problem, state));
    added.push_back(optim_add(problem, state, rng));
    perm_step();
    trace.push_back(state.cost);
    certified.push_back(true);
    if (old_cost - state.cost < delta) {
      converged = true;
      break;
    }
  }
  return finish_report(std::move(state), it, converged, std::move(trace), std::move(certified),
                       std::move(deleted), std::move(added));
}

std::vector<std::pair<std::size_t, std::size_t>> improved_eps_stages(std::size_t l) {
  std::vector<std::pair<std::size_t, std::size_t>> stages;
  for (std::size_t b = 1; b <= std::min<std::size_t>(3, l); ++b) stages.emplace_back(1, b);
  if (l > 3) {
    for (std::size_t b = 4; b <= 2 * ((l - 1) / 2); b += 2) stages.emplace_back(3, b);
    stages.emplace_back(4, l);
  }
  return stages;
}

FitReport kmeans_bary_improved(const BarycenterProblem& problem, const PointPattern& start,
                               const FitOptions& options, Rng& rng) {
  BarycenterState state = make_state(problem, start, options.n_slots);
  if (state.slots() == 0) return finish_report(std::move(state), 0, true, {0.0}, {true}, {}, {});
  const auto schedule = default_eps_schedule(state.slots());
  const std::size_t l = schedule.size();
  const auto stages = improved_eps_stages(l);
  const auto perm_step = [&](std::size_t a, std::size_t b) {
    const std::span<const double> sub(schedule.data() + (a - 1), b - a + 1);
    return optim_perm(problem, state, sub, true, options.keep_incumbent_matching, options.threads);
  };

  perm_step(1, l);
  const double delta = default_delta(options, state.cost);
  std::vector<double> trace{state.cost};
  std::vector<bool> certified{true};
  std::vector<std::size_t> deleted, added;
  bool converged = false;
  bool last_certified = true;
  std::size_t stage = 0;
  int it = 0;
  while (it < options.max_iter) {
    ++it;
    // The first three stages follow the iteration count; later stages are
    // entered only when the fit stalls.
    stage = std::max(stage, std::min<std::size_t>(static_cast<std::size_t>(it), 3) - 1);
    stage = std::min(stage, stages.size() - 1);
    const double old_cost = state.cost;
    optim_bary(problem, state, rng);
    if (it <= options.del_add_iterations) {
      deleted.push_back(optim_delete(problem, state));
      added.push_back(optim_add(problem, state, rng));
    }
    const auto [a, b] = stages[stage];
    last_certified = perm_step(a, b).certified;
    trace.push_back(state.cost);
    certified.push_back(last_certified);
    if (state.cost > old_cost) {
      stage = std::min(stage + 1, stages.size() - 1);
    } else if (old_cost - state.cost < delta) {
      if (last_certified) {
        converged = true;
        break;
      }
      stage = std::min(stage + 1, stages.size() - 1);
    }
  }
  if (!last_certified) {
    perm_step(1, l);
    trace.push_back(state.cost);
    certified.push_back(true);
  }
  return finish_report(std::move(state), it, converged, std::move(trace), std::move(certified),
                       std::move(deleted), std::move(added));
}

FitReport fit(const BarycenterProblem& problem, const PointPattern& start, Algorithm algorithm,
              const FitOptions& options, Rng& rng) {
  return algorithm == Algorithm::original ? kmeans_bary(problem, start, options, rng)
                                          : kmeans_bary_improved(problem, start, options, rng);
}

PointPattern draw_start(const BarycenterProblem& problem, const StartPolicy& policy, Rng& rng) {
  const auto size_or_mean = [&](std::size_t cardinality) {
    return cardinality > 0 ? cardinality
                           : static_cast<std::size_t>(std::lround(problem.mean_cardinality()));
  };
  if (const auto* window = std::get_if<UniformWindow>(&policy)) {
    if (window->lower.size() != window->upper.size() || window->lower.empty()) {
      throw DomainError("window bounds must have equal, nonzero dimension");
    }
    PointPattern start;
    const std::size_t m = size_or_mean(window->cardinality);
    for (std::size_t r = 0; r < m; ++r) {
      Coords z(window->lower.size());
      for (std::size_t d = 0; d < z.size(); ++d) z[d] = rng.uniform(window->lower[d], window->upper[d]);
      start.push_back(std::move(z));
    }
    return start;
  }
  if (const auto* set = std::get_if<CandidateSet>(&policy)) {
    if (set->candidates.empty()) throw DomainError("empty candidate set for starts");
    PointPattern start;
    const std::size_t m = size_or_mean(set->cardinality);
    for (std::size_t r = 0; r < m; ++r) start.push_back(set->candidates[rng.uniform_index(set->candidates.size())]);
    return start;
  }
  throw DomainError("fixed starts cannot be drawn");
}

RestartReport fit_with_restarts(const BarycenterProblem& problem, std::size_t n_starts,
                                const StartPolicy& policy, Algorithm algorithm,
                                const FitOptions& options, const Rng& rng) {
  const auto* fixed = std::get_if<FixedStarts>(&policy);
  const std::size_t runs = fixed != nullptr ? fixed->starts.size() : n_starts;
  if (runs == 0) throw DomainError("at least one start is required");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<FitReport> reports(runs);
  FitOptions inner = options;
  inner.threads = 1;
  detail::parallel_for(runs, options.threads, [&](std::size_t r) {
    Rng stream = rng.split(r);
    Rng start_rng = stream.split(0), fit_rng = stream.split(1);
    const PointPattern start = fixed != nullptr ? fixed->starts[r] : draw_start(problem, policy, start_rng);
    reports[r] = fit(problem, start, algorithm, inner, fit_rng);
  });

  RestartReport out;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& rep : reports) out.objectives.push_back(rep.objective);
  out.best_index = static_cast<std::size_t>(
      std::min_element(out.objectives.begin(), out.objectives.end()) - out.objectives.begin());
  const double best = out.objectives[out.best_index];
  out.deviation = relative_deviation(out.objectives, best);
  out.best = std::move(reports[out.best_index]);
  return out;
}

double relative_deviation(std::span<const double> values, double reference) {
  if (values.empty()) return 0.0;
  const double worst = *std::max_element(values.begin(), values.end());
  if (reference == 0.0) return worst == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (worst - reference) / reference;
}

PointPattern average_tied_centers(const BarycenterProblem& problem, const BarycenterState& state,
                                  const NetworkSpace& space) {
  const Network& net = space.network();
  PointPattern out;
  for (std::size_t i = 0; i < state.slots(); ++i) {
    if (!state.centers[i]) continue;
    const HappySet happy = happy_points(problem, state, i, *state.centers[i]);
    if (happy.points.empty()) {
      out.push_back(*state.centers[i]);
      continue;
    }
    std::vector<NetPoint> cluster;
    for (const auto& x : happy.points) cluster.push_back(std::get<NetPoint>(x));
    const auto ties = network_median_candidates(cluster, happy.weights, space.matrix());
    if (ties.size() < 2) {
      out.push_back(*state.centers[i]);
      continue;
    }
    std::array<double, 2> mean{0.0, 0.0};
    for (const auto& t : ties) {
      const auto xy = net.coordinates(t);
      mean[0] += xy[0];
      mean[1] += xy[1];
    }
    mean[0] /= static_cast<double>(ties.size());
    mean[1] /= static_cast<double>(ties.size());
    out.push_back(project_to_network(mean, net));
  }
  return out;
}

}  // namespace ppbary
