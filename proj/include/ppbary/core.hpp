#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ppbary {

/// Input that violates a precondition (mismatched spaces, bad sizes, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A (ground space, order) combination without a center solver.
class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Euclidean coordinates.
using Coords = std::vector<double>;

/// A position on a network: a vertex, or an offset along an edge measured
/// from the edge's first endpoint.
struct NetPoint {
  std::int64_t vertex = -1;
  std::int64_t edge = -1;
  double offset = 0.0;

  static NetPoint at_vertex(std::int64_t v) { return {v, -1, 0.0}; }
  static NetPoint on_edge(std::int64_t e, double t) { return {-1, e, t}; }
  bool is_vertex() const { return vertex >= 0; }

  friend bool operator==(const NetPoint&, const NetPoint&) = default;
};

using Location = std::variant<Coords, NetPoint>;

/// A barycenter slot: a location, or the auxiliary point ℵ (empty).
using CenterSlot = std::optional<Location>;
inline constexpr std::nullopt_t kAleph = std::nullopt;

/// Finite multiset of locations. Storage order carries no meaning.
class PointPattern {
 public:
  PointPattern() = default;
  explicit PointPattern(std::vector<Location> points) : points_(std::move(points)) {}

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Location& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Location>& points() const { return points_; }
  void push_back(Location x) { points_.push_back(std::move(x)); }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

 private:
  std::vector<Location> points_;
};

/// Builds a Euclidean pattern from coordinate rows.
PointPattern make_pattern(const std::vector<Coords>& rows);

/// Penalty C and order p, with optional separate add/delete penalties.
struct Params {
  double penalty = 1.0;
  double order = 1.0;
  std::optional<double> add_penalty;
  std::optional<double> delete_penalty;

  /// Throws DomainError unless C > 0, p >= 1 and any set penalty is > 0.
  void validate() const;
  bool asymmetric() const { return add_penalty.has_value() || delete_penalty.has_value(); }
  double add_cost() const { return add_penalty.value_or(penalty); }
  double delete_cost() const { return delete_penalty.value_or(penalty); }
  /// Truncation threshold for distances between two real points.
  double cap() const;
  /// cap()^p, computed without a root/power round trip.
  double cap_pow() const;
};

/// Seeded generator that can be split into independent, reproducible streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  /// Deterministic child generator; does not advance this generator.
  Rng split(std::uint64_t stream) const;

  std::size_t uniform_index(std::size_t n);
  double uniform(double lo, double hi);
  double normal(double mean, double sd);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Metric oracle plus a cluster-center solver for the given order.
class GroundSpace {
 public:
  virtual ~GroundSpace() = default;

  virtual double distance(const Location& x, const Location& y) const = 0;
  /// d(x, y)^p. Spaces override this when a direct formula avoids rounding.
  virtual double distance_pow(const Location& x, const Location& y, double p) const;

  /// Minimizer of sum_i w_i d(x_i, z)^p over z (possibly heuristic). Never
  /// returns a point costlier than `incumbent` when one is given. Empty
  /// `weights` means unit weights.
  virtual Location cluster_center(std::span<const Location> points,
                                  std::span<const double> weights, double order,
                                  const Location* incumbent, Rng& rng) const = 0;

  /// Throws DomainError if x does not belong to this space.
  virtual void check_location(const Location& x) const = 0;
  /// Throws UnsupportedConfiguration if no center solver exists for `order`.
  virtual void check_order(double order) const = 0;
};

/// sum_i w_i d(x_i, z)^p, untruncated.
double cluster_cost(const GroundSpace& space, std::span<const Location> points,
                    std::span<const double> weights, const Location& z, double order);

/// The truncated metric d' on the ground space extended by ℵ.
class ExtendedDistance {
 public:
  ExtendedDistance(const GroundSpace& space, Params params);

  double operator()(const CenterSlot& x, const CenterSlot& y) const;
  /// d'(x, y)^p; nullptr stands for ℵ. x is on the "from" side, so with
  /// asymmetric penalties d'(x, ℵ) is the delete cost and d'(ℵ, y) the add cost.
  double pow(const Location* x, const Location* y) const;
  double pow(const CenterSlot& x, const CenterSlot& y) const;

  double cap() const { return cap_; }
  double cap_pow() const { return cap_pow_; }
  const Params& params() const { return params_; }
  const GroundSpace& space() const { return *space_; }

 private:
  const GroundSpace* space_;
  Params params_;
  double cap_;
  double cap_pow_;
  double add_pow_;
  double delete_pow_;
};

/// Multiset equality: some bijection pairs points at ground distance 0.
bool multiset_equal(const GroundSpace& space, const PointPattern& a, const PointPattern& b);

}  // namespace ppbary
