#include "ppbary/core.hpp"

#include <algorithm>
#include <cmath>

namespace ppbary {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

PointPattern make_pattern(const std::vector<Coords>& rows) {
  std::vector<Location> points;
  points.reserve(rows.size());
  for (const auto& r : rows) points.emplace_back(r);
  return PointPattern(std::move(points));
}

void Params::validate() const {
  if (!(penalty > 0.0) || !std::isfinite(penalty)) throw DomainError("penalty C must be positive");
  if (!(order >= 1.0) || !std::isfinite(order)) throw DomainError("order p must be >= 1");
  if (add_penalty && !(*add_penalty > 0.0)) throw DomainError("add penalty must be positive");
  if (delete_penalty && !(*delete_penalty > 0.0)) throw DomainError("delete penalty must be positive");
}

double Params::cap_pow() const {
  if (!asymmetric()) return 2.0 * std::pow(penalty, order);
  return std::pow(add_cost(), order) + std::pow(delete_cost(), order);
}

double Params::cap() const {
  if (!asymmetric()) return std::pow(2.0, 1.0 / order) * penalty;
  return std::pow(cap_pow(), 1.0 / order);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw DomainError("uniform_index on empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal(double mean, double sd) {
  if (sd == 0.0) return mean;
  return std::normal_distribution<double>(mean, sd)(engine_);
}

double GroundSpace::distance_pow(const Location& x, const Location& y, double p) const {
  const double d = distance(x, y);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

double cluster_cost(const GroundSpace& space, std::span<const Location> points,
                    std::span<const double> weights, const Location& z, double order) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    total += w * space.distance_pow(points[i], z, order);
  }
  return total;
}

ExtendedDistance::ExtendedDistance(const GroundSpace& space, Params params)
    : space_(&space), params_(std::move(params)) {
  params_.validate();
  cap_ = params_.cap();
  cap_pow_ = params_.cap_pow();
  add_pow_ = std::pow(params_.add_cost(), params_.order);
  delete_pow_ = std::pow(params_.delete_cost(), params_.order);
}

double ExtendedDistance::pow(const Location* x, const Location* y) const {
  if (x == nullptr && y == nullptr) return 0.0;
  if (x == nullptr) return add_pow_;
  if (y == nullptr) return delete_pow_;
  return std::min(space_->distance_pow(*x, *y, params_.order), cap_pow_);
}

double ExtendedDistance::pow(const CenterSlot& x, const CenterSlot& y) const {
  return pow(x ? &*x : nullptr, y ? &*y : nullptr);
}

double ExtendedDistance::operator()(const CenterSlot& x, const CenterSlot& y) const {
  if (!x && !y) return 0.0;
  if (!x) return params_.add_cost();
  if (!y) return params_.delete_cost();
  return std::min(space_->distance(*x, *y), cap_);
}

bool multiset_equal(const GroundSpace& space, const PointPattern& a, const PointPattern& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && space.distance(x, b[j]) == 0.0) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace ppbary
