#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ppbary/barycenter.hpp"
#include "ppbary/core.hpp"

namespace ppbary {

enum class CardinalityLaw {
  deterministic,  // n_j = m
  binomial,       // n_j = m - 2 + Bin(4, 1/2), variance 1
  poisson,        // n_j ~ Poisson(m)
};

std::string to_string(CardinalityLaw law);
CardinalityLaw parse_cardinality_law(const std::string& text);
std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

/// Simulation setup: k patterns drawn from a balanced mixture of isotropic
/// normals around fixed centers in [0, 1]^2 (times `scale`).
struct Scenario {
  std::string name = "scenario";
  std::size_t k = 20;
  std::size_t mean_cardinality = 20;
  std::size_t n_centers = 5;
  double sigma = 0.1;
  CardinalityLaw law = CardinalityLaw::deterministic;
  std::size_t instances = 100;
  std::size_t n_starts = 10;
  std::uint64_t seed = 1;
  /// `improved` also runs the original algorithm on the same starts and
  /// measures deviations against its minimum.
  Algorithm algorithm = Algorithm::original;
  double penalty = 0.25;
  double order = 2.0;
  /// Multiplies the window, the mixture centers, sigma and the penalty.
  double scale = 1.0;
  int max_iter = 200;
  double delta = 0.0;
  unsigned threads = 0;

  void validate() const;
};

/// Mixture centers for 5 (quincunx), 10 (2 x 5) or 15 (3 x 5) components.
std::vector<std::array<double, 2>> mixture_centers(std::size_t n_centers);

std::size_t draw_cardinality(CardinalityLaw law, std::size_t mean, Rng& rng);

std::vector<PointPattern> generate_instance(const Scenario& scn, Rng& rng);

struct InstanceResult {
  std::size_t index = 0;
  std::vector<double> objectives;
  /// (max - min) / min of `objectives`, or against the original algorithm's
  /// minimum in comparison mode.
  double deviation = 0.0;
  double seconds = 0.0;
  /// Filled in comparison mode only.
  std::vector<double> original_objectives;
  double original_deviation = 0.0;
  double original_seconds = 0.0;
  std::vector<double> best_trace;
};

struct Summary {
  double mean = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

struct StudyReport {
  Scenario scenario;
  std::vector<InstanceResult> instances;
  Summary deviation;
  double seconds = 0.0;
  Summary original_deviation;
  double original_seconds = 0.0;
};

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double prob);
Summary summarize(std::span<const double> values);

/// Instance i uses the stream Rng(seed).split(i): data from split(0), starts
/// from split(1) and fits from split(2). Results do not depend on threads.
StudyReport run_study(const Scenario& scn);

/// "key = value" lines ('#' comments). Comma-separated values expand to the
/// cartesian product of scenarios. Throws DomainError on bad input.
std::vector<Scenario> parse_scenarios(std::istream& in);

void write_summary_csv(std::ostream& out, std::span<const StudyReport> reports);
void write_instances_csv(std::ostream& out, std::span<const StudyReport> reports);
/// One line per scenario: "k/m  N  sigma  law  mean (q05, q95)  seconds".
std::string format_table_row(const StudyReport& report);

}  // namespace ppbary
