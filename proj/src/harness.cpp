#include "ppbary/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "ppbary/location.hpp"

namespace ppbary {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw DomainError("empty entry in list '" + s + "'");
    parts.push_back(item);
  }
  if (parts.empty()) throw DomainError("missing value");
  return parts;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw DomainError("bad number '" + text + "' for " + key);
  }
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v < 0.0 || v != std::floor(v)) throw DomainError("bad count '" + text + "' for " + key);
  return static_cast<std::uint64_t>(v);
}

using Setter = std::function<void(Scenario&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"name", [](Scenario& s, const std::string& v) { s.name = v; }},
      {"k", [](Scenario& s, const std::string& v) { s.k = parse_count("k", v); }},
      {"m", [](Scenario& s, const std::string& v) { s.mean_cardinality = parse_count("m", v); }},
      {"n_centers", [](Scenario& s, const std::string& v) { s.n_centers = parse_count("n_centers", v); }},
      {"sigma", [](Scenario& s, const std::string& v) { s.sigma = parse_double("sigma", v); }},
      {"law", [](Scenario& s, const std::string& v) { s.law = parse_cardinality_law(v); }},
      {"instances", [](Scenario& s, const std::string& v) { s.instances = parse_count("instances", v); }},
      {"starts", [](Scenario& s, const std::string& v) { s.n_starts = parse_count("starts", v); }},
      {"seed", [](Scenario& s, const std::string& v) { s.seed = parse_count("seed", v); }},
      {"algorithm", [](Scenario& s, const std::string& v) { s.algorithm = parse_algorithm(v); }},
      {"C", [](Scenario& s, const std::string& v) { s.penalty = parse_double("C", v); }},
      {"p", [](Scenario& s, const std::string& v) { s.order = parse_double("p", v); }},
      {"scale", [](Scenario& s, const std::string& v) { s.scale = parse_double("scale", v); }},
      {"max_iter", [](Scenario& s, const std::string& v) {
         s.max_iter = static_cast<int>(parse_count("max_iter", v));
       }},
      {"delta", [](Scenario& s, const std::string& v) { s.delta = parse_double("delta", v); }},
      {"threads", [](Scenario& s, const std::string& v) {
         s.threads = static_cast<unsigned>(parse_count("threads", v));
       }},
  };
  return table;
}

PointPattern draw_uniform_start(std::size_t m, double side, Rng& rng) {
  PointPattern start;
  for (std::size_t i = 0; i < m; ++i) start.push_back(Coords{rng.uniform(0.0, side), rng.uniform(0.0, side)});
  return start;
}

}  // namespace

std::string to_string(CardinalityLaw law) {
  switch (law) {
    case CardinalityLaw::deterministic: return "deterministic";
    case CardinalityLaw::binomial: return "binomial";
    case CardinalityLaw::poisson: return "poisson";
  }
  return "?";
}

CardinalityLaw parse_cardinality_law(const std::string& text) {
  if (text == "deterministic") return CardinalityLaw::deterministic;
  if (text == "binomial") return CardinalityLaw::binomial;
  if (text == "poisson") return CardinalityLaw::poisson;
  throw DomainError("unknown cardinality law '" + text + "'");
}

std::string to_string(Algorithm algorithm) {
  return algorithm == Algorithm::original ? "original" : "improved";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "original") return Algorithm::original;
  if (text == "improved") return Algorithm::improved;
  throw DomainError("unknown algorithm '" + text + "'");
}

void Scenario::validate() const {
  if (k == 0) throw DomainError("k must be positive");
  if (n_centers != 5 && n_centers != 10 && n_centers != 15) {
    throw DomainError("n_centers must be 5, 10 or 15");
  }
  if (!(sigma >= 0.0)) throw DomainError("sigma must be nonnegative");
  if (n_starts == 0) throw DomainError("starts must be positive");
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be positive");
  Params{penalty, order, {}, {}}.validate();
  EuclideanSpace().check_order(order);
}

std::vector<std::array<double, 2>> mixture_centers(std::size_t n_centers) {
  static constexpr double xs[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<std::array<double, 2>> centers;
  switch (n_centers) {
    case 5:
      return {{0.2, 0.2}, {0.8, 0.2}, {0.5, 0.5}, {0.2, 0.8}, {0.8, 0.8}};
    case 10:
      for (double y : {0.3, 0.7}) {
        for (double x : xs) centers.push_back({x, y});
      }
      return centers;
    case 15:
      for (double y : {0.2, 0.5, 0.8}) {
        for (double x : xs) centers.push_back({x, y});
      }
      return centers;
    default:
      throw DomainError("no layout for " + std::to_string(n_centers) + " mixture centers");
  }
}

std::size_t draw_cardinality(CardinalityLaw law, std::size_t mean, Rng& rng) {
  switch (law) {
    case CardinalityLaw::deterministic:
      return mean;
    case CardinalityLaw::binomial: {
      std::binomial_distribution<int> bin(4, 0.5);
      const long long n = static_cast<long long>(mean) - 2 + bin(rng.engine());
      return static_cast<std::size_t>(std::max(0LL, n));
    }
    case CardinalityLaw::poisson: {
      if (mean == 0) return 0;
      std::poisson_distribution<long long> poi(static_cast<double>(mean));
      return static_cast<std::size_t>(poi(rng.engine()));
    }
  }
  return mean;
}

std::vector<PointPattern> generate_instance(const Scenario& scn, Rng& rng) {
  const auto centers = mixture_centers(scn.n_centers);
  const double sd = scn.sigma * scn.scale;
  std::vector<PointPattern> patterns(scn.k);
  for (auto& xi : patterns) {
    const std::size_t n = draw_cardinality(scn.law, scn.mean_cardinality, rng);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = centers[rng.uniform_index(centers.size())];
      const double x = rng.normal(c[0] * scn.scale, sd);
      const double y = rng.normal(c[1] * scn.scale, sd);
      xi.push_back(Coords{x, y});
    }
  }
  return patterns;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::vector<double> v(values.begin(), values.end());
  s.q05 = quantile(v, 0.05);
  s.q95 = quantile(std::move(v), 0.95);
  return s;
}

StudyReport run_study(const Scenario& scn) {
  scn.validate();
  StudyReport report;
  report.scenario = scn;
  report.instances.resize(scn.instances);

  const EuclideanSpace space(2);
  const Params params{scn.penalty * scn.scale, scn.order, {}, {}};
  const Rng root(scn.seed);
  const unsigned outer = scn.instances > 1 ? scn.threads : 1;
  FitOptions options;
  options.max_iter = scn.max_iter;
  options.delta = scn.delta;
  options.threads = scn.instances > 1 ? 1 : scn.threads;

  detail::parallel_for(scn.instances, outer, [&](std::size_t i) {
    const Rng stream = root.split(i);
    Rng data_rng = stream.split(0), start_rng = stream.split(1);
    const Rng fit_rng = stream.split(2);
    BarycenterProblem problem(space, params, generate_instance(scn, data_rng));

    FixedStarts starts;
    const auto m = static_cast<std::size_t>(std::lround(problem.mean_cardinality()));
    for (std::size_t r = 0; r < scn.n_starts; ++r) {
      starts.starts.push_back(draw_uniform_start(m, scn.scale, start_rng));
    }

    InstanceResult& result = report.instances[i];
    result.index = i;
    RestartReport main = fit_with_restarts(problem, scn.n_starts, starts, Algorithm::original,
                                           options, fit_rng.split(0));
    if (scn.algorithm == Algorithm::improved) {
      RestartReport improved = fit_with_restarts(problem, scn.n_starts, starts,
                                                 Algorithm::improved, options, fit_rng.split(1));
      const double d_min = main.objectives[main.best_index];
      result.original_objectives = main.objectives;
      result.original_deviation = main.deviation;
      result.original_seconds = main.seconds;
      result.objectives = improved.objectives;
      result.deviation = relative_deviation(improved.objectives, d_min);
      result.seconds = improved.seconds;
      result.best_trace = improved.best.trace;
    } else {
      result.objectives = main.objectives;
      result.deviation = main.deviation;
      result.seconds = main.seconds;
      result.best_trace = main.best.trace;
    }
  });

  std::vector<double> dev, orig;
  for (const auto& r : report.instances) {
    dev.push_back(r.deviation);
    orig.push_back(r.original_deviation);
    report.seconds += r.seconds;
    report.original_seconds += r.original_seconds;
  }
  report.deviation = summarize(dev);
  if (scn.algorithm == Algorithm::improved) report.original_deviation = summarize(orig);
  return report;
}

std::vector<Scenario> parse_scenarios(std::istream& in) {
  std::vector<std::pair<std::string, std::vector<std::string>>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!setters().contains(key)) {
      throw DomainError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    entries.emplace_back(key, split_list(trim(line.substr(eq + 1))));
  }

  std::vector<Scenario> scenarios{Scenario{}};
  bool named = false;
  for (const auto& [key, values] : entries) {
    named = named || key == "name";
    std::vector<Scenario> next;
    for (const auto& base : scenarios) {
      for (const auto& v : values) {
        Scenario s = base;
        setters().at(key)(s, v);
        next.push_back(std::move(s));
      }
    }
    scenarios = std::move(next);
  }
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    scenarios[i].validate();
    if (!named && scenarios.size() > 1) scenarios[i].name = "scenario" + std::to_string(i + 1);
  }
  return scenarios;
}

void write_summary_csv(std::ostream& out, std::span<const StudyReport> reports) {
  out << "name,k,m,n_centers,sigma,law,algorithm,C,p,instances,starts,seed,"
         "mean_deviation,q05,q95,seconds,original_mean_deviation,original_q05,original_q95,"
         "original_seconds\n";
  out << std::setprecision(10);
  for (const auto& r : reports) {
    const Scenario& s = r.scenario;
    out << s.name << ',' << s.k << ',' << s.mean_cardinality << ',' << s.n_centers << ','
        << s.sigma << ',' << to_string(s.law) << ',' << to_string(s.algorithm) << ','
        << s.penalty << ',' << s.order << ',' << s.instances << ',' << s.n_starts << ','
        << s.seed << ',' << r.deviation.mean << ',' << r.deviation.q05 << ',' << r.deviation.q95
        << ',' << r.seconds << ',';
    if (s.algorithm == Algorithm::improved) {
      out << r.original_deviation.mean << ',' << r.original_deviation.q05 << ','
          << r.original_deviation.q95 << ',' << r.original_seconds;
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

void write_instances_csv(std::ostream& out, std::span<const StudyReport> reports) {
  out << "name,instance,algorithm,deviation,min_objective,max_objective,seconds,iterations\n";
  out << std::setprecision(12);
  for (const auto& r : reports) {
    for (const auto& inst : r.instances) {
      const auto [lo, hi] = std::minmax_element(inst.objectives.begin(), inst.objectives.end());
      out << r.scenario.name << ',' << inst.index << ',' << to_string(r.scenario.algorithm) << ','
          << inst.deviation << ',' << *lo << ',' << *hi << ',' << inst.seconds << ','
          << (inst.best_trace.empty() ? 0 : inst.best_trace.size() - 1) << '\n';
    }
  }
}

std::string format_table_row(const StudyReport& report) {
  const Scenario& s = report.scenario;
  std::ostringstream row;
  row << std::fixed << std::setprecision(2);
  row << std::setw(7) << (std::to_string(s.k) + "/" + std::to_string(s.mean_cardinality))
      << "  N=" << std::setw(2) << s.n_centers << "  sigma=" << s.sigma << "  "
      << std::setw(13) << std::left << to_string(s.law) << std::right << "  "
      << report.deviation.mean << " (" << report.deviation.q05 << ", " << report.deviation.q95
      << ")  " << std::setprecision(1) << report.seconds << "s";
  return row.str();
}

}  // namespace ppbary
