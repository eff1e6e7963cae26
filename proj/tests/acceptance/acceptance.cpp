// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../net_util.hpp"
#include "../test_util.hpp"
#include "ppbary/assignment.hpp"
#include "ppbary/barycenter.hpp"
#include "ppbary/cli.hpp"
#include "ppbary/harness.hpp"
#include "ppbary/io.hpp"
#include "ppbary/location.hpp"
#include "ppbary/metrics.hpp"
#include "ppbary/network.hpp"

using namespace ppbary;
using testing::random_pattern;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string fingerprint;  // outputs that must repeat under the same seed
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome metric_axioms() {
  Outcome out;
  Timer timer;
  EuclideanSpace plane(2);
  Rng rng(101);
  int failures = 0;
  double worst_triangle = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const double c = std::array{0.1, 1.0, 2.0}[t % 3];
    const Params params{c, (t / 3) % 2 == 0 ? 1.0 : 2.0, {}, {}};
    const auto a = random_pattern(rng, rng.uniform_index(9));
    const auto b = random_pattern(rng, rng.uniform_index(9));
    const auto d = random_pattern(rng, rng.uniform_index(9));
    for (auto dist : {&tt_distance, &rtt_distance}) {
      const double ab = dist(plane, a, b, params).value;
      const double ad = dist(plane, a, d, params).value;
      const double bd = dist(plane, b, d, params).value;
      if (ab != dist(plane, b, a, params).value) ++failures;
      if ((ab == 0.0) != multiset_equal(plane, a, b)) ++failures;
      if (dist(plane, a, a, params).value != 0.0) ++failures;
      worst_triangle = std::max({worst_triangle, ad - ab - bd, ab - ad - bd, bd - ab - ad});
      out.fingerprint += hexfloat(ab) + ",";
    }
  }
  const double secs = timer.seconds();
  out.pass = failures == 0 && worst_triangle <= 1e-9 && secs < 30.0;
  out.detail = std::to_string(failures) + " symmetry/identity violations, worst triangle excess " +
               fmt("%.2e, %.2fs", worst_triangle, secs);
  return out;
}

Outcome bruteforce_oracle() {
  Outcome out;
  Timer timer;
  EuclideanSpace plane(2);
  Rng rng(102);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const Params params{rng.uniform(0.05, 1.0), t % 2 == 0 ? 1.0 : 2.0, {}, {}};
    const auto a = random_pattern(rng, rng.uniform_index(6));
    const auto b = random_pattern(rng, rng.uniform_index(6));
    const double fast = tt_distance(plane, a, b, params).value;
    const double slow = tt_distance_bruteforce(plane, a, b, params).value;
    worst = std::max(worst, std::abs(fast - slow));
    out.fingerprint += hexfloat(fast) + ",";
  }
  const double secs = timer.seconds();
  out.pass = worst <= 1e-9 && secs < 60.0;
  out.detail = fmt("max |solver - enumeration| %.2e, %.2fs", worst, secs);
  return out;
}

// OSPA computed directly: pad the smaller side with C^p entries and take the
// best permutation by enumeration.
double ospa_reference(const PointPattern& a, const PointPattern& b, double c, double p) {
  const PointPattern& small = a.size() <= b.size() ? a : b;
  const PointPattern& large = a.size() <= b.size() ? b : a;
  const std::size_t n = large.size();
  if (n == 0) return 0.0;
  std::vector<double> m(n * n, std::pow(c, p));
  for (std::size_t i = 0; i < small.size(); ++i) {
    const auto& x = std::get<Coords>(small[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& y = std::get<Coords>(large[j]);
      m[i * n + j] = std::pow(std::hypot(x[0] - y[0], x[1] - y[1]), p);
    }
  }
  return std::pow(testing::brute_force_assignment(n, m) / static_cast<double>(n), 1.0 / p);
}

Outcome ospa_equivalence() {
  Outcome out;
  EuclideanSpace plane(2);
  Rng rng(103);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const double p = t % 2 == 0 ? 1.0 : 2.0;
    const double c = std::sqrt(2.0) / std::pow(2.0, 1.0 / p) * rng.uniform(1.0, 3.0);
    const auto a = random_pattern(rng, rng.uniform_index(7));
    const auto b = random_pattern(rng, rng.uniform_index(7));
    const double rtt = rtt_distance(plane, a, b, {c, p, {}, {}}).value;
    worst = std::max(worst, std::abs(rtt - ospa_reference(a, b, c, p)));
    out.fingerprint += hexfloat(rtt) + ",";
  }
  out.pass = worst <= 1e-9;
  out.detail = fmt("max |rtt - ospa| %.2e", worst);
  return out;
}

Outcome auction_certification() {
  Outcome out;
  Rng rng(104);
  int mismatches = 0, uncertified = 0, relaxed_failures = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.uniform_index(8);
    const CostMatrix m(n, testing::random_matrix(rng, n, 10.0));
    const auto schedule = default_eps_schedule(n);
    const auto res = solve_auction(m, schedule);
    const auto exact = solve_exact_quantized(m);
    if (!res.certified_optimal) ++uncertified;
    if (res.assignment.quantized_cost != exact.quantized_cost) ++mismatches;
    const std::size_t keep = std::max<std::size_t>(1, schedule.size() / 2);
    const std::vector<double> relaxed(schedule.begin(), schedule.begin() + static_cast<std::ptrdiff_t>(keep));
    const auto loose = solve_auction(m, relaxed);
    const double bound = static_cast<double>(exact.quantized_cost) + static_cast<double>(n) * relaxed.back();
    if (static_cast<double>(loose.assignment.quantized_cost) > bound) ++relaxed_failures;
    out.fingerprint += std::to_string(res.assignment.quantized_cost) + "/" +
                       std::to_string(loose.assignment.quantized_cost) + ",";
  }
  out.pass = mismatches == 0 && uncertified == 0 && relaxed_failures == 0;
  out.detail = std::to_string(mismatches) + " certified mismatches, " + std::to_string(uncertified) +
               " uncertified, " + std::to_string(relaxed_failures) + " relaxed runs outside n*eps";
  return out;
}

Outcome monotone_descent() {
  Outcome out;
  EuclideanSpace plane(2);
  Scenario scn;
  int increases = 0, unconverged = 0, max_iter = 0;
  for (int t = 0; t < 100; ++t) {
    Rng rng = Rng(105).split(static_cast<std::uint64_t>(t));
    Rng data_rng = rng.split(0), start_rng = rng.split(1), fit_rng = rng.split(2);
    const BarycenterProblem problem(plane, {scn.penalty, scn.order, {}, {}}, generate_instance(scn, data_rng));
    const PointPattern start = draw_start(problem, UniformWindow{{0, 0}, {1, 1}, 20}, start_rng);
    const FitReport rep = kmeans_bary(problem, start, {}, fit_rng);
    double last = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.trace.size(); ++i) {
      if (!rep.trace_certified[i]) continue;
      if (rep.trace[i] > last) ++increases;
      last = rep.trace[i];
    }
    if (!rep.converged || rep.iterations > 200) ++unconverged;
    max_iter = std::max(max_iter, rep.iterations);
    out.fingerprint += hexfloat(rep.objective) + ",";
  }
  out.pass = increases == 0 && unconverged == 0;
  out.detail = std::to_string(increases) + " trace increases, " + std::to_string(unconverged) +
               " unconverged runs, at most " + std::to_string(max_iter) + " iterations";
  return out;
}

PointPattern line_pattern(std::initializer_list<double> xs) {
  PointPattern xi;
  for (double x : xs) xi.push_back(Coords{x});
  return xi;
}

Outcome closed_forms() {
  Outcome out;
  EuclideanSpace line(1);
  const double c = 1.0;
  double worst = 0.0;
  bool shapes = true;
  for (double d : {0.3, 1.2, 1.9}) {
    const BarycenterProblem problem(line, {c, 2.0, {}, {}}, {line_pattern({0.0}), line_pattern({d})});
    // Endpoint starts only reach the midpoint while both points are happy.
    std::vector<double> starts{0.4 * d, 0.5 * d, 0.6 * d};
    if (d * d < 2 * c * c) starts.insert(starts.end(), {0.0, d});
    for (double s : starts) {
      Rng rng(106);
      const FitReport rep = kmeans_bary(problem, line_pattern({s}), {}, rng);
      if (rep.barycenter.size() != 1) {
        shapes = false;
        continue;
      }
      worst = std::max(worst, std::abs(std::get<Coords>(rep.barycenter[0])[0] - d / 2));
      worst = std::max(worst, std::abs(rep.objective - d * d / 2));
    }
  }
  for (double d : {2.5, 3.5, 6.0}) {
    const BarycenterProblem problem(line, {c, 2.0, {}, {}}, {line_pattern({0.0}), line_pattern({d})});
    Rng rng(106);
    const FitReport rep = kmeans_bary(problem, line_pattern({d / 2}), {}, rng);
    if (!rep.barycenter.empty()) shapes = false;
    worst = std::max(worst, std::abs(rep.objective - 2 * c * c));
  }
  out.pass = shapes && worst <= 1e-9;
  out.detail = std::string(shapes ? "expected cardinalities" : "wrong cardinality") +
               fmt(", max error %.2e", worst);
  return out;
}

Outcome table_reproduction() {
  Outcome out;
  Timer timer;
  std::vector<StudyReport> reports;
  for (double sigma : {0.05, 0.1, 0.2}) {
    Scenario scn;
    scn.sigma = sigma;
    scn.instances = 30;
    scn.n_starts = 10;
    scn.seed = 107;
    reports.push_back(run_study(scn));
  }
  const double secs = timer.seconds();
  const auto& low = reports[0];
  const auto& mid = reports[1];
  const auto& high = reports[2];
  int paired_below = 0;
  for (std::size_t i = 0; i < high.instances.size(); ++i) {
    if (high.instances[i].deviation < low.instances[i].deviation) ++paired_below;
  }
  for (const auto& r : reports) {
    for (const auto& inst : r.instances) {
      for (double v : inst.objectives) out.fingerprint += hexfloat(v) + ",";
    }
  }
  out.pass = mid.deviation.mean <= 0.10 && high.deviation.mean < low.deviation.mean && secs < 600.0;
  out.detail = fmt("sigma=0.1 mean %.4f; sigma=0.05 mean %.4f", mid.deviation.mean, low.deviation.mean) +
               fmt(", sigma=0.2 mean %.4f", high.deviation.mean) + ", " + std::to_string(paired_below) +
               "/30 pairs lower" + fmt(", %.1fs", secs);
  return out;
}

Outcome improved_parity() {
  Outcome out;
  Scenario scn;
  scn.k = 50;
  scn.mean_cardinality = 50;
  scn.instances = 30;
  scn.n_starts = 10;
  scn.seed = 108;
  scn.algorithm = Algorithm::improved;
  const StudyReport rep = run_study(scn);
  double improved_secs = 0.0, original_secs = 0.0;
  for (const auto& inst : rep.instances) {
    improved_secs += inst.seconds;
    original_secs += inst.original_seconds;
    for (double v : inst.objectives) out.fingerprint += hexfloat(v) + ",";
    for (double v : inst.original_objectives) out.fingerprint += hexfloat(v) + ",";
  }
  const double gap = rep.deviation.mean - rep.original_deviation.mean;
  out.pass = gap < 0.01 && improved_secs <= original_secs;
  out.detail = fmt("deviation improved %.4f vs original %.4f", rep.deviation.mean, rep.original_deviation.mean) +
               fmt(", time improved %.1fs vs original %.1fs", improved_secs, original_secs);
  return out;
}

Network grid(std::size_t rows, std::size_t cols) {
  Network net;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = net.add_vertex("g" + std::to_string(r) + "_" + std::to_string(c));
      net.set_coordinates(v, static_cast<double>(c), static_cast<double>(r));
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) net.add_edge(v, v + 1, 1.0);
      if (r + 1 < rows) net.add_edge(v, v + cols, 1.0);
    }
  }
  return net;
}

Network star(std::size_t leaves) {
  Network net;
  const auto h = net.add_vertex("hub");
  net.set_coordinates(h, 0.0, 0.0);
  for (std::size_t i = 0; i < leaves; ++i) {
    const double angle = 2.0 * 3.141592653589793 * static_cast<double>(i) / static_cast<double>(leaves);
    const auto v = net.add_vertex("leaf" + std::to_string(i));
    net.set_coordinates(v, std::cos(angle), std::sin(angle));
    net.add_edge(h, v, 1.0 + 0.1 * static_cast<double>(i));
  }
  return net;
}

Network path(std::size_t n) {
  Network net;
  for (std::size_t i = 0; i < n; ++i) {
    net.add_vertex("p" + std::to_string(i));
    net.set_coordinates(i, static_cast<double>(i), 0.0);
    if (i > 0) net.add_edge(i - 1, i, 0.5 + 0.25 * static_cast<double>(i % 3));
  }
  return net;
}

NetPoint random_net_point(const Network& net, Rng& rng) {
  const auto e = rng.uniform_index(net.edge_count());
  return net.canonical(NetPoint::on_edge(static_cast<std::int64_t>(e), rng.uniform(0, net.edge(e).length)));
}

Outcome network_pipeline() {
  Outcome out;
  Rng rng(109);
  int median_failures = 0, matrix_failures = 0;
  const std::vector<Network> fixtures{star(6), path(9), grid(4, 5)};
  for (const auto& net : fixtures) {
    const testing::Oracle oracle(net);
    for (int t = 0; t < 20; ++t) {
      std::vector<NetPoint> cluster;
      const std::size_t size = 1 + rng.uniform_index(7);
      for (std::size_t i = 0; i < size; ++i) cluster.push_back(random_net_point(net, rng));
      const auto dm = build_distance_matrix(net, cluster);
      double best = 1e300;
      for (std::size_t r = 0; r < dm.size(); ++r) {
        double s = 0.0;
        for (const auto& x : cluster) s += dm(dm.require_row(x), r);
        best = std::min(best, s);
      }
      const NetPoint z = network_median_center(cluster, {}, dm, rng);
      double got = 0.0;
      for (const auto& x : cluster) got += dm(dm.require_row(x), dm.require_row(z));
      if (std::abs(got - best) > 1e-9) ++median_failures;
      out.fingerprint += hexfloat(got) + ",";
      for (std::size_t r = 0; r < dm.size(); ++r) {
        for (std::size_t s = 0; s < dm.size(); ++s) {
          if (std::abs(dm(r, s) - oracle(dm.point_at(r), dm.point_at(s))) > 1e-9) ++matrix_failures;
        }
      }
    }
  }

  // End to end through the command line on a 4x5 grid.
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ppbary_acceptance_network";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const Network g = grid(4, 5);
  {
    std::ofstream edges(dir / "grid.txt"), coords(dir / "coords.txt");
    for (const auto& e : g.edges()) edges << g.vertex_name(e.u) << ' ' << g.vertex_name(e.v) << ' ' << e.length << '\n';
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      const auto xy = g.coordinates(v);
      coords << g.vertex_name(v) << ' ' << xy[0] << ' ' << xy[1] << '\n';
    }
  }
  std::vector<std::string> args{"bary"};
  for (int j = 0; j < 5; ++j) {
    PointPattern xi;
    for (int i = 0; i < 6; ++i) xi.push_back(random_net_point(g, rng));
    const auto file = (dir / ("pattern" + std::to_string(j) + ".csv")).string();
    std::ofstream f(file);
    write_pattern_csv(f, xi, &g);
    args.push_back(file);
  }
  args.insert(args.end(), {"--graph", (dir / "grid.txt").string(), "--coords", (dir / "coords.txt").string(),
                           "--p", "1", "--C", "2", "--starts", "5", "--seed", "9", "--report",
                           (dir / "report.json").string()});
  Timer timer;
  std::ostringstream cout_text, cerr_text;
  const int code = run_cli(args, cout_text, cerr_text);
  const double secs = timer.seconds();
  bool monotone = false;
  if (code == 0) {
    std::ifstream in(dir / "report.json");
    const auto rep = nlohmann::json::parse(in);
    const auto trace = rep["trace"].get<std::vector<double>>();
    monotone = std::is_sorted(trace.rbegin(), trace.rend());
  }
  out.fingerprint += cout_text.str();
  fs::remove_all(dir);

  out.pass = median_failures == 0 && matrix_failures == 0 && code == 0 && monotone && secs < 10.0;
  out.detail = std::to_string(median_failures) + " median mismatches, " + std::to_string(matrix_failures) +
               " matrix mismatches, cli exit " + std::to_string(code) +
               (monotone ? ", trace non-increasing" : ", trace not monotone") + fmt(", %.2fs", secs);
  return out;
}

}  // namespace

int main() {
  using Check = std::function<Outcome()>;
  const std::vector<std::pair<std::string, Check>> checks{
      {"metric axioms", metric_axioms},
      {"brute-force oracle", bruteforce_oracle},
      {"OSPA equivalence", ospa_equivalence},
      {"auction certification", auction_certification},
      {"monotone descent", monotone_descent},
      {"closed-form barycenters", closed_forms},
      {"mixture study deviations", table_reproduction},
      {"improved vs original parity", improved_parity},
      {"network pipeline", network_pipeline},
  };
  bool all = true;
  std::vector<Outcome> first;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    first.push_back(checks[i].second());
    const Outcome& o = first.back();
    all = all && o.pass;
    std::cout << "criterion " << i + 1 << " [" << checks[i].first << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  }

  // Determinism: repeat every randomized run with the same seeds.
  std::vector<std::string> differing;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (checks[i].second().fingerprint != first[i].fingerprint) differing.push_back(std::to_string(i + 1));
  }
  const bool same = differing.empty();
  all = all && same;
  std::string which;
  for (const auto& d : differing) which += " " + d;
  std::cout << "criterion 10 [determinism]: " << (same ? "PASS" : "FAIL") << " - "
            << (same ? "all reruns identical" : "reruns differ for criteria" + which) << std::endl;
  return all ? 0 : 1;
}
