#include "ppbary/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "ppbary/barycenter.hpp"
#include "ppbary/harness.hpp"
#include "ppbary/io.hpp"
#include "ppbary/location.hpp"
#include "ppbary/metrics.hpp"
#include "ppbary/network.hpp"

namespace ppbary {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

unsigned resolve_thread_flag(const std::optional<unsigned>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PPBARY_THREADS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw DomainError(std::string("PPBARY_THREADS is not a count: ") + env);
    }
  }
  return 0;
}

// Ground space plus the patterns loaded into it.
struct Workspace {
  std::shared_ptr<Network> net;
  std::unique_ptr<GroundSpace> space;
  std::vector<PointPattern> patterns;
  std::vector<PointPattern> extra;  // start patterns that need matrix rows

  const NetworkSpace* network_space() const { return dynamic_cast<const NetworkSpace*>(space.get()); }
};

std::size_t euclid_dim(const std::vector<PointPattern>& patterns) {
  for (const auto& xi : patterns) {
    if (!xi.empty()) {
      if (const auto* c = std::get_if<Coords>(&xi[0])) return c->size();
      return 2;
    }
  }
  return 2;
}

Workspace load_workspace(const std::vector<std::string>& files, const std::string& graph,
                         const std::string& coords, const std::string& start_file,
                         unsigned threads) {
  Workspace ws;
  if (!graph.empty()) {
    ws.net = std::make_shared<Network>(read_network_files(graph, coords));
    if (ws.net->vertex_count() == 0) throw DomainError("network has no vertices");
  }
  for (const auto& f : files) ws.patterns.push_back(read_pattern_file(f, ws.net.get()));
  if (!start_file.empty()) ws.extra.push_back(read_pattern_file(start_file, ws.net.get()));

  if (ws.net) {
    std::vector<NetPoint> points;
    for (const auto* group : {&ws.patterns, &ws.extra}) {
      for (const auto& xi : *group) {
        for (const auto& x : xi) {
          const auto* p = std::get_if<NetPoint>(&x);
          if (p == nullptr) throw DomainError("mixed point types in network mode");
          points.push_back(*p);
        }
      }
    }
    DistanceMatrixView dm = build_distance_matrix(*ws.net, points, threads);
    ws.space = std::make_unique<NetworkSpace>(ws.net, std::move(dm));
  } else {
    std::vector<PointPattern> all = ws.patterns;
    all.insert(all.end(), ws.extra.begin(), ws.extra.end());
    ws.space = std::make_unique<EuclideanSpace>(euclid_dim(all));
  }
  for (const auto* group : {&ws.patterns, &ws.extra}) {
    for (const auto& xi : *group) {
      for (const auto& x : xi) ws.space->check_location(x);
    }
  }
  return ws;
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
          found.push_back(entry.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  return files;
}

json location_json(const Location& x, const Network* net) {
  if (const auto* c = std::get_if<Coords>(&x)) return json(*c);
  const auto& p = std::get<NetPoint>(x);
  json j;
  if (p.is_vertex()) {
    j["vertex"] = net->vertex_name(static_cast<std::size_t>(p.vertex));
  } else {
    j["edge"] = p.edge;
    j["offset"] = p.offset;
  }
  if (net != nullptr && net->has_coordinates()) {
    const auto xy = net->coordinates(p);
    j["xy"] = {xy[0], xy[1]};
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  f << text;
}

struct DistArgs {
  std::string file_a, file_b;
  std::string metric = "tt";
  double penalty = 1.0, order = 1.0, move_scale = 1.0;
  std::optional<double> pa, pd;
  std::string space = "euclid", graph, coords;
  bool matching = false, truncate = false;
  std::optional<unsigned> threads;
};

int cmd_dist(const DistArgs& a, std::ostream& out, std::ostream& err) {
  if (a.space == "network" && a.graph.empty()) throw DomainError("--space network needs --graph");
  const std::string graph = a.space == "network" ? a.graph : std::string();
  Workspace ws = load_workspace({a.file_a, a.file_b}, graph, a.coords, {}, resolve_thread_flag(a.threads));
  const GroundSpace& space = *ws.space;
  const PointPattern& xi = ws.patterns[0];
  const PointPattern& eta = ws.patterns[1];

  Params params{a.penalty, a.metric == "spike" ? 1.0 : a.order, {}, {}};
  params.validate();
  space.check_order(params.order);

  out << std::setprecision(12);
  if (a.metric == "spike") {
    const double pa = a.pa.value_or(a.penalty), pd = a.pd.value_or(a.penalty);
    out << spike_time_distance(space, xi, eta, pa, pd, a.move_scale) << '\n';
    return kExitOk;
  }
  if (a.metric == "ospa") {
    double diam = 0.0;
    std::vector<const Location*> all;
    for (const auto& x : xi) all.push_back(&x);
    for (const auto& y : eta) all.push_back(&y);
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) diam = std::max(diam, space.distance(*all[i], *all[j]));
    }
    if (!a.truncate && diam > params.cap()) {
      err << "warning: point spread exceeds 2^(1/p) C; OSPA and RTT differ here\n";
    }
    out << ospa_distance(space, xi, eta, params, a.truncate) << '\n';
    return kExitOk;
  }
  const DistanceResult r = a.metric == "rtt" ? rtt_distance(space, xi, eta, params)
                                              : tt_distance(space, xi, eta, params);
  out << r.value << '\n';
  if (a.matching) {
    out << "xi,eta\n";
    for (const auto& [i, j] : r.matching) {
      if (i) out << *i;
      out << ',';
      if (j) out << *j;
      out << '\n';
    }
  }
  return kExitOk;
}

struct BaryArgs {
  std::vector<std::string> inputs;
  std::string algo = "original";
  std::size_t starts = 10, n_slots = 0;
  std::uint64_t seed = 1;
  double penalty = 1.0, order = 2.0;
  std::optional<double> q;
  std::vector<double> window;
  std::string graph, coords, start, out, report, svg;
  std::optional<unsigned> threads;
  int max_iter = 200, del_add = 5;
  double delta = 0.0;
  bool project_ties = false;
};

int cmd_bary(const BaryArgs& a, std::ostream& out, std::ostream& err) {
  if (a.q && *a.q != a.order) {
    throw UnsupportedConfiguration("the barycenter order q must equal the metric order p");
  }
  const unsigned threads = resolve_thread_flag(a.threads);
  const auto files = expand_inputs(a.inputs);
  if (files.empty()) throw DomainError("no pattern files given");
  Workspace ws = load_workspace(files, a.graph, a.coords, a.start, threads);
  const Params params{a.penalty, a.order, {}, {}};
  params.validate();
  const BarycenterProblem problem(*ws.space, params, ws.patterns);

  StartPolicy policy;
  if (!a.start.empty()) {
    policy = FixedStarts{{ws.extra.front()}};
  } else if (const auto* ns = ws.network_space()) {
    CandidateSet set;
    for (std::size_t v = 0; v < ns->network().vertex_count(); ++v) {
      set.candidates.push_back(NetPoint::at_vertex(static_cast<std::int64_t>(v)));
    }
    for (const auto& xi : ws.patterns) set.candidates.insert(set.candidates.end(), xi.begin(), xi.end());
    policy = set;
  } else {
    const std::size_t dim = euclid_dim(ws.patterns);
    UniformWindow w;
    if (!a.window.empty()) {
      if (a.window.size() != 2 * dim) throw DomainError("--window needs lower and upper corners");
      w.lower.assign(a.window.begin(), a.window.begin() + static_cast<std::ptrdiff_t>(dim));
      w.upper.assign(a.window.begin() + static_cast<std::ptrdiff_t>(dim), a.window.end());
    } else {
      w.lower.assign(dim, 0.0);
      w.upper.assign(dim, 1.0);
      bool first = true;
      for (const auto& xi : ws.patterns) {
        for (const auto& x : xi) {
          const auto& c = std::get<Coords>(x);
          for (std::size_t d = 0; d < dim; ++d) {
            w.lower[d] = first ? c[d] : std::min(w.lower[d], c[d]);
            w.upper[d] = first ? c[d] : std::max(w.upper[d], c[d]);
          }
          first = false;
        }
      }
    }
    policy = w;
  }

  FitOptions options;
  options.max_iter = a.max_iter;
  options.delta = a.delta;
  options.n_slots = a.n_slots;
  options.del_add_iterations = a.del_add;
  options.threads = threads;
  const RestartReport rr =
      fit_with_restarts(problem, a.starts, policy, parse_algorithm(a.algo), options, Rng(a.seed));
  const FitReport& best = rr.best;

  PointPattern barycenter = best.barycenter;
  if (a.project_ties) {
    const auto* ns = ws.network_space();
    if (ns == nullptr || !ns->network().has_coordinates()) {
      throw DomainError("--project-ties needs a network with coordinates");
    }
    barycenter = average_tied_centers(problem, best.state, *ns);
  }

  if (!best.converged) err << "warning: " << best.warning << '\n';

  std::ostringstream pattern_text;
  write_pattern_csv(pattern_text, barycenter, ws.net.get(), euclid_dim(ws.patterns));
  if (a.out.empty()) {
    out << pattern_text.str();
  } else {
    write_text(a.out, pattern_text.str());
  }

  if (!a.report.empty()) {
    json rep;
    rep["objective"] = best.objective;
    rep["iterations"] = best.iterations;
    rep["converged"] = best.converged;
    rep["trace"] = best.trace;
    rep["objectives"] = rr.objectives;
    rep["best_start"] = rr.best_index;
    rep["deviation"] = rr.deviation;
    rep["seconds"] = rr.seconds;
    rep["cardinality"] = barycenter.size();
    json points = json::array(), multi = json::array();
    for (const auto& z : barycenter) points.push_back(location_json(z, ws.net.get()));
    for (const auto& [z, count] : multipoints(barycenter)) {
      multi.push_back({{"location", location_json(z, ws.net.get())}, {"count", count}});
    }
    rep["barycenter"] = points;
    rep["multipoints"] = multi;
    if (!best.warning.empty()) rep["warning"] = best.warning;
    write_text(a.report, rep.dump(2) + "\n");
  }
  if (!a.svg.empty()) write_text(a.svg, render_svg(ws.patterns, barycenter, ws.net.get()));
  return kExitOk;
}

struct SimArgs {
  std::string config, summary, instances;
  bool table = false;
  std::optional<unsigned> threads;
};

int cmd_sim(const SimArgs& a, std::ostream& out, std::ostream&) {
  std::ifstream in(a.config);
  if (!in) throw DomainError("cannot open " + a.config);
  auto scenarios = parse_scenarios(in);
  const bool thread_override = a.threads.has_value() || std::getenv("PPBARY_THREADS") != nullptr;
  std::vector<StudyReport> reports;
  for (auto& scn : scenarios) {
    if (thread_override) scn.threads = resolve_thread_flag(a.threads);
    reports.push_back(run_study(scn));
  }
  std::ostringstream summary;
  write_summary_csv(summary, reports);
  if (!a.summary.empty()) {
    write_text(a.summary, summary.str());
  } else if (!a.table) {
    out << summary.str();
  }
  if (!a.instances.empty()) {
    std::ostringstream inst;
    write_instances_csv(inst, reports);
    write_text(a.instances, inst.str());
  }
  if (a.table) {
    for (const auto& r : reports) out << format_table_row(r) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transport-transform distances and barycenters of point patterns", "ppbary"};
  app.require_subcommand(1);

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Distance between two pattern files");
  dist_cmd->add_option("first", dist.file_a, "First pattern file")->required();
  dist_cmd->add_option("second", dist.file_b, "Second pattern file")->required();
  dist_cmd->add_option("--metric", dist.metric, "tt, rtt, ospa or spike")
      ->check(CLI::IsMember({"tt", "rtt", "ospa", "spike"}));
  dist_cmd->add_option("-C,--C,--penalty", dist.penalty, "Penalty C");
  dist_cmd->add_option("-p,--p,--order", dist.order, "Order p");
  dist_cmd->add_option("--pa", dist.pa, "Add penalty (spike)");
  dist_cmd->add_option("--pd", dist.pd, "Delete penalty (spike)");
  dist_cmd->add_option("--move-scale", dist.move_scale, "Cost per unit of movement (spike)");
  dist_cmd->add_option("--space", dist.space, "euclid or network")
      ->check(CLI::IsMember({"euclid", "network"}));
  dist_cmd->add_option("--graph", dist.graph, "Edge list 'u v length'");
  dist_cmd->add_option("--coords", dist.coords, "Vertex coordinates 'id x y'");
  dist_cmd->add_flag("--matching", dist.matching, "Also print the optimal matching");
  dist_cmd->add_flag("--truncate", dist.truncate, "Cut distances at C (ospa)");
  dist_cmd->add_option("--threads", dist.threads, "Worker threads, 0 = all cores");

  BaryArgs bary;
  auto* bary_cmd = app.add_subcommand("bary", "Barycenter of pattern files");
  bary_cmd->add_option("inputs", bary.inputs, "Pattern files or directories")->required();
  bary_cmd->add_option("--algo", bary.algo, "original or improved")
      ->check(CLI::IsMember({"original", "improved"}));
  bary_cmd->add_option("--starts", bary.starts, "Number of random starts")->check(CLI::PositiveNumber);
  bary_cmd->add_option("--n-slots", bary.n_slots, "Working number of barycenter slots");
  bary_cmd->add_option("--seed", bary.seed, "Random seed");
  bary_cmd->add_option("-C,--C,--penalty", bary.penalty, "Penalty C");
  bary_cmd->add_option("-p,--p,--order", bary.order, "Order p");
  bary_cmd->add_option("-q,--q", bary.q, "Barycenter order q (must equal p)");
  bary_cmd->add_option("--window", bary.window, "Start window: lower corner then upper corner")
      ->delimiter(',');
  bary_cmd->add_option("--graph", bary.graph, "Edge list 'u v length'");
  bary_cmd->add_option("--coords", bary.coords, "Vertex coordinates 'id x y'");
  bary_cmd->add_option("--start", bary.start, "Start pattern file (replaces random starts)");
  bary_cmd->add_option("--out", bary.out, "Barycenter pattern file (default stdout)");
  bary_cmd->add_option("--report", bary.report, "JSON fit report");
  bary_cmd->add_option("--svg", bary.svg, "SVG plot of data and barycenter");
  bary_cmd->add_option("--threads", bary.threads, "Worker threads, 0 = all cores");
  bary_cmd->add_option("--max-iter", bary.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  bary_cmd->add_option("--delta", bary.delta, "Convergence threshold (default relative)");
  bary_cmd->add_option("--del-add-iterations", bary.del_add, "Delete/add iterations (improved)");
  bary_cmd->add_flag("--project-ties", bary.project_ties,
                     "Replace tied network centers by their projected mean");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "Run a simulation study");
  sim_cmd->add_option("config", sim.config, "Scenario file (key = value)")->required();
  sim_cmd->add_option("--summary", sim.summary, "Per-scenario CSV (default stdout)");
  sim_cmd->add_option("--instances", sim.instances, "Per-instance CSV");
  sim_cmd->add_flag("--table", sim.table, "Print one table row per scenario");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads, 0 = all cores");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (dist_cmd->parsed()) return cmd_dist(dist, out, err);
    if (bary_cmd->parsed()) return cmd_bary(bary, out, err);
    if (sim_cmd->parsed()) return cmd_sim(sim, out, err);
  } catch (const UnsupportedConfiguration& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace ppbary
