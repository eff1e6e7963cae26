#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ppbary/barycenter.hpp"
#include "ppbary/cli.hpp"
#include "ppbary/harness.hpp"
#include "ppbary/location.hpp"
#include "ppbary/metrics.hpp"

namespace py = pybind11;
using namespace ppbary;

namespace {

using Rows = std::vector<Coords>;

std::size_t dimension(const std::vector<Rows>& patterns) {
  for (const auto& xi : patterns) {
    if (!xi.empty()) return xi.front().size();
  }
  return 2;
}

Rows to_rows(const PointPattern& xi) {
  Rows rows;
  for (const auto& x : xi) rows.push_back(std::get<Coords>(x));
  return rows;
}

Params make_params(double penalty, double order, std::optional<double> pa, std::optional<double> pd) {
  Params params{penalty, order, pa, pd};
  params.validate();
  return params;
}

py::list matching_list(const std::vector<MatchPair>& matching) {
  py::list out;
  for (const auto& [i, j] : matching) {
    out.append(py::make_tuple(i ? py::cast(*i) : py::none(), j ? py::cast(*j) : py::none()));
  }
  return out;
}

py::dict distance(bool relative, const Rows& xi, const Rows& eta, double penalty, double order,
                  std::optional<double> pa, std::optional<double> pd) {
  const EuclideanSpace space(dimension({xi, eta}));
  const Params params = make_params(penalty, order, pa, pd);
  const auto a = make_pattern(xi), b = make_pattern(eta);
  const DistanceResult r = relative ? rtt_distance(space, a, b, params) : tt_distance(space, a, b, params);
  py::dict out;
  out["value"] = r.value;
  out["matching"] = matching_list(r.matching);
  return out;
}

py::dict barycenter(const std::vector<Rows>& patterns, double penalty, double order, std::size_t starts,
                    std::uint64_t seed, const std::string& algorithm, std::optional<Rows> start,
                    std::optional<std::vector<double>> weights, int max_iter, unsigned threads) {
  const EuclideanSpace space(dimension(patterns));
  std::vector<PointPattern> data;
  for (const auto& rows : patterns) data.push_back(make_pattern(rows));
  const BarycenterProblem problem(space, make_params(penalty, order, {}, {}), data,
                                  weights.value_or(std::vector<double>{}));
  StartPolicy policy;
  if (start) {
    policy = FixedStarts{{make_pattern(*start)}};
  } else {
    UniformWindow w;
    const std::size_t dim = space.dim();
    bool first = true;
    for (const auto& rows : patterns) {
      for (const auto& c : rows) {
        if (first) w.lower = w.upper = c;
        for (std::size_t d = 0; d < dim; ++d) {
          w.lower[d] = std::min(w.lower[d], c[d]);
          w.upper[d] = std::max(w.upper[d], c[d]);
        }
        first = false;
      }
    }
    if (first) w.lower = w.upper = Coords(dim, 0.0);
    policy = w;
  }
  FitOptions options;
  options.max_iter = max_iter;
  options.threads = threads;
  RestartReport rr;
  {
    py::gil_scoped_release release;
    rr = fit_with_restarts(problem, starts, policy, parse_algorithm(algorithm), options, Rng(seed));
  }
  py::dict out;
  out["barycenter"] = to_rows(rr.best.barycenter);
  out["objective"] = rr.best.objective;
  out["iterations"] = rr.best.iterations;
  out["converged"] = rr.best.converged;
  out["trace"] = rr.best.trace;
  out["objectives"] = rr.objectives;
  out["deviation"] = rr.deviation;
  return out;
}

std::string simulate(const std::string& config) {
  std::istringstream in(config);
  std::vector<StudyReport> reports;
  {
    py::gil_scoped_release release;
    for (const auto& scn : parse_scenarios(in)) reports.push_back(run_study(scn));
  }
  std::ostringstream out;
  write_summary_csv(out, reports);
  return out.str();
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_ppbary, m) {
  m.doc() = "Point pattern distances and barycenters";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedConfiguration>(m, "UnsupportedConfiguration", PyExc_NotImplementedError);

  m.def(
      "tt_distance",
      [](const Rows& xi, const Rows& eta, double penalty, double order, std::optional<double> pa,
         std::optional<double> pd) { return distance(false, xi, eta, penalty, order, pa, pd); },
      py::arg("xi"), py::arg("eta"), py::arg("penalty") = 1.0, py::arg("order") = 1.0,
      py::arg("add_penalty") = py::none(), py::arg("delete_penalty") = py::none(),
      "Transport-transform distance between two Euclidean point patterns.");
  m.def(
      "rtt_distance",
      [](const Rows& xi, const Rows& eta, double penalty, double order) {
        return distance(true, xi, eta, penalty, order, {}, {});
      },
      py::arg("xi"), py::arg("eta"), py::arg("penalty") = 1.0, py::arg("order") = 1.0,
      "Relative transport-transform distance.");
  m.def(
      "ospa_distance",
      [](const Rows& xi, const Rows& eta, double penalty, double order, bool truncate) {
        const EuclideanSpace space(dimension({xi, eta}));
        return ospa_distance(space, make_pattern(xi), make_pattern(eta), make_params(penalty, order, {}, {}),
                             truncate);
      },
      py::arg("xi"), py::arg("eta"), py::arg("penalty") = 1.0, py::arg("order") = 1.0,
      py::arg("truncate") = false);
  m.def("barycenter", &barycenter, py::arg("patterns"), py::arg("penalty") = 1.0, py::arg("order") = 2.0,
        py::arg("starts") = 10, py::arg("seed") = 1, py::arg("algorithm") = "original",
        py::arg("start") = py::none(), py::arg("weights") = py::none(), py::arg("max_iter") = 200,
        py::arg("threads") = 0, "Local minimizer of the weighted Frechet functional over restarts.");
  m.def("simulate", &simulate, py::arg("config"), "Runs a scenario file given as text; returns summary CSV.");
  m.def("cli", &cli, py::arg("args"), "Runs a command line; returns (exit code, stdout, stderr).");
}
