#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "percolab/error.hpp"
#include "percolab/estimators.hpp"
#include "percolab/exact.hpp"
#include "percolab/exploration.hpp"
#include "percolab/graph.hpp"
#include "percolab/harness.hpp"
#include "percolab/rng.hpp"

namespace py = pybind11;
using namespace percolab;

namespace {

RunContext context(std::uint64_t seed, std::uint64_t samples, int workers) {
  RunContext ctx;
  ctx.seed = seed;
  ctx.samples = samples;
  ctx.workers = workers;
  return ctx;
}

VertexSet as_set(const std::vector<Vertex>& members) { return VertexSet(members); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "percolab core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<Refusal>(m, "Refusal", PyExc_RuntimeError);

  py::class_<MCResult>(m, "MCResult")
      .def_readonly("estimand", &MCResult::estimand)
      .def_readonly("p", &MCResult::p)
      .def_readonly("p2", &MCResult::p2)
      .def_readonly("n", &MCResult::n)
      .def_readonly("r", &MCResult::r)
      .def_readonly("m", &MCResult::m)
      .def_readonly("estimate", &MCResult::estimate)
      .def_readonly("ci_low", &MCResult::ci_low)
      .def_readonly("ci_high", &MCResult::ci_high)
      .def_readonly("std_error", &MCResult::std_error)
      .def_readonly("samples", &MCResult::samples)
      .def_readonly("successes", &MCResult::successes)
      .def_readonly("seed", &MCResult::seed)
      .def_readonly("censored", &MCResult::censored)
      .def_readonly("warnings", &MCResult::warnings)
      .def("__repr__", [](const MCResult& r) {
        std::ostringstream out;
        out << "<MCResult " << r.estimand << " " << r.estimate << " [" << r.ci_low << ", " << r.ci_high << "]>";
        return out.str();
      });

  py::class_<GraphWindow>(m, "Window")
      .def_static("hypercubic", [](int dim, int side) { return GraphWindow::build(WindowParams::hypercubic(dim, side)); })
      .def_static("grid", [](std::vector<int> sides) { return GraphWindow::build(WindowParams::grid(std::move(sides))); })
      .def_static("regular_tree",
                  [](int degree, int radius) { return GraphWindow::build(WindowParams::regular_tree(degree, radius)); })
      .def_property_readonly("num_vertices", &GraphWindow::num_vertices)
      .def_property_readonly("num_edges", &GraphWindow::num_edges)
      .def_property_readonly("center", &GraphWindow::center)
      .def("degree", &GraphWindow::degree)
      .def("neighbors", [](const GraphWindow& w, Vertex v) {
        const auto span = w.neighbors(v);
        return std::vector<Vertex>(span.begin(), span.end());
      })
      .def("is_boundary", &GraphWindow::is_boundary)
      .def("boundary", [](const GraphWindow& w) {
        const auto span = w.boundary();
        return std::vector<Vertex>(span.begin(), span.end());
      })
      .def("ball", [](const GraphWindow& w, Vertex c, int radius) {
        const VertexSet s = w.ball(c, radius);
        return std::vector<Vertex>(s.begin(), s.end());
      })
      .def("with_boundary", [](const GraphWindow& w, const std::vector<Vertex>& b) { return w.with_boundary(as_set(b)); });

  m.def("edge_label", &edge_label, py::arg("seed"), py::arg("sample"), py::arg("edge"));
  m.def("azuma_bound", [](double p, long n, long m_) { return azuma_bound(p, n, m_).value; },
        py::arg("p"), py::arg("n"), py::arg("m"));
  m.def("markov_lower_bound", &markov_lower_bound, py::arg("mean"), py::arg("m"), py::arg("theta"));

  m.def(
      "est_disconnect_prob",
      [](const GraphWindow& w, const std::vector<Vertex>& s, const std::vector<double>& ps, std::uint64_t samples,
         std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        return est_disconnect_prob(w, as_set(s), ps, context(seed, samples, workers));
      },
      py::arg("window"), py::arg("set"), py::arg("ps"), py::arg("samples") = 10000, py::arg("seed") = 1,
      py::arg("workers") = 1);
  m.def(
      "est_psi_sum",
      [](const GraphWindow& w, const std::vector<Vertex>& s, const std::vector<double>& ps, std::uint64_t samples,
         std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        return est_psi_sum(w, as_set(s), ps, context(seed, samples, workers));
      },
      py::arg("window"), py::arg("set"), py::arg("ps"), py::arg("samples") = 10000, py::arg("seed") = 1,
      py::arg("workers") = 1);
  m.def(
      "est_cluster_tail",
      [](const GraphWindow& w, Vertex v, double p, const std::vector<long>& ns, std::uint64_t samples,
         std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        const ClusterTail tail = est_cluster_tail(w, v, p, ns, context(seed, samples, workers));
        return std::make_pair(tail.volume_tail, tail.edge_count);
      },
      py::arg("window"), py::arg("v"), py::arg("p"), py::arg("ns"), py::arg("samples") = 10000,
      py::arg("seed") = 1, py::arg("workers") = 1);
  m.def(
      "est_capacity",
      [](const GraphWindow& w, const std::vector<Vertex>& s, std::uint64_t walkers, std::uint64_t max_steps,
         std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        return est_capacity(w, as_set(s), walkers, max_steps, context(seed, walkers, workers));
      },
      py::arg("window"), py::arg("set"), py::arg("walkers") = 10000, py::arg("max_steps") = 100000,
      py::arg("seed") = 1, py::arg("workers") = 1);
  m.def(
      "est_repulsion_tail",
      [](const GraphWindow& w, Vertex v, double p1, double p2, const std::vector<long>& ns, std::uint64_t samples,
         std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        return est_repulsion_tail(w, v, p1, p2, ns, context(seed, samples, workers));
      },
      py::arg("window"), py::arg("v"), py::arg("p1"), py::arg("p2"), py::arg("ns"), py::arg("samples") = 10000,
      py::arg("seed") = 1, py::arg("workers") = 1);
  m.def(
      "est_ir_prob",
      [](const GraphWindow& w, const std::vector<Vertex>& s, double p, const std::vector<long>& rs,
         std::uint64_t samples, std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        return est_ir_prob(w, as_set(s), p, rs, context(seed, samples, workers));
      },
      py::arg("window"), py::arg("set"), py::arg("p"), py::arg("rs"), py::arg("samples") = 10000,
      py::arg("seed") = 1, py::arg("workers") = 1);
  m.def(
      "est_azuma_event",
      [](const GraphWindow& w, Vertex v, double p, const std::vector<std::pair<long, long>>& mn,
         std::uint64_t samples, std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        return est_azuma_event(w, v, p, mn, context(seed, samples, workers));
      },
      py::arg("window"), py::arg("v"), py::arg("p"), py::arg("mn"), py::arg("samples") = 10000,
      py::arg("seed") = 1, py::arg("workers") = 1);

  m.def(
      "exact_disconnect_prob",
      [](const GraphWindow& w, const std::vector<int>& s, double p) {
        return exact::disconnect_prob(exact::SmallGraph::from_window(w), s, p);
      },
      py::arg("window"), py::arg("set"), py::arg("p"));
  m.def(
      "exact_capacity", [](const GraphWindow& w, const std::vector<Vertex>& s) { return exact::capacity(w, as_set(s)); },
      py::arg("window"), py::arg("set"));

  m.def("version", &tool_version);
  m.def(
      "run",
      [](const std::string& command, const std::string& config, std::optional<std::uint64_t> seed,
         std::optional<int> workers, std::optional<std::string> out) {
        CommandOptions options;
        options.command = command;
        options.config_path = config;
        options.seed = seed;
        options.workers = workers;
        options.out = out;
        std::ostringstream log;
        std::ostringstream err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_command(options, log, err);
        }
        return py::make_tuple(code, log.str(), err.str());
      },
      py::arg("command"), py::arg("config") = "", py::arg("seed") = py::none(), py::arg("workers") = py::none(),
      py::arg("out") = py::none());
}
