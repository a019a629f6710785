#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gal/augment.hpp"
#include "gal/dataset.hpp"
#include "gal/errors.hpp"
#include "gal/eval.hpp"
#include "gal/experiment.hpp"
#include "gal/graph.hpp"
#include "gal/model.hpp"
#include "gal/objective.hpp"
#include "gal/selection.hpp"

namespace py = pybind11;
using namespace gal;

namespace {

std::vector<std::vector<double>> matrix_to_list(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows, std::vector<double>(m.cols));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out[i][j] = m(i, j);
  return out;
}

Matrix list_to_matrix(const std::vector<std::vector<double>>& v) {
  Matrix m(v.size(), v.empty() ? 0 : v[0].size());
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (v[i].size() != m.cols) throw std::invalid_argument("ragged matrix");
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = v[i][j];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph active learning laboratory core";

  py::register_exception<ConfigError>(m, "GalConfigError");
  py::register_exception<DataError>(m, "GalDataError");
  py::register_exception<NumericError>(m, "GalNumericError");

  py::class_<Graph>(m, "Graph")
      .def_readonly("n", &Graph::n)
      .def_readonly("labels", &Graph::labels)
      .def_readonly("num_classes", &Graph::num_classes)
      .def_property_readonly("num_edges", &Graph::num_undirected_edges)
      .def("degree", &Graph::degree)
      .def("has_edge", &Graph::has_edge)
      .def("features", [](const Graph& g) { return matrix_to_list(g.features); });

  m.def("load_bundle", &load_bundle, py::arg("path"));
  m.def("write_bundle", &write_bundle, py::arg("graph"), py::arg("path"), py::arg("name"));
  m.def("generate_sbm", &generate_sbm, py::arg("blocks"), py::arg("p_in"), py::arg("p_out"),
        py::arg("feat_dim"), py::arg("feat_noise"), py::arg("seed"));
  m.def("k_hop_neighbors", &k_hop_neighbors, py::arg("graph"), py::arg("node"), py::arg("k"));
  m.def(
      "ego_homophily",
      [](const Graph& g, std::size_t v) -> py::object {
        const auto h = ego_homophily(g, v);
        return h ? py::cast(*h) : py::none();
      },
      py::arg("graph"), py::arg("node"));
  m.def("mean_graph_homophily", &mean_graph_homophily, py::arg("graph"));

  m.def(
      "critic",
      [](const std::vector<double>& u, const std::vector<double>& v, double tau) {
        return critic(u, v, tau);
      },
      py::arg("u"), py::arg("v"), py::arg("tau"));

  m.def(
      "f1_scores",
      [](const std::vector<int>& pred, const std::vector<int>& truth, int c) {
        return f1_scores(pred, truth, c);
      },
      py::arg("pred"), py::arg("truth"), py::arg("num_classes"));

  m.def(
      "minimax_select",
      [](const Graph& g, const std::vector<std::vector<double>>& h,
         const std::vector<std::size_t>& pool, std::size_t k, std::uint64_t seed) {
        ALState state = ALState::init(g.n, pool, pool.size());
        Rng rng(seed);
        return minimax_select(g, list_to_matrix(h), state, k, rng);
      },
      py::arg("graph"), py::arg("embeddings"), py::arg("pool"), py::arg("k") = 1,
      py::arg("seed") = 0);

  py::class_<SbmSpec>(m, "SbmSpec")
      .def(py::init<>())
      .def_readwrite("blocks", &SbmSpec::blocks)
      .def_readwrite("p_in", &SbmSpec::p_in)
      .def_readwrite("p_out", &SbmSpec::p_out)
      .def_readwrite("feat_dim", &SbmSpec::feat_dim)
      .def_readwrite("feat_noise", &SbmSpec::feat_noise);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("sbm", &ExperimentConfig::sbm)
      .def_readwrite("dataset_path", &ExperimentConfig::dataset_path)
      .def_readwrite("use_sbm", &ExperimentConfig::use_sbm)
      .def_readwrite("budget", &ExperimentConfig::budget_spec)
      .def_readwrite("strategy", &ExperimentConfig::strategy)
      .def_readwrite("p_edge", &ExperimentConfig::p_edge)
      .def_readwrite("p_feat", &ExperimentConfig::p_feat)
      .def_readwrite("hidden", &ExperimentConfig::hidden)
      .def_readwrite("dim", &ExperimentConfig::dim)
      .def_readwrite("lr", &ExperimentConfig::lr)
      .def_readwrite("warmup_epochs", &ExperimentConfig::warmup_epochs)
      .def_readwrite("epochs_per_round", &ExperimentConfig::epochs_per_round)
      .def_readwrite("k_hops", &ExperimentConfig::k_hops)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_property(
          "tau", [](const ExperimentConfig& c) { return c.objective.tau; },
          [](ExperimentConfig& c, double v) { c.objective.tau = v; })
      .def_property(
          "lam", [](const ExperimentConfig& c) { return c.objective.lambda; },
          [](ExperimentConfig& c, double v) { c.objective.lambda = v; });

  py::class_<RoundRecord>(m, "RoundRecord")
      .def_readonly("seed", &RoundRecord::seed)
      .def_readonly("round", &RoundRecord::round)
      .def_readonly("strategy", &RoundRecord::strategy)
      .def_readonly("selected", &RoundRecord::selected)
      .def_readonly("score", &RoundRecord::score)
      .def_readonly("micro_f1", &RoundRecord::micro_f1)
      .def_readonly("macro_f1", &RoundRecord::macro_f1)
      .def_readonly("selected_homophily", &RoundRecord::selected_homophily)
      .def_readonly("graph_homophily", &RoundRecord::graph_homophily);

  py::class_<HomophilyReport>(m, "HomophilyReport")
      .def_readonly("selected_mean", &HomophilyReport::selected_mean)
      .def_readonly("graph_mean", &HomophilyReport::graph_mean)
      .def_readonly("improvement_pct", &HomophilyReport::improvement_pct);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("rounds", &RunResult::rounds)
      .def_readonly("selected", &RunResult::selected)
      .def_readonly("final_micro", &RunResult::final_micro)
      .def_readonly("final_macro", &RunResult::final_macro)
      .def_readonly("homophily", &RunResult::homophily);

  m.def("load_experiment_graph", &load_experiment_graph, py::arg("config"));
  m.def("run_experiment", &run_experiment, py::arg("config"), py::arg("graph"), py::arg("seed"));
}
