#include "sparsedens/analysis.hpp"
#include "sparsedens/density.hpp"
#include "sparsedens/dictionary.hpp"
#include "sparsedens/empirical.hpp"
#include "sparsedens/errors.hpp"
#include "sparsedens/experiments.hpp"
#include "sparsedens/gram.hpp"
#include "sparsedens/serialization.hpp"
#include "sparsedens/solvers.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sparsedens;

namespace {

GramMatrix to_gram(const Eigen::MatrixXd& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("Gram matrix must be square");
  return GramMatrix(g);
}

py::dict solve_result(const SolveResult& r) {
  py::dict d;
  d["coefficients"] = r.coefficients.values;
  d["support"] = r.coefficients.support;
  d["l1_norm"] = r.coefficients.l1_norm;
  d["status"] = std::string(to_string(r.report.status));
  d["iterations"] = r.report.iterations;
  d["max_constraint_violation"] = r.report.max_constraint_violation;
  d["certificate"] = r.report.duality_gap_or_kkt_residual;
  if (r.dual.size() > 0) d["dual"] = r.dual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dantzig and Lasso density estimation over dictionaries on [0, 1].";
  m.attr("__version__") = std::string(version());

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  py::class_<Dictionary>(m, "Dictionary")
      .def(py::init([](const std::string& kind, std::size_t n) {
             return Dictionary::build(parse_dictionary_kind(kind), n);
           }),
           py::arg("kind"), py::arg("n"))
      .def_property_readonly("kind", [](const Dictionary& d) { return std::string(to_string(d.kind())); })
      .def_property_readonly("n", &Dictionary::sample_size)
      .def("__len__", &Dictionary::size)
      .def("name", &Dictionary::member_name, py::arg("m"))
      .def("evaluate", &Dictionary::evaluate, py::arg("m"), py::arg("x"))
      .def("synthesize",
           [](const Dictionary& d, const Eigen::VectorXd& lambda, const std::vector<double>& xs) {
             return d.synthesize(lambda, xs);
           },
           py::arg("coefficients"), py::arg("xs"))
      .def_property_readonly("sup_norms", &Dictionary::sup_norms)
      .def("gram", [](const Dictionary& d) -> Eigen::MatrixXd { return gram(d).matrix(); });

  py::class_<TrueDensity>(m, "Density")
      .def(py::init([](const std::string& name) { return TrueDensity::make(parse_density(name)); }), py::arg("name"))
      .def_property_readonly("name", [](const TrueDensity& f) { return std::string(f.name()); })
      .def("pdf", &TrueDensity::pdf, py::arg("x"))
      .def("cdf", &TrueDensity::cdf, py::arg("x"))
      .def_property_readonly("sup_norm", &TrueDensity::sup_norm)
      .def("sample", [](const TrueDensity& f, std::size_t n, std::uint64_t seed) { return f.sample(n, seed).values; },
           py::arg("n"), py::arg("seed"));

  m.def(
      "empirical_stats",
      [](const std::vector<double>& xs, const Dictionary& d, double gamma) {
        const auto s = empirical_stats(make_sample(xs), d, gamma);
        py::dict out;
        out["beta_hat"] = s.beta_hat;
        out["sigma_hat_sq"] = s.sigma_hat_sq;
        out["sigma_tilde_sq"] = s.sigma_tilde_sq;
        out["eta"] = s.eta;
        return out;
      },
      py::arg("xs"), py::arg("dictionary"), py::arg("gamma") = 1.01);

  m.def(
      "dantzig_solve",
      [](const Eigen::MatrixXd& g, const Eigen::VectorXd& beta, const Eigen::VectorXd& eta) {
        return solve_result(dantzig_solve({to_gram(g), beta, eta}));
      },
      py::arg("gram"), py::arg("beta_hat"), py::arg("eta"));
  m.def(
      "lasso_solve",
      [](const Eigen::MatrixXd& g, const Eigen::VectorXd& beta, const Eigen::VectorXd& eta) {
        return solve_result(lasso_solve({to_gram(g), beta, eta}));
      },
      py::arg("gram"), py::arg("beta_hat"), py::arg("eta"));
  m.def(
      "soft_threshold",
      [](const Eigen::VectorXd& beta, const Eigen::VectorXd& eta) { return soft_threshold_estimate(beta, eta).values; },
      py::arg("beta_hat"), py::arg("eta"));

  m.def(
      "check_assumptions",
      [](const Eigen::MatrixXd& g, std::size_t s, std::size_t l) {
        return to_json(check_assumptions(to_gram(g), s, l)).dump();
      },
      py::arg("gram"), py::arg("s"), py::arg("l"), "JSON record of both structural assumptions and their constants.");

  m.def(
      "replicate",
      [](const std::string& density, const std::string& dict, std::size_t n, double gamma, const std::string& method,
         std::size_t reps, std::uint64_t seed) {
        ExperimentConfig c;
        c.density = parse_density(density);
        c.dictionary = parse_dictionary_kind(dict);
        c.n = n;
        c.gamma = gamma;
        c.method = parse_method(method);
        c.replications = reps;
        c.seed = seed;
        std::vector<double> risks;
        for (const auto& r : run_experiment(c).records) risks.push_back(r.ok ? r.risk : std::nan(""));
        return risks;
      },
      py::arg("density"), py::arg("dictionary"), py::arg("n"), py::arg("gamma") = 1.01,
      py::arg("method") = "dantzig", py::arg("replications") = 1, py::arg("seed") = 1,
      "L2 risk of each replication (nan where the solver failed).");
}
