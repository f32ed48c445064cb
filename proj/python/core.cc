// Python bindings. Reports and CP polynomials cross the boundary as JSON
// text; the Python package turns them into dicts.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lrpop/cp_json.h"
#include "lrpop/errors.h"
#include "lrpop/pipeline.h"
#include "lrpop/polyrep.h"
#include "lrpop/sparsity.h"

namespace py = pybind11;

namespace lrpop {
namespace {

Basis ParseBasis(const std::string& s) {
  if (s == "monomial") return Basis::Monomial;
  if (s == "bernstein") return Basis::Bernstein;
  throw InvalidInput("unknown basis '" + s + "'");
}

std::string Solve(const CPPoly& f, int order, bool dense, bool t_bounds, bool strict_degree,
                  double tol, std::optional<double> timeout) {
  PipelineOptions o;
  o.order = order;
  o.t_bounds = t_bounds;
  o.strict_degree = strict_degree;
  o.solver.tol = tol;
  if (timeout) {
    o.solver.deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(*timeout));
  }
  const InstanceInfo info = describe(f, "python");
  py::gil_scoped_release release;
  return serialize_report(dense ? solve_dense(f, o, info) : solve_cp(f, o, info));
}

}  // namespace
}  // namespace lrpop

PYBIND11_MODULE(_core, m) {
  using namespace lrpop;
  m.doc() = "Low-rank moment relaxations for polynomials in CP form.";

  py::register_exception<OrderTooSmall>(m, "OrderTooSmall", PyExc_ValueError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_ValueError);

  py::class_<CPPoly>(m, "CPPoly")
      .def(py::init([](int n, int r, const std::string& basis, const std::vector<std::vector<double>>& factors) {
             std::vector<UniPoly> fs;
             for (const auto& c : factors) fs.emplace_back(ParseBasis(basis), c);
             return CPPoly(n, r, std::move(fs));
           }),
           py::arg("n"), py::arg("r"), py::arg("basis"), py::arg("factors"),
           "Factors are given row-major: factor (l, i) at index l * n + i.")
      .def_static("from_json", [](const std::string& text) { return cp_from_json(nlohmann::json::parse(text)); })
      .def_static("load", &read_cp_file, py::arg("path"))
      .def("to_json", [](const CPPoly& f) { return cp_to_json(f).dump(); })
      .def_property_readonly("n", &CPPoly::n)
      .def_property_readonly("r", &CPPoly::r)
      .def_property_readonly("basis", [](const CPPoly& f) { return std::string(basis_name(f.basis())); })
      .def_property_readonly("max_degree", &CPPoly::max_degree)
      .def("__call__", [](const CPPoly& f, const std::vector<double>& x) {
        if (static_cast<int>(x.size()) != f.n()) throw InvalidInput("point has the wrong length");
        return cp_eval(f, x);
      })
      .def("convert", [](const CPPoly& f, const std::string& b) { return basis_convert(f, ParseBasis(b)); })
      .def("expand",
           [](const CPPoly& f, std::size_t budget) {
             const DensePoly e = cp_expand(f, budget);
             std::vector<std::pair<std::vector<int>, double>> out;
             for (const auto& [mono, c] : e.terms()) out.emplace_back(mono.exponents(f.n()), c);
             return out;
           },
           py::arg("budget") = kDefaultExpandBudget, "List of (exponent vector, coefficient).")
      .def("lipschitz_bound", &lipschitz_bound)
      .def("__eq__", [](const CPPoly& a, const CPPoly& b) { return a == b; });

  m.def("monomial_instance", &gen_monomial_instance, py::arg("n"), py::arg("d"), py::arg("r"), py::arg("seed"));
  m.def("bernstein_instance", &gen_bernstein_instance, py::arg("n"), py::arg("d"), py::arg("r"),
        py::arg("delta") = 1.0, py::arg("seed") = 0);

  m.def("_solve", &Solve, py::arg("f"), py::arg("order") = 0, py::arg("dense") = false,
        py::arg("t_bounds") = false, py::arg("strict_degree") = false, py::arg("tol") = 1e-7,
        py::arg("timeout") = std::nullopt);

  m.def("clique_tree",
        [](int r, int n) {
          const CliqueTree t = lr_clique_tree(r, n);
          std::vector<std::vector<std::string>> bags;
          for (const auto& c : t.cliques) {
            auto& bag = bags.emplace_back();
            for (int v : c) bag.push_back(lifted_var(n, v).label());
          }
          return py::make_tuple(bags, t.tree_edges, verify_rip(t));
        },
        py::arg("r"), py::arg("n"), "(bags, tree edges, running intersection holds).");
  m.def("clique_tree_dot", [](int r, int n) { return to_dot(lr_clique_tree(r, n), build_lr_graph(r, n)); },
        py::arg("r"), py::arg("n"));
}
