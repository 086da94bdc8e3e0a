#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fmmkit/algebra.hpp"
#include "fmmkit/als.hpp"
#include "fmmkit/evaluator.hpp"
#include "fmmkit/io.hpp"

namespace py = pybind11;
using namespace fmmkit;

namespace {

using TextMatrix = std::vector<std::vector<std::string>>;

RationalMatrix from_text(const TextMatrix& rows) {
  const std::size_t r = rows.size(), c = r ? rows.front().size() : 0;
  RationalMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw ShapeError("ragged matrix");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = Rational::parse(rows[i][j]);
  }
  return m;
}

TextMatrix to_text(const RationalMatrix& m) {
  TextMatrix out(m.rows(), std::vector<std::string>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).to_string();
  return out;
}

py::dict exact_report(const VerificationReport& r) {
  py::dict d;
  d["passed"] = r.passed;
  d["total_equations"] = r.total_equations;
  d["failing_equations"] = r.failing_equations.size();
  return d;
}

py::dict approx_report(const ApproxReport& r) {
  py::dict d;
  d["valid"] = r.valid;
  d["discrepancy_order"] = r.discrepancy_order ? py::object(py::int_(*r.discrepancy_order)) : py::object(py::none());
  d["offending_equations"] = r.offending_equations.size();
  d["total_equations"] = r.total_equations;
  d["target_scale"] = r.target_scale;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fmmkit, m) {
  m.doc() = "Exact and approximate fast matrix multiplication tensors";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);

  py::class_<FmmTensor>(m, "Tensor")
      .def_property_readonly("dims", [](const FmmTensor& t) { return py::make_tuple(t.dims().m, t.dims().n, t.dims().p); })
      .def_property_readonly("rank", &FmmTensor::rank)
      .def_property_readonly("field", [](const FmmTensor& t) { return std::string(to_string(t.field_mode())); })
      .def_property_readonly("has_support", [](const FmmTensor& t) { return t.support().has_value(); })
      .def("__eq__", [](const FmmTensor& a, const FmmTensor& b) { return a == b; })
      .def("__repr__", [](const FmmTensor& t) {
        return "<Tensor " + t.dims().to_string() + " rank " + std::to_string(t.rank()) + " " + to_string(t.field_mode()) + ">";
      });

  m.def("load", [](const std::string& path) { return load_tensor(path); }, py::arg("path"));
  m.def("save", [](const std::string& path, const FmmTensor& t) { save_tensor(path, t); }, py::arg("path"), py::arg("tensor"));
  m.def("parse", [](const std::string& text) { return parse_tensor(text); }, py::arg("text"));
  m.def("dumps", &write_tensor, py::arg("tensor"));
  m.def("classical", [](std::size_t a, std::size_t b, std::size_t c) { return classical_tensor({a, b, c}); });

  m.def("verify_exact", [](const FmmTensor& t) { return exact_report(verify_exact(t)); });
  m.def(
      "verify_approximate",
      [](const FmmTensor& t, const std::string& mode) {
        if (mode != "strict" && mode != "scaled") throw ContractError("mode must be 'strict' or 'scaled'");
        return approx_report(verify_approximate(t, mode == "scaled" ? ApproxMode::scaled : ApproxMode::strict));
      },
      py::arg("tensor"), py::arg("mode") = "strict");
  m.def("type_polynomial", [](const FmmTensor& t) { return type_polynomial(t).to_string(); });

  m.def("kronecker", &kronecker);
  m.def(
      "direct_sum",
      [](const FmmTensor& a, const FmmTensor& b, const std::string& axis) {
        if (axis != "m" && axis != "n" && axis != "p") throw ContractError("axis must be 'm', 'n' or 'p'");
        return direct_sum(a, b, axis == "n" ? Axis::N : axis == "p" ? Axis::P : Axis::M);
      },
      py::arg("a"), py::arg("b"), py::arg("axis") = "m");
  m.def("symmetry", &symmetry_apply, py::arg("tensor"), py::arg("rotation") = 1, py::arg("transpose") = false);
  m.def(
      "isotropy",
      [](const FmmTensor& t, const TextMatrix& u, const TextMatrix& v, const TextMatrix& w) {
        return isotropy_apply(t, {from_text(u), from_text(v), from_text(w)});
      },
      py::arg("tensor"), py::arg("u"), py::arg("v"), py::arg("w"));
  m.def(
      "serendipity_groups",
      [](const FmmTensor& t, bool up_to_scalar) {
        py::list out;
        for (const auto& g : serendipity_find(t, {up_to_scalar})) {
          std::vector<std::size_t> idx(g.term_indices);
          out.append(py::make_tuple("PQS"[int(g.slot)], idx));
        }
        return out;
      },
      py::arg("tensor"), py::arg("up_to_scalar") = false);
  m.def(
      "embed",
      [](const FmmTensor& partial, const FmmTensor& block, std::vector<std::size_t> rows, std::vector<std::size_t> cols,
         std::vector<std::size_t> bcols) { return embed_and_add(partial, block, {rows, cols, bcols}); },
      py::arg("partial"), py::arg("block"), py::arg("a_rows"), py::arg("a_cols"), py::arg("b_cols"));
  m.def("hopcroft_rank_bound", &hopcroft_rank_bound);

  m.def(
      "multiply",
      [](const std::vector<FmmTensor>& levels, const TextMatrix& a, const TextMatrix& b) {
        std::atomic<std::uint64_t> counter{0};
        const RationalMatrix c = multiply_recursive(RecursionSchedule(levels), from_text(a), from_text(b), &counter);
        return py::make_tuple(to_text(c), counter.load());
      },
      py::arg("schedule"), py::arg("a"), py::arg("b"));
  m.def("count_multiplications",
        [](const std::vector<FmmTensor>& levels) { return count_multiplications(RecursionSchedule(levels)); });
  m.def(
      "error_scan",
      [](const FmmTensor& t, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const std::vector<double>& eps) {
        const ErrorScan s = epsilon_error_scan(t, a, b, eps);
        std::vector<std::pair<double, double>> samples;
        for (const auto& x : s.samples) samples.emplace_back(x.eps, x.relative_error);
        return py::make_tuple(samples, s.fitted_slope ? py::object(py::float_(*s.fitted_slope)) : py::object(py::none()));
      },
      py::arg("tensor"), py::arg("a"), py::arg("b"), py::arg("eps"));

  m.def(
      "search",
      [](std::size_t mm, std::size_t nn, std::size_t pp, std::size_t rank, std::uint64_t seed, std::size_t restarts,
         double tol, std::size_t max_sweeps) {
        SearchConfig cfg;
        cfg.dims = {mm, nn, pp};
        cfg.rank = rank;
        cfg.seed = seed;
        cfg.restarts = restarts;
        cfg.tol = tol;
        cfg.max_sweeps = max_sweeps;
        SearchResult r;
        {
          py::gil_scoped_release release;
          r = search(cfg);
        }
        py::dict d;
        d["best_residual"] = r.best_residual;
        d["successful_restarts"] = r.successful_restarts;
        d["restart_index"] = r.restart_index;
        d["sweeps_used"] = r.sweeps_used;
        d["tensor"] = r.rationalized ? py::cast(*r.rationalized) : py::object(py::none());
        return d;
      },
      py::arg("m"), py::arg("n"), py::arg("p"), py::arg("rank"), py::arg("seed") = 1, py::arg("restarts") = 10,
      py::arg("tol") = 1e-10, py::arg("max_sweeps") = 2000);
}
