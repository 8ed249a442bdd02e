#include "kleinkit/dsl.hpp"
#include "kleinkit/fock.hpp"
#include "kleinkit/klein.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace kleinkit;

namespace {

Rational to_rational(const py::handle& h) {
  if (py::isinstance<py::int_>(h)) {
    return Rational(py::str(h).cast<std::string>());
  }
  if (py::hasattr(h, "numerator") && py::hasattr(h, "denominator")) {
    const auto num = py::str(h.attr("numerator")).cast<std::string>();
    const auto den = py::str(h.attr("denominator")).cast<std::string>();
    return Rational(num + "/" + den);
  }
  if (py::isinstance<py::float_>(h)) {
    const double v = h.cast<double>();
    if (v == std::floor(v) && std::abs(v) < 1e15) {
      return Rational(static_cast<long>(v));
    }
  }
  throw py::type_error("expected an int, a Fraction or a Scalar");
}

// int, Fraction, complex with integral parts, or Scalar
UnitScalar to_scalar(const py::handle& h) {
  if (py::isinstance<UnitScalar>(h)) {
    return h.cast<UnitScalar>();
  }
  if (PyComplex_Check(h.ptr())) {
    const auto c = h.cast<std::complex<double>>();
    return UnitScalar(GaussRational(to_rational(py::float_(c.real())), to_rational(py::float_(c.imag()))));
  }
  return UnitScalar(GaussRational(to_rational(h)));
}

Statistics to_statistics(const std::string& s) {
  if (s == "boson") {
    return Statistics::boson;
  }
  if (s == "fermion") {
    return Statistics::fermion;
  }
  throw SpecError("statistics must be 'boson' or 'fermion', got '" + s + "'");
}

struct Algebra;

/// Normal-ordered operator tied to its algebra.
struct Operator {
  std::shared_ptr<const AlgebraSpec> spec;
  OpExpr expr;

  Operator with(OpExpr e) const { return {spec, normal_order(e, *spec)}; }
  const Operator& same(const Operator& o) const {
    if (o.spec != spec && !(*o.spec == *spec)) {
      throw SpecError("operators belong to different algebras");
    }
    return o;
  }
};

struct Algebra {
  std::shared_ptr<AlgebraSpec> spec;

  Algebra(const std::vector<std::pair<std::string, std::string>>& modes, const py::object& q,
          const std::map<std::pair<std::string, std::string>, py::object>& exchange) {
    std::vector<Mode> ms;
    for (const auto& [name, stats] : modes) {
      ms.push_back({name, to_statistics(stats)});
    }
    QMode qmode = QMode::formal();
    if (!(py::isinstance<py::str>(q) && q.cast<std::string>() == "formal")) {
      qmode = QMode::from_value(to_scalar(q).constant_term());
      if (!to_scalar(q).is_constant()) {
        throw SpecError("q must be 'formal' or one of 1, -1, 1j, -1j");
      }
    }
    spec = std::make_shared<AlgebraSpec>(std::move(ms), qmode);
    for (const auto& [pair, value] : exchange) {
      spec->set_exchange(pair.first, pair.second, to_scalar(value));
    }
  }

  Operator op(OpExpr e) const { return {spec, normal_order(e, *spec)}; }
  std::size_t index(const std::string& name) const { return spec->index_of(name); }
};

py::dict report_dict(const ExchangeReport& r, const AlgebraSpec& spec) {
  py::dict out;
  out["all_pass"] = r.all_pass();
  out["failures"] = r.failures();
  py::dict induced;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.size(); ++j) {
      induced[py::make_tuple(spec.mode(i).name, spec.mode(j).name)] = r.induced(i, j).str();
    }
  }
  out["induced"] = induced;
  py::list checks;
  for (const auto* group : {&r.same_mode, &r.pairs}) {
    for (const auto& c : *group) {
      py::dict d;
      d["relation"] = c.relation;
      d["modes"] = py::make_tuple(spec.mode(c.i).name, spec.mode(c.j).name);
      d["pass"] = c.pass;
      d["residual"] = render(c.residual, spec);
      checks.append(d);
    }
  }
  out["checks"] = checks;
  return out;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

} // namespace

PYBIND11_MODULE(_kleinkit, m) {
  m.doc() = "Exact ladder-operator algebra, Klein dressings and truncated Fock checks";

  py::register_exception<Error>(m, "KleinkitError", PyExc_ValueError);

  py::class_<UnitScalar>(m, "Scalar")
      .def(py::init([](const py::object& v) { return to_scalar(v); }), py::arg("value") = 0)
      .def_static("q", &UnitScalar::q, py::arg("k") = 1)
      .def("conj", [](const UnitScalar& s) { return conj(s); })
      .def("eval", [](const UnitScalar& s, double theta) { return eval(s, theta); }, py::arg("theta"))
      .def("is_zero", &UnitScalar::is_zero)
      .def("__add__", [](const UnitScalar& a, const py::object& b) { return a + to_scalar(b); })
      .def("__radd__", [](const UnitScalar& a, const py::object& b) { return to_scalar(b) + a; })
      .def("__sub__", [](const UnitScalar& a, const py::object& b) { return a - to_scalar(b); })
      .def("__rsub__", [](const UnitScalar& a, const py::object& b) { return to_scalar(b) - a; })
      .def("__mul__", [](const UnitScalar& a, const py::object& b) { return a * to_scalar(b); })
      .def("__rmul__", [](const UnitScalar& a, const py::object& b) { return to_scalar(b) * a; })
      .def("__pow__", &UnitScalar::pow)
      .def("__neg__", [](const UnitScalar& a) { return -a; })
      .def("__eq__", [](const UnitScalar& a, const py::object& b) { return a == to_scalar(b); })
      .def("__hash__", [](const UnitScalar& a) { return py::hash(py::str(a.str())); })
      .def("__str__", &UnitScalar::str)
      .def("__repr__", [](const UnitScalar& s) { return "Scalar(" + s.str() + ")"; });

  py::class_<Operator>(m, "Operator")
      .def("__add__", [](const Operator& a, const Operator& b) { return a.with(a.expr + a.same(b).expr); })
      .def("__sub__", [](const Operator& a, const Operator& b) { return a.with(a.expr - a.same(b).expr); })
      .def("__mul__", [](const Operator& a, const Operator& b) { return a.with(a.expr * a.same(b).expr); })
      .def("__add__", [](const Operator& a, const py::object& s) { return a.with(a.expr + OpExpr(to_scalar(s))); })
      .def("__radd__", [](const Operator& a, const py::object& s) { return a.with(OpExpr(to_scalar(s)) + a.expr); })
      .def("__sub__", [](const Operator& a, const py::object& s) { return a.with(a.expr - OpExpr(to_scalar(s))); })
      .def("__rsub__", [](const Operator& a, const py::object& s) { return a.with(OpExpr(to_scalar(s)) - a.expr); })
      .def("__mul__", [](const Operator& a, const py::object& s) { return a.with(a.expr * to_scalar(s)); })
      .def("__rmul__", [](const Operator& a, const py::object& s) { return a.with(to_scalar(s) * a.expr); })
      .def("__neg__", [](const Operator& a) { return a.with(-a.expr); })
      .def("__pow__", [](const Operator& a, unsigned n) {
        OpExpr acc = OpExpr::identity();
        for (unsigned k = 0; k < n; ++k) {
          acc = multiply(acc, a.expr, *a.spec);
        }
        return Operator{a.spec, acc};
      })
      .def("__eq__", [](const Operator& a, const Operator& b) { return a.expr == a.same(b).expr; })
      .def("adjoint", [](const Operator& a) { return Operator{a.spec, adjoint(a.expr, *a.spec)}; })
      .def("is_zero", [](const Operator& a) { return a.expr.empty(); })
      .def("vev", [](const Operator& a) { return vacuum_expectation(a.expr, *a.spec); })
      .def("__len__", [](const Operator& a) { return a.expr.size(); })
      .def("__str__", [](const Operator& a) { return render(a.expr, *a.spec); })
      .def("__repr__", [](const Operator& a) { return "Operator(" + render(a.expr, *a.spec) + ")"; });

  py::class_<Algebra>(m, "Algebra")
      .def(py::init<const std::vector<std::pair<std::string, std::string>>&, const py::object&,
                    const std::map<std::pair<std::string, std::string>, py::object>&>(),
           py::arg("modes"), py::arg("q") = "formal",
           py::arg("exchange") = std::map<std::pair<std::string, std::string>, py::object>{})
      .def_property_readonly("modes",
                             [](const Algebra& a) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& mo : a.spec->modes()) {
                                 out.emplace_back(mo.name, std::string(to_string(mo.statistics)));
                               }
                               return out;
                             })
      .def("exchange", [](const Algebra& a, const std::string& x, const std::string& y) {
        return a.spec->exchange(a.index(x), a.index(y));
      })
      .def("ann", [](const Algebra& a, const std::string& x) { return a.op(OpExpr::ann(a.index(x))); })
      .def("cre", [](const Algebra& a, const std::string& x) { return a.op(OpExpr::cre(a.index(x))); })
      .def("number", [](const Algebra& a, const std::string& x) { return a.op(OpExpr::number(a.index(x))); })
      .def("identity", [](const Algebra& a) { return a.op(OpExpr::identity()); })
      .def("phase",
           [](const Algebra& a, const std::map<std::string, std::int64_t>& exps) {
             PhaseVector v(a.spec->size());
             for (const auto& [name, k] : exps) {
               v[a.index(name)] = k;
             }
             return a.op(OpExpr::phase(v));
           })
      .def("bracket",
           [](const Algebra& a, const Operator& x, const Operator& y, const py::object& s) {
             return Operator{a.spec, bracket(x.expr, y.expr, to_scalar(s), *a.spec)};
           },
           py::arg("x"), py::arg("y"), py::arg("s") = 1)
      .def("dress",
           [](const Algebra& a, const std::string& map, const Operator& x) {
             return Operator{a.spec, apply_dressing(standard_map(map, *a.spec), x.expr, *a.spec)};
           })
      .def("dressed_ann",
           [](const Algebra& a, const std::string& map, const std::string& x) {
             return a.op(dressed_annihilator(standard_map(map, *a.spec), a.index(x)));
           })
      .def("verify_map",
           [](const Algebra& a, const std::string& map, const py::object& expected) {
             const auto dm = standard_map(map, *a.spec);
             ExchangeMatrix q = induced_exchange(dm, a.spec->exchange_matrix(), a.spec->qmode());
             if (!expected.is_none()) {
               q.fill(a.spec->normalize(to_scalar(expected)));
             }
             return report_dict(verify_klein(dm, *a.spec, q), *a.spec);
           },
           py::arg("map"), py::arg("expected") = py::none())
      .def("matrix",
           [](const Algebra& a, const Operator& x, std::size_t dim, double theta) {
             return evaluate(x.expr, *a.spec, FockSpace::for_spec(*a.spec, dim), theta).dense();
           },
           py::arg("op"), py::arg("dim") = 4, py::arg("theta") = 0.0)
      .def("check_zero",
           [](const Algebra& a, const Operator& x, std::size_t dim, double theta, double tol) {
             const auto space = FockSpace::for_spec(*a.spec, dim);
             const auto r = check_zero(evaluate(x.expr, *a.spec, space, theta), space, tol);
             py::dict d;
             d["norm"] = r.norm;
             d["interior_residual"] = r.interior_residual;
             d["full_residual"] = r.full_residual;
             d["pass"] = r.pass;
             return d;
           },
           py::arg("op"), py::arg("dim") = 4, py::arg("theta") = 0.0, py::arg("tol") = 1e-10);

  m.def("list_maps", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : map_catalog()) {
      out.emplace_back(e.name, e.description);
    }
    return out;
  });

  m.def(
      "check_script",
      [](const std::string& text, const std::string& name, std::optional<std::size_t> numeric_dim,
         std::optional<std::vector<double>> theta, std::optional<double> tol) {
        dsl::RunOptions opts;
        opts.numeric_dim = numeric_dim;
        opts.theta = std::move(theta);
        opts.tol = tol;
        return json_to_py(dsl::to_json(dsl::check(text, opts, name)));
      },
      py::arg("text"), py::arg("name") = "<string>", py::arg("numeric_dim") = py::none(),
      py::arg("theta") = py::none(), py::arg("tol") = py::none());
}
