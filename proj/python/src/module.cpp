#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "freestein/cltlab.hpp"
#include "freestein/ensemble.hpp"
#include "freestein/errors.hpp"
#include "freestein/io.hpp"
#include "freestein/ncalg.hpp"
#include "freestein/poincare.hpp"
#include "freestein/states.hpp"
#include "freestein/stein.hpp"

namespace py = pybind11;
using namespace freestein;

namespace {

using StatePtr = std::shared_ptr<MomentFunctional>;

Word to_word(const std::vector<std::size_t>& letters) {
  std::vector<Letter> out;
  for (std::size_t l : letters) {
    if (l > 255) throw Error(ErrorCode::kOther, "letter index out of range", "word");
    out.push_back(static_cast<Letter>(l));
  }
  return Word(std::move(out));
}

std::vector<std::size_t> from_word(const Word& w) { return {w.begin(), w.end()}; }

std::string dump(const io::json& j) { return j.dump(); }

Tolerances make_tol(double identity, double psd, double pinv, double admissibility) {
  return Tolerances{identity, psd, pinv, admissibility};
}

py::dict minimal_kernel_dict(const MinimalKernelResult& r) {
  py::dict d;
  d["degree"] = r.degree;
  d["coefficients"] = r.coefficients;
  d["gram_rank"] = r.gram_rank;
  d["null_dim"] = r.null_dim;
  d["min_gram_eigenvalue"] = r.min_gram_eigenvalue;
  d["sigma_lower_sq"] = r.sigma_lower_sq;
  return d;
}

}  // namespace

PYBIND11_MODULE(_freestein, m) {
  m.doc() = "Free Stein kernels, discrepancies and Poincare constants";

  static py::handle base_error = py::exception<Error>(m, "FreesteinError").release();
  static py::handle inadmissible = py::exception<Error>(m, "InadmissibleError", base_error).release();
  static py::handle invalid_state = py::exception<Error>(m, "InvalidStateError", base_error).release();
  static py::handle budget = py::exception<Error>(m, "BudgetExceededError", base_error).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::kInadmissible:
          py::set_error(inadmissible, e.what());
          break;
        case ErrorCode::kInvalidState:
          py::set_error(invalid_state, e.what());
          break;
        case ErrorCode::kBudgetExceeded:
          py::set_error(budget, e.what());
          break;
        default:
          py::set_error(base_error, e.what());
      }
    }
  });

  // Polynomials -------------------------------------------------------------

  py::class_<NcPoly>(m, "Poly")
      .def(py::init<std::size_t>(), py::arg("nvars"))
      .def_static("constant", [](std::size_t n, long c) { return NcPoly::constant(n, c); })
      .def_static("variable", &NcPoly::variable, py::arg("nvars"), py::arg("index"))
      .def_static("monomial", [](std::size_t n, const std::vector<std::size_t>& w) { return NcPoly(n, to_word(w)); })
      .def_static("quadratic", &NcPoly::quadratic_potential, py::arg("nvars"))
      .def_static("from_json", [](const std::string& s) { return io::poly_from_json(io::json::parse(s)); })
      .def("to_json", [](const NcPoly& p) { return dump(io::to_json(p)); })
      .def("scaled", [](const NcPoly& p, long num, long den) { return p * Coeff::ratio(num, den); },
           py::arg("num"), py::arg("den") = 1)
      .def_property_readonly("nvars", &NcPoly::nvars)
      .def_property_readonly("degree", &NcPoly::degree)
      .def("is_zero", &NcPoly::is_zero)
      .def("terms",
           [](const NcPoly& p) {
             std::vector<std::pair<std::vector<std::size_t>, std::complex<double>>> out;
             for (const auto& [w, c] : p.terms()) out.emplace_back(from_word(w), c.to_complex());
             return out;
           })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self == py::self)
      .def("__str__", &NcPoly::to_string)
      .def("__repr__", [](const NcPoly& p) { return "Poly(" + p.to_string() + ")"; });

  py::class_<TensorPoly>(m, "TensorPoly")
      .def_property_readonly("nvars", &TensorPoly::nvars)
      .def("is_zero", &TensorPoly::is_zero)
      .def("to_json", [](const TensorPoly& q) { return dump(io::to_json(q)); })
      .def(py::self == py::self)
      .def("__str__", &TensorPoly::to_string);

  py::class_<KernelMatrix>(m, "KernelMatrix")
      .def_static("identity", &KernelMatrix::identity)
      .def_property_readonly("nvars", &KernelMatrix::nvars)
      .def("__getitem__", [](const KernelMatrix& a, std::pair<std::size_t, std::size_t> ij) {
        if (ij.first >= a.dim() || ij.second >= a.dim()) throw py::index_error();
        return a(ij.first, ij.second);
      })
      .def("to_json", [](const KernelMatrix& a) { return dump(io::to_json(a)); })
      .def(py::self == py::self);

  auto tuple_of = [](const std::vector<NcPoly>& polys) { return PolyTuple(polys); };
  auto list_of = [](const PolyTuple& t) {
    std::vector<NcPoly> out;
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t[i]);
    return out;
  };

  m.def("involution", &involution);
  m.def("partial", [](std::size_t i, const NcPoly& p) { return partial(i, p); }, py::arg("index"), py::arg("p"));
  m.def("delta", &delta);
  m.def("cyclic_derivative", [](std::size_t i, const NcPoly& p) { return cyclic_derivative(i, p); }, py::arg("index"),
        py::arg("p"));
  m.def("cyclic_gradient", [=](const NcPoly& v) { return list_of(cyclic_gradient(v)); });
  m.def("jacobian", [=](const std::vector<NcPoly>& p) { return jacobian(tuple_of(p)); });
  m.def("explicit_kernel", &explicit_kernel);
  m.def("sharp", py::overload_cast<const TensorPoly&, const TensorPoly&>(&sharp));

  // States ------------------------------------------------------------------

  py::class_<MomentFunctional, StatePtr>(m, "State")
      .def_property_readonly("nvars", &MomentFunctional::nvars)
      .def_property_readonly("max_order", &MomentFunctional::max_order)
      .def_property_readonly("tracial", &MomentFunctional::tracial)
      .def_property_readonly("backend", &MomentFunctional::backend)
      .def("moment", [](const MomentFunctional& phi, const std::vector<std::size_t>& w) { return phi.moment(to_word(w)); })
      .def("moment_of", [](const MomentFunctional& phi, const NcPoly& p) { return moment_of_poly(phi, p); })
      .def("check", [](const MomentFunctional& phi) { return check_state(phi).violations; })
      .def("norm_upper", &MomentFunctional::norm_upper_estimates)
      .def("to_table_json", [](const MomentFunctional& phi) {
        return dump(io::to_json(*MomentTable::from_functional(phi, phi.max_order())));
      });

  m.def("semicircular", [](std::size_t n, std::size_t order) -> StatePtr {
    return std::make_shared<CumulantState>(CumulantSpec::semicircular(n, order));
  }, py::arg("nvars"), py::arg("max_order") = 12);
  m.def("free_poisson", [](std::size_t n, std::size_t order) -> StatePtr {
    return std::make_shared<CumulantState>(CumulantSpec::centered_free_poisson(n, order));
  }, py::arg("nvars"), py::arg("max_order") = 12);
  m.def("cumulant_state",
        [](std::size_t n, std::size_t order,
           const std::map<std::vector<std::size_t>, std::complex<double>>& kappa) -> StatePtr {
          CumulantSpec spec(n, order);
          for (const auto& [w, v] : kappa) spec.set(to_word(w), v);
          return std::make_shared<CumulantState>(std::move(spec));
        },
        py::arg("nvars"), py::arg("max_order"), py::arg("kappa"));
  m.def("moment_table",
        [](std::size_t n, std::size_t order, bool tracial,
           const std::map<std::vector<std::size_t>, std::complex<double>>& moments) -> StatePtr {
          auto table = std::make_shared<MomentTable>(n, order, tracial);
          for (const auto& [w, v] : moments) table->set(to_word(w), v);
          return table;
        },
        py::arg("nvars"), py::arg("max_order"), py::arg("tracial"), py::arg("moments"));
  m.def("state_from_json", [](const std::string& s) -> StatePtr {
    const io::json j = io::json::parse(s);
    if (j.contains("kappa")) return std::make_shared<CumulantState>(io::cumulants_from_json(j));
    return io::table_from_json(j);
  });
  m.def("monte_carlo",
        [](std::size_t n, std::size_t size, std::size_t samples, std::uint64_t seed, std::size_t order,
           std::size_t threads) -> StatePtr {
          MatrixEnsembleConfig cfg;
          cfg.matrix_size = size;
          cfg.samples = samples;
          cfg.seed = seed;
          cfg.threads = threads;
          cfg.generators.assign(n, GeneratorSpec::gue());
          py::gil_scoped_release release;
          return mc_moment_table(cfg, order);
        },
        py::arg("nvars"), py::arg("N"), py::arg("samples"), py::arg("seed"), py::arg("max_order") = 6,
        py::arg("threads") = 0);
  m.def("standard_error", [](const MomentFunctional& phi, const std::vector<std::size_t>& w) -> std::optional<Complex> {
    const auto* table = dynamic_cast<const MomentTable*>(&phi);
    return table ? table->standard_error(to_word(w)) : std::nullopt;
  });
  m.def("nc_partitions", &nc_partitions);
  m.def("catalan", &catalan);

  // Stein -------------------------------------------------------------------

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init(&make_tol), py::arg("identity") = 1e-10, py::arg("psd") = 1e-8, py::arg("pinv") = 1e-10,
           py::arg("admissibility") = 1e-9)
      .def_readwrite("identity", &Tolerances::identity)
      .def_readwrite("psd", &Tolerances::psd)
      .def_readwrite("pinv", &Tolerances::pinv)
      .def_readwrite("admissibility", &Tolerances::admissibility);

  m.def("centering_defect", [](StatePtr phi, const NcPoly& v) { return SteinProblem(std::move(phi), v).centering_defect(); });
  m.def("stein_residual", [=](StatePtr phi, const NcPoly& v, const KernelMatrix& a, const std::vector<NcPoly>& p) {
    return stein_residual(SteinProblem(std::move(phi), v), a, tuple_of(p));
  });
  m.def("explicit_distance", [](StatePtr phi, const NcPoly& v) {
    const ExplicitDistance d = explicit_kernel_distance_sq(SteinProblem(std::move(phi), v));
    py::dict out;
    out["distance_sq"] = d.distance_sq;
    out["distance_sq_closed"] = d.distance_sq_closed;
    out["m4"] = d.m4;
    out["bound"] = d.bound;
    out["bound_reduced"] = d.bound_reduced;
    return out;
  });
  m.def("minimal_kernel",
        [](StatePtr phi, const NcPoly& v, std::size_t degree, const Tolerances& tol) {
          return minimal_kernel_dict(minimal_kernel(SteinProblem(std::move(phi), v), degree, tol));
        },
        py::arg("state"), py::arg("potential"), py::arg("degree"), py::arg("tol") = Tolerances{});
  m.def("stein_report",
        [](StatePtr phi, const NcPoly& v, std::size_t degree, double c, const Tolerances& tol) {
          SteinProblem prob(std::move(phi), v);
          const BoundReport b = discrepancy_bounds(prob, degree, c, tol);
          const ExplicitDistance e = prob.state().tracial() ? explicit_kernel_distance_sq(prob) : ExplicitDistance{};
          return dump(io::stein_report(prob, b, e));
        },
        py::arg("state"), py::arg("potential"), py::arg("degree"), py::arg("poincare_constant"),
        py::arg("tol") = Tolerances{});

  // Poincare ----------------------------------------------------------------

  m.def("poincare_lower_bound",
        [](const MomentFunctional& phi, std::size_t degree, const Tolerances& tol) {
          const PoincareEstimate e = poincare_lower_bound(phi, degree, tol);
          py::dict out;
          out["degree"] = e.degree;
          out["c_lower"] = e.c_lower;
          out["basis_size"] = e.basis_size;
          out["null_dim"] = e.null_dim;
          out["infinite_ratio_witnesses"] = e.infinite_ratio_witnesses;
          return out;
        },
        py::arg("state"), py::arg("degree"), py::arg("tol") = Tolerances{});
  m.def("voiculescu_bound", [](std::size_t n, double norm, bool tracial) {
    const VoiculescuBound b = voiculescu_bound(n, norm, tracial);
    return py::make_tuple(b.tracial_bound, b.general_bound);
  });
  m.def("biane_gap_check",
        [](StatePtr phi, std::size_t degree) {
          const BianeGapReport r = biane_gap_check(std::move(phi), degree);
          py::dict out;
          out["c_lower"] = r.c_lower;
          out["sigma_lower_sq"] = r.sigma_lower_sq;
          out["required"] = r.required;
          out["c_upper"] = r.c_upper;
          out["margin"] = r.margin;
          out["contradiction"] = r.contradiction;
          return out;
        },
        py::arg("state"), py::arg("degree"));

  // CLT ---------------------------------------------------------------------

  m.def("clt_rate_csv",
        [](std::size_t n, std::vector<std::size_t> ks, std::size_t degree, std::size_t max_order) {
          CltExperiment exp{CumulantSpec::centered_free_poisson(n, max_order), std::move(ks), degree};
          std::ostringstream out;
          write_clt_csv(out, clt_rate_table(exp));
          return out.str();
        },
        py::arg("nvars") = 1, py::arg("ks") = std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64}, py::arg("degree") = 3,
        py::arg("max_order") = 8);
}
