#include "l0iht/geometry.hpp"
#include "l0iht/instance_gen.hpp"
#include "l0iht/io.hpp"
#include "l0iht/iht_box.hpp"
#include "l0iht/iht_cone.hpp"
#include "l0iht/oracle.hpp"
#include "l0iht/pg_solver.hpp"
#include "l0iht/runner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace l0iht;
using namespace pybind11::literals;

namespace {

using Blocks = std::vector<std::pair<std::string, Index>>;

ConeSpec make_cone(const Blocks& blocks) {
  std::vector<ConeBlock> out;
  for (const auto& [kind, dim] : blocks) {
    out.push_back({cone_kind_from_string(kind), dim});
  }
  return ConeSpec(std::move(out));
}

Blocks cone_blocks(const ConeSpec& cone) {
  Blocks out;
  for (const ConeBlock& b : cone.blocks()) out.emplace_back(to_string(b.kind), b.dim);
  return out;
}

py::list index_list(const IndexSet& s) {
  py::list l;
  for (Index i : s) l.append(i);
  return l;
}

py::dict certificate_dict(const Certificate& c) {
  return py::dict("x_plus"_a = c.x_plus, "mu"_a = c.mu,
                  "feas_residual"_a = c.feas_residual,
                  "complementarity"_a = c.complementarity,
                  "stationarity_residual"_a = c.stationarity_residual,
                  "epsilon"_a = c.epsilon, "holds"_a = c.holds);
}

py::dict report_dict(const SolveReport& r) {
  py::list trace;
  for (const IHTTraceRow& t : r.trace) {
    trace.append(py::make_tuple(t.iter, t.F, t.dx_norm, t.L_used,
                                t.support_changed));
  }
  return py::dict("x_star"_a = r.x_star, "support_zero"_a = index_list(r.support_zero),
                  "F_value"_a = r.F_value, "f_value"_a = r.f_value,
                  "F_initial"_a = r.F_initial, "outer_iters"_a = r.outer_iters,
                  "inner_iters_total"_a = r.inner_iters_total,
                  "support_changes"_a = r.support_changes, "delta"_a = r.delta,
                  "status"_a = to_string(r.status), "L_final"_a = r.L_final,
                  "grad_norm"_a = r.grad_norm,
                  "max_inner_per_outer"_a = r.max_inner_per_outer,
                  "inner_cap"_a = r.inner_cap,
                  "descent_violations"_a = r.descent_violations,
                  "trace"_a = trace);
}

py::dict outcome_dict(const RunOutcome& r) {
  py::dict d = report_dict(r.report);
  d["solver"] = to_string(r.solver);
  d["x0"] = r.x0;
  d["feas_residual"] = r.feas_residual;
  d["certificate"] = r.certificate ? py::object(certificate_dict(*r.certificate))
                                   : py::object(py::none());
  if (r.dynamic) {
    py::list rounds;
    for (const DynamicRound& k : r.dynamic->rounds) {
      rounds.append(py::dict("k"_a = k.k, "rho"_a = k.rho, "t"_a = k.t,
                             "eps_k"_a = k.eps_k,
                             "feas_residual"_a = k.feas_residual,
                             "grad_norm"_a = k.grad_norm,
                             "inner_iters"_a = k.inner_iters,
                             "retried"_a = k.retried,
                             "certificate"_a = certificate_dict(k.certificate)));
    }
    d["rounds"] = rounds;
    d["certified"] = r.dynamic->certified;
  }
  if (r.fixed) {
    d["rho"] = r.fixed->rho;
    d["nu"] = r.fixed->nu;
    d["L_rho"] = r.fixed->L_rho;
  }
  d["success"] = r.success();
  return d;
}

py::dict enumeration_dict(const EnumerationResult& e) {
  py::list records;
  for (const SupportRecord& r : e.records) {
    records.append(py::dict(
        "mask"_a = r.mask, "I"_a = index_list(r.I), "feasible"_a = r.feasible,
        "converged"_a = r.converged, "x"_a = r.x, "f"_a = r.f, "F"_a = r.F,
        "consistent"_a = r.consistent, "local_min"_a = r.local_min,
        "mu_norm"_a = r.mu_norm ? py::object(py::float_(*r.mu_norm))
                                : py::object(py::none())));
  }
  return py::dict("records"_a = records, "x_global"_a = e.x_global,
                  "F_global"_a = e.F_global, "global_mask"_a = e.global_mask,
                  "locals"_a = e.locals,
                  "t_hat"_a = e.t_hat ? py::object(py::float_(*e.t_hat))
                                      : py::object(py::none()));
}

InstanceSpec make_spec(Index n, Index m, Index k, double noise_sigma,
                       double box_radius, std::uint64_t seed, double lambda,
                       const std::string& cone_kind, Index cone_rows) {
  InstanceSpec s;
  s.n = n;
  s.m = m;
  s.k = k;
  s.noise_sigma = noise_sigma;
  s.box_radius = box_radius;
  s.seed = seed;
  s.lambda = lambda;
  if (!cone_kind.empty() && cone_kind != "none") {
    s.cone_kind = cone_family_from_string(cone_kind);
  }
  s.cone_rows = cone_rows;
  return s;
}

SolverSettings settings_from(const py::dict& options) {
  SolverSettings s;
  for (const auto& [key_obj, value] : options) {
    const auto key = key_obj.cast<std::string>();
    if (key == "L_factor") s.iht.L_factor = value.cast<double>();
    else if (key == "zero_tie_to_zero") {
      s.iht.zero_tie_to_zero = s.variant.zero_tie_to_zero = value.cast<bool>();
    } else if (key == "support_stable_window") {
      s.iht.support_stable_window = s.variant.support_stable_window =
          value.cast<int>();
    } else if (key == "grad_tol") {
      s.iht.grad_tol = s.variant.grad_tol = value.cast<double>();
    } else if (key == "max_outer") {
      s.iht.max_outer = s.variant.max_outer = value.cast<long>();
    } else if (key == "L_min") s.variant.L_min = value.cast<double>();
    else if (key == "L_max") s.variant.L_max = value.cast<double>();
    else if (key == "tau") s.variant.tau = value.cast<double>();
    else if (key == "eta") s.variant.eta = value.cast<double>();
    else if (key == "pg_L_factor") s.pg_L_factor = value.cast<double>();
    else if (key == "pg_stop_grad_tol") s.pg_stop_grad_tol = value.cast<double>();
    else if (key == "pg_max_iters") s.pg_max_iters = value.cast<long>();
    else if (key == "eps") s.penalty_eps = value.cast<double>();
    else if (key == "t") s.penalty_t = s.dynamic.t = value.cast<double>();
    else if (key == "use_variant") s.penalty.use_variant = value.cast<bool>();
    else if (key == "rho0") s.dynamic.rho0 = value.cast<double>();
    else if (key == "rho_tau") s.dynamic.tau = value.cast<double>();
    else if (key == "eps_final") s.dynamic.eps_final = value.cast<double>();
    else if (key == "eps0") s.dynamic.eps0 = value.cast<double>();
    else if (key == "max_rounds") s.dynamic.max_rounds = value.cast<int>();
    else if (key == "start") s.start = start_point_from_string(value.cast<std::string>());
    else throw ParameterError("unknown solver option '" + key + "'");
  }
  s.penalty.iht = s.iht;
  s.penalty.variant = s.variant;
  return s;
}

}  // namespace

PYBIND11_MODULE(_l0iht, m) {
  m.doc() = "Iterative hard thresholding for l0-regularized box and cone programs";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<UnsupportedProblem>(m, "UnsupportedProblem", base.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<L0Problem>(m, "L0Problem")
      .def_static(
          "least_squares",
          [](const Matrix& A, const Vector& b, const Vector& l, const Vector& u,
             double lam) {
            return L0Problem(SmoothObjective::least_squares(A, b),
                             ExtendedBox(l, u), lam);
          },
          "A"_a, "b"_a, "l"_a, "u"_a, "lam"_a)
      .def_static(
          "quadratic",
          [](const Matrix& Q, const Vector& c, const Vector& l, const Vector& u,
             double lam) {
            return L0Problem(SmoothObjective::quadratic(Q, c), ExtendedBox(l, u),
                             lam);
          },
          "Q"_a, "c"_a, "l"_a, "u"_a, "lam"_a)
      .def_property_readonly("n", &L0Problem::dim)
      .def_property_readonly("lam", [](const L0Problem& p) { return p.lambda; })
      .def_property_readonly("lipschitz",
                             [](const L0Problem& p) { return p.objective.lipschitz(); })
      .def_property_readonly("strong_modulus", [](const L0Problem& p) {
        return p.objective.strong_modulus();
      })
      .def_property_readonly("lower", [](const L0Problem& p) { return p.box.lower(); })
      .def_property_readonly("upper", [](const L0Problem& p) { return p.box.upper(); })
      .def("value", &L0Problem::value, "x"_a)
      .def("f", [](const L0Problem& p, const Vector& x) { return p.objective.value(x); })
      .def("grad",
           [](const L0Problem& p, const Vector& x) { return p.objective.gradient(x); });

  py::class_<ConeL0Problem>(m, "ConeL0Problem")
      .def_static(
          "least_squares",
          [](const Matrix& Af, const Vector& bf, const Vector& l, const Vector& u,
             double lam, const Matrix& A, const Vector& b, const Blocks& cone) {
            return ConeL0Problem(SmoothObjective::least_squares(Af, bf),
                                 ExtendedBox(l, u), lam, A, b, make_cone(cone));
          },
          "A_f"_a, "b_f"_a, "l"_a, "u"_a, "lam"_a, "A"_a, "b"_a, "cone"_a)
      .def_property_readonly("n", &ConeL0Problem::dim)
      .def_property_readonly("lam", [](const ConeL0Problem& p) { return p.lambda; })
      .def_property_readonly("A", [](const ConeL0Problem& p) { return p.A; })
      .def_property_readonly("b", [](const ConeL0Problem& p) { return p.b; })
      .def_property_readonly("cone",
                             [](const ConeL0Problem& p) { return cone_blocks(p.cone); })
      .def_property_readonly("opnorm_A", [](const ConeL0Problem& p) { return p.opnorm_A; })
      .def("infeasibility", &ConeL0Problem::infeasibility, "x"_a)
      .def("f", [](const ConeL0Problem& p, const Vector& x) {
        return p.objective.value(x);
      });

  m.def("problem_from_json",
        [](const std::string& text) -> py::object {
          AnyProblem p = io::problem_from_json(io::json::parse(text));
          return std::visit([](auto&& q) { return py::cast(std::move(q)); },
                            std::move(p));
        },
        "text"_a);
  m.def("problem_to_json",
        [](const L0Problem& p) { return io::problem_to_json(p).dump(); }, "problem"_a);
  m.def("problem_to_json",
        [](const ConeL0Problem& p) { return io::problem_to_json(p).dump(); },
        "problem"_a);

  m.def("gen_least_squares",
        [](Index n, Index m_, Index k, double noise, double radius,
           std::uint64_t seed, double lam) {
          LeastSquaresInstance inst = gen_least_squares(
              make_spec(n, m_, k, noise, radius, seed, lam, "none", 0));
          return py::make_tuple(std::move(inst.problem), inst.x_true);
        },
        "n"_a, "m"_a, "k"_a, "noise_sigma"_a = 0.0, "box_radius"_a = 5.0,
        "seed"_a = 0, "lam"_a = 0.1);
  m.def("gen_cone",
        [](const std::string& kind, Index n, Index m_, Index k, double noise,
           double radius, std::uint64_t seed, double lam, Index rows) {
          ConeInstance inst =
              gen_cone(make_spec(n, m_, k, noise, radius, seed, lam, kind, rows));
          return py::make_tuple(std::move(inst.problem), inst.x_true,
                                inst.seed_used);
        },
        "cone_kind"_a, "n"_a, "m"_a, "k"_a, "noise_sigma"_a = 0.0,
        "box_radius"_a = 5.0, "seed"_a = 0, "lam"_a = 0.1, "cone_rows"_a = 0);

  m.def("solve",
        [](const L0Problem& p, const std::string& solver, const py::kwargs& kw) {
          const SolverKind s =
              solver_from_string(solver == "auto" ? "iht" : solver);
          return outcome_dict(run_solver(AnyProblem(p), s, settings_from(kw)));
        },
        "problem"_a, "solver"_a = "auto",
        "Solve a box problem. Keyword options tune the solver, e.g. L_factor, "
        "tau, eta, grad_tol, max_outer, start.");
  m.def("solve",
        [](const ConeL0Problem& p, const std::string& solver, const py::kwargs& kw) {
          const SolverKind s =
              solver_from_string(solver == "auto" ? "penalty-fixed" : solver);
          return outcome_dict(run_solver(AnyProblem(p), s, settings_from(kw)));
        },
        "problem"_a, "solver"_a = "auto");

  m.def("enumerate_supports",
        [](const L0Problem& p, double tol) { return enumeration_dict(enumerate_box(p, tol)); },
        "problem"_a, "tol"_a = 1e-8);
  m.def("enumerate_supports",
        [](const ConeL0Problem& p, double tol) {
          return enumeration_dict(enumerate_cone(p, tol));
        },
        "problem"_a, "tol"_a = 1e-8);

  m.def("hard_threshold_step",
        [](const L0Problem& p, const Vector& x, double L, bool tie) {
          return hard_threshold_step(p.objective, x, p.box, p.lambda, L, tie);
        },
        "problem"_a, "x"_a, "L"_a, "zero_tie_to_zero"_a = true);
  m.def("threshold_coordinate", &threshold_coordinate, "s"_a, "l"_a, "u"_a,
        "lam"_a, "L"_a, "zero_tie_to_zero"_a = true);
  m.def("delta_lower_bound",
        [](const Vector& l, const Vector& u, double lam, double L) {
          const DeltaBound d = delta_lower_bound(ExtendedBox(l, u), lam, L);
          return py::make_tuple(d.delta, d.per_coord);
        },
        "l"_a, "u"_a, "lam"_a, "L"_a);
  m.def("project_box",
        [](const Vector& x, const Vector& l, const Vector& u) {
          return project_box(x, ExtendedBox(l, u));
        },
        "x"_a, "l"_a, "u"_a);
  m.def("project_dual_cone",
        [](const Vector& v, const Blocks& cone) {
          return project_dual_cone(v, make_cone(cone));
        },
        "v"_a, "cone"_a);
  m.def("dist_dual_cone",
        [](const Vector& v, const Blocks& cone) {
          return dist_dual_cone(v, make_cone(cone));
        },
        "v"_a, "cone"_a);
  m.def("choose_rho", &choose_rho, "t"_a, "eps"_a, "opnorm_A"_a);
  m.def("variant_inner_cap", &variant_inner_cap, "L_f"_a, "eta"_a, "L_min"_a,
        "tau"_a);
}
