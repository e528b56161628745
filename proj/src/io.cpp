#include "l0iht/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace l0iht::io {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParameterError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

std::optional<Constants> constants_from_json(const json& j) {
  if (!j.contains("lipschitz")) return std::nullopt;
  return Constants{to_number(j.at("lipschitz"), "objective.lipschitz"),
                   j.contains("strong_modulus")
                       ? to_number(j.at("strong_modulus"),
                                   "objective.strong_modulus")
                       : 0.0};
}

json index_set_to_json(const IndexSet& s) {
  json a = json::array();
  for (Index i : s) a.push_back(i);
  return a;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double to_number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInf;
    if (s == "-inf" || s == "-Infinity") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw ParameterError(what + ": expected a number");
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParameterError(what + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = to_number(j[i], what);
  }
  return v;
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) rows.push_back(vector_to_json(M.row(i)));
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (j.is_object()) {
    if (j.value("format", std::string()) != "csr") {
      throw ParameterError(what + ": unknown matrix format");
    }
    const auto rows = field(j, "rows", what).get<Index>();
    const auto cols = field(j, "cols", what).get<Index>();
    const auto indptr = field(j, "indptr", what).get<std::vector<Index>>();
    const auto indices = field(j, "indices", what).get<std::vector<Index>>();
    const Vector data = vector_from_json(field(j, "data", what), what);
    if (rows < 0 || cols < 0 ||
        indptr.size() != static_cast<std::size_t>(rows + 1) ||
        indices.size() != static_cast<std::size_t>(data.size()) ||
        indptr.front() != 0 ||
        indptr.back() != static_cast<Index>(indices.size())) {
      throw DimensionError(what + ": inconsistent CSR arrays");
    }
    Matrix M = Matrix::Zero(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      const auto lo = indptr[static_cast<std::size_t>(r)];
      const auto hi = indptr[static_cast<std::size_t>(r + 1)];
      if (lo > hi) throw DimensionError(what + ": indptr not monotone");
      for (Index p = lo; p < hi; ++p) {
        const Index c = indices[static_cast<std::size_t>(p)];
        if (c < 0 || c >= cols) throw DimensionError(what + ": column out of range");
        M(r, c) += data(p);
      }
    }
    return M;
  }
  if (!j.is_array()) throw ParameterError(what + ": expected a list of rows");
  const auto rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  const auto cols = static_cast<Index>(j[0].size());
  Matrix M(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)], what);
    if (row.size() != cols) throw DimensionError(what + ": ragged rows");
    M.row(r) = row.transpose();
  }
  return M;
}

json objective_to_json(const SmoothObjective& obj) {
  json j;
  switch (obj.kind()) {
    case SmoothObjective::Kind::LeastSquares:
      j["kind"] = "least_squares";
      j["A"] = matrix_to_json(obj.matrix());
      j["b"] = vector_to_json(obj.vector());
      break;
    case SmoothObjective::Kind::Quadratic:
      j["kind"] = "quadratic";
      j["Q"] = matrix_to_json(obj.matrix());
      j["c"] = vector_to_json(obj.vector());
      break;
    case SmoothObjective::Kind::Perturbed:
      j["kind"] = "perturbed";
      j["base"] = objective_to_json(obj.base());
      j["nu"] = obj.nu();
      return j;
  }
  j["lipschitz"] = obj.lipschitz();
  j["strong_modulus"] = obj.strong_modulus();
  return j;
}

SmoothObjective objective_from_json(const json& j) {
  const std::string kind = field(j, "kind", "objective").get<std::string>();
  if (kind == "least_squares") {
    return SmoothObjective::least_squares(
        matrix_from_json(field(j, "A", "objective"), "objective.A"),
        vector_from_json(field(j, "b", "objective"), "objective.b"),
        constants_from_json(j));
  }
  if (kind == "quadratic") {
    return SmoothObjective::quadratic(
        matrix_from_json(field(j, "Q", "objective"), "objective.Q"),
        vector_from_json(field(j, "c", "objective"), "objective.c"),
        constants_from_json(j));
  }
  if (kind == "perturbed") {
    return SmoothObjective::perturbed(
        objective_from_json(field(j, "base", "objective")),
        to_number(field(j, "nu", "objective"), "objective.nu"));
  }
  throw ParameterError("objective: unknown kind '" + kind + "'");
}

json box_to_json(const ExtendedBox& box) {
  return {{"l", vector_to_json(box.lower())}, {"u", vector_to_json(box.upper())}};
}

ExtendedBox box_from_json(const json& j) {
  return ExtendedBox(vector_from_json(field(j, "l", "box"), "box.l"),
                     vector_from_json(field(j, "u", "box"), "box.u"));
}

json cone_to_json(const ConeSpec& cone) {
  json a = json::array();
  for (const ConeBlock& b : cone.blocks()) {
    a.push_back({{"type", to_string(b.kind)}, {"dim", b.dim}});
  }
  return a;
}

ConeSpec cone_from_json(const json& j) {
  if (!j.is_array()) throw ParameterError("cone: expected a list of blocks");
  std::vector<ConeBlock> blocks;
  for (const json& b : j) {
    blocks.push_back({cone_kind_from_string(field(b, "type", "cone").get<std::string>()),
                      field(b, "dim", "cone").get<Index>()});
  }
  return ConeSpec(std::move(blocks));
}

json problem_to_json(const L0Problem& p) {
  return {{"objective", objective_to_json(p.objective)},
          {"box", box_to_json(p.box)},
          {"lambda", p.lambda}};
}

json problem_to_json(const ConeL0Problem& p) {
  return {{"objective", objective_to_json(p.objective)},
          {"box", box_to_json(p.box)},
          {"lambda", p.lambda},
          {"cone", cone_to_json(p.cone)},
          {"A", matrix_to_json(p.A)},
          {"b", vector_to_json(p.b)},
          {"opnorm_A", p.opnorm_A}};
}

AnyProblem problem_from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("problem: expected an object");
  static const char* known[] = {"objective", "box", "lambda", "cone", "A", "b",
                                "opnorm_A"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ParameterError("problem: unknown field '" + key + "'");
    }
  }
  SmoothObjective obj = objective_from_json(field(j, "objective", "problem"));
  ExtendedBox box = box_from_json(field(j, "box", "problem"));
  const double lambda = to_number(field(j, "lambda", "problem"), "lambda");
  if (!j.contains("cone")) {
    if (j.contains("A") || j.contains("b")) {
      throw ParameterError("problem: A and b need a cone");
    }
    return L0Problem(std::move(obj), std::move(box), lambda);
  }
  ConeSpec cone = cone_from_json(j.at("cone"));
  Matrix A = matrix_from_json(field(j, "A", "problem"), "A");
  Vector b = vector_from_json(field(j, "b", "problem"), "b");
  if (A.rows() == 0 && cone.dim() > 0) A.resize(0, box.dim());
  const double opnorm =
      j.contains("opnorm_A") ? to_number(j.at("opnorm_A"), "opnorm_A") : 0.0;
  return ConeL0Problem(std::move(obj), std::move(box), lambda, std::move(A),
                       std::move(b), std::move(cone), opnorm);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParameterError("'" + path + "': " + e.what());
  }
}

AnyProblem load_problem(const std::string& path) {
  try {
    return problem_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ParameterError("'" + path + "': " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw ParameterError("write failed for '" + path + "'");
}

json report_to_json(const SolveReport& r) {
  json j;
  j["status"] = to_string(r.status);
  j["x_star"] = vector_to_json(r.x_star);
  j["support_zero"] = index_set_to_json(r.support_zero);
  j["F_value"] = number(r.F_value);
  j["f_value"] = number(r.f_value);
  j["F_initial"] = number(r.F_initial);
  j["outer_iters"] = r.outer_iters;
  j["inner_iters_total"] = r.inner_iters_total;
  j["support_changes"] = r.support_changes;
  j["delta"] = number(r.delta);
  j["L_final"] = number(r.L_final);
  j["grad_norm"] = number(r.grad_norm);
  j["max_inner_per_outer"] = r.max_inner_per_outer;
  j["inner_cap"] = r.inner_cap;
  j["descent_violations"] = r.descent_violations;
  return j;
}

json certificate_to_json(const Certificate& c) {
  return {{"feas_residual", number(c.feas_residual)},
          {"complementarity", number(c.complementarity)},
          {"stationarity_residual", number(c.stationarity_residual)},
          {"epsilon", number(c.epsilon)},
          {"holds", c.holds},
          {"mu", vector_to_json(c.mu)}};
}

json pg_result_to_json(const PGResult& r) {
  static const char* stops[] = {"grad_tol", "gap_certified", "budget", "cap"};
  json j;
  j["status"] = to_string(r.status);
  j["stop"] = stops[static_cast<int>(r.stop)];
  j["x_star"] = vector_to_json(r.x);
  j["value"] = number(r.value);
  j["gnorm"] = number(r.gnorm);
  j["iters"] = r.iters;
  j["budget"] = r.budget ? json(*r.budget) : json(nullptr);
  return j;
}

json enumeration_to_json(const EnumerationResult& e) {
  json recs = json::array();
  for (const SupportRecord& r : e.records) {
    json j;
    j["mask"] = r.mask;
    j["I"] = index_set_to_json(r.I);
    j["feasible"] = r.feasible;
    j["converged"] = r.converged;
    j["x"] = vector_to_json(r.x);
    j["f"] = number(r.f);
    j["F"] = number(r.F);
    j["consistent"] = r.consistent;
    j["local_min"] = r.local_min;
    j["mu_norm"] = r.mu_norm ? number(*r.mu_norm) : json(nullptr);
    if (r.mu.size() > 0) j["mu"] = vector_to_json(r.mu);
    recs.push_back(std::move(j));
  }
  json locals = json::array();
  for (auto m : e.locals) locals.push_back(m);
  return {{"records", std::move(recs)},
          {"global", {{"mask", e.global_mask},
                      {"x", vector_to_json(e.x_global)},
                      {"F", number(e.F_global)}}},
          {"locals", std::move(locals)},
          {"t_hat", e.t_hat ? number(*e.t_hat) : json(nullptr)},
          {"zero_tol", e.zero_tol}};
}

EnumerationResult enumeration_from_json(const json& j) {
  const std::string where = "oracle report";
  EnumerationResult e;
  for (const json& r : field(j, "records", where)) {
    SupportRecord rec;
    rec.mask = field(r, "mask", where).get<std::uint32_t>();
    rec.I = field(r, "I", where).get<IndexSet>();
    rec.feasible = field(r, "feasible", where).get<bool>();
    rec.converged = field(r, "converged", where).get<bool>();
    rec.x = vector_from_json(field(r, "x", where), where + ".x");
    rec.f = to_number(field(r, "f", where), where + ".f");
    rec.F = to_number(field(r, "F", where), where + ".F");
    rec.consistent = field(r, "consistent", where).get<bool>();
    rec.local_min = field(r, "local_min", where).get<bool>();
    if (r.contains("mu_norm") && !r.at("mu_norm").is_null()) {
      rec.mu_norm = to_number(r.at("mu_norm"), where + ".mu_norm");
    }
    if (r.contains("mu")) rec.mu = vector_from_json(r.at("mu"), where + ".mu");
    if (rec.mask != e.records.size()) {
      throw ParameterError(where + ": records must be ordered by mask");
    }
    e.records.push_back(std::move(rec));
  }
  const json& g = field(j, "global", where);
  e.global_mask = field(g, "mask", where).get<std::uint32_t>();
  e.x_global = vector_from_json(field(g, "x", where), where + ".global.x");
  e.F_global = to_number(field(g, "F", where), where + ".global.F");
  e.locals = field(j, "locals", where).get<std::vector<std::uint32_t>>();
  if (j.contains("t_hat") && !j.at("t_hat").is_null()) {
    e.t_hat = to_number(j.at("t_hat"), where + ".t_hat");
  }
  e.zero_tol = to_number(field(j, "zero_tol", where), where + ".zero_tol");
  return e;
}

json constants_to_json(const ComplexityConstants& c) {
  auto opt = [](const std::optional<double>& v) {
    return v ? number(*v) : json(nullptr);
  };
  return {{"alpha", number(c.alpha)}, {"beta", number(c.beta)},
          {"delta", number(c.delta)}, {"J_budget", c.J_budget},
          {"F0", number(c.F0)},       {"F_star", number(c.F_star)},
          {"gamma", opt(c.gamma)},    {"c", opt(c.c)},
          {"d", opt(c.d)},            {"omega", opt(c.omega)},
          {"theta", opt(c.theta)},    {"notes", c.notes}};
}

void write_trace_csv(std::ostream& os, const SolveReport& r) {
  os << "iter,F,dx_norm,L_used,support_changed\n";
  for (const IHTTraceRow& t : r.trace) {
    os << t.iter << ',' << format_double(t.F) << ',' << format_double(t.dx_norm)
       << ',' << format_double(t.L_used) << ',' << (t.support_changed ? 1 : 0)
       << '\n';
  }
}

void write_pg_trace_csv(std::ostream& os, const PGResult& r) {
  os << "iter,value,gnorm\n";
  for (const PGTraceRow& t : r.trace) {
    os << t.iter << ',' << format_double(t.value) << ','
       << format_double(t.gnorm) << '\n';
  }
}

void write_dynamic_trace_csv(std::ostream& os, const DynamicResult& r) {
  os << "iter,F,dx_norm,L_used,support_changed,round,rho,feas_residual\n";
  for (const DynamicTraceRow& t : r.trace) {
    os << t.iter << ',' << format_double(t.F) << ',' << format_double(t.dx_norm)
       << ',' << format_double(t.L_used) << ',' << (t.support_changed ? 1 : 0)
       << ',' << t.round << ',' << format_double(t.rho) << ','
       << format_double(t.feas_residual) << '\n';
  }
}

}  // namespace l0iht::io
