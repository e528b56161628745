#pragma once

#include "l0iht/iht_box.hpp"
#include "l0iht/iht_cone.hpp"
#include "l0iht/oracle.hpp"
#include "l0iht/pg_solver.hpp"
#include "l0iht/runner.hpp"
#include "l0iht/problem.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

namespace l0iht::io {

using json = nlohmann::ordered_json;

using l0iht::AnyProblem;

/// Non-finite values are written as the strings "inf", "-inf", "nan".
json number(double v);
double to_number(const json& j, const std::string& what);

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j, const std::string& what);
json matrix_to_json(const Matrix& M);
/// Dense row list, or {"format": "csr", rows, cols, indptr, indices, data}.
Matrix matrix_from_json(const json& j, const std::string& what);

json objective_to_json(const SmoothObjective& obj);
SmoothObjective objective_from_json(const json& j);

json box_to_json(const ExtendedBox& box);
ExtendedBox box_from_json(const json& j);

json cone_to_json(const ConeSpec& cone);
ConeSpec cone_from_json(const json& j);

json problem_to_json(const L0Problem& p);
json problem_to_json(const ConeL0Problem& p);
/// A cone problem is recognised by the presence of "cone".
AnyProblem problem_from_json(const json& j);

AnyProblem load_problem(const std::string& path);
void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

json report_to_json(const SolveReport& r);
json certificate_to_json(const Certificate& c);
json pg_result_to_json(const PGResult& r);
json enumeration_to_json(const EnumerationResult& e);
EnumerationResult enumeration_from_json(const json& j);
json constants_to_json(const ComplexityConstants& c);

/// Trace CSV: iter,F,dx_norm,L_used,support_changed
void write_trace_csv(std::ostream& os, const SolveReport& r);
/// Trace CSV: iter,value,gnorm
void write_pg_trace_csv(std::ostream& os, const PGResult& r);
/// Trace CSV of a dynamic run: the IHT columns plus rho,feas_residual. Each
/// row carries the round of the step that produced it.
void write_dynamic_trace_csv(std::ostream& os, const DynamicResult& r);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace l0iht::io
