#include "run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace l0iht::cli {

namespace {

json defaults() {
  const IHTConfig iht;
  const VariantConfig var;
  const SolverSettings st;
  const PenaltyConfig pen;
  const DynamicSchedule dyn;
  const InstanceSpec gen;
  json d = json::object();
  d["input"] = "";
  d["solver"] = "auto";
  d["start"] = "auto";
  d["output.dir"] = "";
  d["output.stem"] = "";
  d["output.format"] = "json";

  d["iht.L_factor"] = iht.L_factor;
  d["iht.zero_tie_to_zero"] = iht.zero_tie_to_zero;
  d["iht.support_stable_window"] = iht.support_stable_window;
  d["iht.grad_tol"] = iht.grad_tol;
  d["iht.max_outer"] = iht.max_outer;

  d["variant.L_min"] = var.L_min;
  d["variant.L_max"] = var.L_max;
  d["variant.tau"] = var.tau;
  d["variant.eta"] = var.eta;
  d["variant.zero_tie_to_zero"] = var.zero_tie_to_zero;
  d["variant.support_stable_window"] = var.support_stable_window;
  d["variant.grad_tol"] = var.grad_tol;
  d["variant.max_outer"] = var.max_outer;

  d["pg.L_factor"] = st.pg_L_factor;
  d["pg.stop_grad_tol"] = st.pg_stop_grad_tol;
  d["pg.max_iters"] = st.pg_max_iters;

  d["penalty.eps"] = st.penalty_eps;
  d["penalty.t"] = st.penalty_t;
  d["penalty.use_variant"] = pen.use_variant;
  d["penalty.inner_grad_tol"] = 0.0;
  d["penalty.L_cert"] = pen.L_cert;
  d["penalty.comp_tol"] = pen.comp_tol;

  d["dynamic.rho0"] = dyn.rho0;
  d["dynamic.tau"] = dyn.tau;
  d["dynamic.t"] = dyn.t;
  d["dynamic.eps_final"] = dyn.eps_final;
  d["dynamic.eps0"] = dyn.eps0;
  d["dynamic.max_rounds"] = dyn.max_rounds;

  d["gen.n"] = gen.n;
  d["gen.m"] = gen.m;
  d["gen.k"] = gen.k;
  d["gen.noise_sigma"] = gen.noise_sigma;
  d["gen.box_radius"] = gen.box_radius;
  d["gen.cone_kind"] = "none";
  d["gen.seed"] = gen.seed;
  d["gen.lambda"] = gen.lambda;
  d["gen.cone_rows"] = gen.cone_rows;

  d["verify.tol"] = 1e-8;
  d["verify.match_tol"] = 1e-6;
  d["verify.cone_match_tol"] = 1e-3;
  d["verify.n_cap"] = kDefaultNCap;
  d["verify.fault"] = "none";
  d["verify.t_from_oracle"] = true;
  d["verify.oracle"] = "";

  d["bench.seeds"] = json::array({0, 1, 2});
  d["bench.lambdas"] = json::array({0.1});
  d["bench.L_factors"] = json::array({1.1});
  d["bench.solvers"] = json::array({"iht", "iht-variant"});
  return d;
}

// Values of float-typed keys may be the strings "inf"/"-inf".
bool is_float_key(const json& def) { return def.is_number_float(); }

json coerce(const std::string& key, const json& def, const json& v) {
  const auto bad = [&]() {
    return ParameterError("config key '" + key + "': expected " +
                          std::string(def.type_name()) + ", got " + v.dump());
  };
  if (def.is_boolean()) {
    if (!v.is_boolean()) throw bad();
    return v;
  }
  if (def.is_number_integer() || def.is_number_unsigned()) {
    if (v.is_number_integer() || v.is_number_unsigned()) return v;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) {
        return static_cast<long long>(d);
      }
    }
    throw bad();
  }
  if (is_float_key(def)) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return io::number(io::to_number(v, key));
    throw bad();
  }
  if (def.is_string()) {
    if (!v.is_string()) throw bad();
    return v;
  }
  if (def.is_array()) {
    if (!v.is_array()) throw bad();
    const bool strings = !def.empty() && def[0].is_string();
    json out = json::array();
    for (const json& item : v) {
      if (strings) {
        if (!item.is_string()) throw bad();
        out.push_back(item);
      } else {
        if (!item.is_number()) throw bad();
        out.push_back(item);
      }
    }
    return out;
  }
  throw bad();
}

json parse_scalar(const json& def, const std::string& text) {
  if (def.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    return text;  // rejected by coerce
  }
  if (def.is_string()) return text;
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::assign(const std::string& key, const json& value) {
  if (!values_.contains(key)) {
    throw ParameterError("unknown config key '" + key + "'");
  }
  values_[key] = coerce(key, values_[key], value);
}

void RunConfig::merge_json(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ParameterError("config: expected a JSON object");
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      merge_json(v, key);
    } else {
      assign(key, v);
    }
  }
}

void RunConfig::merge_file(const std::string& path) {
  merge_json(io::read_json(path));
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParameterError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  if (!values_.contains(key)) {
    throw ParameterError("unknown config key '" + key + "'");
  }
  const json& def = values_[key];
  if (def.is_array()) {
    if (!text.empty() && text.front() == '[') {
      assign(key, parse_scalar(json(0), text));
      return;
    }
    const json elem = def.empty() ? json(0.0) : def[0];
    json arr = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(parse_scalar(elem, item));
    assign(key, arr);
    return;
  }
  assign(key, parse_scalar(def, text));
}

void RunConfig::resolve_output_dir() {
  if (!str("output.dir").empty()) return;
  const char* env = std::getenv("L0IHT_OUTPUT_DIR");
  values_["output.dir"] = (env && *env) ? std::string(env) : std::string(".");
}

double RunConfig::num(const std::string& key) const {
  return io::to_number(values_.at(key), key);
}

long RunConfig::integer(const std::string& key) const {
  return values_.at(key).get<long>();
}

bool RunConfig::flag(const std::string& key) const {
  return values_.at(key).get<bool>();
}

std::string RunConfig::str(const std::string& key) const {
  return values_.at(key).get<std::string>();
}

std::vector<double> RunConfig::num_list(const std::string& key) const {
  std::vector<double> out;
  for (const json& v : values_.at(key)) out.push_back(io::to_number(v, key));
  return out;
}

std::vector<std::string> RunConfig::str_list(const std::string& key) const {
  return values_.at(key).get<std::vector<std::string>>();
}

SolverSettings RunConfig::solver_settings() const {
  SolverSettings s;
  s.iht.L_factor = num("iht.L_factor");
  s.iht.zero_tie_to_zero = flag("iht.zero_tie_to_zero");
  s.iht.support_stable_window = static_cast<int>(integer("iht.support_stable_window"));
  s.iht.grad_tol = num("iht.grad_tol");
  s.iht.max_outer = integer("iht.max_outer");

  s.variant.L_min = num("variant.L_min");
  s.variant.L_max = num("variant.L_max");
  s.variant.tau = num("variant.tau");
  s.variant.eta = num("variant.eta");
  s.variant.zero_tie_to_zero = flag("variant.zero_tie_to_zero");
  s.variant.support_stable_window =
      static_cast<int>(integer("variant.support_stable_window"));
  s.variant.grad_tol = num("variant.grad_tol");
  s.variant.max_outer = integer("variant.max_outer");

  s.pg_L_factor = num("pg.L_factor");
  s.pg_stop_grad_tol = num("pg.stop_grad_tol");
  s.pg_max_iters = integer("pg.max_iters");

  s.penalty_eps = num("penalty.eps");
  s.penalty_t = num("penalty.t");
  s.penalty.use_variant = flag("penalty.use_variant");
  s.penalty.iht = s.iht;
  s.penalty.variant = s.variant;
  if (num("penalty.inner_grad_tol") > 0.0) {
    s.penalty.inner_grad_tol = num("penalty.inner_grad_tol");
  }
  s.penalty.L_cert = num("penalty.L_cert");
  s.penalty.comp_tol = num("penalty.comp_tol");

  s.dynamic.rho0 = num("dynamic.rho0");
  s.dynamic.tau = num("dynamic.tau");
  s.dynamic.t = num("dynamic.t");
  s.dynamic.eps_final = num("dynamic.eps_final");
  s.dynamic.eps0 = num("dynamic.eps0");
  s.dynamic.max_rounds = static_cast<int>(integer("dynamic.max_rounds"));

  s.start = start_point_from_string(str("start"));
  return s;
}

InstanceSpec RunConfig::instance_spec() const {
  InstanceSpec s;
  s.n = integer("gen.n");
  s.m = integer("gen.m");
  s.k = integer("gen.k");
  s.noise_sigma = num("gen.noise_sigma");
  s.box_radius = num("gen.box_radius");
  const std::string kind = str("gen.cone_kind");
  if (kind != "none") s.cone_kind = cone_family_from_string(kind);
  const json& seed = values_.at("gen.seed");
  if (seed.is_number_integer() && seed.get<long long>() < 0) {
    throw ParameterError("gen.seed must be >= 0");
  }
  s.seed = seed.get<std::uint64_t>();
  s.lambda = num("gen.lambda");
  s.cone_rows = integer("gen.cone_rows");
  return s;
}

}  // namespace l0iht::cli
