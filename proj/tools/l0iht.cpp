// l0iht command-line tool: gen, solve, verify, bench.
//
// Exit codes: 0 success, 1 input error, 2 iteration cap or failed
// certificate, 3 verification mismatch or broken invariant.

#include "run_config.hpp"

#include "l0iht/oracle.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace l0iht;
using l0iht::cli::RunConfig;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCapped = 2;
constexpr int kExitMismatch = 3;

struct Paths {
  fs::path dir;
  std::string stem;
  fs::path file(const std::string& suffix) const { return dir / (stem + suffix); }
};

Paths output_paths(RunConfig& cfg, const std::string& fallback_stem) {
  cfg.resolve_output_dir();
  Paths p{cfg.str("output.dir"), cfg.str("output.stem")};
  if (p.stem.empty()) p.stem = fallback_stem;
  fs::create_directories(p.dir);
  return p;
}

std::string input_stem(const RunConfig& cfg) {
  return fs::path(cfg.str("input")).stem().string();
}

AnyProblem load_input(const RunConfig& cfg) {
  const std::string path = cfg.str("input");
  if (path.empty()) throw ParameterError("no input problem given");
  return io::load_problem(path);
}

SolverKind pick_solver(const RunConfig& cfg, const AnyProblem& problem) {
  const std::string name = cfg.str("solver");
  if (name == "auto") {
    return std::holds_alternative<ConeL0Problem>(problem)
               ? SolverKind::PenaltyFixed
               : SolverKind::Iht;
  }
  return solver_from_string(name);
}

const char* problem_kind(const AnyProblem& p) {
  return std::holds_alternative<ConeL0Problem>(p) ? "cone" : "box";
}

json outcome_to_json(const RunOutcome& r) {
  json j;
  j["solver"] = to_string(r.solver);
  j["x0"] = io::vector_to_json(r.x0);
  j["report"] = io::report_to_json(r.report);
  j["feas_residual"] = io::number(r.feas_residual);
  if (r.certificate) j["certificate"] = io::certificate_to_json(*r.certificate);
  if (r.pg) j["pg"] = io::pg_result_to_json(*r.pg);
  if (r.fixed) {
    j["penalty"] = {{"rho", io::number(r.fixed->rho)},
                    {"nu", io::number(r.fixed->nu)},
                    {"L_rho", io::number(r.fixed->L_rho)},
                    {"inner_tol", io::number(r.fixed->inner_tol)}};
  }
  if (r.dynamic) {
    json rounds = json::array();
    for (const DynamicRound& d : r.dynamic->rounds) {
      rounds.push_back({{"k", d.k},
                        {"rho", io::number(d.rho)},
                        {"t", io::number(d.t)},
                        {"eps_k", io::number(d.eps_k)},
                        {"feas_residual", io::number(d.feas_residual)},
                        {"grad_norm", io::number(d.grad_norm)},
                        {"inner_iters", d.inner_iters},
                        {"retried", d.retried},
                        {"certificate", io::certificate_to_json(d.certificate)}});
    }
    j["dynamic"] = {{"certified", r.dynamic->certified},
                    {"rounds", std::move(rounds)},
                    {"log", r.dynamic->log}};
  }
  return j;
}

void write_trace(const fs::path& path, const RunOutcome& r) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write '" + path.string() + "'");
  if (r.pg) {
    io::write_pg_trace_csv(os, *r.pg);
  } else if (r.dynamic) {
    io::write_dynamic_trace_csv(os, *r.dynamic);
  } else {
    io::write_trace_csv(os, r.report);
  }
}

void write_summary_csv(const fs::path& path, const RunOutcome& r) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write '" + path.string() + "'");
  os << "solver,status,F_value,f_value,outer_iters,inner_iters_total,"
        "support_changes,nnz,feas_residual,certificate_holds\n";
  os << to_string(r.solver) << ',' << to_string(r.report.status) << ','
     << io::format_double(r.report.F_value) << ','
     << io::format_double(r.report.f_value) << ',' << r.report.outer_iters
     << ',' << r.report.inner_iters_total << ',' << r.report.support_changes
     << ',' << count_nonzeros(r.report.x_star) << ','
     << io::format_double(r.feas_residual) << ','
     << (r.certificate ? (r.certificate->holds ? "1" : "0") : "") << '\n';
}

// ---------------------------------------------------------------- gen

int cmd_gen(RunConfig& cfg) {
  const InstanceSpec spec = cfg.instance_spec();
  const Paths out = output_paths(cfg, "instance_s" + std::to_string(spec.seed));
  json problem, sidecar;
  sidecar["config"] = cfg.values();
  if (spec.cone_kind) {
    const ConeInstance inst = gen_cone(spec);
    problem = io::problem_to_json(inst.problem);
    sidecar["x_true"] = io::vector_to_json(inst.x_true);
    sidecar["seed"] = spec.seed;
    sidecar["seed_used"] = inst.seed_used;
    sidecar["log"] = inst.log;
    for (const auto& line : inst.log) std::cerr << "gen: " << line << '\n';
  } else {
    const LeastSquaresInstance inst = gen_least_squares(spec);
    problem = io::problem_to_json(inst.problem);
    sidecar["x_true"] = io::vector_to_json(inst.x_true);
    sidecar["seed"] = spec.seed;
    sidecar["seed_used"] = spec.seed;
    sidecar["log"] = json::array();
  }
  sidecar["spec"] = {{"n", spec.n},
                     {"m", spec.m},
                     {"k", spec.k},
                     {"noise_sigma", spec.noise_sigma},
                     {"box_radius", io::number(spec.box_radius)},
                     {"cone_kind", spec.cone_kind ? to_string(*spec.cone_kind) : "none"},
                     {"seed", spec.seed},
                     {"lambda", spec.lambda},
                     {"cone_rows", spec.cone_rows}};
  io::write_json(out.file(".json").string(), problem);
  io::write_json(out.file(".sidecar.json").string(), sidecar);
  std::cout << out.file(".json").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- solve

int cmd_solve(RunConfig& cfg) {
  const AnyProblem problem = load_input(cfg);
  const SolverKind solver = pick_solver(cfg, problem);
  const std::string format = cfg.str("output.format");
  if (format != "json" && format != "csv") {
    throw ParameterError("output.format must be json or csv");
  }
  const SolverSettings settings = cfg.solver_settings();
  const Paths out = output_paths(cfg, input_stem(cfg));

  const RunOutcome r = run_solver(problem, solver, settings);

  if (format == "json") {
    json doc;
    doc["config"] = cfg.values();
    doc["problem"] = {{"kind", problem_kind(problem)},
                      {"n", r.report.x_star.size()}};
    doc["result"] = outcome_to_json(r);
    io::write_json(out.file(".report.json").string(), doc);
  } else {
    write_summary_csv(out.file(".report.csv"), r);
  }
  write_trace(out.file(".trace.csv"), r);
  std::cout << to_string(solver) << ": " << to_string(r.report.status)
            << " F=" << io::format_double(r.report.F_value);
  if (r.certificate) {
    std::cout << " certificate=" << (r.certificate->holds ? "holds" : "fails");
  }
  std::cout << '\n';
  return r.success() ? kExitOk : kExitCapped;
}

// ---------------------------------------------------------------- verify

struct InvariantLog {
  json checks = json::object();
  bool all = true;
  void record(const std::string& name, bool ok) {
    checks[name] = ok;
    all = all && ok;
  }
};

int cmd_verify(RunConfig& cfg) {
  const AnyProblem problem = load_input(cfg);
  const SolverKind solver = pick_solver(cfg, problem);
  const auto n_cap = static_cast<int>(cfg.integer("verify.n_cap"));
  const Index n = std::visit([](const auto& p) { return p.dim(); }, problem);
  if (n > n_cap) {
    throw ParameterError("verify: n = " + std::to_string(n) +
                         " exceeds verify.n_cap = " + std::to_string(n_cap));
  }
  const std::string fault = cfg.str("verify.fault");
  if (fault != "none" && fault != "invert_threshold") {
    throw ParameterError("verify.fault must be none or invert_threshold");
  }
  const double tol = cfg.num("verify.tol");
  const bool cone = std::holds_alternative<ConeL0Problem>(problem);
  const Paths out = output_paths(cfg, input_stem(cfg));

  EnumerationResult oracle;
  if (!cfg.str("verify.oracle").empty()) {
    oracle = io::enumeration_from_json(io::read_json(cfg.str("verify.oracle")));
    if (oracle.records.size() != (std::size_t{1} << n)) {
      throw ParameterError("verify.oracle: record count does not match n");
    }
  } else if (cone) {
    oracle = enumerate_cone(std::get<ConeL0Problem>(problem), tol, n_cap);
  } else {
    oracle = enumerate_box(std::get<L0Problem>(problem), tol, n_cap);
  }
  io::write_json(out.file(".oracle.json").string(),
                 io::enumeration_to_json(oracle));

  SolverSettings st = cfg.solver_settings();
  if (cone && cfg.flag("verify.t_from_oracle") && oracle.t_hat) {
    const double t = std::max(2.0 * *oracle.t_hat, 1e-3);
    st.penalty_t = t;
    st.dynamic.t = t;
  }
  st.hooks.invert_threshold = fault == "invert_threshold";

  // Per-iterate checks on box solvers.
  const L0Problem* box = std::get_if<L0Problem>(&problem);
  double delta = 0.0;
  if (box && box->lambda > 0.0 && !is_cone_solver(solver) &&
      solver != SolverKind::Pg) {
    if (solver == SolverKind::Iht) {
      delta = delta_lower_bound(box->box, box->lambda,
                                st.iht.L_factor * box->objective.lipschitz())
                  .delta;
    } else {
      const double Lbar = std::max(
          st.variant.L_min,
          st.variant.tau * (box->objective.lipschitz() + st.variant.eta));
      delta = delta_lower_bound(box->box, box->lambda, Lbar).delta;
    }
  }
  bool floor_ok = true;
  bool jump_ok = true;
  if (delta > 0.0 && std::isfinite(delta)) {
    st.hooks.observer = [&](const StepEvent& e) {
      for (Index i = 0; i < e.x_next.size(); ++i) {
        if (e.x_next(i) != 0.0 && std::abs(e.x_next(i)) < delta - 1e-10) {
          floor_ok = false;
        }
      }
      if (e.support_changed && (e.x_next - e.x_prev).norm() < delta - 1e-10) {
        jump_ok = false;
      }
    };
  }

  InvariantLog inv;
  json doc;
  doc["config"] = cfg.values();
  doc["problem"] = {{"kind", problem_kind(problem)}, {"n", n}};
  RunOutcome r;
  try {
    r = run_solver(problem, solver, st);
  } catch (const InvariantViolation& e) {
    inv.record("solver_invariants", false);
    doc["error"] = e.what();
    doc["invariants"] = inv.checks;
    doc["passed"] = false;
    io::write_json(out.file(".verify.json").string(), doc);
    std::cerr << "verify: " << e.what() << '\n';
    return kExitMismatch;
  }

  const bool capped = r.report.status != SolveStatus::Converged;
  const double match_tol =
      cone ? cfg.num("verify.cone_match_tol") : cfg.num("verify.match_tol");
  const OracleMatch m = nearest_local_min(oracle, r.report.x_star);
  const bool matched = m.distance <= match_tol && m.support_equal;

  if (!is_cone_solver(solver)) {
    inv.record("descent", r.report.descent_violations == 0);
    inv.record("magnitude_floor", floor_ok);
    inv.record("support_change_jump", jump_ok);
    inv.record("above_global", r.report.F_value >= oracle.F_global - 1e-9);
    if (solver == SolverKind::IhtVariant) {
      inv.record("inner_cap", r.report.max_inner_per_outer <= r.report.inner_cap);
    }
    if (box && solver != SolverKind::Pg && delta > 0.0 && std::isfinite(delta)) {
      const double drop_coef =
          solver == SolverKind::Iht
              ? (st.iht.L_factor - 1.0) * box->objective.lipschitz()
              : st.variant.eta;
      const double budget = std::floor(2.0 * (r.report.F_initial - oracle.F_global) /
                                        (drop_coef * delta * delta) + 1e-9);
      inv.record("support_change_budget",
                 static_cast<double>(r.report.support_changes) <= budget);
      doc["support_change_budget"] = io::number(budget);
    }
    if (box && box->lambda == 0.0) {
      SolverSettings pst = st;
      pst.hooks = {};
      const RunOutcome pg = run_solver(problem, SolverKind::Pg, pst);
      inv.record("matches_pg",
                 (pg.report.x_star - r.report.x_star).norm() <= match_tol);
    }
  } else {
    inv.record("certificate", r.certificate && r.certificate->holds);
    if (r.dynamic) {
      bool decay = true;
      for (const DynamicRound& d : r.dynamic->rounds) {
        decay = decay && d.feas_residual <= d.t / d.rho + 1e-9;
      }
      inv.record("feasibility_decay", decay);
    }
  }

  doc["result"] = outcome_to_json(r);
  doc["oracle"] = {{"F_star", io::number(oracle.F_global)},
                   {"global_mask", oracle.global_mask},
                   {"locals", oracle.locals.size()},
                   {"t_hat", oracle.t_hat ? io::number(*oracle.t_hat) : json(nullptr)}};
  doc["match"] = {{"mask", m.mask},
                  {"distance", io::number(m.distance)},
                  {"support_equal", m.support_equal},
                  {"tol", match_tol},
                  {"matched", matched}};
  doc["invariants"] = inv.checks;
  const bool passed = matched && inv.all && !capped;
  doc["passed"] = passed;
  io::write_json(out.file(".verify.json").string(), doc);

  std::cout << "verify " << to_string(solver) << ": distance="
            << io::format_double(m.distance)
            << " support_equal=" << (m.support_equal ? "yes" : "no")
            << " invariants=" << (inv.all ? "ok" : "broken") << '\n';
  if (!matched || !inv.all) return kExitMismatch;
  return capped ? kExitCapped : kExitOk;
}

// ---------------------------------------------------------------- bench

int cmd_bench(RunConfig& cfg) {
  const InstanceSpec base = cfg.instance_spec();
  const std::vector<double> seeds = cfg.num_list("bench.seeds");
  const std::vector<double> lambdas = cfg.num_list("bench.lambdas");
  const std::vector<double> factors = cfg.num_list("bench.L_factors");
  std::vector<SolverKind> solvers;
  for (const auto& s : cfg.str_list("bench.solvers")) {
    solvers.push_back(solver_from_string(s));
    if (is_cone_solver(solvers.back()) != base.cone_kind.has_value()) {
      throw ParameterError("bench: solver '" + s +
                           "' does not fit gen.cone_kind = " +
                           cfg.str("gen.cone_kind"));
    }
  }
  for (double s : seeds) {
    if (s < 0 || std::floor(s) != s) {
      throw ParameterError("bench.seeds must be nonnegative integers");
    }
  }
  const SolverSettings settings = cfg.solver_settings();
  const Paths out = output_paths(cfg, "bench");

  std::ofstream os(out.file(".csv"));
  if (!os) throw ParameterError("cannot write bench CSV");
  os << "# config " << cfg.values().dump() << '\n';
  os << "seed,lambda,L_factor,solver,outer_iters,inner_iters,support_changes,"
        "F,feas_residual,wall_ms,max_inner_per_outer,inner_cap\n";

  bool cap_ok = true;
  long rows = 0;
  for (double seed : seeds) {
    for (double lambda : lambdas) {
      InstanceSpec spec = base;
      spec.seed = static_cast<std::uint64_t>(seed);
      spec.lambda = lambda;
      AnyProblem problem = spec.cone_kind
                               ? AnyProblem(gen_cone(spec).problem)
                               : AnyProblem(gen_least_squares(spec).problem);
      for (double factor : factors) {
        for (SolverKind solver : solvers) {
          SolverSettings st = settings;
          st.iht.L_factor = factor;
          st.penalty.iht.L_factor = factor;
          const RunOutcome r = run_solver(problem, solver, st);
          const bool variant_inner =
              solver == SolverKind::IhtVariant ||
              (is_cone_solver(solver) && st.penalty.use_variant);
          if (variant_inner && r.report.inner_cap > 0 &&
              r.report.max_inner_per_outer > r.report.inner_cap) {
            cap_ok = false;
          }
          os << spec.seed << ',' << io::format_double(lambda) << ','
             << io::format_double(factor) << ',' << to_string(solver) << ','
             << r.report.outer_iters << ',' << r.report.inner_iters_total << ','
             << r.report.support_changes << ','
             << io::format_double(r.report.F_value) << ','
             << io::format_double(r.feas_residual) << ','
             << io::format_double(r.wall_ms) << ','
             << r.report.max_inner_per_outer << ',' << r.report.inner_cap
             << '\n';
          ++rows;
        }
      }
    }
  }
  std::cout << out.file(".csv").string() << ": " << rows << " rows\n";
  if (!cap_ok) {
    std::cerr << "bench: inner-iteration cap exceeded\n";
    return kExitMismatch;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative hard thresholding for l0-regularized problems"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string input;
  };
  Common common;

  auto add_common = [&](CLI::App* sub, bool with_input) {
    sub->add_option("--config", common.config, "JSON config file");
    sub->add_option("--set", common.sets, "Override: key=value")
        ->take_all();
    if (with_input) sub->add_option("input", common.input, "Problem JSON file");
  };
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  CLI::App* solve = app.add_subcommand("solve", "Solve a problem file");
  CLI::App* verify =
      app.add_subcommand("verify", "Solve and compare with the enumeration oracle");
  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark grid");
  add_common(gen, false);
  add_common(solve, true);
  add_common(verify, true);
  add_common(bench, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    RunConfig cfg;
    if (!common.config.empty()) cfg.merge_file(common.config);
    for (const auto& s : common.sets) cfg.set(s);
    if (!common.input.empty()) cfg.set("input=" + common.input);
    if (gen->parsed()) return cmd_gen(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    return cmd_bench(cfg);
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCapped;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
